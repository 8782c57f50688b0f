//! Binary 8-bit greymaps (`P5`).

use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major samples, `height * width` bytes.
    pub pixels: Vec<u8>,
    /// The header exactly as read, so an untouched image writes back byte
    /// for byte.
    header: Vec<u8>,
}

impl Pgm {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> CliResult<Self> {
        if pixels.len() != width * height {
            return Err(CliError::data(format!(
                "{width}x{height} image needs {} samples, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            maxval: 255,
            pixels,
            header: format!("P5\n{width} {height}\n255\n").into_bytes(),
        })
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, String> {
        if bytes.len() < 2 || &bytes[..2] != b"P5" {
            return Err("not a binary PGM (missing P5 magic)".into());
        }
        let mut pos = 2;
        let mut fields = [0usize; 3];
        for (k, name) in ["width", "height", "maxval"].iter().enumerate() {
            skip_space_and_comments(bytes, &mut pos);
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if start == pos {
                return Err(format!("missing {name} in header"));
            }
            fields[k] = std::str::from_utf8(&bytes[start..pos])
                .unwrap()
                .parse()
                .map_err(|_| format!("{name} out of range"))?;
        }
        // exactly one whitespace byte separates the header from the raster
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err("header not terminated by whitespace".into());
        }
        pos += 1;
        let [width, height, maxval] = fields;
        if width == 0 || height == 0 {
            return Err("zero-sized image".into());
        }
        if maxval == 0 || maxval > 255 {
            return Err(format!("maxval {maxval} unsupported; only 8-bit images are read"));
        }
        let n = width * height;
        let raster = &bytes[pos..];
        if raster.len() < n {
            return Err(format!("truncated raster: need {n} bytes, found {}", raster.len()));
        }
        Ok(Self {
            width,
            height,
            maxval: maxval as u16,
            pixels: raster[..n].to_vec(),
            header: bytes[..pos].to_vec(),
        })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&bytes).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.header.clone();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| CliError::io(path, e))
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }
}

fn skip_space_and_comments(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() {
        if bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        } else if bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
}
