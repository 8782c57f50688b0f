#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use loire_cli::pgm::Pgm;

pub fn loire(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loire"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn write_frames(dir: &Path, frames: &[Pgm]) {
    for (k, f) in frames.iter().enumerate() {
        f.write(&dir.join(format!("frame{k:03}.pgm"))).unwrap();
    }
}

/// Static textured 32x32 background with a bright 6x6 square moving
/// across it. Truth entries are (column-major pixel index, frame).
pub fn moving_square(frames: usize) -> (Vec<Pgm>, BTreeSet<(usize, usize)>) {
    let (w, h) = (32, 32);
    let mut out = Vec::new();
    let mut truth = BTreeSet::new();
    for f in 0..frames {
        let (r0, c0) = (4 + f / 2, 1 + f);
        let mut px = vec![0u8; w * h];
        for r in 0..h {
            for c in 0..w {
                let inside = (r0..r0 + 6).contains(&r) && (c0..c0 + 6).contains(&c);
                let v = if inside {
                    truth.insert((c * h + r, f));
                    255
                } else {
                    50 + 3 * r + 2 * c + if (r / 4 + c / 4) % 2 == 0 { 10 } else { 0 }
                };
                px[r * w + c] = v as u8;
            }
        }
        out.push(Pgm::new(w, h, px).unwrap());
    }
    (out, truth)
}

/// Mask hits and the largest per-pixel background spread over a
/// `bgmodel` output directory for 32x32 frames named `frameNNN.pgm`.
pub fn score_bgmodel(out_dir: &Path, frames: usize) -> (BTreeSet<(usize, usize)>, u8) {
    let mut detected = BTreeSet::new();
    let mut backgrounds = Vec::new();
    for f in 0..frames {
        let name = format!("frame{f:03}.pgm");
        let mask = Pgm::read(&out_dir.join("mask").join(&name)).unwrap();
        for r in 0..32 {
            for c in 0..32 {
                if mask.get(r, c) == 255 {
                    detected.insert((c * 32 + r, f));
                }
            }
        }
        backgrounds.push(Pgm::read(&out_dir.join("background").join(&name)).unwrap());
    }
    let mut spread = 0u8;
    for i in 0..32 * 32 {
        let vals: Vec<u8> = backgrounds.iter().map(|b| b.pixels[i]).collect();
        spread = spread.max(vals.iter().max().unwrap() - vals.iter().min().unwrap());
    }
    (detected, spread)
}
