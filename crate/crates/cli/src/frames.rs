use loire::DenseMatrix;

use crate::error::{CliError, CliResult};
use crate::pgm::Pgm;

/// Frames stacked as columns. Pixel `(r, c)` of a frame sits at row
/// `c * height + r` of its column (column-major vectorization).
#[derive(Debug, Clone, PartialEq)]
pub struct FrameStack {
    pub width: usize,
    pub height: usize,
    pub matrix: DenseMatrix,
}

impl FrameStack {
    /// `names` label the frames in diagnostics.
    pub fn from_frames(frames: &[Pgm], names: &[String]) -> CliResult<Self> {
        let first = frames
            .first()
            .ok_or_else(|| CliError::data("no frames to stack"))?;
        let (width, height) = (first.width, first.height);
        let pixels = width * height;
        let mut data = Vec::with_capacity(pixels * frames.len());
        for (k, f) in frames.iter().enumerate() {
            if f.width != width || f.height != height {
                return Err(CliError::data(format!(
                    "{}: frame is {}x{}, expected {width}x{height} like {}",
                    names.get(k).map_or("?", String::as_str),
                    f.width,
                    f.height,
                    names.first().map_or("?", String::as_str),
                )));
            }
            for c in 0..width {
                for r in 0..height {
                    data.push(f64::from(f.get(r, c)));
                }
            }
        }
        let matrix = DenseMatrix::from_column_major(pixels, frames.len(), data)?;
        Ok(Self {
            width,
            height,
            matrix,
        })
    }

    pub fn frames(&self) -> usize {
        self.matrix.cols()
    }

    /// Column `j` of any `width * height`-row matrix as an image, rounding
    /// and clamping to `[0, 255]`.
    pub fn column_to_frame(&self, m: &DenseMatrix, j: usize) -> CliResult<Pgm> {
        self.column_to_frame_with(m, j, |v| v)
    }

    pub fn column_to_frame_with(
        &self,
        m: &DenseMatrix,
        j: usize,
        map: impl Fn(f64) -> f64,
    ) -> CliResult<Pgm> {
        let mut pixels = vec![0u8; self.width * self.height];
        for c in 0..self.width {
            for r in 0..self.height {
                let v = map(m[(c * self.height + r, j)]);
                pixels[r * self.width + c] = v.round().clamp(0.0, 255.0) as u8;
            }
        }
        Pgm::new(self.width, self.height, pixels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stacking_is_column_major_and_round_trips() {
        let a = Pgm::new(3, 2, vec![1, 2, 3, 4, 5, 6]).unwrap();
        let b = Pgm::new(3, 2, vec![6, 5, 4, 3, 2, 1]).unwrap();
        let names = vec!["a".to_string(), "b".to_string()];
        let stack = FrameStack::from_frames(&[a.clone(), b.clone()], &names).unwrap();
        assert_eq!(stack.matrix.rows(), 6);
        // pixel (1, 0) of frame a is 4, at row 0 * 2 + 1
        assert_eq!(stack.matrix[(1, 0)], 4.0);
        assert_eq!(stack.matrix[(2, 0)], 2.0);
        assert_eq!(stack.column_to_frame(&stack.matrix, 0).unwrap(), a);
        assert_eq!(stack.column_to_frame(&stack.matrix, 1).unwrap(), b);
    }

    #[test]
    fn size_mismatch_names_the_file() {
        let a = Pgm::new(2, 2, vec![0; 4]).unwrap();
        let b = Pgm::new(2, 1, vec![0; 2]).unwrap();
        let names = vec!["one.pgm".to_string(), "two.pgm".to_string()];
        let err = FrameStack::from_frames(&[a, b], &names).unwrap_err();
        assert!(err.to_string().starts_with("two.pgm:"), "{err}");
    }
}
