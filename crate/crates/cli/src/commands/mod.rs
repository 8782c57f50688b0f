pub mod bgmodel;
pub mod regress;
pub mod simulate;
pub mod version;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::args::{OutputFlags, SolverFlags};
use crate::error::{CliError, CliResult};

/// Solver and output settings after validation. Unset solver values are
/// resolved per problem by each subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lambda: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub zero_tol: Option<f64>,
    pub out: PathBuf,
    pub timing: bool,
}

impl RunConfig {
    pub fn from_flags(solver: &SolverFlags, output: &OutputFlags) -> CliResult<Self> {
        if let Some(l) = solver.lambda {
            positive("--lambda", l)?;
        }
        if let Some(t) = solver.tol {
            positive("--tol", t)?;
        }
        if solver.max_iter == Some(0) {
            return Err(CliError::usage("--max-iter must be at least 1"));
        }
        if let Some(z) = solver.zero_tol {
            nonnegative("--zero-tol", z)?;
        }
        Ok(Self {
            lambda: solver.lambda,
            tol: solver.tol,
            max_iter: solver.max_iter,
            zero_tol: solver.zero_tol,
            out: output.out.clone(),
            timing: !output.no_timing,
        })
    }

    pub fn prepare_out(&self) -> CliResult<()> {
        create_dir(&self.out)
    }

    /// Runs `f`, returning its value and the elapsed seconds (0 when timing
    /// is off).
    pub fn timed<T>(&self, f: impl FnOnce() -> T) -> (T, f64) {
        let start = Instant::now();
        let value = f();
        let secs = if self.timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        };
        (value, secs)
    }
}

pub(crate) fn positive(flag: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::usage(format!("{flag} must be a positive number, got {v}")))
    }
}

pub(crate) fn nonnegative(flag: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(CliError::usage(format!("{flag} must be a number >= 0, got {v}")))
    }
}

pub(crate) fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub(crate) fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
