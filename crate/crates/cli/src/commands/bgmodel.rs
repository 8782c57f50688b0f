use std::path::PathBuf;

use loire::bench::default_matrix_zero_tol;
use loire::factorization::{default_lambda, default_tol, DEFAULT_MAX_ITER};
use loire::{rrf_solve, FactorizationConfig};
use serde::{Deserialize, Serialize};

use super::{create_dir, positive, write_json, RunConfig};
use crate::args::BgmodelArgs;
use crate::error::{CliError, CliResult};
use crate::frames::FrameStack;
use crate::pgm::Pgm;

/// Contents of `timing.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BgReport {
    pub frames: usize,
    pub width: usize,
    pub height: usize,
    pub rank: usize,
    pub lambda: f64,
    pub tol: f64,
    pub iterations: usize,
    pub converged: bool,
    pub foreground_scale: f64,
    pub wall_time_s: f64,
}

fn frame_paths(pattern: &str) -> CliResult<Vec<PathBuf>> {
    let paths = glob::glob(pattern).map_err(|e| CliError::usage(format!("bad frame pattern '{pattern}': {e}")))?;
    let mut out = Vec::new();
    for p in paths {
        let p = p.map_err(|e| CliError::io(e.path(), std::io::Error::other(e.to_string())))?;
        if p.is_file() {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

/// `|B|` value mapped to 255: the 99th percentile (nearest rank), falling
/// back to the maximum when that is zero, and to 1 for an all-zero `B`.
pub fn foreground_scale(abs_values: &mut [f64]) -> f64 {
    if abs_values.is_empty() {
        return 1.0;
    }
    abs_values.sort_by(f64::total_cmp);
    let rank = ((0.99 * abs_values.len() as f64).ceil() as usize).clamp(1, abs_values.len());
    let p99 = abs_values[rank - 1];
    let max = abs_values[abs_values.len() - 1];
    if p99 > 0.0 {
        p99
    } else if max > 0.0 {
        max
    } else {
        1.0
    }
}

pub fn run(args: &BgmodelArgs) -> CliResult<BgReport> {
    let cfg = RunConfig::from_flags(&args.solver, &args.output)?;
    positive("--lambda-mult", args.lambda_mult)?;
    if args.rank == 0 {
        return Err(CliError::usage("--rank must be at least 1"));
    }
    let paths = frame_paths(&args.frames)?;
    if paths.len() < 2 {
        return Err(CliError::data(format!(
            "pattern '{}' matched {} frame(s); need at least 2",
            args.frames,
            paths.len()
        )));
    }
    let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
    let frames = paths.iter().map(|p| Pgm::read(p)).collect::<CliResult<Vec<_>>>()?;
    let stack = FrameStack::from_frames(&frames, &names)?;
    let y = &stack.matrix;
    let max_rank = y.rows().min(y.cols());
    if args.rank > max_rank {
        return Err(CliError::usage(format!("--rank {} exceeds {max_rank}", args.rank)));
    }
    let lambda = match cfg.lambda {
        Some(l) => l,
        None => default_lambda(y, args.lambda_mult)?,
    };
    let tol = cfg.tol.unwrap_or_else(|| default_tol(y));
    let fcfg = FactorizationConfig::new(args.rank, lambda, tol, cfg.max_iter.unwrap_or(DEFAULT_MAX_ITER))?;
    let (res, secs) = cfg.timed(|| rrf_solve(y, &fcfg));
    let sol = res?;
    let zero_tol = cfg.zero_tol.unwrap_or_else(|| default_matrix_zero_tol(y));

    let background = sol.low_rank();
    let mut mags: Vec<f64> = sol.b.iter().map(|v| v.abs()).collect();
    let scale = foreground_scale(&mut mags);
    let dirs = ["background", "foreground", "mask"].map(|d| cfg.out.join(d));
    for d in &dirs {
        create_dir(d)?;
    }
    for (j, path) in paths.iter().enumerate() {
        let name = path.file_name().expect("glob yields file paths");
        stack.column_to_frame(&background, j)?.write(&dirs[0].join(name))?;
        stack
            .column_to_frame_with(&sol.b, j, |v| v.abs() / scale * 255.0)?
            .write(&dirs[1].join(name))?;
        stack
            .column_to_frame_with(&sol.b, j, |v| if v.abs() > zero_tol { 255.0 } else { 0.0 })?
            .write(&dirs[2].join(name))?;
    }
    let report = BgReport {
        frames: stack.frames(),
        width: stack.width,
        height: stack.height,
        rank: args.rank,
        lambda,
        tol,
        iterations: sol.iterations,
        converged: sol.converged,
        foreground_scale: scale,
        wall_time_s: secs,
    };
    write_json(&cfg.out.join("timing.json"), &report)?;
    Ok(report)
}
