use std::path::Path;

use loire::bench::{run_rrf, BenchmarkReport, DenseNoise, LambdaChoice, LowRankShape, RrfRunParams, SimSpec};
use loire::factorization::DEFAULT_MAX_ITER;

use super::{nonnegative, positive, RunConfig};
use crate::args::{MatrixMethod, NoiseKind, SimulateArgs};
use crate::error::{CliError, CliResult};

fn specs(args: &SimulateArgs) -> CliResult<Vec<SimSpec>> {
    if args.sizes.is_empty() || args.sizes.contains(&0) {
        return Err(CliError::usage("--n needs one or more sizes >= 1"));
    }
    if args.runs == 0 {
        return Err(CliError::usage("--runs must be at least 1"));
    }
    if args.seed.checked_add(args.runs - 1).is_none() {
        return Err(CliError::usage("--seed + --runs overflows"));
    }
    nonnegative("--dense-scale", args.dense_scale)?;
    if let Some(mult) = args.lambda_mult {
        positive("--lambda-mult", mult)?;
    }
    let mut out = Vec::new();
    for &n in &args.sizes {
        for seed in args.seed..args.seed + args.runs {
            let spec = SimSpec {
                n,
                rank_frac: args.rank_frac,
                dense_noise_scale: args.dense_scale,
                spike_amplitude: args.amplitude,
                spike_density: args.density,
                seed,
                noise: match args.noise {
                    NoiseKind::Uniform => DenseNoise::Uniform,
                    NoiseKind::Gaussian => DenseNoise::Gaussian,
                },
                low_rank: if args.asymmetric {
                    LowRankShape::Asymmetric
                } else {
                    LowRankShape::Symmetric
                },
            };
            spec.validate().map_err(|e| CliError::usage(e.to_string()))?;
            out.push(spec);
        }
    }
    Ok(out)
}

/// Without --lambda, shrink at the dense noise span (uniform) or four
/// deviations (gaussian), so pure noise is left in the low-rank part.
pub fn default_lambda_choice(args: &SimulateArgs) -> LambdaChoice {
    let span = match args.noise {
        NoiseKind::Uniform => args.dense_scale,
        NoiseKind::Gaussian => 4.0 * args.dense_scale.sqrt(),
    };
    match args.lambda_mult {
        Some(mult) => LambdaChoice::Scaled(mult),
        None if span > 0.0 => LambdaChoice::Fixed(1.0 / span),
        None => LambdaChoice::Scaled(20.0),
    }
}

pub fn run(args: &SimulateArgs) -> CliResult<Vec<BenchmarkReport>> {
    let cfg = RunConfig::from_flags(&args.solver, &args.output)?;
    let specs = specs(args)?;
    cfg.prepare_out()?;
    let params = RrfRunParams {
        lambda: match cfg.lambda {
            Some(l) => LambdaChoice::Fixed(l),
            None => default_lambda_choice(args),
        },
        tol: cfg.tol,
        max_iter: cfg.max_iter.unwrap_or(DEFAULT_MAX_ITER),
        zero_tol: cfg.zero_tol,
    };
    let mut rows = Vec::new();
    for spec in &specs {
        for method in dedup(&args.method) {
            match method {
                MatrixMethod::Rrf => {
                    let mut run = run_rrf(spec, &params)?;
                    if !cfg.timing {
                        run.report.wall_time_s = 0.0;
                    }
                    rows.push(run.report);
                }
            }
        }
    }
    write_report(&cfg.out.join("report.csv"), &rows)?;
    Ok(rows)
}

fn dedup(methods: &[MatrixMethod]) -> Vec<MatrixMethod> {
    let mut out: Vec<MatrixMethod> = Vec::new();
    for m in methods {
        if !out.contains(m) {
            out.push(*m);
        }
    }
    out
}

pub fn write_report(path: &Path, rows: &[BenchmarkReport]) -> CliResult<()> {
    let err = |e: csv::Error| CliError::data(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_report(path: &Path) -> CliResult<Vec<BenchmarkReport>> {
    let err = |e: csv::Error| CliError::data(format!("{}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    r.deserialize().map(|row| row.map_err(err)).collect()
}
