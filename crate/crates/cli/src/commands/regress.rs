use std::collections::BTreeSet;
use std::path::Path;

use loire::bench::{baseline_lad, baseline_ols};
use loire::bernoulli::{default_zero_tol, enumeration_count, support_of, ORACLE_ENUMERATION_LIMIT};
use loire::loire::{default_lambda, default_tol, DEFAULT_MAX_ITER};
use loire::{app_bem, bernoulli_oracle, loire_solve, DenseVector, LoireConfig, OracleConfig, SupportSet};
use serde::{Deserialize, Serialize};

use super::{nonnegative, positive, write_json, RunConfig};
use crate::args::{RegressArgs, RegressMethod};
use crate::dataset::Dataset;
use crate::error::{CliError, CliResult};

pub const LAD_MAX_ITER: usize = 10_000;

/// One entry of `solution.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSolution {
    pub method: String,
    pub x: Vec<f64>,
    /// Outlier vector; all zeros for methods without one.
    pub b: Vec<f64>,
    /// 1-based data rows flagged as outliers.
    pub support: Vec<usize>,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time_s: f64,
}

struct Validated {
    cfg: RunConfig,
    methods: Vec<RegressMethod>,
    radius: Option<f64>,
}

fn validate(args: &RegressArgs) -> CliResult<Validated> {
    let cfg = RunConfig::from_flags(&args.solver, &args.output)?;
    positive("--rho", args.rho)?;
    if let Some(r) = args.radius {
        nonnegative("--radius", r)?;
    }
    let mut seen = BTreeSet::new();
    let methods: Vec<RegressMethod> = args
        .method
        .iter()
        .copied()
        .filter(|m| seen.insert(m.name()))
        .collect();
    if methods.contains(&RegressMethod::Oracle) && args.radius.is_none() {
        return Err(CliError::usage("--method oracle needs --radius"));
    }
    Ok(Validated {
        cfg,
        methods,
        radius: args.radius,
    })
}

pub fn run(args: &RegressArgs) -> CliResult<Vec<MethodSolution>> {
    let v = validate(args)?;
    let data = Dataset::read(&args.csv)?;
    let design = data.design(&args.target, args.intercept)?;
    let (a, y) = (&design.a, &design.y);
    let m = a.rows();
    let oracle_cfg = if v.methods.contains(&RegressMethod::Oracle) {
        let k = args.max_support.unwrap_or(m);
        if k > m {
            return Err(CliError::usage(format!("--max-support {k} exceeds the {m} data rows")));
        }
        let count = enumeration_count(m, k);
        if count > ORACLE_ENUMERATION_LIMIT {
            return Err(CliError::usage(format!(
                "oracle refused: {m} rows with supports up to {k} give {count} candidates \
                 (limit {ORACLE_ENUMERATION_LIMIT}); lower --max-support"
            )));
        }
        Some(OracleConfig::new(v.radius.unwrap_or(0.0), k)?)
    } else {
        None
    };
    v.cfg.prepare_out()?;

    let mut out = Vec::new();
    for method in &v.methods {
        let sol = match method {
            RegressMethod::Loire | RegressMethod::Appbem => {
                let lambda = match v.cfg.lambda {
                    Some(l) => l,
                    None => default_lambda(a, y)?,
                };
                let lcfg = LoireConfig::new(
                    lambda,
                    v.cfg.tol.unwrap_or_else(|| default_tol(y)),
                    v.cfg.max_iter.unwrap_or(DEFAULT_MAX_ITER),
                )?;
                let zero_tol = v.cfg.zero_tol.unwrap_or_else(|| default_zero_tol(y));
                if *method == RegressMethod::Loire {
                    let (res, secs) = v.cfg.timed(|| loire_solve(a, y, &lcfg));
                    let s = res?;
                    let support = support_of(&s.b, zero_tol);
                    MethodSolution {
                        method: method.name().into(),
                        x: s.x.to_vec(),
                        b: s.b.to_vec(),
                        support: one_based(&support),
                        objective_trace: s.objective_trace,
                        iterations: s.iterations,
                        converged: s.converged,
                        wall_time_s: secs,
                    }
                } else {
                    let (res, secs) = v.cfg.timed(|| app_bem(a, y, &lcfg, zero_tol));
                    let s = res.map_err(|e| match e {
                        loire::Error::AllOutliers(n) => CliError::data(format!(
                            "appbem flagged all {n} rows as outliers; try a smaller --lambda"
                        )),
                        other => other.into(),
                    })?;
                    let stage = s.loire.expect("appbem keeps its first stage");
                    MethodSolution {
                        method: method.name().into(),
                        x: s.x.to_vec(),
                        b: s.b.to_vec(),
                        support: one_based(&s.support),
                        objective_trace: stage.objective_trace,
                        iterations: stage.iterations,
                        converged: stage.converged,
                        wall_time_s: secs,
                    }
                }
            }
            RegressMethod::Ols => {
                let (res, secs) = v.cfg.timed(|| baseline_ols(a, y));
                plain(method.name(), res?, m, 0, true, secs)
            }
            RegressMethod::Lad => {
                let tol = v.cfg.tol.unwrap_or_else(|| default_tol(y));
                let iters = v.cfg.max_iter.unwrap_or(LAD_MAX_ITER);
                let (res, secs) = v.cfg.timed(|| baseline_lad(a, y, args.rho, tol, iters));
                let s = res?;
                plain(method.name(), s.x, m, s.iterations, s.converged, secs)
            }
            RegressMethod::Oracle => {
                let ocfg = oracle_cfg.as_ref().expect("checked above");
                let (res, secs) = v.cfg.timed(|| bernoulli_oracle(a, y, ocfg));
                let s = res.map_err(|e| match e {
                    loire::Error::Infeasible { t, max_support } => CliError::data(format!(
                        "oracle: no outlier set of at most {max_support} rows reaches radius {t}"
                    )),
                    other => other.into(),
                })?;
                MethodSolution {
                    method: method.name().into(),
                    x: s.x.to_vec(),
                    b: s.b.to_vec(),
                    support: one_based(&s.support),
                    objective_trace: Vec::new(),
                    iterations: 0,
                    converged: true,
                    wall_time_s: secs,
                }
            }
        };
        out.push(sol);
    }
    write_json(&v.cfg.out.join("solution.json"), &out)?;
    write_traces(&v.cfg.out.join("trace.csv"), &out)?;
    Ok(out)
}

fn plain(name: &str, x: DenseVector, m: usize, iterations: usize, converged: bool, secs: f64) -> MethodSolution {
    MethodSolution {
        method: name.into(),
        x: x.to_vec(),
        b: vec![0.0; m],
        support: Vec::new(),
        objective_trace: Vec::new(),
        iterations,
        converged,
        wall_time_s: secs,
    }
}

fn one_based(s: &SupportSet) -> Vec<usize> {
    s.indices().iter().map(|i| i + 1).collect()
}

#[derive(Serialize)]
struct TraceRow<'a> {
    method: &'a str,
    iteration: usize,
    objective: f64,
}

/// Objective traces in long form for plotting.
fn write_traces(path: &Path, sols: &[MethodSolution]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    for s in sols {
        for (k, f) in s.objective_trace.iter().enumerate() {
            w.serialize(TraceRow {
                method: &s.method,
                iteration: k + 1,
                objective: *f,
            })
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        }
    }
    if sols.iter().all(|s| s.objective_trace.is_empty()) {
        w.write_record(["method", "iteration", "objective"])
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
