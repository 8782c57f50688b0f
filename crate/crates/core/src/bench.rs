//! Synthetic low-rank-plus-sparse benchmarks, detection metrics and
//! non-robust/robust regression baselines.
//!
//! # Random stream
//!
//! Instances are drawn from `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha),
//! using rand's standard `f64` conversion for uniforms on `[0, 1)`. Draws
//! happen in this fixed order, every matrix filled column-major:
//!
//! 1. `P`, `n x r` uniforms (then `Q`, `n x r`, for the asymmetric variant);
//! 2. `G`, `n x n` entries (uniform times `dense_noise_scale`, or normal);
//! 3. for each of the `n x n` positions: one uniform deciding whether a spike
//!    is planted (`u < spike_density`), and, if so, a second uniform scaled by
//!    `spike_amplitude` for its value.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorization::{rrf_solve, FactorizationConfig, FactorizationSolution};
use crate::matrix::{least_squares_solve, soft_threshold, DenseMatrix, DenseVector, LeastSquares};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DenseNoise {
    /// `dense_noise_scale * uniform(0, 1)`.
    #[default]
    Uniform,
    /// Zero-mean normal with variance `dense_noise_scale`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LowRankShape {
    /// `L = P P^T`.
    #[default]
    Symmetric,
    /// `L = P Q^T` with independent factors.
    Asymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub n: usize,
    pub rank_frac: f64,
    pub dense_noise_scale: f64,
    pub spike_amplitude: f64,
    pub spike_density: f64,
    pub seed: u64,
    pub noise: DenseNoise,
    pub low_rank: LowRankShape,
}

impl Default for SimSpec {
    fn default() -> Self {
        Self {
            n: 100,
            rank_frac: 0.05,
            dense_noise_scale: 2.0,
            spike_amplitude: 10.0,
            spike_density: 0.05,
            seed: 0,
            noise: DenseNoise::Uniform,
            low_rank: LowRankShape::Symmetric,
        }
    }
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        if !(self.rank_frac > 0.0 && self.rank_frac <= 1.0) {
            return Err(Error::invalid("rank_frac", format!("must lie in (0, 1], got {}", self.rank_frac)));
        }
        if !(0.0..=1.0).contains(&self.spike_density) {
            return Err(Error::invalid(
                "spike_density",
                format!("must lie in [0, 1], got {}", self.spike_density),
            ));
        }
        if !(self.dense_noise_scale.is_finite() && self.dense_noise_scale >= 0.0) {
            return Err(Error::invalid(
                "dense_noise_scale",
                format!("must be >= 0, got {}", self.dense_noise_scale),
            ));
        }
        if !self.spike_amplitude.is_finite() {
            return Err(Error::invalid("spike_amplitude", "must be finite"));
        }
        Ok(())
    }

    /// `ceil(rank_frac * n)`, at least 1.
    pub fn rank(&self) -> usize {
        ((self.rank_frac * self.n as f64).ceil() as usize).clamp(1, self.n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimInstance {
    /// `l + g + b_true`
    pub y: DenseMatrix,
    pub l: DenseMatrix,
    pub g: DenseMatrix,
    pub b_true: DenseMatrix,
    pub true_support: BTreeSet<(usize, usize)>,
}

fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    // from_fn walks column-major
    DMatrix::from_fn(rows, cols, |_, _| scale * rng.random::<f64>())
}

pub fn generate_sim(spec: &SimSpec) -> Result<SimInstance> {
    spec.validate()?;
    let n = spec.n;
    let r = spec.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let p = uniform_matrix(&mut rng, n, r, 1.0);
    let l = match spec.low_rank {
        LowRankShape::Symmetric => &p * p.transpose(),
        LowRankShape::Asymmetric => {
            let q = uniform_matrix(&mut rng, n, r, 1.0);
            &p * q.transpose()
        }
    };

    let g = match spec.noise {
        DenseNoise::Uniform => uniform_matrix(&mut rng, n, n, spec.dense_noise_scale),
        DenseNoise::Gaussian => {
            let normal = Normal::new(0.0, spec.dense_noise_scale.sqrt())
                .map_err(|e| Error::invalid("dense_noise_scale", e.to_string()))?;
            DMatrix::from_fn(n, n, |_, _| normal.sample(&mut rng))
        }
    };

    let mut b = DMatrix::zeros(n, n);
    let mut support = BTreeSet::new();
    for j in 0..n {
        for i in 0..n {
            if rng.random::<f64>() < spec.spike_density {
                b[(i, j)] = spec.spike_amplitude * rng.random::<f64>();
                support.insert((i, j));
            }
        }
    }

    let y = &l + &g + &b;
    Ok(SimInstance {
        y: DenseMatrix::from_nalgebra(y)?,
        l: DenseMatrix::from_nalgebra(l)?,
        g: DenseMatrix::from_nalgebra(g)?,
        b_true: DenseMatrix::from_nalgebra(b)?,
        true_support: support,
    })
}

/// Regression instance `y = A x* + e + b` with planted gross outliers.
///
/// `A` and `x*` have standard normal entries, `e` is normal with standard
/// deviation `noise_sigma`, and `outliers` rows chosen uniformly at random
/// receive `b_i = +-noise_sigma * uniform(outlier_min, outlier_max)` with a
/// random sign. Draw order: `A` (column-major), `x*`, `e`, outlier rows
/// (partial Fisher-Yates), then per outlier row its magnitude and sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionSpec {
    pub m: usize,
    pub n: usize,
    pub outliers: usize,
    pub noise_sigma: f64,
    /// Smallest outlier magnitude, in multiples of `noise_sigma`.
    pub outlier_min: f64,
    /// Largest outlier magnitude, in multiples of `noise_sigma`.
    pub outlier_max: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionInstance {
    pub a: DenseMatrix,
    pub y: DenseVector,
    pub x_true: DenseVector,
    pub noise: DenseVector,
    pub outliers: Vec<usize>,
}

pub fn generate_regression(spec: &RegressionSpec) -> Result<RegressionInstance> {
    if spec.m == 0 || spec.n == 0 {
        return Err(Error::Empty);
    }
    if spec.outliers > spec.m {
        return Err(Error::invalid("outliers", format!("{} exceeds m = {}", spec.outliers, spec.m)));
    }
    if !(spec.noise_sigma.is_finite() && spec.noise_sigma >= 0.0) {
        return Err(Error::invalid("noise_sigma", "must be finite and >= 0"));
    }
    if !(spec.outlier_min >= 0.0 && spec.outlier_max >= spec.outlier_min && spec.outlier_max.is_finite()) {
        return Err(Error::invalid("outlier_min/outlier_max", "need 0 <= min <= max < inf"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let a = DMatrix::from_fn(spec.m, spec.n, |_, _| std_normal.sample(&mut rng));
    let x = DVector::from_fn(spec.n, |_, _| std_normal.sample(&mut rng));
    let e = DVector::from_fn(spec.m, |_, _| spec.noise_sigma * std_normal.sample(&mut rng));
    let mut rows: Vec<usize> = (0..spec.m).collect();
    for i in 0..spec.outliers {
        let j = rng.random_range(i..spec.m);
        rows.swap(i, j);
    }
    let mut outliers = rows[..spec.outliers].to_vec();
    outliers.sort_unstable();
    let mut y = &a * &x + &e;
    for &i in &outliers {
        let mag = spec.noise_sigma * rng.random_range(spec.outlier_min..=spec.outlier_max);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        y[i] += sign * mag;
    }
    Ok(RegressionInstance {
        a: DenseMatrix::from_nalgebra(a)?,
        y: DenseVector::from_nalgebra(y)?,
        x_true: DenseVector::from_nalgebra(x)?,
        noise: DenseVector::from_nalgebra(e)?,
        outliers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionMetrics {
    pub tp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub fp: usize,
    /// Detection rate (recall).
    pub dr: f64,
    /// Precision.
    pub pre: f64,
    /// Harmonic mean of `dr` and `pre`.
    pub f: f64,
}

impl DetectionMetrics {
    /// Rates from raw counts. Empty denominators: `dr = 1` with nothing to
    /// find, `pre = 1` with nothing claimed, `f = 0` when both rates are 0.
    pub fn from_counts(tp: usize, fn_: usize, fp: usize) -> Self {
        let dr = if tp + fn_ > 0 {
            tp as f64 / (tp + fn_) as f64
        } else {
            1.0
        };
        let pre = if tp + fp > 0 {
            tp as f64 / (tp + fp) as f64
        } else {
            1.0
        };
        let f = if dr + pre > 0.0 {
            2.0 * dr * pre / (dr + pre)
        } else {
            0.0
        };
        Self {
            tp,
            fn_,
            fp,
            dr,
            pre,
            f,
        }
    }
}

/// Compares detected and true corrupted positions. `universe` is the total
/// number of positions and only bounds the inputs.
pub fn compute_metrics(
    detected: &BTreeSet<(usize, usize)>,
    truth: &BTreeSet<(usize, usize)>,
    universe: usize,
) -> DetectionMetrics {
    debug_assert!(detected.len() <= universe && truth.len() <= universe);
    let tp = detected.intersection(truth).count();
    DetectionMetrics::from_counts(tp, truth.len() - tp, detected.len() - tp)
}

/// Positions `(i, j)` with `|B_ij| > zero_tol`.
pub fn detected_entries(b: &DenseMatrix, zero_tol: f64) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for j in 0..b.cols() {
        for i in 0..b.rows() {
            if b[(i, j)].abs() > zero_tol {
                out.insert((i, j));
            }
        }
    }
    out
}

/// `1e-6 * (1 + max |Y_ij|)`, the matrix analogue of the vector default.
pub fn default_matrix_zero_tol(y: &DenseMatrix) -> f64 {
    1e-6 * (1.0 + y.max_abs())
}

/// Ordinary least squares, the non-robust reference.
pub fn baseline_ols(a: &DenseMatrix, y: &DenseVector) -> Result<DenseVector> {
    least_squares_solve(a, y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadSolution {
    pub x: DenseVector,
    pub iterations: usize,
    pub converged: bool,
}

/// Least absolute deviations `min ||y - A x||_1` by ADMM on the splitting
/// `z = A x - y` (scaled dual form). Stops when both the primal residual
/// `||A x - z - y||_2` and the dual residual `rho ||A^T (z_k - z_{k-1})||_2`
/// drop below `tol`.
pub fn baseline_lad(
    a: &DenseMatrix,
    y: &DenseVector,
    rho: f64,
    tol: f64,
    max_iter: usize,
) -> Result<LadSolution> {
    if a.rows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "A has {} rows, y has {} entries",
            a.rows(),
            y.len()
        )));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::invalid("rho", format!("must be > 0, got {rho}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be > 0, got {tol}")));
    }
    let solver = LeastSquares::new(a)?;
    if solver.rank() < a.cols() {
        return Err(Error::RankDeficient {
            rank: solver.rank(),
            cols: a.cols(),
        });
    }
    let am = a.as_nalgebra();
    let yv = y.as_nalgebra();
    let m = a.rows();
    let mut z = DVector::<f64>::zeros(m);
    let mut u = DVector::<f64>::zeros(m);
    let mut x = DVector::<f64>::zeros(a.cols());
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        x = solver.apply(&(yv + &z - &u));
        let ax = am * &x;
        let z_prev = z.clone();
        z = (&ax - yv + &u).map(|v| soft_threshold(v, 1.0 / rho));
        let primal = &ax - &z - yv;
        u += &primal;
        iterations += 1;
        let dual = rho * am.tr_mul(&(&z - &z_prev)).norm();
        if primal.norm() <= tol && dual <= tol {
            converged = true;
            break;
        }
    }
    Ok(LadSolution {
        x: DenseVector::from_nalgebra(x)?,
        iterations,
        converged,
    })
}

/// One row of `report.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub method: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    pub lambda: f64,
    pub tol: f64,
    pub iterations: usize,
    #[serde(rename = "DR")]
    pub dr: f64,
    #[serde(rename = "Pre")]
    pub pre: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub wall_time_s: f64,
}

/// How the penalty is picked for a matrix benchmark run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaChoice {
    Fixed(f64),
    /// Multiplier on [`crate::factorization::default_lambda`].
    Scaled(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RrfRunParams {
    pub lambda: LambdaChoice,
    /// `None` uses the default tolerance for the instance.
    pub tol: Option<f64>,
    pub max_iter: usize,
    /// `None` uses [`default_matrix_zero_tol`].
    pub zero_tol: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RrfRun {
    pub report: BenchmarkReport,
    pub metrics: DetectionMetrics,
    pub instance: SimInstance,
    pub solution: FactorizationSolution,
}

/// Generates an instance, factors it and scores the detected corruption.
/// The rank handed to the solver is the planted rank.
pub fn run_rrf(spec: &SimSpec, params: &RrfRunParams) -> Result<RrfRun> {
    let instance = generate_sim(spec)?;
    let y = &instance.y;
    let lambda = match params.lambda {
        LambdaChoice::Fixed(l) => l,
        LambdaChoice::Scaled(mult) => crate::factorization::default_lambda(y, mult)?,
    };
    let tol = params
        .tol
        .unwrap_or_else(|| crate::factorization::default_tol(y));
    let cfg = FactorizationConfig::new(spec.rank(), lambda, tol, params.max_iter)?;
    let start = std::time::Instant::now();
    let solution = rrf_solve(y, &cfg)?;
    let wall = start.elapsed().as_secs_f64();
    let zero_tol = params.zero_tol.unwrap_or_else(|| default_matrix_zero_tol(y));
    let detected = detected_entries(&solution.b, zero_tol);
    let metrics = compute_metrics(&detected, &instance.true_support, spec.n * spec.n);
    let report = BenchmarkReport {
        method: "rrf".to_string(),
        n: spec.n,
        seed: spec.seed,
        lambda,
        tol,
        iterations: solution.iterations,
        dr: metrics.dr,
        pre: metrics.pre,
        f: metrics.f,
        wall_time_s: wall,
    };
    Ok(RrfRun {
        report,
        metrics,
        instance,
        solution,
    })
}
