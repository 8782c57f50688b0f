//! l1-regularized outlier isolation and regression.
//!
//! Minimizes `f(x, b) = ||b||_1 + (lambda/2) ||y - A x - b||_2^2` by
//! alternating exact minimization over `x` (a least-squares solve) and over
//! `b` (elementwise soft thresholding at `1/lambda`), starting from `b = 0`.
//! Each half-step is an exact block minimizer, so `f` never increases; since
//! `f` is jointly convex, the fixed point of the two maps is a global minimizer.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::matrix::{least_squares_solve, soft_threshold, DenseMatrix, DenseVector, LeastSquares};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoireConfig {
    /// Penalty weight on the dense residual; the shrinkage threshold is `1/lambda`.
    pub lambda: f64,
    /// Stop once `||b_{k+1} - b_k||_2 <= tol`.
    pub tol: f64,
    pub max_iter: usize,
}

pub const DEFAULT_MAX_ITER: usize = 1000;

impl LoireConfig {
    pub fn new(lambda: f64, tol: f64, max_iter: usize) -> Result<Self> {
        let cfg = Self {
            lambda,
            tol,
            max_iter,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `tol = 1e-8 * (1 + ||y||_2)` and `max_iter = 1000`.
    pub fn with_defaults(lambda: f64, y: &DenseVector) -> Result<Self> {
        Self::new(lambda, default_tol(y), DEFAULT_MAX_ITER)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::invalid("lambda", format!("must be > 0, got {}", self.lambda)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::invalid("tol", format!("must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be at least 1"));
        }
        Ok(())
    }

    pub fn threshold(&self) -> f64 {
        1.0 / self.lambda
    }
}

pub fn default_tol(y: &DenseVector) -> f64 {
    1e-8 * (1.0 + y.l2_norm())
}

/// Heuristic penalty: the reciprocal of the median absolute least-squares
/// residual, clamped to `[1e-6, 1e6]`.
pub fn default_lambda(a: &DenseMatrix, y: &DenseVector) -> Result<f64> {
    let x = least_squares_solve(a, y)?;
    let fitted = a.mul_vector(&x)?;
    let mut abs_res: Vec<f64> = y
        .iter()
        .zip(fitted.iter())
        .map(|(yi, fi)| (yi - fi).abs())
        .collect();
    abs_res.sort_by(f64::total_cmp);
    let n = abs_res.len();
    let median = if n % 2 == 1 {
        abs_res[n / 2]
    } else {
        0.5 * (abs_res[n / 2 - 1] + abs_res[n / 2])
    };
    let lambda = if median > 0.0 { 1.0 / median } else { f64::INFINITY };
    Ok(lambda.clamp(1e-6, 1e6))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoireSolution {
    pub x: DenseVector,
    /// Outlier vector; nonzero entries mark measurements isolated as outliers.
    pub b: DenseVector,
    /// Objective after each accepted iterate, nonincreasing.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn check_dims(a: &DenseMatrix, y: &DenseVector) -> Result<()> {
    if a.is_empty() {
        return Err(Error::Empty);
    }
    if a.rows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "A has {} rows, y has {} entries",
            a.rows(),
            y.len()
        )));
    }
    Ok(())
}

/// `||b||_1 + (lambda/2) ||y - A x - b||_2^2`
pub fn loire_objective(
    a: &DenseMatrix,
    y: &DenseVector,
    x: &DenseVector,
    b: &DenseVector,
    lambda: f64,
) -> Result<f64> {
    check_dims(a, y)?;
    if x.len() != a.cols() || b.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "x has {} entries (want {}), b has {} (want {})",
            x.len(),
            a.cols(),
            b.len(),
            y.len()
        )));
    }
    let residual = y.as_nalgebra() - a.as_nalgebra() * x.as_nalgebra() - b.as_nalgebra();
    Ok(objective(b.as_nalgebra(), &residual, lambda))
}

fn objective(b: &DVector<f64>, residual: &DVector<f64>, lambda: f64) -> f64 {
    b.iter().map(|v| v.abs()).sum::<f64>() + 0.5 * lambda * residual.norm_squared()
}

/// Iterate state of the alternating descent, exposed so that callers can
/// inspect the half-steps.
#[derive(Debug, Clone)]
pub struct Adda<'a> {
    a: &'a DenseMatrix,
    y: &'a DenseVector,
    lambda: f64,
    solver: LeastSquares,
    x: DVector<f64>,
    b: DVector<f64>,
}

impl<'a> Adda<'a> {
    /// Starts from `b = 0`; `x` is zero until the first [`update_x`](Self::update_x).
    pub fn new(a: &'a DenseMatrix, y: &'a DenseVector, lambda: f64) -> Result<Self> {
        check_dims(a, y)?;
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::invalid("lambda", format!("must be > 0, got {lambda}")));
        }
        Ok(Self {
            a,
            y,
            lambda,
            solver: LeastSquares::new(a)?,
            x: DVector::zeros(a.cols()),
            b: DVector::zeros(a.rows()),
        })
    }

    /// `x = pinv(A) (y - b)`
    pub fn update_x(&mut self) {
        let target = self.y.as_nalgebra() - &self.b;
        self.x = self.solver.apply(&target);
    }

    /// `b = soft_threshold(y - A x, 1/lambda)`; returns `||b_new - b_old||_2`.
    pub fn update_b(&mut self) -> f64 {
        let tau = 1.0 / self.lambda;
        let r = self.y.as_nalgebra() - self.a.as_nalgebra() * &self.x;
        let next = r.map(|v| soft_threshold(v, tau));
        let delta = (&next - &self.b).norm();
        self.b = next;
        delta
    }

    pub fn objective(&self) -> f64 {
        let r = self.y.as_nalgebra() - self.a.as_nalgebra() * &self.x - &self.b;
        objective(&self.b, &r, self.lambda)
    }

    pub fn x(&self) -> DenseVector {
        DenseVector::wrap(self.x.clone())
    }

    pub fn b(&self) -> DenseVector {
        DenseVector::wrap(self.b.clone())
    }
}

/// Solves the penalized LOIRE problem by alternating direction descent.
///
/// After the loop stops, one more `x`-update is applied so that the returned
/// `x` is the exact least-squares fit for the returned `b`. Hitting
/// `max_iter` is not an error; the solution is returned with `converged = false`.
pub fn loire_solve(a: &DenseMatrix, y: &DenseVector, cfg: &LoireConfig) -> Result<LoireSolution> {
    cfg.validate()?;
    let mut state = Adda::new(a, y, cfg.lambda)?;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        state.update_x();
        let delta = state.update_b();
        iterations += 1;
        trace.push(state.objective());
        if delta <= cfg.tol {
            converged = true;
            break;
        }
    }
    state.update_x();
    // the extra x-step is an exact block minimization, so f does not go up
    if let Some(last) = trace.last_mut() {
        *last = state.objective();
    }
    Ok(LoireSolution {
        x: state.x(),
        b: state.b(),
        objective_trace: trace,
        iterations,
        converged,
    })
}
