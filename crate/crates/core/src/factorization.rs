//! Robust rank factorization `Y ~ A X + B`.
//!
//! Minimizes `||B||_1 + (lambda/2) ||Y - A X - B||_F^2` over a dictionary
//! `A` with unit-norm columns, coefficients `X` and a sparse corruption `B`.
//! The solver alternates two exact block steps starting from `B = 0`:
//!
//! 1. `A, X` from the rank-`r` truncated SVD of `Y - B`: `A = U[:, :r]`,
//!    `X = (Sigma V^T)[:r, :]`. Any rank-`r` product can be rescaled to have
//!    unit dictionary columns, so this is the constrained minimizer.
//! 2. `B = soft_threshold(Y - A X, 1/lambda)` entrywise.
//!
//! The objective is monotone along the iterates. The joint problem is not
//! convex, so no global optimality is claimed.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::loire::{loire_solve, LoireConfig};
use crate::matrix::{soft_threshold, truncated_svd, DenseMatrix, LeastSquares};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationConfig {
    pub rank: usize,
    pub lambda: f64,
    /// Stop once `||B_{k+1} - B_k||_F <= tol`.
    pub tol: f64,
    pub max_iter: usize,
}

pub const DEFAULT_MAX_ITER: usize = 500;

impl FactorizationConfig {
    pub fn new(rank: usize, lambda: f64, tol: f64, max_iter: usize) -> Result<Self> {
        let cfg = Self {
            rank,
            lambda,
            tol,
            max_iter,
        };
        cfg.validate_params()?;
        Ok(cfg)
    }

    /// `tol = 1e-7 * (1 + ||Y||_F)`, `max_iter = 500`.
    pub fn with_defaults(rank: usize, lambda: f64, y: &DenseMatrix) -> Result<Self> {
        Self::new(rank, lambda, default_tol(y), DEFAULT_MAX_ITER)
    }

    fn validate_params(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::invalid("rank", "must be at least 1"));
        }
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

    /// Checks the parameters and that the rank fits an `m x n` matrix.
    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        self.validate_params()?;
        let max = m.min(n);
        if self.rank > max {
            return Err(Error::RankOutOfRange {
                rank: self.rank,
                max,
            });
        }
        Ok(())
    }
}

pub fn default_tol(y: &DenseMatrix) -> f64 {
    1e-7 * (1.0 + y.frobenius_norm())
}

/// `multiplier * sqrt(max(m, n)) / ||Y||_F`; falls back to `multiplier *
/// sqrt(max(m, n))` for an all-zero `Y`.
pub fn default_lambda(y: &DenseMatrix, multiplier: f64) -> Result<f64> {
    if !(multiplier.is_finite() && multiplier > 0.0) {
        return Err(Error::invalid("multiplier", format!("must be > 0, got {multiplier}")));
    }
    let scale = (y.rows().max(y.cols()) as f64).sqrt();
    let norm = y.frobenius_norm();
    Ok(if norm > 0.0 {
        multiplier * scale / norm
    } else {
        multiplier * scale
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationSolution {
    /// `m x r` dictionary with unit-norm columns.
    pub a: DenseMatrix,
    /// `r x n` coefficients.
    pub x: DenseMatrix,
    /// `m x n` sparse corruption.
    pub b: DenseMatrix,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl FactorizationSolution {
    /// The low-rank component `A X`.
    pub fn low_rank(&self) -> DenseMatrix {
        DenseMatrix::wrap(self.a.as_nalgebra() * self.x.as_nalgebra())
    }
}

fn objective(b: &DMatrix<f64>, residual: &DMatrix<f64>, lambda: f64) -> f64 {
    b.iter().map(|v| v.abs()).sum::<f64>() + 0.5 * lambda * residual.norm_squared()
}

/// `||B||_1 + (lambda/2) ||Y - A X - B||_F^2` with the entrywise l1 norm.
pub fn rrf_objective(
    y: &DenseMatrix,
    a: &DenseMatrix,
    x: &DenseMatrix,
    b: &DenseMatrix,
    lambda: f64,
) -> Result<f64> {
    let (m, n) = y.shape();
    if a.rows() != m || x.cols() != n || a.cols() != x.rows() || b.shape() != (m, n) {
        return Err(Error::DimensionMismatch(format!(
            "Y {m}x{n}, A {}x{}, X {}x{}, B {}x{}",
            a.rows(),
            a.cols(),
            x.rows(),
            x.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let residual = y.as_nalgebra() - a.as_nalgebra() * x.as_nalgebra() - b.as_nalgebra();
    Ok(objective(b.as_nalgebra(), &residual, lambda))
}

/// Iterate state of the alternating matrix descent.
#[derive(Debug, Clone)]
pub struct Amda<'a> {
    y: &'a DenseMatrix,
    rank: usize,
    lambda: f64,
    a: DMatrix<f64>,
    x: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl<'a> Amda<'a> {
    /// Starts from `B = 0` and an all-zero factorization.
    pub fn new(y: &'a DenseMatrix, rank: usize, lambda: f64) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::Empty);
        }
        let (m, n) = y.shape();
        let max = m.min(n);
        if rank == 0 || rank > max {
            return Err(Error::RankOutOfRange { rank, max });
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::invalid("lambda", format!("must be > 0, got {lambda}")));
        }
        Ok(Self {
            y,
            rank,
            lambda,
            a: DMatrix::zeros(m, rank),
            x: DMatrix::zeros(rank, n),
            b: DMatrix::zeros(m, n),
        })
    }

    /// Dictionary and coefficients from the truncated SVD of `Y - B`.
    pub fn update_factors(&mut self) {
        let target = DenseMatrix::wrap(self.y.as_nalgebra() - &self.b);
        let svd = truncated_svd(&target, self.rank).expect("rank checked in constructor");
        self.x = svd.scaled_vt().into_nalgebra();
        self.a = svd.u.into_nalgebra();
    }

    /// Shrinkage step; returns `||B_new - B_old||_F`.
    pub fn update_corruption(&mut self) -> f64 {
        let tau = 1.0 / self.lambda;
        let r = self.y.as_nalgebra() - &self.a * &self.x;
        let next = r.map(|v| soft_threshold(v, tau));
        let delta = (&next - &self.b).norm();
        self.b = next;
        delta
    }

    pub fn objective(&self) -> f64 {
        let r = self.y.as_nalgebra() - &self.a * &self.x - &self.b;
        objective(&self.b, &r, self.lambda)
    }

    pub fn a(&self) -> DenseMatrix {
        DenseMatrix::wrap(self.a.clone())
    }

    pub fn x(&self) -> DenseMatrix {
        DenseMatrix::wrap(self.x.clone())
    }

    pub fn b(&self) -> DenseMatrix {
        DenseMatrix::wrap(self.b.clone())
    }
}

/// Robust rank factorization by alternating matrix descent.
pub fn rrf_solve(y: &DenseMatrix, cfg: &FactorizationConfig) -> Result<FactorizationSolution> {
    if y.is_empty() {
        return Err(Error::Empty);
    }
    cfg.validate(y.rows(), y.cols())?;
    let mut state = Amda::new(y, cfg.rank, cfg.lambda)?;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        state.update_factors();
        let delta = state.update_corruption();
        iterations += 1;
        trace.push(state.objective());
        if delta <= cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(FactorizationSolution {
        a: state.a(),
        x: state.x(),
        b: state.b(),
        objective_trace: trace,
        iterations,
        converged,
    })
}

/// Coefficients and corruption for a fixed dictionary, by running the
/// alternating `(X, B)` updates on all columns jointly.
///
/// Column `j` of the result is the LOIRE solution for `Y[:, j]` with the
/// same dictionary. Stops when `||B_{k+1} - B_k||_F <= tol`.
pub fn solve_fixed_dictionary(
    y: &DenseMatrix,
    a: &DenseMatrix,
    lambda: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(DenseMatrix, DenseMatrix, usize)> {
    LoireConfig::new(lambda, tol, max_iter)?;
    if a.rows() != y.rows() {
        return Err(Error::DimensionMismatch(format!(
            "dictionary has {} rows, Y has {}",
            a.rows(),
            y.rows()
        )));
    }
    let pinv = LeastSquares::new(a)?.pseudo_inverse().into_nalgebra();
    let tau = 1.0 / lambda;
    let mut b = DMatrix::zeros(y.rows(), y.cols());
    let mut iterations = 0;
    while iterations < max_iter {
        let x = &pinv * (y.as_nalgebra() - &b);
        let next = (y.as_nalgebra() - a.as_nalgebra() * &x).map(|v| soft_threshold(v, tau));
        let delta = (&next - &b).norm();
        b = next;
        iterations += 1;
        if delta <= tol {
            break;
        }
    }
    let x = &pinv * (y.as_nalgebra() - &b);
    Ok((DenseMatrix::wrap(x), DenseMatrix::wrap(b), iterations))
}

/// Column-by-column reference for [`solve_fixed_dictionary`] built directly
/// on [`loire_solve`].
pub fn solve_fixed_dictionary_columnwise(
    y: &DenseMatrix,
    a: &DenseMatrix,
    cfg: &LoireConfig,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let mut x = DMatrix::zeros(a.cols(), y.cols());
    let mut b = DMatrix::zeros(y.rows(), y.cols());
    for j in 0..y.cols() {
        let sol = loire_solve(a, &y.column_vector(j), cfg)?;
        x.set_column(j, sol.x.as_nalgebra());
        b.set_column(j, sol.b.as_nalgebra());
    }
    Ok((DenseMatrix::wrap(x), DenseMatrix::wrap(b)))
}
