//! Dense linear-algebra primitives shared by every solver.
//!
//! [`DenseMatrix`] and [`DenseVector`] are thin newtypes over nalgebra's
//! column-major `DMatrix<f64>` / `DVector<f64>` whose constructors reject
//! non-finite entries. Read access goes through `Deref`; mutation only
//! happens inside this crate.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix(DMatrix<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector(DVector<f64>);

fn check_finite(data: &[f64]) -> Result<()> {
    match data.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

impl DenseMatrix {
    /// Builds a matrix from column-major data.
    pub fn from_column_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        check_finite(&data)?;
        Ok(Self(DMatrix::from_vec(rows, cols, data)))
    }

    /// Builds a matrix from row-major data, the order a literal is usually written in.
    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        check_finite(data)?;
        Ok(Self(DMatrix::from_row_slice(rows, cols, data)))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(rows.len(), cols, &flat)
    }

    pub fn from_nalgebra(m: DMatrix<f64>) -> Result<Self> {
        check_finite(m.as_slice())?;
        Ok(Self(m))
    }

    /// Wraps a matrix produced by finite arithmetic on already-checked inputs.
    pub(crate) fn wrap(m: DMatrix<f64>) -> Self {
        debug_assert!(m.iter().all(|v| v.is_finite()));
        Self(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_element(rows: usize, cols: usize, value: f64) -> Result<Self> {
        check_finite(&[value])?;
        Ok(Self(DMatrix::from_element(rows, cols, value)))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_nalgebra(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<f64> {
        self.0
    }

    pub fn column_vector(&self, j: usize) -> DenseVector {
        DenseVector(self.0.column(j).into_owned())
    }

    /// Submatrix made of the given rows, in the order given.
    pub fn select_rows(&self, rows: &[usize]) -> DenseMatrix {
        Self(self.0.select_rows(rows))
    }

    pub fn mul_vector(&self, x: &DenseVector) -> Result<DenseVector> {
        if self.cols() != x.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows(),
                self.cols(),
                x.len()
            )));
        }
        Ok(DenseVector(&self.0 * &x.0))
    }

    pub fn mul_matrix(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self(&self.0 * &other.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Entrywise l1 norm.
    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Deref for DenseMatrix {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl DenseVector {
    pub fn from_vec(data: Vec<f64>) -> Result<Self> {
        check_finite(&data)?;
        Ok(Self(DVector::from_vec(data)))
    }

    pub fn from_slice(data: &[f64]) -> Result<Self> {
        Self::from_vec(data.to_vec())
    }

    pub fn from_nalgebra(v: DVector<f64>) -> Result<Self> {
        check_finite(v.as_slice())?;
        Ok(Self(v))
    }

    pub(crate) fn wrap(v: DVector<f64>) -> Self {
        debug_assert!(v.iter().all(|x| x.is_finite()));
        Self(v)
    }

    pub fn zeros(len: usize) -> Self {
        Self(DVector::zeros(len))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_nalgebra(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DVector<f64> {
        self.0
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.as_slice().to_vec()
    }

    pub fn select(&self, idx: &[usize]) -> DenseVector {
        Self(self.0.select_rows(idx))
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Deref for DenseVector {
    type Target = DVector<f64>;

    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

/// Cutoff below which singular values are treated as zero.
fn rank_cutoff(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

/// Thin SVD `a = u diag(sigma) v_t`, singular values nonincreasing.
fn thin_svd(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let (m, n) = a.shape();
    let f = faer::Mat::<f64>::from_fn(m, n, |i, j| a[(i, j)]);
    let svd = f.thin_svd().map_err(|_| Error::SvdNotConverged)?;
    let k = m.min(n);
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    Ok((
        DMatrix::from_fn(m, k, |i, j| u[(i, j)]),
        DVector::from_fn(k, |i, _| s[i]),
        DMatrix::from_fn(k, n, |i, j| v[(j, i)]),
    ))
}

/// Reusable minimum-norm least-squares solver for a fixed matrix.
///
/// The SVD of `A` is computed once; every [`solve`](Self::solve) then costs
/// two matrix-vector products. Directions whose singular value falls below
/// `max(m, n) * eps * sigma_max` are dropped, which yields the Moore-Penrose
/// solution for rank-deficient systems.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    // u is m x k, v_t is k x n, inv_sigma has zeros for dropped directions
    u: DMatrix<f64>,
    v_t: DMatrix<f64>,
    inv_sigma: DVector<f64>,
    rank: usize,
}

impl LeastSquares {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Empty);
        }
        let (u, sigma, v_t) = thin_svd(&a.0)?;
        let sigma_max = sigma.iter().fold(0.0_f64, |m, &s| m.max(s));
        let cutoff = rank_cutoff(a.rows(), a.cols(), sigma_max);
        let mut rank = 0;
        let inv_sigma = sigma.map(|s| {
            if s > cutoff && s > 0.0 {
                rank += 1;
                1.0 / s
            } else {
                0.0
            }
        });
        Ok(Self {
            u,
            v_t,
            inv_sigma,
            rank,
        })
    }

    pub fn rows(&self) -> usize {
        self.u.nrows()
    }

    pub fn cols(&self) -> usize {
        self.v_t.ncols()
    }

    /// Numerical rank of the factored matrix.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn solve(&self, y: &DenseVector) -> Result<DenseVector> {
        if y.len() != self.rows() {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} rows, right-hand side has {}",
                self.rows(),
                y.len()
            )));
        }
        Ok(DenseVector(self.apply(&y.0)))
    }

    /// The Moore-Penrose pseudoinverse as an explicit `n x m` matrix.
    pub fn pseudo_inverse(&self) -> DenseMatrix {
        let mut v_scaled = self.v_t.transpose();
        for (j, s) in self.inv_sigma.iter().enumerate() {
            v_scaled.column_mut(j).scale_mut(*s);
        }
        DenseMatrix(v_scaled * self.u.transpose())
    }

    pub(crate) fn apply(&self, y: &DVector<f64>) -> DVector<f64> {
        let coeffs = self.u.tr_mul(y).component_mul(&self.inv_sigma);
        self.v_t.tr_mul(&coeffs)
    }
}

/// Minimum-norm minimizer of `||y - A x||_2`.
pub fn least_squares_solve(a: &DenseMatrix, y: &DenseVector) -> Result<DenseVector> {
    if a.rows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows, right-hand side has {}",
            a.rows(),
            y.len()
        )));
    }
    LeastSquares::new(a)?.solve(y)
}

/// Leading `r` singular triplets of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    /// m x r, orthonormal columns.
    pub u: DenseMatrix,
    /// Nonincreasing, nonnegative.
    pub sigma: DenseVector,
    /// r x n, orthonormal rows.
    pub vt: DenseMatrix,
}

impl TruncatedSvd {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `diag(sigma) * vt`, the coefficient block of the factorization.
    pub fn scaled_vt(&self) -> DenseMatrix {
        let mut x = self.vt.0.clone();
        for (i, s) in self.sigma.iter().enumerate() {
            x.row_mut(i).scale_mut(*s);
        }
        DenseMatrix(x)
    }

    /// `u * diag(sigma) * vt`
    pub fn reconstruct(&self) -> DenseMatrix {
        DenseMatrix(&self.u.0 * self.scaled_vt().0)
    }
}

/// Best rank-`r` approximation factors of `a` (Eckart-Young).
///
/// Left singular vectors belonging to zero singular values are completed to
/// an orthonormal set when the decomposition leaves them degenerate, so the
/// columns of `u` always have unit norm.
pub fn truncated_svd(a: &DenseMatrix, r: usize) -> Result<TruncatedSvd> {
    let max = a.rows().min(a.cols());
    if r == 0 || r > max {
        return Err(Error::RankOutOfRange { rank: r, max });
    }
    let (u_full, s_full, vt_full) = thin_svd(&a.0)?;
    let mut u = u_full.columns(0, r).into_owned();
    let mut vt = vt_full.rows(0, r).into_owned();
    let sigma = s_full.rows(0, r).map(|s| s.max(0.0));
    let cutoff = rank_cutoff(a.rows(), a.cols(), sigma.max());
    let null: Vec<bool> = sigma.iter().map(|s| *s <= cutoff).collect();
    complete_orthonormal_columns(&mut u, &null);
    let mut v = vt.transpose();
    complete_orthonormal_columns(&mut v, &null);
    vt = v.transpose();
    Ok(TruncatedSvd {
        u: DenseMatrix(u),
        sigma: DenseVector(sigma),
        vt: DenseMatrix(vt),
    })
}

/// Replaces null-direction columns that are not unit-norm or not orthogonal
/// to the earlier ones with standard basis vectors orthogonalized by
/// modified Gram-Schmidt.
fn complete_orthonormal_columns(q: &mut DMatrix<f64>, null: &[bool]) {
    let (m, r) = q.shape();
    let ok = |q: &DMatrix<f64>, j: usize| {
        let cj = q.column(j);
        !null[j]
            || ((cj.norm() - 1.0).abs() <= 1e-10
                && (0..j).all(|i| q.column(i).dot(&cj).abs() <= 1e-10))
    };
    let mut next_basis = 0;
    for j in 0..r {
        if ok(q, j) {
            continue;
        }
        loop {
            assert!(next_basis < m, "cannot complete an orthonormal basis");
            let mut v = DVector::zeros(m);
            v[next_basis] = 1.0;
            next_basis += 1;
            // two passes of Gram-Schmidt for stability
            for _ in 0..2 {
                for i in 0..j {
                    let qi = q.column(i).into_owned();
                    let proj = qi.dot(&v);
                    v.axpy(-proj, &qi, 1.0);
                }
            }
            let norm = v.norm();
            if norm > 1e-8 {
                q.set_column(j, &(v / norm));
                break;
            }
        }
    }
}

/// `sign(v) * max(|v| - tau, 0)`, the proximal operator of `tau * |.|`.
#[inline]
pub fn soft_threshold(v: f64, tau: f64) -> f64 {
    debug_assert!(tau >= 0.0);
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

pub fn soft_threshold_vector(v: &DenseVector, tau: f64) -> DenseVector {
    DenseVector(v.0.map(|x| soft_threshold(x, tau)))
}

pub fn soft_threshold_matrix(m: &DenseMatrix, tau: f64) -> DenseMatrix {
    DenseMatrix(m.0.map(|x| soft_threshold(x, tau)))
}
