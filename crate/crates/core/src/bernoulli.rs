//! Bernoulli (l0) estimation: the approximate estimator built on LOIRE and
//! an exhaustive oracle for small problems.
//!
//! Both reduce to the same refit: once the outlier rows are known, `x` is
//! the least-squares solution on the remaining rows. The approximate
//! estimator takes the rows from the support of the LOIRE outlier vector;
//! the oracle enumerates supports by increasing size and takes the first one
//! whose refit residual fits in the radius `t`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::loire::{loire_solve, LoireConfig, LoireSolution};
use crate::matrix::{least_squares_solve, DenseMatrix, DenseVector};

/// Sorted, duplicate-free set of 0-based row indices.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        Self {
            indices: set.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Indices in `0..m` that are not in the set.
    pub fn complement(&self, m: usize) -> Vec<usize> {
        (0..m).filter(|i| !self.contains(*i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BemSolution {
    /// Rows treated as outliers.
    pub support: SupportSet,
    /// Least-squares refit on the rows outside `support`.
    pub x: DenseVector,
    /// `y - A x` on the support, zero elsewhere.
    pub b: DenseVector,
    /// First-stage LOIRE result; `None` for the oracle.
    pub loire: Option<LoireSolution>,
}

/// Default support threshold: `1e-6 * (1 + ||y||_inf)`.
pub fn default_zero_tol(y: &DenseVector) -> f64 {
    1e-6 * (1.0 + y.max_abs())
}

/// Rows whose outlier entry exceeds `zero_tol` in magnitude.
pub fn detect_support(sol: &LoireSolution, zero_tol: f64) -> SupportSet {
    support_of(&sol.b, zero_tol)
}

pub fn support_of(b: &DenseVector, zero_tol: f64) -> SupportSet {
    SupportSet::new(
        b.iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > zero_tol)
            .map(|(i, _)| i),
    )
}

/// Refit on the rows outside `support`. An empty complement yields `x = 0`,
/// the minimum-norm solution of an empty system.
fn refit(a: &DenseMatrix, y: &DenseVector, support: &SupportSet) -> Result<(DenseVector, DenseVector)> {
    let keep = support.complement(a.rows());
    let x = if keep.is_empty() {
        DenseVector::zeros(a.cols())
    } else {
        least_squares_solve(&a.select_rows(&keep), &y.select(&keep))?
    };
    let fitted = a.mul_vector(&x)?;
    let mut b = vec![0.0; y.len()];
    for &i in support.indices() {
        b[i] = y[i] - fitted[i];
    }
    Ok((x, DenseVector::from_vec(b)?))
}

/// Least-squares solution on the rows outside `support`.
pub fn refit_on_complement(a: &DenseMatrix, y: &DenseVector, support: &SupportSet) -> Result<DenseVector> {
    check_dims(a, y)?;
    if support.indices().last().is_some_and(|&i| i >= a.rows()) {
        return Err(Error::DimensionMismatch(format!(
            "support index out of range for {} rows",
            a.rows()
        )));
    }
    if support.len() == a.rows() {
        return Err(Error::AllOutliers(a.rows()));
    }
    refit(a, y, support).map(|(x, _)| x)
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

/// Approximate Bernoulli estimate: isolate outliers with LOIRE, drop those
/// rows and refit by least squares on what is left.
pub fn app_bem(a: &DenseMatrix, y: &DenseVector, cfg: &LoireConfig, zero_tol: f64) -> Result<BemSolution> {
    if zero_tol.is_nan() || zero_tol < 0.0 {
        return Err(Error::invalid("zero_tol", format!("must be >= 0, got {zero_tol}")));
    }
    let loire = loire_solve(a, y, cfg)?;
    let support = detect_support(&loire, zero_tol);
    if support.len() == a.rows() {
        return Err(Error::AllOutliers(a.rows()));
    }
    let (x, b) = refit(a, y, &support)?;
    Ok(BemSolution {
        support,
        x,
        b,
        loire: Some(loire),
    })
}

/// Largest number of candidate supports the oracle will enumerate.
pub const ORACLE_ENUMERATION_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Radius on the residual of the retained rows.
    pub t: f64,
    /// Largest support size tried.
    pub max_support: usize,
}

impl OracleConfig {
    pub fn new(t: f64, max_support: usize) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::invalid("t", format!("must be >= 0, got {t}")));
        }
        Ok(Self { t, max_support })
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of supports of size `0..=max_support` over `m` rows.
pub fn enumeration_count(m: usize, max_support: usize) -> u128 {
    (0..=max_support.min(m)).map(|k| binomial(m, k)).sum()
}

/// All `k`-subsets of `0..m` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Combinations {
    m: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(m: usize, k: usize) -> Self {
        Self {
            m,
            current: (k <= m).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.m - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Candidate supports of size `0..=max_size`, by increasing size and
/// lexicographically within a size.
pub fn candidate_supports(m: usize, max_size: usize) -> impl Iterator<Item = SupportSet> {
    (0..=max_size.min(m)).flat_map(move |k| Combinations::new(m, k).map(SupportSet::new))
}

/// `||y_S^c - A_S^c x'||_2` where `x'` is the refit on the complement of `support`.
pub fn complement_residual(a: &DenseMatrix, y: &DenseVector, support: &SupportSet) -> Result<f64> {
    check_dims(a, y)?;
    let (x, _) = refit(a, y, support)?;
    let fitted = a.mul_vector(&x)?;
    Ok(support
        .complement(a.rows())
        .iter()
        .map(|&i| (y[i] - fitted[i]).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Absolute slack added to `t` so that exactly consistent rows are not
/// rejected over rounding error.
fn feasibility_slack(y: &DenseVector, a: &DenseMatrix) -> f64 {
    64.0 * f64::EPSILON * (1.0 + y.l2_norm()) * a.rows().max(a.cols()) as f64
}

pub fn is_feasible(a: &DenseMatrix, y: &DenseVector, support: &SupportSet, t: f64) -> Result<bool> {
    Ok(complement_residual(a, y, support)? <= t + feasibility_slack(y, a))
}

/// Exhaustive solver for `min ||b||_0 s.t. ||y - A x - b||_2 <= t`.
///
/// Supports are tried by increasing cardinality, ties broken
/// lexicographically, so the result is the lexicographically smallest
/// minimum-cardinality feasible support.
pub fn bernoulli_oracle(a: &DenseMatrix, y: &DenseVector, cfg: &OracleConfig) -> Result<BemSolution> {
    check_dims(a, y)?;
    let m = a.rows();
    if cfg.max_support > m {
        return Err(Error::invalid(
            "max_support",
            format!("{} exceeds the {m} available rows", cfg.max_support),
        ));
    }
    let count = enumeration_count(m, cfg.max_support);
    if count > ORACLE_ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            count,
            limit: ORACLE_ENUMERATION_LIMIT,
        });
    }
    for support in candidate_supports(m, cfg.max_support) {
        if is_feasible(a, y, &support, cfg.t)? {
            let (x, b) = refit(a, y, &support)?;
            return Ok(BemSolution {
                support,
                x,
                b,
                loire: None,
            });
        }
    }
    Err(Error::Infeasible {
        t: cfg.t,
        max_support: cfg.max_support,
    })
}

/// Log-likelihood of observing `outlier_count` outliers among `m`
/// measurements when each is normal with probability `p`:
/// `(m - k) ln p + k ln(1 - p)`.
pub fn bernoulli_log_likelihood(outlier_count: usize, m: usize, p: f64) -> Result<f64> {
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::invalid("p", format!("must lie in (1/2, 1), got {p}")));
    }
    if outlier_count > m {
        return Err(Error::invalid(
            "outlier_count",
            format!("{outlier_count} exceeds m = {m}"),
        ));
    }
    let k = outlier_count as f64;
    Ok((m as f64 - k) * p.ln() + k * (1.0 - p).ln())
}
