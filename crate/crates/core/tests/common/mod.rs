#![allow(dead_code)]

use loire::{DenseMatrix, DenseVector};
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rows = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rows(rng: &mut ChaCha8Rng, m: usize, n: usize, lo: f64, hi: f64) -> Rows {
    (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(lo..hi)).collect())
        .collect()
}

pub fn random_vec(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn to_matrix(rows: &Rows) -> DenseMatrix {
    DenseMatrix::from_rows(rows).unwrap()
}

pub fn to_rows(a: &DenseMatrix) -> Rows {
    (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| a[(i, j)]).collect())
        .collect()
}

pub fn to_vector(v: &[f64]) -> DenseVector {
    DenseVector::from_slice(v).unwrap()
}

pub fn matmul(a: &Rows, b: &Rows) -> Rows {
    let k = b.len();
    let n = if k == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| (0..k).map(|l| row[l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose(a: &Rows) -> Rows {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j]).collect())
        .collect()
}

pub fn matvec(a: &Rows, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

pub fn frob(a: &Rows) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns the
/// eigenvalues in descending order and the matching eigenvectors as columns.
pub fn jacobi_eigen(sym: &Rows) -> (Vec<f64>, Rows) {
    let n = sym.len();
    let mut a = sym.clone();
    let mut v: Rows = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = (0..n)
        .map(|k| order.iter().map(|&i| v[k][i]).collect())
        .collect();
    (values, vectors)
}

/// Singular values of `a`, descending, via the eigenvalues of the smaller Gram matrix.
pub fn singular_values(a: &Rows) -> Vec<f64> {
    let at = transpose(a);
    let gram = if a.len() <= at.len() {
        matmul(a, &at)
    } else {
        matmul(&at, a)
    };
    jacobi_eigen(&gram).0.into_iter().map(|l| l.max(0.0).sqrt()).collect()
}

/// Least squares by Gaussian elimination on the normal equations; only for
/// well-conditioned full-column-rank test systems.
pub fn normal_equations(a: &Rows, y: &[f64]) -> Vec<f64> {
    let n = a[0].len();
    let at = transpose(a);
    let mut g = matmul(&at, a);
    let mut rhs = matvec(&at, y);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| g[i][col].abs().total_cmp(&g[j][col].abs()))
            .unwrap();
        g.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let f = g[row][col] / g[col][col];
            for k in col..n {
                g[row][k] -= f * g[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| g[row][k] * x[k]).sum();
        x[row] = (rhs[row] - s) / g[row][row];
    }
    x
}

pub fn naive_loire_objective(a: &Rows, y: &[f64], x: &[f64], b: &[f64], lambda: f64) -> f64 {
    let mut l1 = 0.0;
    let mut sq = 0.0;
    for i in 0..y.len() {
        let mut ax = 0.0;
        for j in 0..x.len() {
            ax += a[i][j] * x[j];
        }
        let r = y[i] - ax - b[i];
        sq += r * r;
        l1 += b[i].abs();
    }
    l1 + lambda / 2.0 * sq
}

pub fn naive_rrf_objective(y: &Rows, a: &Rows, x: &Rows, b: &Rows, lambda: f64) -> f64 {
    let mut l1 = 0.0;
    let mut sq = 0.0;
    for i in 0..y.len() {
        for j in 0..y[0].len() {
            let mut ax = 0.0;
            for k in 0..x.len() {
                ax += a[i][k] * x[k][j];
            }
            let r = y[i][j] - ax - b[i][j];
            sq += r * r;
            l1 += b[i][j].abs();
        }
    }
    l1 + lambda / 2.0 * sq
}

/// Golden-section search for the minimizer of a convex function on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Minimizes `sum |b_i| + lambda/2 (y_i - x - b_i)^2` over scalar `x` and
/// `b` by nested derivative-free searches.
pub fn scalar_location_oracle(y: &[f64], lambda: f64) -> (f64, Vec<f64>) {
    let lo = y.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let span = hi - lo;
    let best_b = |r: f64| golden_min(|b| b.abs() + lambda / 2.0 * (r - b) * (r - b), -span, span, 1e-12);
    let marginal = |x: f64| {
        y.iter()
            .map(|&yi| {
                let b = best_b(yi - x);
                b.abs() + lambda / 2.0 * (yi - x - b).powi(2)
            })
            .sum::<f64>()
    };
    let x = golden_min(marginal, lo, hi, 1e-11);
    let b = y.iter().map(|&yi| best_b(yi - x)).collect();
    (x, b)
}

/// `min_x ||y - A x||_1` as a linear program over `(x, t)`.
pub fn lad_lp_objective(a: &Rows, y: &[f64]) -> f64 {
    let n = a[0].len();
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let xs: Vec<_> = (0..n)
        .map(|_| p.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for (row, &yi) in a.iter().zip(y) {
        let t = p.add_var(1.0, (0.0, f64::INFINITY));
        // t + a.x >= y  and  t - a.x >= -y
        let mut plus = vec![(t, 1.0)];
        let mut minus = vec![(t, 1.0)];
        for (j, &aij) in row.iter().enumerate() {
            plus.push((xs[j], aij));
            minus.push((xs[j], -aij));
        }
        p.add_constraint(&plus[..], ComparisonOp::Ge, yi);
        p.add_constraint(&minus[..], ComparisonOp::Ge, -yi);
    }
    p.solve().unwrap().objective()
}

pub fn l1_residual(a: &Rows, y: &[f64], x: &[f64]) -> f64 {
    matvec(a, x).iter().zip(y).map(|(f, yi)| (yi - f).abs()).sum()
}

/// All subsets of `0..m` with at most `max` elements.
pub fn all_subsets(m: usize, max: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << m))
        .filter(|mask| mask.count_ones() as usize <= max)
        .map(|mask| (0..m).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Residual of the least-squares refit on the rows outside `support`.
pub fn brute_residual(a: &Rows, y: &[f64], support: &[usize]) -> f64 {
    let keep: Vec<usize> = (0..y.len()).filter(|i| !support.contains(i)).collect();
    let ak: Rows = keep.iter().map(|&i| a[i].clone()).collect();
    let yk: Vec<f64> = keep.iter().map(|&i| y[i]).collect();
    let x = normal_equations(&ak, &yk);
    let fit = matvec(&ak, &x);
    norm2(&yk.iter().zip(&fit).map(|(p, q)| p - q).collect::<Vec<_>>())
}
