//! Float-backend linear algebra on top of nalgebra's SVD.
//!
//! Rank decisions count singular values above `tol * sigma_max`; kernels come
//! from the trailing right-singular vectors. The float backend is a
//! performance mode: agreement with the exact backend on rank decisions is
//! what the acceptance suite checks.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::matrix::Matrix;

fn to_na(a: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.rows(), a.cols(), |r, c| *a.at(r, c))
}

struct Decomp {
    singular: Vec<f64>,
    /// V^T, rows are right-singular vectors, sorted by decreasing singular value.
    v_t: DMatrix<f64>,
}

fn svd(a: &Matrix<f64>) -> Decomp {
    let m = to_na(a);
    let svd = m.svd(false, true);
    let singular: Vec<f64> = svd.singular_values.iter().copied().collect();
    debug_assert!(singular.windows(2).all(|w| w[0] >= w[1]));
    Decomp {
        singular,
        v_t: svd.v_t.expect("v_t requested"),
    }
}

fn rank_from(singular: &[f64], tol: f64) -> usize {
    let largest = singular.first().copied().unwrap_or(0.0);
    if largest <= 0.0 {
        return 0;
    }
    singular.iter().filter(|&&s| s > tol * largest).count()
}

pub fn rank(a: &Matrix<f64>, tol: f64) -> usize {
    if a.rows() == 0 || a.cols() == 0 {
        return 0;
    }
    rank_from(&svd(a).singular, tol)
}

/// Singular values in decreasing order.
pub fn singular_values(a: &Matrix<f64>) -> Vec<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    svd(a).singular
}

pub fn kernel_basis(a: &Matrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let n = a.cols();
    if n == 0 {
        return Vec::new();
    }
    // Equilibrate: scaling rows never changes the kernel, and it keeps the
    // relative singular-value cut meaningful when row magnitudes vary widely.
    let rows: Vec<Vec<f64>> = (0..a.rows())
        .filter_map(|r| {
            let row = a.row(r);
            let norm: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                None
            } else {
                Some(row.iter().map(|x| x / norm).collect())
            }
        })
        .collect();
    if rows.is_empty() {
        return (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
    }
    let a = &Matrix::from_rows(rows);
    let dec = svd(a);
    let r = rank_from(&dec.singular, tol);
    // v_t has min(rows, cols) rows; columns of V beyond that are also kernel.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in r..dec.v_t.nrows() {
        let row: Vec<f64> = (0..n).map(|c| dec.v_t[(i, c)]).collect();
        basis.push(row);
    }
    // If rows < cols the SVD is thin; complete the kernel by projecting the
    // standard basis onto the orthogonal complement of the row space of v_t.
    if dec.v_t.nrows() < n {
        let mut have: Vec<Vec<f64>> = (0..dec.v_t.nrows())
            .map(|i| (0..n).map(|c| dec.v_t[(i, c)]).collect())
            .collect();
        for i in 0..n {
            if basis.len() + r == n {
                break;
            }
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            for q in &have {
                let d: f64 = q.iter().zip(&e).map(|(x, y)| x * y).sum();
                for (ek, qk) in e.iter_mut().zip(q) {
                    *ek -= d * qk;
                }
            }
            let norm: f64 = e.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                let unit: Vec<f64> = e.iter().map(|x| x / norm).collect();
                have.push(unit.clone());
                basis.push(unit);
            }
        }
    }
    basis
        .into_iter()
        .map(|v| normalize_unit(&v, tol).expect("kernel vector nonzero").0)
        .collect()
}

pub fn solve_unique(a: &Matrix<f64>, rhs: &[f64], tol: f64) -> Result<Vec<f64>> {
    assert_eq!(a.rows(), rhs.len(), "rhs length mismatch");
    let n = a.cols();
    if rank(a, tol) < n {
        return Err(Error::NonUnique);
    }
    let m = to_na(a);
    let b = nalgebra::DVector::from_column_slice(rhs);
    let svd = m.clone().svd(true, true);
    let x = svd.solve(&b, 0.0).map_err(|_| Error::NoSolution)?;
    let resid = (&m * &x) - &b;
    let scale = m.amax().max(1.0) * x.amax().max(b.amax());
    if resid.amax() > tol * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NoSolution);
    }
    Ok(x.iter().copied().collect())
}

pub fn invert(a: &Matrix<f64>, tol: f64) -> Result<Matrix<f64>> {
    if !a.is_square() {
        return Err(Error::Singular);
    }
    if rank(a, tol) < a.rows() {
        return Err(Error::Singular);
    }
    let inv = to_na(a).try_inverse().ok_or(Error::Singular)?;
    Ok(Matrix::from_fn(a.rows(), a.cols(), |r, c| inv[(r, c)]))
}

/// Unit 2-norm representative with positive first significant entry.
pub fn normalize_unit(v: &[f64], tol: f64) -> Option<(Vec<f64>, f64)> {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let lead = v.iter().find(|x| x.abs() > tol * max)?;
    let sign = if *lead < 0.0 { -1.0 } else { 1.0 };
    let factor = sign * norm;
    Some((v.iter().map(|x| x / factor).collect(), factor))
}
