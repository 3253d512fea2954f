//! Exact rational elimination.
//!
//! Rows are cleared to integers and kept primitive (content stripped, first
//! nonzero entry positive); reduction is fraction-free cross-multiplication,
//! so intermediate growth stays bounded by minor sizes rather than compounding
//! through rational normalization.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::matrix::Matrix;
use crate::scalar::Rat;

/// Clear denominators of a rational row, returning an integer row with the
/// same projective content.
fn row_to_int(row: &[Rat]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in row {
        lcm = lcm.lcm(x.denom());
    }
    row.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

/// Divide by the content and make the first nonzero entry positive.
/// Returns false if the row is zero.
fn strip_content(row: &mut [BigInt]) -> bool {
    let mut g = BigInt::zero();
    for x in row.iter() {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    if g.is_zero() {
        return false;
    }
    let lead_negative = row
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| x.is_negative())
        .unwrap_or(false);
    if lead_negative {
        g = -g;
    }
    if !g.is_one() {
        for x in row.iter_mut() {
            *x = &*x / &g;
        }
    }
    true
}

/// Incremental integer row echelon, rows kept primitive, pivot columns
/// strictly increasing down the stored list.
pub struct IntEchelon {
    cols: usize,
    /// (pivot column, row) sorted by pivot column.
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl IntEchelon {
    pub fn new(cols: usize) -> Self {
        IntEchelon { cols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce a row against the current pivots without inserting it.
    /// Returns the reduced primitive row, or None if it reduces to zero.
    pub fn reduce(&self, mut row: Vec<BigInt>) -> Option<Vec<BigInt>> {
        assert_eq!(row.len(), self.cols);
        for (pc, prow) in &self.rows {
            if row[*pc].is_zero() {
                continue;
            }
            let a = prow[*pc].clone();
            let b = row[*pc].clone();
            for c in 0..self.cols {
                row[c] = &row[c] * &a - &prow[c] * &b;
            }
            strip_content(&mut row);
        }
        if strip_content(&mut row) {
            Some(row)
        } else {
            None
        }
    }

    /// Insert a rational row; returns true if it increased the rank.
    pub fn insert(&mut self, row: &[Rat]) -> bool {
        self.insert_int(row_to_int(row))
    }

    pub fn insert_int(&mut self, row: Vec<BigInt>) -> bool {
        match self.reduce(row) {
            None => false,
            Some(reduced) => {
                let pc = reduced.iter().position(|x| !x.is_zero()).expect("nonzero");
                let at = self.rows.partition_point(|(c, _)| *c < pc);
                self.rows.insert(at, (pc, reduced));
                true
            }
        }
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        self.rows.iter().map(|(c, _)| *c).collect()
    }

    /// The stored primitive rows; a basis of the row space of everything
    /// inserted so far.
    pub fn basis_rows(&self) -> Vec<Vec<Rat>> {
        self.rows
            .iter()
            .map(|(_, r)| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect()
    }

    /// Kernel of the inserted row set, one vector per free column, each
    /// primitive with positive leading entry.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        let pivot_cols = self.pivot_cols();
        let is_pivot = {
            let mut v = vec![false; self.cols];
            for &c in &pivot_cols {
                v[c] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if is_pivot[f] {
                continue;
            }
            let mut x = vec![BigRational::zero(); self.cols];
            x[f] = BigRational::one();
            // Back-substitution: rows are sorted by pivot column, and every
            // row is zero left of its own pivot, so process right to left.
            for (pc, row) in self.rows.iter().rev() {
                let mut acc = BigRational::zero();
                for c in (pc + 1)..self.cols {
                    if !row[c].is_zero() && !x[c].is_zero() {
                        acc += BigRational::from_integer(row[c].clone()) * &x[c];
                    }
                }
                x[*pc] = -acc / BigRational::from_integer(row[*pc].clone());
            }
            let (unit, _) = normalize_primitive(&x).expect("kernel vector is nonzero");
            basis.push(unit);
        }
        basis
    }
}

pub fn rank(a: &Matrix<Rat>) -> usize {
    let mut ech = IntEchelon::new(a.cols());
    for r in 0..a.rows() {
        ech.insert(a.row(r));
        if ech.rank() == a.cols() {
            break;
        }
    }
    ech.rank()
}

pub fn kernel_basis(a: &Matrix<Rat>) -> Vec<Vec<Rat>> {
    let mut ech = IntEchelon::new(a.cols());
    for r in 0..a.rows() {
        ech.insert(a.row(r));
    }
    ech.kernel()
}

/// Unique solution of `A x = rhs`.
pub fn solve_unique(a: &Matrix<Rat>, rhs: &[Rat]) -> Result<Vec<Rat>> {
    assert_eq!(a.rows(), rhs.len(), "rhs length mismatch");
    let n = a.cols();
    let mut ech = IntEchelon::new(n + 1);
    for (r, b) in rhs.iter().enumerate() {
        let mut row = a.row(r).to_vec();
        row.push(b.clone());
        ech.insert(&row);
    }
    let pivots = ech.pivot_cols();
    if pivots.contains(&n) {
        return Err(Error::NoSolution);
    }
    if pivots.len() < n {
        return Err(Error::NonUnique);
    }
    // Full column rank and consistent: solve the triangular system.
    let mut x = vec![BigRational::zero(); n];
    for (pc, row) in ech.rows.iter().rev() {
        let mut acc = BigRational::from_integer(-row[n].clone());
        for c in (pc + 1)..n {
            if !row[c].is_zero() && !x[c].is_zero() {
                acc += BigRational::from_integer(row[c].clone()) * &x[c];
            }
        }
        x[*pc] = -acc / BigRational::from_integer(row[*pc].clone());
    }
    Ok(x)
}

/// Inverse via Gauss-Jordan on `[A | I]`. Sizes here are small (the largest
/// inverted matrix is M x M with M = g(g-1)/2), so rational pivoting is fine.
pub fn invert(a: &Matrix<Rat>) -> Result<Matrix<Rat>> {
    if !a.is_square() {
        return Err(Error::Singular);
    }
    let n = a.rows();
    let mut w: Vec<Vec<Rat>> = (0..n)
        .map(|r| {
            let mut row = a.row(r).to_vec();
            for c in 0..n {
                row.push(if c == r {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
            }
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !w[r][col].is_zero())
            .ok_or(Error::Singular)?;
        w.swap(col, pivot);
        let p = w[col][col].clone();
        for entry in w[col][col..].iter_mut() {
            *entry = &*entry / &p;
        }
        for r in 0..n {
            if r != col && !w[r][col].is_zero() {
                let f = w[r][col].clone();
                let pivot_row = w[col].clone();
                for (entry, pv) in w[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    let sub = &f * pv;
                    *entry = &*entry - &sub;
                }
            }
        }
    }
    Ok(Matrix::from_rows(
        w.into_iter().map(|row| row[n..].to_vec()).collect(),
    ))
}

/// Canonical representative of a rational direction: integer entries with
/// content 1 and positive first nonzero entry. Returns `(unit, factor)` with
/// `v = factor * unit`, or None for the zero vector.
pub fn normalize_primitive(v: &[Rat]) -> Option<(Vec<Rat>, Rat)> {
    let ints = row_to_int(v);
    let mut prim = ints;
    if !strip_content(&mut prim) {
        return None;
    }
    let unit: Vec<Rat> = prim
        .into_iter()
        .map(BigRational::from_integer)
        .collect();
    let j = v.iter().position(|x| !x.is_zero()).expect("nonzero");
    let factor = &v[j] / &unit[j];
    Some((unit, factor))
}
