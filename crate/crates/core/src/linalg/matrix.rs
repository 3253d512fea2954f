//! Dense row-major matrix container.

use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<K> {
    rows: usize,
    cols: usize,
    data: Vec<K>,
}

impl<K: Clone> Matrix<K> {
    pub fn from_rows(rows: Vec<Vec<K>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        for r in &rows {
            assert_eq!(r.len(), m, "ragged rows");
        }
        Matrix {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_cols(cols: Vec<Vec<K>>) -> Self {
        Matrix::from_rows(cols).transpose()
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> K) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// An empty matrix with zero rows and `cols` columns.
    pub fn empty(cols: usize) -> Self {
        Matrix {
            rows: 0,
            cols,
            data: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &K {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: K) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[K] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<K> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<K>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn push_row(&mut self, row: Vec<K>) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows += 1;
        self.data.extend(row);
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    /// Stack two matrices with equal column counts vertically.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "column count mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn map<L: Clone>(&self, f: impl Fn(&K) -> L) -> Matrix<L> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn entries(&self) -> &[K] {
        &self.data
    }
}

impl<K: Field> Matrix<K> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| K::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { K::one() } else { K::zero() })
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        Matrix::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = K::zero();
            for k in 0..self.cols {
                acc = acc + self.at(r, k).clone() * other.at(k, c).clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[K]) -> Vec<K> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|r| {
                let mut acc = K::zero();
                for (c, x) in v.iter().enumerate() {
                    acc = acc + self.at(r, c).clone() * x.clone();
                }
                acc
            })
            .collect()
    }

    pub fn is_symmetric_exact(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..r).all(|c| self.at(r, c) == self.at(c, r)))
    }

    /// Largest entry magnitude, as f64 (used for float-backend scales).
    pub fn inf_norm_f64(&self) -> f64 {
        self.data
            .iter()
            .map(|x| x.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude as a field element.
    pub fn inf_norm(&self) -> K {
        let mut best = K::zero();
        for x in &self.data {
            let a = x.abs();
            if best.to_f64() < a.to_f64() {
                best = a;
            }
        }
        best
    }
}

/// Dot product of two equal-length slices.
pub fn dot<K: Field>(a: &[K], b: &[K]) -> K {
    assert_eq!(a.len(), b.len(), "dot length mismatch");
    let mut acc = K::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.clone() * y.clone();
    }
    acc
}

/// Largest magnitude of a slice, as a field element.
pub fn inf_norm_slice<K: Field>(v: &[K]) -> K {
    let mut best = K::zero();
    for x in v {
        let a = x.abs();
        if best.to_f64() < a.to_f64() {
            best = a;
        }
    }
    best
}
