//! Field-generic dense linear algebra and the multilinear coordinate
//! conventions (wedge, symmetric square, Veronese) the pipeline is built on.
//!
//! Coordinate conventions, fixed once and used everywhere:
//!
//! * wedge coordinates on `∧²F^n` are indexed by ordered pairs `(i, j)`,
//!   `i < j`, in lexicographic order;
//! * symmetric-square coordinates on `S²F^n` are the upper-triangle entries
//!   of the symmetric matrix, pairs `(a, b)`, `a <= b`, lexicographic,
//!   row-major. Coordinates are matrix entries, not monomial coefficients:
//!   the form `2·x_a·x_b` has coordinate 1 at `(a, b)`.

pub mod approx;
pub mod exact;
pub mod matrix;

use crate::error::{Error, Result};
use crate::scalar::Field;
pub use matrix::{dot, inf_norm_slice, Matrix};

/// A hyperplane as a coefficient sequence: the covector `p -> Σ c_k p_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector<K> {
    pub coeffs: Vec<K>,
}

impl<K: Field> Covector<K> {
    pub fn new(coeffs: Vec<K>) -> Self {
        Covector { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, point: &[K]) -> K {
        dot(&self.coeffs, point)
    }

    pub fn is_zero_vector(&self) -> bool {
        self.coeffs.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, s: &K) -> Self {
        Covector::new(self.coeffs.iter().map(|x| x.clone() * s.clone()).collect())
    }
}

/// A point of `∧²F^n` in lexicographic pair coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgeVector<K> {
    pub coords: Vec<K>,
}

impl<K: Field> WedgeVector<K> {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn neg(&self) -> Self {
        WedgeVector {
            coords: self.coords.iter().map(|x| -x.clone()).collect(),
        }
    }
}

/// A symmetric bilinear form, stored as the full symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymForm<K> {
    mat: Matrix<K>,
}

impl<K: Field> SymForm<K> {
    pub fn from_matrix(mat: Matrix<K>) -> Self {
        assert!(mat.is_square(), "symmetric form must be square");
        SymForm { mat }
    }

    /// Build from upper-triangle coordinates, `(a, b)` with `a <= b`,
    /// row-major lexicographic.
    pub fn from_coords(dim: usize, coords: &[K]) -> Self {
        assert_eq!(coords.len(), sym_dim(dim), "coordinate length mismatch");
        let mut m = Matrix::zero(dim, dim);
        for (k, (a, b)) in sym_index_pairs(dim).into_iter().enumerate() {
            m.set(a, b, coords[k].clone());
            m.set(b, a, coords[k].clone());
        }
        SymForm { mat: m }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &Matrix<K> {
        &self.mat
    }

    /// Upper-triangle coordinates, the serialization order.
    pub fn coords(&self) -> Vec<K> {
        sym_index_pairs(self.dim())
            .into_iter()
            .map(|(a, b)| self.mat.at(a, b).clone())
            .collect()
    }

    /// Evaluate the quadratic form at a point: `pᵀ S p`.
    pub fn eval(&self, p: &[K]) -> K {
        assert_eq!(p.len(), self.dim(), "point dimension mismatch");
        let sp = self.mat.mul_vec(p);
        dot(&sp, p)
    }

    /// Gradient of the quadratic form at `p`: `2 S p`.
    pub fn gradient(&self, p: &[K]) -> Vec<K> {
        let two = K::from_int(2);
        self.mat
            .mul_vec(p)
            .into_iter()
            .map(|x| x * two.clone())
            .collect()
    }

}

pub fn wedge_dim(n: usize) -> usize {
    n * (n - 1) / 2
}

pub fn sym_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Ordered pairs `(i, j)`, `i < j`, lexicographic.
pub fn wedge_index_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(wedge_dim(n));
    for i in 0..n {
        for j in (i + 1)..n {
            v.push((i, j));
        }
    }
    v
}

/// Pairs `(a, b)`, `a <= b`, lexicographic.
pub fn sym_index_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(sym_dim(n));
    for a in 0..n {
        for b in a..n {
            v.push((a, b));
        }
    }
    v
}

/// Plücker coordinates of the 2-plane spanned by two covectors:
/// coordinate `(i, j)` is `L_i·L'_j − L_j·L'_i`.
pub fn wedge_coords<K: Field>(l: &Covector<K>, lp: &Covector<K>) -> Result<WedgeVector<K>> {
    if l.len() != lp.len() {
        return Err(Error::DimensionMismatch {
            what: "wedge_coords covector lengths".into(),
            got: lp.len(),
            expected: l.len(),
        });
    }
    let coords = wedge_index_pairs(l.len())
        .into_iter()
        .map(|(i, j)| {
            l.coeffs[i].clone() * lp.coeffs[j].clone() - l.coeffs[j].clone() * lp.coeffs[i].clone()
        })
        .collect();
    Ok(WedgeVector { coords })
}

/// Symmetrized outer product `(L·L'ᵀ + L'·Lᵀ)/2`; evaluating the resulting
/// form at `p` gives `L(p)·L'(p)`.
pub fn sym_outer<K: Field>(l: &Covector<K>, lp: &Covector<K>) -> Result<SymForm<K>> {
    if l.len() != lp.len() {
        return Err(Error::DimensionMismatch {
            what: "sym_outer covector lengths".into(),
            got: lp.len(),
            expected: l.len(),
        });
    }
    let half = K::one() / K::from_int(2);
    let n = l.len();
    let mat = Matrix::from_fn(n, n, |a, b| {
        (l.coeffs[a].clone() * lp.coeffs[b].clone() + l.coeffs[b].clone() * lp.coeffs[a].clone())
            * half.clone()
    });
    Ok(SymForm::from_matrix(mat))
}

/// Coordinates of the rank-one form `p·pᵀ`: the products `p_a·p_b`, `a <= b`,
/// lexicographic.
pub fn veronese_coords<K: Field>(p: &[K]) -> Result<Vec<K>> {
    if p.iter().all(|x| x.is_zero()) {
        return Err(Error::BadParameter {
            reason: "veronese_coords of the zero vector".into(),
        });
    }
    Ok(sym_index_pairs(p.len())
        .into_iter()
        .map(|(a, b)| p[a].clone() * p[b].clone())
        .collect())
}

/// Factor a rank-one symmetric form as `c·v·vᵀ` with `v` in the backend's
/// canonical direction normalization.
pub fn rank_one_factor<K: Field>(a: &SymForm<K>, cfg: &K::Cfg) -> Result<(Covector<K>, K)> {
    let n = a.dim();
    let scale = a.matrix().inf_norm();
    // A rank-one symmetric form has a nonzero diagonal entry: pick the largest.
    let mut pivot: Option<usize> = None;
    let mut best = 0.0f64;
    for k in 0..n {
        let mag = a.matrix().at(k, k).to_f64().abs();
        if !K::negligible(a.matrix().at(k, k), &scale, cfg) && mag > best {
            best = mag;
            pivot = Some(k);
        }
    }
    let k = pivot.ok_or(Error::RankOneFactorFailed { id: None })?;
    let col = a.matrix().col(k);
    let (unit, _) =
        K::normalize_direction(&col, cfg).ok_or(Error::RankOneFactorFailed { id: None })?;
    let c = a.matrix().at(k, k).clone() / (unit[k].clone() * unit[k].clone());
    // Verify the factorization; this is also the rank check.
    for r in 0..n {
        for s in 0..n {
            let expect = c.clone() * unit[r].clone() * unit[s].clone();
            let diff = a.matrix().at(r, s).clone() - expect;
            if !K::negligible(&diff, &scale, cfg) {
                return Err(Error::RankOneFactorFailed { id: None });
            }
        }
    }
    Ok((Covector::new(unit), c))
}

/// Basis of the space of quadratic forms on `F^M` vanishing at every given
/// point, computed from the kernel of the matrix of Veronese coordinates.
pub fn quadrics_through_points<K: Field>(
    points: &[Vec<K>],
    cfg: &K::Cfg,
) -> Result<Vec<SymForm<K>>> {
    let m = points
        .first()
        .ok_or_else(|| Error::BadParameter {
            reason: "quadrics_through_points needs at least one point".into(),
        })?
        .len();
    let mut rows = Vec::with_capacity(points.len());
    for p in points {
        if p.len() != m {
            return Err(Error::DimensionMismatch {
                what: "point dimension".into(),
                got: p.len(),
                expected: m,
            });
        }
        rows.push(veronese_coords(p)?);
    }
    let kernel = K::kernel_basis(&Matrix::from_rows(rows), cfg);
    // Kernel vectors are monomial coefficients; halve the off-diagonal ones
    // to land on the matrix-entry convention.
    let half = K::one() / K::from_int(2);
    let pairs = sym_index_pairs(m);
    Ok(kernel
        .into_iter()
        .map(|mono| {
            let coords: Vec<K> = mono
                .into_iter()
                .zip(&pairs)
                .map(|(c, (a, b))| if a == b { c } else { c * half.clone() })
                .collect();
            SymForm::from_coords(m, &coords)
        })
        .collect())
}

/// Basis of the common kernel of the gradients `∇q(p)` over the given forms;
/// the affine tangent space at `p` of the scheme they cut out. Every form
/// must vanish at `p`.
pub fn tangent_space_at<K: Field>(
    forms: &[SymForm<K>],
    p: &[K],
    cfg: &K::Cfg,
) -> Result<Vec<Vec<K>>> {
    let n = p.len();
    let mut rows = Vec::with_capacity(forms.len());
    for (index, q) in forms.iter().enumerate() {
        let value = q.eval(p);
        let scale = q.matrix().inf_norm() * inf_norm_slice(p) * inf_norm_slice(p);
        if !K::negligible(&value, &scale, cfg) {
            return Err(Error::FormNonVanishing { index });
        }
        rows.push(q.gradient(p));
    }
    let mat = if rows.is_empty() {
        Matrix::empty(n)
    } else {
        Matrix::from_rows(rows)
    };
    Ok(K::kernel_basis(&mat, cfg))
}

/// The operator `S²G` on symmetric-square coordinates induced by a linear map
/// `G` on covectors: as forms, `S ↦ G·S·Gᵀ`. Columns are the images of the
/// coordinate basis.
pub fn sym_square_operator<K: Field>(g: &Matrix<K>) -> Matrix<K> {
    assert!(g.is_square());
    let n = g.rows();
    let pairs = sym_index_pairs(n);
    let cols = pairs
        .iter()
        .map(|&(a, b)| {
            let basis = SymForm::from_coords(
                n,
                &pairs
                    .iter()
                    .map(|&(x, y)| {
                        if (x, y) == (a, b) {
                            K::one()
                        } else {
                            K::zero()
                        }
                    })
                    .collect::<Vec<_>>(),
            );
            let image = g.mul(basis.matrix()).mul(&g.transpose());
            SymForm::from_matrix(image).coords()
        })
        .collect();
    Matrix::from_cols(cols)
}
