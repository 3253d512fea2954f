//! Prym hyperplane extraction and assembly of the tangent-cone quadrics.
//!
//! Each Steiner pair contributes a quadric on `V ⊕ W` with block structure:
//! the `V`-block is the symmetrized product of its two theta hyperplanes, the
//! `W`-block is `ε · Φ(L ∧ L')`, and the mixed block is identically zero.
//! The sign `ε` is per-pair data: swapping the unordered pair negates the
//! wedge, so the scale of the `W`-block is only pinned up to sign, and the
//! artifact recovers it from witness points (or, lacking those, from the
//! experimental coefficient-sign fallback).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{
    inf_norm_slice, rank_one_factor, sym_outer, wedge_coords, Covector, Matrix, SymForm,
    WedgeVector,
};
use crate::recovery::PhiMap;
use crate::scalar::Field;
use crate::steiner::SteinerInput;

/// One assembled tangent-cone quadric, normalized so the first nonzero
/// matrix entry is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadricForm<K> {
    pub id: u64,
    pub sign: i8,
    pub g: usize,
    pub form: SymForm<K>,
}

impl<K: Field> QuadricForm<K> {
    /// The `g x (g-1)` mixed block; zero by construction.
    pub fn mixed_block_is_zero(&self) -> bool {
        let g = self.g;
        (0..g).all(|r| (g..2 * g - 1).all(|c| self.form.matrix().at(r, c).is_zero()))
    }

    pub fn v_block(&self) -> Matrix<K> {
        let g = self.g;
        Matrix::from_fn(g, g, |r, c| self.form.matrix().at(r, c).clone())
    }

    pub fn w_block(&self) -> Matrix<K> {
        let g = self.g;
        Matrix::from_fn(g - 1, g - 1, |r, c| {
            self.form.matrix().at(g + r, g + c).clone()
        })
    }
}

/// Per-pair sign choice for the `W`-block.
pub type SignVector = BTreeMap<u64, i8>;

/// Rank-one factor of every image form: the odd Prym theta hyperplanes with
/// their scalars.
pub fn prym_hyperplanes<K: Field>(
    phi: &PhiMap<K>,
    points: &[(u64, WedgeVector<K>)],
    cfg: &K::Cfg,
) -> Result<BTreeMap<u64, (Covector<K>, K)>> {
    let mut out = BTreeMap::new();
    for (id, w) in points {
        let form = phi.apply_form(w);
        let (v, c) = rank_one_factor(&form, cfg).map_err(|_| Error::RankOneFactorFailed {
            id: Some(*id),
        })?;
        out.insert(*id, (v, c));
    }
    Ok(out)
}

fn assemble_one<K: Field>(
    g: usize,
    v_block: &SymForm<K>,
    w_block: &Matrix<K>,
    sign: i8,
) -> Matrix<K> {
    let n = 2 * g - 1;
    let eps = K::from_int(sign as i64);
    Matrix::from_fn(n, n, |r, c| {
        if r < g && c < g {
            v_block.matrix().at(r, c).clone()
        } else if r >= g && c >= g {
            eps.clone() * w_block.at(r - g, c - g).clone()
        } else {
            K::zero()
        }
    })
}

/// Divide by the first non-negligible entry in row-major order, so the
/// emitted matrix is a reproducible projective representative.
fn normalize_projective<K: Field>(mat: Matrix<K>, cfg: &K::Cfg) -> Matrix<K> {
    let scale = mat.inf_norm();
    let n = mat.rows();
    for r in 0..n {
        for c in 0..n {
            if !K::negligible(mat.at(r, c), &scale, cfg) {
                let pivot = mat.at(r, c).clone();
                return mat.map(|x| x.clone() / pivot.clone());
            }
        }
    }
    mat
}

/// Assemble the quadric of every pair, using the same covector
/// representatives that produced the wedge points so the two blocks stay on
/// the same scale.
pub fn assemble_quadrics<K: Field>(
    inp: &SteinerInput<K>,
    phi: &PhiMap<K>,
    signs: &SignVector,
    cfg: &K::Cfg,
) -> Result<Vec<QuadricForm<K>>> {
    let g = inp.ctx.g();
    let mut out = Vec::with_capacity(inp.pairs.len());
    for pair in &inp.pairs {
        let sign = *signs
            .get(&pair.id)
            .ok_or(Error::MissingSign { id: pair.id })?;
        if sign != 1 && sign != -1 {
            return Err(Error::MissingSign { id: pair.id });
        }
        let v_block = sym_outer(&pair.l, &pair.lp)?;
        let wedge = wedge_coords(&pair.l, &pair.lp)?;
        let w_block = phi.apply_form(&wedge);
        let mat = assemble_one(g, &v_block, w_block.matrix(), sign);
        out.push(QuadricForm {
            id: pair.id,
            sign,
            g,
            form: SymForm::from_matrix(normalize_projective(mat, cfg)),
        });
    }
    Ok(out)
}

/// Evaluate both sign candidates of one pair at a witness:
/// returns `(L(v)·L'(v), Φ(L∧L')(w))`.
fn candidate_values<K: Field>(
    pair: &crate::steiner::ThetaPair<K>,
    phi: &PhiMap<K>,
    witness: &[K],
    g: usize,
) -> Result<(K, K)> {
    let v = &witness[..g];
    let w = &witness[g..];
    let lv = pair.l.eval(v) * pair.lp.eval(v);
    let wedge = wedge_coords(&pair.l, &pair.lp)?;
    let form = phi.apply_form(&wedge);
    Ok((lv, form.eval(w)))
}

/// Choose, for every pair, the sign whose quadric vanishes at all witnesses.
pub fn resolve_signs<K: Field>(
    inp: &SteinerInput<K>,
    phi: &PhiMap<K>,
    witnesses: &[Vec<K>],
    cfg: &K::Cfg,
) -> Result<SignVector> {
    if witnesses.is_empty() {
        return Err(Error::NoWitnesses);
    }
    let g = inp.ctx.g();
    let mut signs = SignVector::new();
    for pair in &inp.pairs {
        let mut plus_ok = true;
        let mut minus_ok = true;
        for p in witnesses {
            let (lv, wv) = candidate_values(pair, phi, p, g)?;
            let scale = lv.abs() + wv.abs();
            let plus = lv.clone() + wv.clone();
            let minus = lv - wv;
            plus_ok &= K::negligible(&plus, &scale, cfg);
            minus_ok &= K::negligible(&minus, &scale, cfg);
            if !plus_ok && !minus_ok {
                break;
            }
        }
        let eps = match (plus_ok, minus_ok) {
            (true, false) => 1,
            (false, true) => -1,
            _ => return Err(Error::AmbiguousSign { id: pair.id }),
        };
        signs.insert(pair.id, eps);
    }
    Ok(signs)
}

/// EXPERIMENTAL witness-free fallback.
///
/// In any gauge the image of a Steiner wedge is a scalar times a square, and
/// the defining identity puts the square into the quadric with a minus sign;
/// so the per-pair sign is the negated sign of the rank-one coefficient.
/// This agrees with witness-based resolution on every oracle instance, but
/// blind inputs have no independent check, hence the label.
pub fn resolve_signs_blind<K: Field>(
    phi: &PhiMap<K>,
    points: &[(u64, WedgeVector<K>)],
    cfg: &K::Cfg,
) -> Result<SignVector> {
    let mut signs = SignVector::new();
    for (id, w) in points {
        let (_, c) = rank_one_factor(&phi.apply_form(w), cfg)
            .map_err(|_| Error::RankOneFactorFailed { id: Some(*id) })?;
        signs.insert(*id, if c.to_f64() > 0.0 { -1 } else { 1 });
    }
    Ok(signs)
}

/// The scale-sensitive residual of one quadric at one point, relative to the
/// float tolerance model `tol · ||Q|| · ||p||²`.
pub fn quadric_residual_scale<K: Field>(q: &QuadricForm<K>, p: &[K]) -> K {
    let pn = inf_norm_slice(p);
    q.form.matrix().inf_norm() * pn.clone() * pn
}
