//! Recovery of the isomorphism `Φ: ∧²V → S²W` from the wedge points alone.
//!
//! The wedge points of a Steiner system land, under the unknown `Φ`, on the
//! Veronese variety of squares inside `S²W`. The variety is cut out by the
//! quadrics through the point set, its affine tangent space at a square
//! `f_a²` is `f_a·W`, and two tangent spaces meet in the line spanned by
//! `f_a·f_b`. That is enough linear algebra to rebuild coordinates on `S²W`
//! in which every wedge point becomes a square: pick `g-1` points as the
//! squares of a basis, take pairwise tangent intersections for the mixed
//! products, and use one more point to normalize the relative scales, the
//! coordinate analog of placing an extra point at the sum of the basis
//! points. The result is canonical up to one basis change of `W`, which is
//! exactly the gauge freedom the comparison below quantifies.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    approx, inf_norm_slice, quadrics_through_points, rank_one_factor, sym_dim, sym_index_pairs,
    Covector, Matrix, SymForm, WedgeVector,
};
use crate::scalar::Field;
use crate::steiner::{validate_spanning, CurveContext, ThetaPair};

/// The linear map `∧²V → S²W`: an `M x M` matrix with rows indexed by the
/// symmetric-square basis (pairs `(a, b)`, `a <= b`, lex) and columns by the
/// wedge basis (pairs `(i, j)`, `i < j`, lex).
#[derive(Debug, Clone, PartialEq)]
pub struct PhiMap<K> {
    g: usize,
    pub matrix: Matrix<K>,
}

impl<K: Field> PhiMap<K> {
    pub fn new(g: usize, matrix: Matrix<K>) -> Result<Self> {
        let m = crate::linalg::wedge_dim(g);
        if matrix.rows() != m || matrix.cols() != m {
            return Err(Error::DimensionMismatch {
                what: "phi matrix size".into(),
                got: matrix.rows(),
                expected: m,
            });
        }
        Ok(PhiMap { g, matrix })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// Image of a wedge vector, as symmetric-square coordinates.
    pub fn apply(&self, w: &WedgeVector<K>) -> Vec<K> {
        self.matrix.mul_vec(&w.coords)
    }

    /// Image of a wedge vector, as a symmetric form on `W`.
    pub fn apply_form(&self, w: &WedgeVector<K>) -> SymForm<K> {
        SymForm::from_coords(self.g - 1, &self.apply(w))
    }

    pub fn compose_left(&self, op: &Matrix<K>) -> Result<Self> {
        PhiMap::new(self.g, op.mul(&self.matrix))
    }
}

/// Diagnostics of one recovery run.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryDiagnostics {
    pub dim_i2: usize,
    /// Normalization point id first, then the ids whose squares form the
    /// coordinate basis.
    pub chosen_basis_ids: Vec<u64>,
    pub restarts_used: u32,
    /// Float backend only: per-pair second-to-first singular value ratio of
    /// the image forms.
    pub rank1_residuals: Option<BTreeMap<u64, f64>>,
}

/// Per-pair rank-one verdicts for the images of the wedge points.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneReport {
    pub entries: Vec<(u64, bool)>,
    /// Worst second-to-first singular value ratio across pairs (float lens
    /// on the exact backend too; exactly zero there when all verdicts hold).
    pub worst_residual: f64,
}

impl RankOneReport {
    pub fn all_rank_one(&self) -> bool {
        self.entries.iter().all(|(_, ok)| *ok)
    }

    pub fn failing_ids(&self) -> Vec<u64> {
        self.entries
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(id, _)| *id)
            .collect()
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Expected dimension of the space of quadrics through the Veronese image of
/// `P(W)` in `P(S²W)`.
pub fn expected_i2_dim(g: usize) -> usize {
    let m = crate::linalg::wedge_dim(g);
    sym_dim(m) - binomial(g + 2, 4)
}

/// Recover `Φ` from the wedge points of a Steiner system.
///
/// Steps: (1) compute the quadrics through the points and pin their count;
/// (2) compute tangent spaces and keep the points where the dimension is the
/// generic `g-1`; (3) seeded search for a normalization point and `g-1`
/// basis points whose pairwise tangent intersections are lines and whose
/// expansion coefficients are all nonzero; (4) scale the basis columns by
/// those coefficients and invert; (5) accept only if every input point maps
/// to a rank-one form, restarting otherwise.
pub fn recover_phi<K: Field>(
    points: &[(u64, WedgeVector<K>)],
    ctx: &CurveContext,
    seed: u64,
    max_restarts: u32,
    cfg: &K::Cfg,
) -> Result<(PhiMap<K>, RecoveryDiagnostics)> {
    let g = ctx.g();
    let m = ctx.wedge_dim();
    validate_spanning(points, ctx, cfg)?;

    // Work with canonical projective representatives; on the float backend
    // this keeps the Veronese rows and gradients well scaled.
    let coords: Vec<Vec<K>> = points
        .iter()
        .map(|(_, w)| {
            K::normalize_direction(&w.coords, cfg)
                .map(|(unit, _)| unit)
                .unwrap_or_else(|| w.coords.clone())
        })
        .collect();
    let i2 = quadrics_through_points(&coords, cfg)?;
    let expected = expected_i2_dim(g);
    if i2.len() != expected {
        return Err(Error::DimensionMismatch {
            what: "dimension of the quadrics through the wedge points".into(),
            got: i2.len(),
            expected,
        });
    }

    let grads: Vec<Matrix<K>> = coords
        .iter()
        .map(|q| Matrix::from_rows(i2.iter().map(|f| f.gradient(q)).collect()))
        .collect();
    let candidates: Vec<usize> = (0..points.len())
        .filter(|&i| m - K::rank(&grads[i], cfg) == g - 1)
        .collect();
    if candidates.len() < g {
        return Err(Error::DimensionMismatch {
            what: "points with tangent space of dimension g-1".into(),
            got: candidates.len(),
            expected: g,
        });
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut last_failing: Vec<u64> = Vec::new();
    for restart in 0..max_restarts {
        let picked = rand::seq::index::sample(&mut rng, candidates.len(), g).into_vec();
        let norm_idx = candidates[picked[0]];
        let basis_idx: Vec<usize> = picked[1..].iter().map(|&p| candidates[p]).collect();

        let Some(phi_matrix) = try_basis(&coords, &grads, norm_idx, &basis_idx, g, m, cfg) else {
            continue;
        };
        let phi = PhiMap::new(g, phi_matrix)?;

        let failing: Vec<u64> = points
            .iter()
            .filter(|(_, w)| rank_one_factor(&phi.apply_form(w), cfg).is_err())
            .map(|(id, _)| *id)
            .collect();
        if failing.is_empty() {
            let rank1_residuals = if K::EXACT {
                None
            } else {
                Some(
                    points
                        .iter()
                        .map(|(id, w)| (*id, rank_one_residual(&phi.apply_form(w))))
                        .collect(),
                )
            };
            let mut chosen = vec![points[norm_idx].0];
            chosen.extend(basis_idx.iter().map(|&i| points[i].0));
            return Ok((
                phi,
                RecoveryDiagnostics {
                    dim_i2: i2.len(),
                    chosen_basis_ids: chosen,
                    restarts_used: restart,
                    rank1_residuals,
                },
            ));
        }
        last_failing = failing;
    }
    Err(Error::MaxRestartsExceeded {
        restarts: max_restarts,
        last_failing,
    })
}

/// One basis attempt; None means a degenerate choice (restart material).
fn try_basis<K: Field>(
    coords: &[Vec<K>],
    grads: &[Matrix<K>],
    norm_idx: usize,
    basis_idx: &[usize],
    g: usize,
    m: usize,
    cfg: &K::Cfg,
) -> Option<Matrix<K>> {
    let n = g - 1;
    let mut intersections: BTreeMap<(usize, usize), Vec<K>> = BTreeMap::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let stacked = grads[basis_idx[a]].vstack(&grads[basis_idx[b]]);
            let ker = K::kernel_basis(&stacked, cfg);
            if ker.len() != 1 {
                return None;
            }
            intersections.insert((a, b), ker.into_iter().next().unwrap());
        }
    }

    let cols: Vec<Vec<K>> = sym_index_pairs(n)
        .into_iter()
        .map(|(a, b)| {
            if a == b {
                coords[basis_idx[a]].clone()
            } else {
                intersections[&(a, b)].clone()
            }
        })
        .collect();
    let basis_matrix = Matrix::from_cols(cols.clone());
    let expansion = match K::solve_unique(&basis_matrix, &coords[norm_idx], cfg) {
        Ok(x) => x,
        Err(_) => return None,
    };
    let scale = inf_norm_slice(&expansion);
    if expansion.iter().any(|c| K::negligible(c, &scale, cfg)) {
        return None;
    }

    // Columns of Φ⁻¹ in matrix-entry coordinates: the square basis vectors
    // carry their expansion coefficient, the mixed ones carry theirs (the
    // coordinate unit at (a, b), a < b, is the form 2·f_a·f_b, which absorbs
    // the factor 1/2 of the abstract normalization).
    let scaled: Vec<Vec<K>> = cols
        .iter()
        .zip(&expansion)
        .map(|(col, c)| col.iter().map(|x| x.clone() * c.clone()).collect())
        .collect();
    let phi_inv = Matrix::from_cols(scaled);
    debug_assert_eq!(phi_inv.rows(), m);
    K::invert(&phi_inv, cfg).ok()
}

/// Second-to-first singular value ratio of a form's matrix, through f64.
fn rank_one_residual<K: Field>(form: &SymForm<K>) -> f64 {
    let mf = form.matrix().map(|x| x.to_f64());
    let sv = approx::singular_values(&mf);
    match (sv.first(), sv.get(1)) {
        (Some(&s1), Some(&s2)) if s1 > 0.0 => s2 / s1,
        _ => 0.0,
    }
}

/// Rank-one verdict for every pair image under `phi`.
pub fn verify_rank_one_preimages<K: Field>(
    phi: &PhiMap<K>,
    points: &[(u64, WedgeVector<K>)],
    cfg: &K::Cfg,
) -> RankOneReport {
    let mut entries = Vec::with_capacity(points.len());
    let mut worst = 0.0f64;
    for (id, w) in points {
        let form = phi.apply_form(w);
        let ok = rank_one_factor(&form, cfg).is_ok();
        worst = worst.max(rank_one_residual(&form));
        entries.push((*id, ok));
    }
    RankOneReport {
        entries,
        worst_residual: worst,
    }
}

/// A basis change of `W` witnessing that two maps agree up to gauge:
/// `phi_b ∘ phi_a⁻¹ = scale · S²(map)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlWitness<K> {
    pub map: Matrix<K>,
    pub scale: K,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GlComparison<K> {
    Witness(GlWitness<K>),
    Mismatch,
}

/// Decide whether `phi_b = scale · S²g ∘ phi_a` for some basis change `g` of
/// `W`, and produce the witness. `Mismatch` is a result, not an error.
pub fn compare_up_to_gl<K: Field>(
    phi_a: &PhiMap<K>,
    phi_b: &PhiMap<K>,
    ctx: &CurveContext,
    cfg: &K::Cfg,
) -> Result<GlComparison<K>> {
    let n = ctx.dim_w();
    let psi = phi_b.matrix.mul(&K::invert(&phi_a.matrix, cfg)?);
    let pairs = sym_index_pairs(n);
    let col_of = |a: usize, b: usize| -> Vec<K> {
        let k = pairs.iter().position(|&p| p == (a, b)).expect("pair index");
        psi.col(k)
    };

    // Rank-one factors of the images of the pure squares.
    let mut dirs: Vec<Covector<K>> = Vec::with_capacity(n);
    let mut sq_scales: Vec<K> = Vec::with_capacity(n);
    for a in 0..n {
        let form = SymForm::from_coords(n, &col_of(a, a));
        match rank_one_factor(&form, cfg) {
            Ok((v, c)) => {
                dirs.push(v);
                sq_scales.push(c);
            }
            Err(_) => return Ok(GlComparison::Mismatch),
        }
    }

    // Mixed images fix the relative scales.
    let mut mixed: BTreeMap<(usize, usize), K> = BTreeMap::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let actual = SymForm::from_coords(n, &col_of(a, b));
            let expect = Matrix::from_fn(n, n, |r, s| {
                dirs[a].coeffs[r].clone() * dirs[b].coeffs[s].clone()
                    + dirs[b].coeffs[r].clone() * dirs[a].coeffs[s].clone()
            });
            let escale = expect.inf_norm();
            let Some((r, s)) = (0..n)
                .flat_map(|r| (0..n).map(move |s| (r, s)))
                .find(|&(r, s)| !K::negligible(expect.at(r, s), &escale, cfg))
            else {
                return Ok(GlComparison::Mismatch);
            };
            let w = actual.matrix().at(r, s).clone() / expect.at(r, s).clone();
            let check_scale = actual.matrix().inf_norm();
            for r2 in 0..n {
                for s2 in 0..n {
                    let diff =
                        actual.matrix().at(r2, s2).clone() - w.clone() * expect.at(r2, s2).clone();
                    if !K::negligible(&diff, &check_scale, cfg) {
                        return Ok(GlComparison::Mismatch);
                    }
                }
            }
            mixed.insert((a, b), w);
        }
    }

    // Consistency: scale = c_0, t_0 = 1, t_b = w_{0b}/scale; then
    // c_a = scale·t_a² and w_{ab} = scale·t_a·t_b must hold throughout.
    let tau = sq_scales[0].clone();
    let mut t = vec![K::one()];
    for b in 1..n {
        t.push(mixed[&(0, b)].clone() / tau.clone());
    }
    let consistency_scale = inf_norm_slice(&sq_scales);
    for a in 0..n {
        let diff = sq_scales[a].clone() - tau.clone() * t[a].clone() * t[a].clone();
        if !K::negligible(&diff, &consistency_scale, cfg) {
            return Ok(GlComparison::Mismatch);
        }
    }
    for (&(a, b), w) in &mixed {
        let diff = w.clone() - tau.clone() * t[a].clone() * t[b].clone();
        if !K::negligible(&diff, &w.abs(), cfg) {
            return Ok(GlComparison::Mismatch);
        }
    }

    let gmat = Matrix::from_cols(
        (0..n)
            .map(|a| {
                dirs[a]
                    .coeffs
                    .iter()
                    .map(|x| x.clone() * t[a].clone())
                    .collect()
            })
            .collect(),
    );
    if K::rank(&gmat, cfg) != n {
        return Ok(GlComparison::Mismatch);
    }
    Ok(GlComparison::Witness(GlWitness {
        map: gmat,
        scale: tau,
    }))
}

/// Realign a recovered map so that the assembled quadrics vanish on the given
/// witness coordinates: solve, linearly, for the operator on `S²W` that makes
/// every image form evaluate to `L(v)·L'(v)` at every witness, then verify it
/// restores rank-one images.
pub fn align_phi_to_witnesses<K: Field>(
    phi: &PhiMap<K>,
    pairs: &[ThetaPair<K>],
    wedges: &[(u64, WedgeVector<K>)],
    witnesses: &[Vec<K>],
    ctx: &CurveContext,
    cfg: &K::Cfg,
) -> Result<PhiMap<K>> {
    if witnesses.is_empty() {
        return Err(Error::NoWitnesses);
    }
    let g = ctx.g();
    let n = ctx.dim_w();
    let m = ctx.wedge_dim();
    let sym_pairs = sym_index_pairs(n);
    let two = K::from_int(2);

    let mut rows: Vec<Vec<K>> = Vec::with_capacity(pairs.len() * witnesses.len());
    let mut rhs: Vec<K> = Vec::with_capacity(rows.capacity());
    for (pair, (id, wvec)) in pairs.iter().zip(wedges) {
        debug_assert_eq!(pair.id, *id);
        let image = phi.apply(wvec);
        for p in witnesses {
            let v = &p[..g];
            let w = &p[g..];
            let wmon: Vec<K> = sym_pairs
                .iter()
                .map(|&(a, b)| {
                    let prod = w[a].clone() * w[b].clone();
                    if a == b {
                        prod
                    } else {
                        prod * two.clone()
                    }
                })
                .collect();
            let mut row = Vec::with_capacity(m * m);
            for wm in &wmon {
                for bc in &image {
                    row.push(wm.clone() * bc.clone());
                }
            }
            rows.push(row);
            rhs.push(pair.l.eval(v) * pair.lp.eval(v));
        }
    }
    let solution = K::solve_unique(&Matrix::from_rows(rows), &rhs, cfg).map_err(|e| {
        Error::GaugeMismatch {
            reason: match e {
                Error::NonUnique => "witness system does not determine the alignment".into(),
                _ => "no linear alignment reproduces the witness values".into(),
            },
        }
    })?;
    let op = Matrix::from_fn(m, m, |r, c| solution[r * m + c].clone());
    let aligned = phi.compose_left(&op)?;
    for (id, wvec) in wedges {
        if rank_one_factor(&aligned.apply_form(wvec), cfg).is_err() {
            return Err(Error::GaugeMismatch {
                reason: format!("aligned map is not rank-one on pair {id}"),
            });
        }
    }
    Ok(aligned)
}
