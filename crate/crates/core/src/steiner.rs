//! Input model: a Steiner system of theta hyperplane pairs, with structural
//! validation and the map to wedge points.

use crate::error::{Error, Result};
use crate::linalg::{inf_norm_slice, wedge_coords, wedge_dim, Covector, Matrix, WedgeVector};
use crate::oracle::GroundTruth;
use crate::scalar::Field;

/// A wedge is degenerate when it vanishes relative to the covector scales
/// (exactly zero on the exact backend).
fn wedge_is_degenerate<K: Field>(
    w: &WedgeVector<K>,
    l: &Covector<K>,
    lp: &Covector<K>,
    cfg: &K::Cfg,
) -> bool {
    let scale = inf_norm_slice(&l.coeffs) * inf_norm_slice(&lp.coeffs);
    w.coords.iter().all(|x| K::negligible(x, &scale, cfg))
}

/// Genus bookkeeping: dimensions of `V = H⁰(ω)`, `W = H⁰(ω+α)` and the
/// derived spaces, plus the ambient coordinate count for the assembled
/// quadrics (`v_0..v_{g-1}, w_0..w_{g-2}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveContext {
    g: usize,
}

impl CurveContext {
    pub fn new(g: usize) -> Result<Self> {
        if g < 3 {
            return Err(Error::MalformedInput {
                path: "genus".into(),
                reason: format!("genus must be >= 3, got {g}"),
            });
        }
        Ok(CurveContext { g })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn dim_v(&self) -> usize {
        self.g
    }

    pub fn dim_w(&self) -> usize {
        self.g - 1
    }

    /// `M = g(g-1)/2 = dim ∧²V = dim S²W`.
    pub fn wedge_dim(&self) -> usize {
        wedge_dim(self.g)
    }

    pub fn ambient(&self) -> usize {
        2 * self.g - 1
    }
}

/// One Steiner pair: the two theta hyperplanes whose theta characteristics
/// differ by the 2-torsion point.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaPair<K> {
    pub id: u64,
    pub l: Covector<K>,
    pub lp: Covector<K>,
}

/// Pipeline input: validated pairs, optional witness points on the canonical
/// image of the double cover, optional generator ground truth.
#[derive(Debug, Clone)]
pub struct SteinerInput<K: Field> {
    pub ctx: CurveContext,
    pub pairs: Vec<ThetaPair<K>>,
    pub witnesses: Vec<Vec<K>>,
    pub ground_truth: Option<GroundTruth<K>>,
}

/// Structural validation: covector lengths, nonzero and non-proportional
/// pairs, unique ids, witness dimensions, and the minimum pair count `M`
/// needed for any recovery to be possible.
pub fn validate_input<K: Field>(inp: &SteinerInput<K>, cfg: &K::Cfg) -> Result<CurveContext> {
    let ctx = inp.ctx;
    let g = ctx.g();
    let mut seen = std::collections::BTreeSet::new();
    for (k, pair) in inp.pairs.iter().enumerate() {
        if !seen.insert(pair.id) {
            return Err(Error::MalformedInput {
                path: format!("pairs[{k}].id"),
                reason: format!("duplicate id {}", pair.id),
            });
        }
        for (name, cov) in [("L", &pair.l), ("Lp", &pair.lp)] {
            if cov.len() != g {
                return Err(Error::MalformedInput {
                    path: format!("pairs[{k}].{name}"),
                    reason: format!("covector length {} != genus {}", cov.len(), g),
                });
            }
            if cov.is_zero_vector() {
                return Err(Error::MalformedInput {
                    path: format!("pairs[{k}].{name}"),
                    reason: "zero covector".into(),
                });
            }
        }
        let w = wedge_coords(&pair.l, &pair.lp)?;
        if wedge_is_degenerate(&w, &pair.l, &pair.lp, cfg) {
            return Err(Error::MalformedInput {
                path: format!("pairs[{k}]"),
                reason: "L and Lp are proportional".into(),
            });
        }
    }
    if inp.pairs.len() < ctx.wedge_dim() {
        return Err(Error::MalformedInput {
            path: "pairs".into(),
            reason: format!(
                "{} pairs cannot span a {}-dimensional space",
                inp.pairs.len(),
                ctx.wedge_dim()
            ),
        });
    }
    for (k, w) in inp.witnesses.iter().enumerate() {
        if w.len() != ctx.ambient() {
            return Err(Error::MalformedInput {
                path: format!("witnesses[{k}]"),
                reason: format!("witness length {} != {}", w.len(), ctx.ambient()),
            });
        }
    }
    if let Some(gt) = &inp.ground_truth {
        if gt.phi.matrix.rows() != ctx.wedge_dim() || gt.phi.matrix.cols() != ctx.wedge_dim() {
            return Err(Error::MalformedInput {
                path: "ground_truth.phi".into(),
                reason: format!(
                    "matrix is {}x{}, expected {m}x{m}",
                    gt.phi.matrix.rows(),
                    gt.phi.matrix.cols(),
                    m = ctx.wedge_dim()
                ),
            });
        }
        for (id, m) in &gt.prym {
            if m.len() != ctx.dim_w() {
                return Err(Error::MalformedInput {
                    path: format!("ground_truth.prym[{id}]"),
                    reason: format!("covector length {} != {}", m.len(), ctx.dim_w()),
                });
            }
        }
    }
    Ok(ctx)
}

/// Wedge point of each pair, ids preserved. A vanishing wedge (proportional
/// covectors) is reported as `DegeneratePair`.
pub fn wedge_points<K: Field>(
    inp: &SteinerInput<K>,
    cfg: &K::Cfg,
) -> Result<Vec<(u64, WedgeVector<K>)>> {
    inp.pairs
        .iter()
        .map(|pair| {
            let w = wedge_coords(&pair.l, &pair.lp)?;
            if wedge_is_degenerate(&w, &pair.l, &pair.lp, cfg) {
                return Err(Error::DegeneratePair { id: pair.id });
            }
            Ok((pair.id, w))
        })
        .collect()
}

/// Succeeds iff the wedge points span the full `M`-dimensional space.
pub fn validate_spanning<K: Field>(
    points: &[(u64, WedgeVector<K>)],
    ctx: &CurveContext,
    cfg: &K::Cfg,
) -> Result<()> {
    let rows: Vec<Vec<K>> = points.iter().map(|(_, w)| w.coords.clone()).collect();
    let need = ctx.wedge_dim();
    let rank = if rows.is_empty() {
        0
    } else {
        K::rank(&Matrix::from_rows(rows), cfg)
    };
    if rank != need {
        return Err(Error::SpanDeficient { rank, need });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn cov(v: &[i64]) -> Covector<Rat> {
        Covector::new(v.iter().map(|&x| Rat::from_int(x)).collect())
    }

    fn input(pairs: Vec<ThetaPair<Rat>>) -> SteinerInput<Rat> {
        SteinerInput {
            ctx: CurveContext::new(3).unwrap(),
            pairs,
            witnesses: Vec::new(),
            ground_truth: None,
        }
    }

    fn three_pairs() -> Vec<ThetaPair<Rat>> {
        vec![
            ThetaPair { id: 0, l: cov(&[5, -6, 1]), lp: cov(&[6, -7, 1]) },
            ThetaPair { id: 1, l: cov(&[10, -7, 1]), lp: cov(&[12, -8, 1]) },
            ThetaPair { id: 2, l: cov(&[15, -8, 1]), lp: cov(&[18, -9, 1]) },
        ]
    }

    #[test]
    fn validate_accepts_well_formed() {
        let inp = input(three_pairs());
        let ctx = validate_input(&inp, &()).unwrap();
        assert_eq!(ctx.g(), 3);
        assert_eq!(ctx.wedge_dim(), 3);
        assert_eq!(ctx.ambient(), 5);
    }

    #[test]
    fn validate_rejects_proportional_pair() {
        let mut pairs = three_pairs();
        pairs[1].lp = pairs[1].l.scale(&Rat::from_int(3));
        let err = validate_input(&input(pairs), &()).unwrap_err();
        assert!(matches!(err, Error::MalformedInput { .. }));
    }

    #[test]
    fn validate_rejects_wrong_length() {
        let mut pairs = three_pairs();
        pairs[2].l = cov(&[1, 2]);
        let err = validate_input(&input(pairs), &()).unwrap_err();
        assert!(matches!(err, Error::MalformedInput { .. }));
    }

    #[test]
    fn validate_rejects_too_few_pairs() {
        let pairs = three_pairs()[..2].to_vec();
        let err = validate_input(&input(pairs), &()).unwrap_err();
        assert!(matches!(err, Error::MalformedInput { .. }));
    }

    #[test]
    fn wedge_points_example() {
        let inp = input(three_pairs());
        let pts = wedge_points(&inp, &()).unwrap();
        assert_eq!(pts[0].1.coords, cov(&[1, -1, 1]).coeffs);
    }

    #[test]
    fn spanning_succeeds_and_fails() {
        let inp = input(three_pairs());
        let pts = wedge_points(&inp, &()).unwrap();
        validate_spanning(&pts, &inp.ctx, &()).unwrap();

        let one = pts[0].clone();
        let dup = vec![one.clone(), one.clone(), one];
        match validate_spanning(&dup, &inp.ctx, &()) {
            Err(Error::SpanDeficient { rank: 1, need: 3 }) => {}
            other => panic!("expected SpanDeficient(1), got {other:?}"),
        }
    }

    #[test]
    fn rescaling_does_not_change_spanning_or_projective_class() {
        let inp = input(three_pairs());
        let pts = wedge_points(&inp, &()).unwrap();

        let mut scaled = inp.clone();
        scaled.pairs[0].l = scaled.pairs[0].l.scale(&Rat::new(7.into(), 3.into()));
        let pts2 = wedge_points(&scaled, &()).unwrap();
        validate_spanning(&pts2, &scaled.ctx, &()).unwrap();
        // same projective point: cross-multiplication
        let a = &pts[0].1.coords;
        let b = &pts2[0].1.coords;
        for i in 0..a.len() {
            for j in 0..a.len() {
                assert_eq!(
                    a[i].clone() * b[j].clone(),
                    a[j].clone() * b[i].clone()
                );
            }
        }
    }

    #[test]
    fn proportional_pair_is_degenerate_for_wedge_points() {
        let mut pairs = three_pairs();
        pairs[1].lp = pairs[1].l.scale(&Rat::from_int(3));
        let inp = input(pairs);
        match wedge_points(&inp, &()) {
            Err(Error::DegeneratePair { id: 1 }) => {}
            other => panic!("expected DegeneratePair(1), got {other:?}"),
        }
    }

    #[test]
    fn oracle_wedge_points_are_distinct_projectively() {
        let cfg = crate::oracle::HyperellipticConfig::new(
            3,
            [1, 2, 3, 4, 7, 8, 5, 6].iter().map(|&x| Rat::from_int(x)).collect(),
        )
        .unwrap();
        let inp = crate::oracle::generate_steiner(&cfg, 0, 4).unwrap();
        let pts = wedge_points(&inp, &()).unwrap();
        assert_eq!(pts.len(), 6);
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let a = &pts[i].1.coords;
                let b = &pts[j].1.coords;
                let proportional = (0..a.len()).all(|r| {
                    (0..a.len()).all(|s| {
                        a[r].clone() * b[s].clone() == a[s].clone() * b[r].clone()
                    })
                });
                assert!(!proportional, "wedge points {i} and {j} coincide");
            }
        }
    }

    #[test]
    fn swap_negates_wedge() {
        let pairs = three_pairs();
        let w = wedge_coords(&pairs[0].l, &pairs[0].lp).unwrap();
        let flipped = wedge_coords(&pairs[0].lp, &pairs[0].l).unwrap();
        assert_eq!(flipped.coords, w.neg().coords);
    }
}
