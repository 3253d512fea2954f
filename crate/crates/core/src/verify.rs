//! Verification of the assembled quadrics: span dimensions, graded pieces of
//! the ideal they generate, and membership of witness points.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{inf_norm_slice, sym_index_pairs, Matrix};
use crate::quadrics::QuadricForm;
use crate::scalar::Field;
use crate::steiner::CurveContext;

/// Everything the pipeline reports about the assembled quadrics.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<K> {
    pub n_quadrics: usize,
    pub span_dim_total: usize,
    pub span_dim_v_block: usize,
    pub span_dim_w_block: usize,
    /// degree -> dimension of that graded piece of the generated ideal.
    pub graded_dims: BTreeMap<usize, usize>,
    /// Raw evaluation values, one row per witness, one entry per quadric in
    /// input order.
    pub witness_results: Vec<Vec<K>>,
    pub all_vanish: bool,
}

/// Exponent vectors of total degree `d` in `n` variables, lexicographic.
fn monomials(n: usize, d: usize) -> Vec<Vec<u8>> {
    fn rec(n: usize, d: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == n - 1 {
            prefix.push(d as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e as u8);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// Monomial coefficients of a quadric over the degree-2 monomials of its
/// ambient space, in the `monomials(n, 2)` order.
fn quadric_monomial_coeffs<K: Field>(q: &QuadricForm<K>) -> Vec<K> {
    let n = q.form.dim();
    let two = K::from_int(2);
    let index: BTreeMap<Vec<u8>, usize> = monomials(n, 2)
        .into_iter()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let mut coeffs = vec![K::zero(); index.len()];
    for (a, b) in sym_index_pairs(n) {
        let mut exp = vec![0u8; n];
        exp[a] += 1;
        exp[b] += 1;
        let c = if a == b {
            q.form.matrix().at(a, b).clone()
        } else {
            two.clone() * q.form.matrix().at(a, b).clone()
        };
        coeffs[index[&exp]] = c;
    }
    coeffs
}

/// Dimension of the degree-`d` piece of the ideal generated by the given
/// quadrics: the rank of the (quadric-basis x degree-(d-2) monomial)
/// multiplication matrix over degree-`d` coefficient vectors.
pub fn graded_ideal_dim<K: Field>(
    quadrics: &[QuadricForm<K>],
    d: usize,
    cfg: &K::Cfg,
) -> Result<usize> {
    if !(2..=4).contains(&d) {
        return Err(Error::UnsupportedDegree { d });
    }
    if quadrics.is_empty() {
        return Ok(0);
    }
    let n = quadrics[0].form.dim();
    let coeff_rows: Vec<Vec<K>> = quadrics.iter().map(quadric_monomial_coeffs).collect();
    // The generated ideal only depends on the span; reduce to a basis first
    // to keep the multiplication matrix small.
    let basis = K::span_basis(coeff_rows, cfg);
    let deg2 = monomials(n, 2);
    let target: BTreeMap<Vec<u8>, usize> = monomials(n, d)
        .into_iter()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let multipliers = monomials(n, d - 2);
    let mut rows = Vec::with_capacity(basis.len() * multipliers.len());
    for q in &basis {
        for m in &multipliers {
            let mut row = vec![K::zero(); target.len()];
            for (k, qexp) in deg2.iter().enumerate() {
                if q[k].is_zero() {
                    continue;
                }
                let exp: Vec<u8> = qexp.iter().zip(m).map(|(x, y)| x + y).collect();
                row[target[&exp]] = q[k].clone();
            }
            rows.push(row);
        }
    }
    Ok(K::rank(&Matrix::from_rows(rows), cfg))
}

/// Does every quadric vanish at `p`? Returns the verdict and the largest
/// absolute residual.
pub fn membership<K: Field>(
    quadrics: &[QuadricForm<K>],
    p: &[K],
    cfg: &K::Cfg,
) -> Result<(bool, K)> {
    if p.iter().all(|x| x.is_zero()) {
        return Err(Error::BadParameter {
            reason: "membership of the zero point".into(),
        });
    }
    let pn = inf_norm_slice(p);
    let mut ok = true;
    let mut worst = K::zero();
    for q in quadrics {
        let value = q.form.eval(p);
        let scale = q.form.matrix().inf_norm() * pn.clone() * pn.clone();
        if !K::negligible(&value, &scale, cfg) {
            ok = false;
        }
        let a = value.abs();
        if worst.to_f64() < a.to_f64() {
            worst = a;
        }
    }
    Ok((ok, worst))
}

/// Fill the full report: span dimensions of the quadrics and of their two
/// diagonal blocks, graded dimensions for degrees 2..4, and the per-witness
/// evaluation table.
pub fn verify_reconstruction<K: Field>(
    quadrics: &[QuadricForm<K>],
    witnesses: &[Vec<K>],
    ctx: &CurveContext,
    cfg: &K::Cfg,
) -> Result<VerificationReport<K>> {
    if quadrics.is_empty() {
        return Err(Error::BadParameter {
            reason: "verify_reconstruction needs at least one quadric".into(),
        });
    }
    let g = ctx.g();
    let span = |rows: Vec<Vec<K>>| K::rank(&Matrix::from_rows(rows), cfg);
    let span_dim_total = span(quadrics.iter().map(|q| q.form.coords()).collect());
    let span_dim_v_block = span(
        quadrics
            .iter()
            .map(|q| {
                let b = q.v_block();
                sym_index_pairs(g)
                    .into_iter()
                    .map(|(a, c)| b.at(a, c).clone())
                    .collect()
            })
            .collect(),
    );
    let span_dim_w_block = span(
        quadrics
            .iter()
            .map(|q| {
                let b = q.w_block();
                sym_index_pairs(g - 1)
                    .into_iter()
                    .map(|(a, c)| b.at(a, c).clone())
                    .collect()
            })
            .collect(),
    );

    let mut graded_dims = BTreeMap::new();
    for d in 2..=4 {
        graded_dims.insert(d, graded_ideal_dim(quadrics, d, cfg)?);
    }

    let mut witness_results = Vec::with_capacity(witnesses.len());
    let mut all_vanish = true;
    for p in witnesses {
        let pn = inf_norm_slice(p);
        let mut row = Vec::with_capacity(quadrics.len());
        for q in quadrics {
            let value = q.form.eval(p);
            let scale = q.form.matrix().inf_norm() * pn.clone() * pn.clone();
            if !K::negligible(&value, &scale, cfg) {
                all_vanish = false;
            }
            row.push(value);
        }
        witness_results.push(row);
    }

    Ok(VerificationReport {
        n_quadrics: quadrics.len(),
        span_dim_total,
        span_dim_v_block,
        span_dim_w_block,
        graded_dims,
        witness_results,
        all_vanish,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymForm;
    use crate::oracle::{generate_steiner, HyperellipticConfig};
    use crate::quadrics::{assemble_quadrics, resolve_signs};
    use crate::scalar::Rat;
    use num_traits::Zero;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn rv(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| r(x)).collect()
    }

    fn quadric_from_coords(dim_g: usize, coords: &[Rat]) -> QuadricForm<Rat> {
        QuadricForm {
            id: 0,
            sign: -1,
            g: dim_g,
            form: SymForm::from_coords(2 * dim_g - 1, coords),
        }
    }

    fn g3_setup() -> (crate::steiner::SteinerInput<Rat>, Vec<QuadricForm<Rat>>) {
        let cfg = HyperellipticConfig::new(3, rv(&[1, 2, 3, 4, 7, 8, 5, 6])).unwrap();
        let inp = generate_steiner(&cfg, 0, 8).unwrap();
        let gt = inp.ground_truth.clone().unwrap();
        let signs = resolve_signs(&inp, &gt.phi, &inp.witnesses, &()).unwrap();
        let quadrics = assemble_quadrics(&inp, &gt.phi, &signs, &()).unwrap();
        (inp, quadrics)
    }

    #[test]
    fn single_conic_degree_three() {
        // x0*x2 - x1^2 in exactly 3 variables
        let form = SymForm::from_coords(
            3,
            &[
                r(0),
                r(0),
                Rat::new(1.into(), 2.into()),
                r(-1),
                r(0),
                r(0),
            ],
        );
        let q = QuadricForm {
            id: 0,
            sign: -1,
            g: 2,
            form,
        };
        assert_eq!(graded_ideal_dim(&[q], 3, &()).unwrap(), 3);
    }

    #[test]
    fn empty_set_any_degree() {
        let empty: Vec<QuadricForm<Rat>> = Vec::new();
        for d in 2..=4 {
            assert_eq!(graded_ideal_dim(&empty, d, &()).unwrap(), 0);
        }
        assert!(matches!(
            graded_ideal_dim(&empty, 5, &()),
            Err(Error::UnsupportedDegree { d: 5 })
        ));
    }

    #[test]
    fn graded_dim_two_equals_span() {
        let (inp, quadrics) = g3_setup();
        let report = verify_reconstruction(&quadrics, &inp.witnesses, &inp.ctx, &()).unwrap();
        assert_eq!(report.graded_dims[&2], report.span_dim_total);
    }

    #[test]
    fn membership_examples() {
        let (inp, quadrics) = g3_setup();
        let (ok, worst) = membership(&quadrics, &inp.witnesses[0], &()).unwrap();
        assert!(ok);
        assert!(worst.is_zero());

        let off = rv(&[1, 2, 3, 4, 5]);
        let (ok, worst) = membership(&quadrics, &off, &()).unwrap();
        assert!(!ok);
        assert!(!worst.is_zero());

        assert!(membership(&quadrics, &rv(&[0, 0, 0, 0, 0]), &()).is_err());
    }

    #[test]
    fn full_report_vanishes_and_wrong_sign_is_visible() {
        let (inp, quadrics) = g3_setup();
        let report = verify_reconstruction(&quadrics, &inp.witnesses, &inp.ctx, &()).unwrap();
        assert!(report.all_vanish);
        assert_eq!(report.n_quadrics, 6);
        assert!(report
            .witness_results
            .iter()
            .all(|row| row.iter().all(|x| x.is_zero())));

        // deliberately flip one sign
        let gt = inp.ground_truth.clone().unwrap();
        let mut signs = resolve_signs(&inp, &gt.phi, &inp.witnesses, &()).unwrap();
        signs.insert(2, 1);
        let bad = assemble_quadrics(&inp, &gt.phi, &signs, &()).unwrap();
        let report = verify_reconstruction(&bad, &inp.witnesses, &inp.ctx, &()).unwrap();
        assert!(!report.all_vanish);
        for row in &report.witness_results {
            // the offending quadric is the third in input order
            assert!(!row[2].is_zero());
        }
    }

    #[test]
    fn single_quadric_on_its_zero_set() {
        // x0*x1 vanishes where x0 = 0
        let mut coords = vec![r(0); 15];
        coords[1] = Rat::new(1.into(), 2.into());
        let q = quadric_from_coords(3, &coords);
        let samples = [rv(&[0, 1, 2, 3, 4]), rv(&[0, -1, 5, 7, 9])];
        let ctx = crate::steiner::CurveContext::new(3).unwrap();
        let report = verify_reconstruction(&[q], &samples, &ctx, &()).unwrap();
        assert!(report.all_vanish);
    }

    #[test]
    fn graded_dims_monotone_under_adding_quadrics() {
        let (inp, quadrics) = g3_setup();
        for d in 2..=4 {
            let small = graded_ideal_dim(&quadrics[..3], d, &()).unwrap();
            let big = graded_ideal_dim(&quadrics, d, &()).unwrap();
            assert!(small <= big, "degree {d}: {small} > {big}");
        }
        let _ = inp;
    }

    #[test]
    fn report_is_deterministic() {
        let (inp, quadrics) = g3_setup();
        let a = verify_reconstruction(&quadrics, &inp.witnesses, &inp.ctx, &()).unwrap();
        let b = verify_reconstruction(&quadrics, &inp.witnesses, &inp.ctx, &()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pulled_back_quadrics_vanish_identically_on_the_curve() {
        // evaluate each quadric along the parametrization at more distinct
        // parameters than the pullback degree bound 4(g-1)
        let cfg = HyperellipticConfig::new(3, rv(&[1, 2, 3, 4, 7, 8, 5, 6])).unwrap();
        let (_, quadrics) = g3_setup();
        let needed = 4 * (3 - 1) + 2;
        let mut params = Vec::new();
        let mut s = 2i64;
        while params.len() < needed {
            let cand = Rat::from_int(s);
            if crate::oracle::sample_witnesses(&cfg, std::slice::from_ref(&cand)).is_ok() {
                params.push(cand);
            }
            s += 1;
        }
        let points = crate::oracle::sample_witnesses(&cfg, &params).unwrap();
        for q in &quadrics {
            for p in &points {
                assert!(q.form.eval(p).is_zero());
            }
        }
    }
}
