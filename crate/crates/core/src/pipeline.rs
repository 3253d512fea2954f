//! End-to-end orchestration: generate an oracle instance, run the recovery
//! and assembly on an input, verify, and the file-level wrappers the CLI
//! exposes.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io;
use crate::linalg::{Covector, SymForm, WedgeVector};
use crate::oracle::{generate_steiner, HyperellipticConfig};
use crate::quadrics::{
    assemble_quadrics, prym_hyperplanes, resolve_signs, resolve_signs_blind, QuadricForm,
    SignVector,
};
use crate::recovery::{
    align_phi_to_witnesses, compare_up_to_gl, recover_phi, verify_rank_one_preimages,
    GlComparison, GlWitness, PhiMap, RankOneReport, RecoveryDiagnostics,
};
use crate::scalar::{Field, Rat, Tol};
use crate::steiner::{validate_input, wedge_points, CurveContext, SteinerInput};
use crate::verify::{verify_reconstruction, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Exact,
    Float,
}

/// Per-run configuration. The tolerance is required exactly when the float
/// backend is selected.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub backend: BackendKind,
    pub tol: Option<f64>,
    pub seed: u64,
    pub max_restarts: u32,
    pub witness_count: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: BackendKind::Exact,
            tol: None,
            seed: 0,
            max_restarts: 64,
            witness_count: 20,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        match (self.backend, self.tol) {
            (BackendKind::Float, None) => Err(Error::MalformedInput {
                path: "config.tol".into(),
                reason: "float backend requires a tolerance".into(),
            }),
            (BackendKind::Exact, Some(_)) => Err(Error::MalformedInput {
                path: "config.tol".into(),
                reason: "tolerance is only meaningful on the float backend".into(),
            }),
            (BackendKind::Float, Some(t)) if t <= 0.0 => Err(Error::MalformedInput {
                path: "config.tol".into(),
                reason: "tolerance must be positive".into(),
            }),
            _ => Ok(()),
        }
    }

    pub fn tol_cfg(&self) -> Tol {
        self.tol.map(Tol).unwrap_or_default()
    }
}

#[derive(Debug, Clone)]
pub struct GenerateParams {
    pub genus: usize,
    pub branch: Option<Vec<Rat>>,
    pub seed: u64,
    pub witness_count: usize,
}

/// Generate an oracle instance (always exact rational).
pub fn generate(params: &GenerateParams) -> Result<SteinerInput<Rat>> {
    let cfg = match &params.branch {
        Some(values) => HyperellipticConfig::new(params.genus, values.clone())?,
        None => HyperellipticConfig::random(params.genus, params.seed)?,
    };
    generate_steiner(&cfg, params.seed, params.witness_count)
}

/// Which mechanism fixed the per-pair signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignSource {
    Witnesses,
    /// Experimental: negated sign of the rank-one coefficient, used when no
    /// witnesses are available.
    BlindFallback,
}

/// Everything one reconstruction run produces.
#[derive(Debug, Clone)]
pub struct Reconstruction<K: Field> {
    pub ctx: CurveContext,
    /// The map used for extraction and assembly (gauge-aligned when ground
    /// truth or witnesses allowed it).
    pub phi: PhiMap<K>,
    /// The map as recovered blind from the wedge points.
    pub recovered_phi: PhiMap<K>,
    pub recovery: RecoveryDiagnostics,
    pub rank_one: RankOneReport,
    /// Basis-change witness between the recovered map and the ground truth,
    /// when ground truth was present.
    pub gl_witness: Option<GlWitness<K>>,
    pub wedges: Vec<(u64, WedgeVector<K>)>,
    pub prym: BTreeMap<u64, (Covector<K>, K)>,
    pub signs: SignVector,
    pub sign_source: SignSource,
    pub quadrics: Vec<QuadricForm<K>>,
    pub report: VerificationReport<K>,
}

/// Validate, recover the map, align the gauge, resolve signs, extract the
/// Prym hyperplanes, assemble the quadrics, and verify.
pub fn reconstruct<K: Field>(
    inp: &SteinerInput<K>,
    seed: u64,
    max_restarts: u32,
    cfg: &K::Cfg,
) -> Result<Reconstruction<K>> {
    let ctx = validate_input(inp, cfg)?;
    let wedges = wedge_points(inp, cfg)?;
    let (recovered_phi, recovery) = recover_phi(&wedges, &ctx, seed, max_restarts, cfg)?;
    let rank_one = verify_rank_one_preimages(&recovered_phi, &wedges, cfg);
    if !rank_one.all_rank_one() {
        return Err(Error::PhiVerificationFailed {
            ids: rank_one.failing_ids(),
        });
    }

    let mut gl_witness = None;
    let phi = if let Some(gt) = &inp.ground_truth {
        match compare_up_to_gl(&recovered_phi, &gt.phi, &ctx, cfg)? {
            GlComparison::Witness(w) => {
                gl_witness = Some(w);
                gt.phi.clone()
            }
            GlComparison::Mismatch => {
                return Err(Error::GaugeMismatch {
                    reason: "recovered map is not gauge-equivalent to the ground truth".into(),
                })
            }
        }
    } else if !inp.witnesses.is_empty() {
        align_phi_to_witnesses(&recovered_phi, &inp.pairs, &wedges, &inp.witnesses, &ctx, cfg)?
    } else {
        recovered_phi.clone()
    };

    let (signs, sign_source) = if inp.witnesses.is_empty() {
        (
            resolve_signs_blind(&phi, &wedges, cfg)?,
            SignSource::BlindFallback,
        )
    } else {
        (
            resolve_signs(inp, &phi, &inp.witnesses, cfg)?,
            SignSource::Witnesses,
        )
    };

    let prym = prym_hyperplanes(&phi, &wedges, cfg)?;
    let quadrics = assemble_quadrics(inp, &phi, &signs, cfg)?;
    let report = verify_reconstruction(&quadrics, &inp.witnesses, &ctx, cfg)?;

    Ok(Reconstruction {
        ctx,
        phi,
        recovered_phi,
        recovery,
        rank_one,
        gl_witness,
        wedges,
        prym,
        signs,
        sign_source,
        quadrics,
        report,
    })
}

/// Lossy conversion of an exact input for the float backend.
pub fn input_to_f64(inp: &SteinerInput<Rat>) -> SteinerInput<f64> {
    let conv = |v: &[Rat]| -> Vec<f64> { v.iter().map(Field::to_f64).collect() };
    SteinerInput {
        ctx: inp.ctx,
        pairs: inp
            .pairs
            .iter()
            .map(|p| crate::steiner::ThetaPair {
                id: p.id,
                l: Covector::new(conv(&p.l.coeffs)),
                lp: Covector::new(conv(&p.lp.coeffs)),
            })
            .collect(),
        witnesses: inp.witnesses.iter().map(|w| conv(w)).collect(),
        ground_truth: inp.ground_truth.as_ref().map(|gt| crate::oracle::GroundTruth {
            phi: PhiMap::new(inp.ctx.g(), gt.phi.matrix.map(Field::to_f64))
                .expect("dimensions preserved"),
            prym: gt
                .prym
                .iter()
                .map(|(id, m)| (*id, Covector::new(conv(&m.coeffs))))
                .collect(),
            subsets: gt.subsets.clone(),
            branch: conv(&gt.branch),
            alpha_indices: gt.alpha_indices,
        }),
    }
}

// --- file-level wrappers used by the CLI ---

pub fn run_generate_file(params: &GenerateParams, out: &Path) -> Result<()> {
    let inp = generate(params)?;
    io::save_steiner(&inp, out)
}

pub fn run_recover_file(input: &Path, out: &Path, cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    match cfg.backend {
        BackendKind::Exact => {
            let inp: SteinerInput<Rat> = io::load_steiner(input)?;
            let rec = reconstruct(&inp, cfg.seed, cfg.max_restarts, &())?;
            io::save_result(&rec, out)
        }
        BackendKind::Float => {
            let inp: SteinerInput<f64> = io::load_steiner(input)?;
            let rec = reconstruct(&inp, cfg.seed, cfg.max_restarts, &cfg.tol_cfg())?;
            io::save_result(&rec, out)
        }
    }
}

pub fn run_full_file(params: &GenerateParams, out: &Path, cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let inp = generate(params)?;
    match cfg.backend {
        BackendKind::Exact => {
            let rec = reconstruct(&inp, cfg.seed, cfg.max_restarts, &())?;
            io::save_result(&rec, out)
        }
        BackendKind::Float => {
            let rec = reconstruct(&input_to_f64(&inp), cfg.seed, cfg.max_restarts, &cfg.tol_cfg())?;
            io::save_result(&rec, out)
        }
    }
}

/// Outcome of re-checking a result file against its input.
#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub all_vanish: bool,
    pub matches_stored: bool,
    pub mismatches: Vec<String>,
}

/// Rebuild the quadrics from a result document and re-run verification
/// against the input's witnesses; compare with the stored diagnostics.
pub fn run_verify_file(input: &Path, result: &Path, cfg: &RunConfig) -> Result<VerifyOutcome> {
    cfg.validate()?;
    match cfg.backend {
        BackendKind::Exact => verify_impl::<Rat>(input, result, &()),
        BackendKind::Float => verify_impl::<f64>(input, result, &cfg.tol_cfg()),
    }
}

fn verify_impl<K: Field>(input: &Path, result: &Path, cfg: &K::Cfg) -> Result<VerifyOutcome> {
    let inp: SteinerInput<K> = io::load_steiner(input)?;
    let ctx = validate_input(&inp, cfg)?;
    let doc = io::load_result(result)?;
    if doc.genus != ctx.g() {
        return Err(Error::MalformedInput {
            path: "result.genus".into(),
            reason: format!("result genus {} != input genus {}", doc.genus, ctx.g()),
        });
    }
    let n = ctx.ambient();
    let quadrics: Vec<QuadricForm<K>> = doc
        .quadrics
        .iter()
        .enumerate()
        .map(|(k, q)| {
            let coords = q
                .matrix_upper
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    crate::scalar::parse_scalar(s, &format!("quadrics[{k}].matrix_upper[{i}]"))
                })
                .collect::<Result<Vec<K>>>()?;
            if coords.len() != crate::linalg::sym_dim(n) {
                return Err(Error::MalformedInput {
                    path: format!("quadrics[{k}].matrix_upper"),
                    reason: format!(
                        "expected {} entries, got {}",
                        crate::linalg::sym_dim(n),
                        coords.len()
                    ),
                });
            }
            Ok(QuadricForm {
                id: q.id,
                sign: q.sign,
                g: ctx.g(),
                form: SymForm::from_coords(n, &coords),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let report = verify_reconstruction(&quadrics, &inp.witnesses, &ctx, cfg)?;
    let mut mismatches = Vec::new();
    let d = &doc.diagnostics;
    let mut check = |name: &str, stored: String, fresh: String| {
        if stored != fresh {
            mismatches.push(format!("{name}: stored {stored}, recomputed {fresh}"));
        }
    };
    check("n_quadrics", d.n_quadrics.to_string(), report.n_quadrics.to_string());
    check(
        "span_dim_total",
        d.span_dim_total.to_string(),
        report.span_dim_total.to_string(),
    );
    check(
        "span_dim_V_block",
        d.span_dim_v_block.to_string(),
        report.span_dim_v_block.to_string(),
    );
    check(
        "span_dim_W_block",
        d.span_dim_w_block.to_string(),
        report.span_dim_w_block.to_string(),
    );
    for (deg, dim) in &report.graded_dims {
        let stored = d.graded_dims.get(&deg.to_string()).copied();
        check(
            &format!("graded_dims[{deg}]"),
            stored.map_or("<missing>".into(), |v| v.to_string()),
            dim.to_string(),
        );
    }
    check(
        "all_vanish",
        d.all_vanish.to_string(),
        report.all_vanish.to_string(),
    );
    let fresh_results: Vec<Vec<String>> = report
        .witness_results
        .iter()
        .map(|row| row.iter().map(K::render).collect())
        .collect();
    if fresh_results != d.witness_results {
        mismatches.push("witness_results differ".into());
    }
    Ok(VerifyOutcome {
        all_vanish: report.all_vanish,
        matches_stored: mismatches.is_empty(),
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| Rat::from_int(x)).collect()
    }

    fn g3_params() -> GenerateParams {
        GenerateParams {
            genus: 3,
            branch: Some(rv(&[1, 2, 3, 4, 7, 8, 5, 6])),
            seed: 0,
            witness_count: 20,
        }
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig {
            backend: BackendKind::Float,
            tol: None,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = RunConfig {
            tol: Some(1e-8),
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn exact_end_to_end_g3() {
        let inp = generate(&g3_params()).unwrap();
        let rec = reconstruct(&inp, 0, 64, &()).unwrap();
        assert!(rec.rank_one.all_rank_one());
        assert!(rec.gl_witness.is_some());
        assert_eq!(rec.sign_source, SignSource::Witnesses);
        assert!(rec.signs.values().all(|&s| s == -1));
        assert!(rec.report.all_vanish);
        // gauge alignment makes the emitted map equal to the ground truth
        assert_eq!(
            rec.phi.matrix,
            inp.ground_truth.as_ref().unwrap().phi.matrix
        );
    }

    #[test]
    fn blind_run_without_witnesses_or_truth() {
        let mut inp = generate(&g3_params()).unwrap();
        inp.witnesses.clear();
        inp.ground_truth = None;
        let rec = reconstruct(&inp, 0, 64, &()).unwrap();
        assert_eq!(rec.sign_source, SignSource::BlindFallback);
        assert!(rec.rank_one.all_rank_one());
        // report has no witnesses to check, vacuously vanishing
        assert!(rec.report.all_vanish);
        assert!(rec.report.witness_results.is_empty());
    }

    #[test]
    fn witness_alignment_path_g3() {
        let mut inp = generate(&g3_params()).unwrap();
        inp.ground_truth = None;
        let rec = reconstruct(&inp, 0, 64, &()).unwrap();
        assert_eq!(rec.sign_source, SignSource::Witnesses);
        assert!(rec.report.all_vanish);
    }

    #[test]
    fn float_backend_end_to_end_g3() {
        let inp = generate(&g3_params()).unwrap();
        let finp = input_to_f64(&inp);
        let rec = reconstruct(&finp, 0, 64, &Tol::default()).unwrap();
        assert!(rec.rank_one.all_rank_one());
        assert!(rec.report.all_vanish);
        assert!(rec.signs.values().all(|&s| s == -1));
    }

    #[test]
    fn deterministic_bytes() {
        let run = || -> String {
            let inp = generate(&g3_params()).unwrap();
            let rec = reconstruct(&inp, 5, 64, &()).unwrap();
            crate::io::output_to_json(&crate::io::reconstruction_to_doc(&rec))
        };
        assert_eq!(run(), run());
    }
}
