//! JSON (de)serialization of the pipeline input and result documents.
//!
//! Scalars travel as strings (`"p/q"` or `"p"` on the rational backend,
//! decimal on the float backend); key order is fixed by struct declaration
//! order, so identical data serializes to identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Covector, Matrix};
use crate::oracle::GroundTruth;
use crate::pipeline::{Reconstruction, SignSource};
use crate::recovery::PhiMap;
use crate::scalar::{parse_scalar, Field};
use crate::steiner::{CurveContext, SteinerInput, ThetaPair};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDoc {
    pub genus: usize,
    pub field: String,
    pub pairs: Vec<PairDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruthDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairDoc {
    pub id: u64,
    #[serde(rename = "L")]
    pub l: Vec<String>,
    #[serde(rename = "Lp")]
    pub lp: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruthDoc {
    pub branch_points: Vec<String>,
    pub alpha_indices: [usize; 2],
    pub phi: Vec<Vec<String>>,
    pub prym: Vec<PrymDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrymDoc {
    pub id: u64,
    #[serde(rename = "M")]
    pub m: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputDoc {
    pub genus: usize,
    pub phi: Vec<Vec<String>>,
    pub prym_hyperplanes: Vec<PrymHyperplaneDoc>,
    pub quadrics: Vec<QuadricDoc>,
    pub diagnostics: DiagnosticsDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrymHyperplaneDoc {
    pub id: u64,
    #[serde(rename = "M")]
    pub m: Vec<String>,
    pub scalar: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadricDoc {
    pub id: u64,
    pub sign: i8,
    pub matrix_upper: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsDoc {
    pub n_quadrics: usize,
    pub span_dim_total: usize,
    #[serde(rename = "span_dim_V_block")]
    pub span_dim_v_block: usize,
    #[serde(rename = "span_dim_W_block")]
    pub span_dim_w_block: usize,
    pub graded_dims: BTreeMap<String, usize>,
    pub witness_results: Vec<Vec<String>>,
    pub all_vanish: bool,
    pub recovery: RecoveryDoc,
    pub sign_source: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveryDoc {
    #[serde(rename = "dim_I2")]
    pub dim_i2: usize,
    pub chosen_basis_ids: Vec<u64>,
    pub restarts_used: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank1_residuals: Option<BTreeMap<String, f64>>,
}

fn render_vec<K: Field>(v: &[K]) -> Vec<String> {
    v.iter().map(K::render).collect()
}

fn parse_vec<K: Field>(v: &[String], path: &str) -> Result<Vec<K>> {
    v.iter()
        .enumerate()
        .map(|(i, s)| parse_scalar(s, &format!("{path}[{i}]")))
        .collect()
}

/// Domain input -> document.
pub fn input_to_doc<K: Field>(inp: &SteinerInput<K>) -> InputDoc {
    InputDoc {
        genus: inp.ctx.g(),
        field: K::NAME.to_string(),
        pairs: inp
            .pairs
            .iter()
            .map(|p| PairDoc {
                id: p.id,
                l: render_vec(&p.l.coeffs),
                lp: render_vec(&p.lp.coeffs),
            })
            .collect(),
        witnesses: if inp.witnesses.is_empty() {
            None
        } else {
            Some(inp.witnesses.iter().map(|w| render_vec(w)).collect())
        },
        ground_truth: inp.ground_truth.as_ref().map(|gt| GroundTruthDoc {
            branch_points: render_vec(&gt.branch),
            alpha_indices: [gt.alpha_indices.0, gt.alpha_indices.1],
            phi: gt.phi.matrix.row_vecs().iter().map(|r| render_vec(r)).collect(),
            prym: gt
                .prym
                .iter()
                .map(|(id, m)| PrymDoc {
                    id: *id,
                    m: render_vec(&m.coeffs),
                })
                .collect(),
        }),
    }
}

/// Document -> domain input, with path-carrying parse errors.
pub fn doc_to_input<K: Field>(doc: &InputDoc) -> Result<SteinerInput<K>> {
    if K::EXACT && doc.field != K::NAME {
        return Err(Error::MalformedInput {
            path: "field".into(),
            reason: format!(
                "exact backend requires field \"rational\", file says {:?}",
                doc.field
            ),
        });
    }
    if doc.field != "rational" && doc.field != "float" {
        return Err(Error::MalformedInput {
            path: "field".into(),
            reason: format!("unknown field {:?}", doc.field),
        });
    }
    let ctx = CurveContext::new(doc.genus)?;
    let pairs = doc
        .pairs
        .iter()
        .enumerate()
        .map(|(k, p)| {
            Ok(ThetaPair {
                id: p.id,
                l: Covector::new(parse_vec(&p.l, &format!("pairs[{k}].L"))?),
                lp: Covector::new(parse_vec(&p.lp, &format!("pairs[{k}].Lp"))?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let witnesses = doc
        .witnesses
        .as_ref()
        .map(|ws| {
            ws.iter()
                .enumerate()
                .map(|(k, w)| parse_vec(w, &format!("witnesses[{k}]")))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?
        .unwrap_or_default();
    let ground_truth = doc
        .ground_truth
        .as_ref()
        .map(|gt| -> Result<GroundTruth<K>> {
            let m = ctx.wedge_dim();
            if gt.phi.len() != m {
                return Err(Error::MalformedInput {
                    path: "ground_truth.phi".into(),
                    reason: format!("expected {m} rows, got {}", gt.phi.len()),
                });
            }
            let rows = gt
                .phi
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    let row = parse_vec(r, &format!("ground_truth.phi[{k}]"))?;
                    if row.len() != m {
                        return Err(Error::MalformedInput {
                            path: format!("ground_truth.phi[{k}]"),
                            reason: format!("expected {m} columns, got {}", row.len()),
                        });
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()?;
            let prym = gt
                .prym
                .iter()
                .map(|p| {
                    Ok((
                        p.id,
                        Covector::new(parse_vec(
                            &p.m,
                            &format!("ground_truth.prym[{}].M", p.id),
                        )?),
                    ))
                })
                .collect::<Result<BTreeMap<_, _>>>()?;
            Ok(GroundTruth {
                phi: PhiMap::new(ctx.g(), Matrix::from_rows(rows))?,
                prym,
                subsets: None,
                branch: parse_vec(&gt.branch_points, "ground_truth.branch_points")?,
                alpha_indices: (gt.alpha_indices[0], gt.alpha_indices[1]),
            })
        })
        .transpose()?;
    Ok(SteinerInput {
        ctx,
        pairs,
        witnesses,
        ground_truth,
    })
}

/// Reconstruction -> result document.
pub fn reconstruction_to_doc<K: Field>(rec: &Reconstruction<K>) -> OutputDoc {
    OutputDoc {
        genus: rec.ctx.g(),
        phi: rec
            .phi
            .matrix
            .row_vecs()
            .iter()
            .map(|r| render_vec(r))
            .collect(),
        prym_hyperplanes: rec
            .prym
            .iter()
            .map(|(id, (m, c))| PrymHyperplaneDoc {
                id: *id,
                m: render_vec(&m.coeffs),
                scalar: c.render(),
            })
            .collect(),
        quadrics: rec
            .quadrics
            .iter()
            .map(|q| QuadricDoc {
                id: q.id,
                sign: q.sign,
                matrix_upper: render_vec(&q.form.coords()),
            })
            .collect(),
        diagnostics: DiagnosticsDoc {
            n_quadrics: rec.report.n_quadrics,
            span_dim_total: rec.report.span_dim_total,
            span_dim_v_block: rec.report.span_dim_v_block,
            span_dim_w_block: rec.report.span_dim_w_block,
            graded_dims: rec
                .report
                .graded_dims
                .iter()
                .map(|(d, v)| (d.to_string(), *v))
                .collect(),
            witness_results: rec
                .report
                .witness_results
                .iter()
                .map(|row| render_vec(row))
                .collect(),
            all_vanish: rec.report.all_vanish,
            recovery: RecoveryDoc {
                dim_i2: rec.recovery.dim_i2,
                chosen_basis_ids: rec.recovery.chosen_basis_ids.clone(),
                restarts_used: rec.recovery.restarts_used,
                rank1_residuals: rec.recovery.rank1_residuals.as_ref().map(|m| {
                    m.iter().map(|(id, v)| (id.to_string(), *v)).collect()
                }),
            },
            sign_source: match rec.sign_source {
                SignSource::Witnesses => "witnesses".to_string(),
                SignSource::BlindFallback => "blind_fallback".to_string(),
            },
        },
    }
}

fn json_error(e: &serde_json::Error) -> Error {
    Error::ParseError {
        path: format!("<json>:{}:{}", e.line(), e.column()),
        reason: e.to_string(),
    }
}

pub fn input_to_json<K: Field>(inp: &SteinerInput<K>) -> String {
    let mut s = serde_json::to_string_pretty(&input_to_doc(inp)).expect("serialization");
    s.push('\n');
    s
}

pub fn parse_input_json<K: Field>(text: &str) -> Result<SteinerInput<K>> {
    let doc: InputDoc = serde_json::from_str(text).map_err(|e| json_error(&e))?;
    doc_to_input(&doc)
}

pub fn output_to_json(doc: &OutputDoc) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serialization");
    s.push('\n');
    s
}

pub fn parse_output_json(text: &str) -> Result<OutputDoc> {
    serde_json::from_str(text).map_err(|e| json_error(&e))
}

/// Load, parse, and structurally validate an input file. Validation runs
/// with the backend's default decision context; pipelines re-validate under
/// the run configuration.
pub fn load_steiner<K: Field>(path: &Path) -> Result<SteinerInput<K>> {
    let text = std::fs::read_to_string(path)?;
    let inp = parse_input_json(&text)?;
    crate::steiner::validate_input(&inp, &K::Cfg::default())?;
    Ok(inp)
}

pub fn save_steiner<K: Field>(inp: &SteinerInput<K>, path: &Path) -> Result<()> {
    std::fs::write(path, input_to_json(inp))?;
    Ok(())
}

/// Serialize a reconstruction to the result document and write it.
pub fn save_result<K: Field>(rec: &Reconstruction<K>, path: &Path) -> Result<()> {
    std::fs::write(path, output_to_json(&reconstruction_to_doc(rec)))?;
    Ok(())
}

pub fn load_result(path: &Path) -> Result<OutputDoc> {
    let text = std::fs::read_to_string(path)?;
    parse_output_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{generate_steiner, HyperellipticConfig};
    use crate::scalar::Rat;

    fn rv(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| Rat::from_int(x)).collect()
    }

    fn g3_input() -> SteinerInput<Rat> {
        let cfg = HyperellipticConfig::new(3, rv(&[1, 2, 3, 4, 7, 8, 5, 6])).unwrap();
        generate_steiner(&cfg, 0, 6).unwrap()
    }

    #[test]
    fn roundtrip_preserves_everything_serialized() {
        let inp = g3_input();
        let json = input_to_json(&inp);
        let back: SteinerInput<Rat> = parse_input_json(&json).unwrap();
        let json2 = input_to_json(&back);
        assert_eq!(json, json2);
        assert_eq!(back.pairs, inp.pairs);
        assert_eq!(back.witnesses, inp.witnesses);
        let gt = inp.ground_truth.as_ref().unwrap();
        let gt2 = back.ground_truth.as_ref().unwrap();
        assert_eq!(gt2.phi.matrix, gt.phi.matrix);
        assert_eq!(gt2.prym, gt.prym);
        assert_eq!(gt2.branch, gt.branch);
    }

    #[test]
    fn wrong_length_covector_is_malformed() {
        let inp = g3_input();
        let mut doc = input_to_doc(&inp);
        doc.pairs[0].l.pop();
        let parsed: SteinerInput<Rat> = doc_to_input(&doc).unwrap();
        // length errors surface in structural validation
        assert!(matches!(
            crate::steiner::validate_input(&parsed, &()),
            Err(Error::MalformedInput { .. })
        ));
    }

    #[test]
    fn zero_denominator_is_a_parse_error() {
        let inp = g3_input();
        let mut doc = input_to_doc(&inp);
        doc.pairs[0].l[0] = "1/0".into();
        match doc_to_input::<Rat>(&doc) {
            Err(Error::ParseError { path, .. }) => assert!(path.contains("pairs[0].L[0]")),
            other => panic!("expected ParseError, got {other:?}"),
        }
    }

    #[test]
    fn float_backend_accepts_rational_files() {
        let inp = g3_input();
        let json = input_to_json(&inp);
        let parsed: SteinerInput<f64> = parse_input_json(&json).unwrap();
        assert_eq!(parsed.pairs.len(), 6);
        assert_eq!(parsed.pairs[0].l.coeffs, vec![5.0, -6.0, 1.0]);
    }

    #[test]
    fn exact_backend_rejects_float_files() {
        let inp = g3_input();
        let mut doc = input_to_doc(&inp);
        doc.field = "float".into();
        assert!(matches!(
            doc_to_input::<Rat>(&doc),
            Err(Error::MalformedInput { .. })
        ));
    }
}
