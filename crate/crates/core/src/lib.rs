//! Reconstruction of the canonical model of an unramified double cover from
//! the theta hyperplanes of a Steiner system.
//!
//! Given the pairs of theta hyperplanes attached to a 2-torsion point of a
//! genus-`g` curve, the crate recovers the linear identification of
//! `∧²H⁰(ω)` with `S²H⁰(ω+α)` up to a basis change, extracts the odd Prym
//! theta hyperplanes as rank-one factors, assembles the block quadrics
//! `L·L' + ε·M²` that cut out the canonical image of the double cover, and
//! verifies the output. A synthetic hyperelliptic generator provides exact
//! ground truth: branch points on the line, monic theta hyperplanes through
//! Weierstrass images, rational witness points on the double cover.
//!
//! Two scalar backends: exact rationals (authoritative) and `f64` with a
//! relative tolerance (performance mode).

pub mod error;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod pipeline;
pub mod quadrics;
pub mod recovery;
pub mod scalar;
pub mod steiner;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{Covector, Matrix, SymForm, WedgeVector};
pub use oracle::{GroundTruth, HyperellipticConfig};
pub use pipeline::{
    generate, reconstruct, BackendKind, GenerateParams, Reconstruction, RunConfig, SignSource,
};
pub use quadrics::{QuadricForm, SignVector};
pub use recovery::{GlComparison, GlWitness, PhiMap, RankOneReport, RecoveryDiagnostics};
pub use scalar::{Field, Rat, Tol};
pub use steiner::{CurveContext, SteinerInput, ThetaPair};
pub use verify::VerificationReport;
