//! Error type shared across the pipeline.

use thiserror::Error;

/// All failure modes of the reconstruction pipeline.
///
/// Domain failures (bad input, degenerate data, failed recovery) map to
/// process exit code 2; environment failures (i/o) map to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input at `{path}`: {reason}")]
    MalformedInput { path: String, reason: String },

    #[error("parse error at `{path}`: {reason}")]
    ParseError { path: String, reason: String },

    #[error("pair {id}: wedge vector vanishes (covectors proportional)")]
    DegeneratePair { id: u64 },

    #[error("points span a {rank}-dimensional subspace, need {need}")]
    SpanDeficient { rank: usize, need: usize },

    #[error("{what}: got {got}, expected {expected}")]
    DimensionMismatch {
        what: String,
        got: usize,
        expected: usize,
    },

    #[error("no admissible basis choice within {restarts} restarts (last failing ids: {last_failing:?})")]
    MaxRestartsExceeded { restarts: u32, last_failing: Vec<u64> },

    #[error("map fails the rank-one check on pairs {ids:?}")]
    PhiVerificationFailed { ids: Vec<u64> },

    #[error("symmetric form is not rank one (pair id {id:?})")]
    RankOneFactorFailed { id: Option<u64> },

    #[error("form {index} does not vanish at the base point")]
    FormNonVanishing { index: usize },

    #[error("linear system has no solution")]
    NoSolution,

    #[error("linear system is underdetermined")]
    NonUnique,

    #[error("matrix is singular")]
    Singular,

    #[error("no sign assigned for pair {id}")]
    MissingSign { id: u64 },

    #[error("sign of pair {id} is not resolved by the witnesses")]
    AmbiguousSign { id: u64 },

    #[error("sign resolution requires at least one witness point")]
    NoWitnesses,

    #[error("ground-truth map is inconsistent on pair {id}")]
    GroundTruthInconsistent { id: u64 },

    #[error("branch points are not pairwise distinct")]
    DuplicateBranchPoint,

    #[error("points are in degenerate position (annihilator dimension != 1)")]
    DegenerateConfiguration,

    #[error("last coefficient vanishes, hyperplane cannot be normalized monic")]
    NotMonicNormalizable,

    #[error("bad parameter: {reason}")]
    BadParameter { reason: String },

    #[error("unsupported degree {d} (supported: 2, 3, 4)")]
    UnsupportedDegree { d: usize },

    #[error("recovered map cannot be matched to the requested gauge: {reason}")]
    GaugeMismatch { reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag, used in the structured error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedInput { .. } => "MalformedInput",
            Error::ParseError { .. } => "ParseError",
            Error::DegeneratePair { .. } => "DegeneratePair",
            Error::SpanDeficient { .. } => "SpanDeficient",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::MaxRestartsExceeded { .. } => "MaxRestartsExceeded",
            Error::PhiVerificationFailed { .. } => "PhiVerificationFailed",
            Error::RankOneFactorFailed { .. } => "RankOneFactorFailed",
            Error::FormNonVanishing { .. } => "FormNonVanishing",
            Error::NoSolution => "NoSolution",
            Error::NonUnique => "NonUnique",
            Error::Singular => "Singular",
            Error::MissingSign { .. } => "MissingSign",
            Error::AmbiguousSign { .. } => "AmbiguousSign",
            Error::NoWitnesses => "NoWitnesses",
            Error::GroundTruthInconsistent { .. } => "GroundTruthInconsistent",
            Error::DuplicateBranchPoint => "DuplicateBranchPoint",
            Error::DegenerateConfiguration => "DegenerateConfiguration",
            Error::NotMonicNormalizable => "NotMonicNormalizable",
            Error::BadParameter { .. } => "BadParameter",
            Error::UnsupportedDegree { .. } => "UnsupportedDegree",
            Error::GaugeMismatch { .. } => "GaugeMismatch",
            Error::Io(_) => "Io",
        }
    }

    /// Process exit code: 1 for environment errors, 2 for domain errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
