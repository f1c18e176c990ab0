//! Crate-wide error type and the process exit codes the CLI maps it to.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rotation axis must be nonzero for a finite angle")]
    ZeroAxis,

    #[error("entanglement fidelity {value} lies outside [0, 1]")]
    FidelityDomain { value: f64 },

    #[error("target transfer matrix is not unitary: orthogonality defect {defect:.3e}")]
    NonUnitaryTarget { defect: f64 },

    #[error("rotation block has determinant -1 (reflection); no axis-angle form exists")]
    Reflection,

    #[error("averaged transfer matrix is only defined for rotations about x or y")]
    UnsupportedAxis,

    #[error("measurement design spans only {rank} of 12 trace-preserving directions")]
    RankDeficientDesign { rank: usize },

    #[error("dataset contains non-finite outcome values")]
    NonFiniteData,

    #[error("{0}")]
    Schema(String),

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit code contract: 2 for configuration problems, 4 for data or
    /// physicality validation failures. (Solver non-convergence exits 3 but
    /// is reported through the result record, not as an error.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ZeroAxis
            | Error::NonUnitaryTarget { .. }
            | Error::UnsupportedAxis
            | Error::Config(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::FidelityDomain { .. }
            | Error::Reflection
            | Error::RankDeficientDesign { .. }
            | Error::NonFiniteData
            | Error::Schema(_) => 4,
        }
    }
}
