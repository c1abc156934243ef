use thiserror::Error;

use crate::reconstruct::IterationRecord;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("POVM element eigenvalues outside [0, 1] (found {0})")]
    InvalidEffect(f64),

    #[error("POVM elements do not sum to the identity (deviation {0:e})")]
    IncompletePovm(f64),

    #[error("map is not completely positive (min eigenvalue of chi {0:e})")]
    NotCompletelyPositive(f64),

    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("operator basis is linearly dependent (rank {rank} of {required})")]
    DependentBasis { rank: usize, required: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid experiment design: {0}")]
    InvalidDesign(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("probability {0} outside [0, 1]: unphysical channel or arguments")]
    UnphysicalProbability(f64),

    #[error("outcome probabilities sum to {0} instead of 1")]
    ProbabilityNormalization(f64),

    #[error("dataset contains no counts")]
    EmptyDataset,

    #[error("Lagrange matrix is numerically singular (condition number {0:e})")]
    DegenerateLagrange(f64),

    #[error("trace-preservation normalization is not invertible")]
    SingularNormalization,

    #[error("linear system is rank deficient (rank {rank} of {required})")]
    RankDeficient { rank: usize, required: usize },

    #[error("solver produced non-finite values at iteration {iteration}")]
    SolverFailure {
        iteration: usize,
        trace: Vec<IterationRecord>,
    },

    #[error("malformed input: {0}")]
    Format(String),
}

impl Error {
    /// True for numerical or physicality failures, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotCompletelyPositive(_)
                | Error::UnphysicalProbability(_)
                | Error::ProbabilityNormalization(_)
                | Error::DegenerateLagrange(_)
                | Error::SingularNormalization
                | Error::RankDeficient { .. }
                | Error::SolverFailure { .. }
                | Error::NotPositive(_)
        )
    }

    /// Stable snake_case identifier of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "invalid_dimension",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotHermitian(_) => "not_hermitian",
            Error::InvalidTrace(_) => "invalid_trace",
            Error::NotPositive(_) => "not_positive",
            Error::InvalidEffect(_) => "invalid_effect",
            Error::IncompletePovm(_) => "incomplete_povm",
            Error::NotCompletelyPositive(_) => "not_completely_positive",
            Error::NotUnitary(_) => "not_unitary",
            Error::DependentBasis { .. } => "dependent_basis",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidDesign(_) => "invalid_design",
            Error::Unsupported(_) => "unsupported",
            Error::UnphysicalProbability(_) => "unphysical_probability",
            Error::ProbabilityNormalization(_) => "probability_normalization",
            Error::EmptyDataset => "empty_dataset",
            Error::DegenerateLagrange(_) => "degenerate_lagrange",
            Error::SingularNormalization => "singular_normalization",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::SolverFailure { .. } => "solver_failure",
            Error::Format(_) => "format",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
