//! Crate-wide error type.
//!
//! Infeasibility of a certificate or synthesis problem is *not* an error —
//! those outcomes are reported as `None` / explicit failure variants by the
//! operations concerned.  Errors cover precondition violations (bad
//! dimensions, out-of-range parameters, missing gains) and exhausted budgets.

use core::fmt;

/// Error conditions surfaced by the core operations.
#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum Error {
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// Two operands have incompatible shapes; `context` names the operation.
    DimensionMismatch { context: &'static str },
    /// A matrix or vector contains NaN or infinite entries.
    NonFinite { context: &'static str },
    /// The plant has no feedback gain but the operation needs one.
    GainNotSet { plant: usize },
    /// A probability was outside the open interval ]0, 1[.
    InvalidProbability,
    /// The certificate lower bound κ was outside ]0, 1[.
    InvalidKappa,
    /// The network capacity must satisfy 0 < M < N.
    InvalidCapacity { n: usize, m: usize },
    /// Plant indices must be exactly {1, …, N} with no repeats.
    BadPlantIndices,
    /// N must be divisible by M for the block construction.
    NotDivisible { n: usize, m: usize },
    /// A matrix that must be symmetric is not; `context` names it.
    NotSymmetric { context: &'static str },
    /// A matrix that must be positive definite is not; `context` names it.
    NotPositiveDefinite { context: &'static str },
    /// Rejection sampling did not produce an admissible plant in time.
    GenerationBudgetExhausted { plant: usize, attempts: usize },
    /// The second-moment series diverges; the expected cost is infinite.
    DivergentExpectation,
    /// The search needs feedback gains that have not been synthesized yet.
    SynthesisRequired { plant: usize },
    /// The NCS-level assumptions do not hold for this configuration.
    AssumptionsViolated,
    /// A plant index does not appear in the partition.
    UnknownPlant { plant: usize },
    /// The requested horizon exceeds the available trajectory length.
    InvalidHorizon { horizon: usize, available: usize },
    /// A partition failed structural validation; `reason` says why.
    InvalidPartition { reason: &'static str },
    /// A probability vector failed validation; `reason` says why.
    InvalidProbabilityVector { reason: &'static str },
    /// Integer overflow while combining exact rationals.
    RationalOverflow { context: &'static str },
    /// The enumeration needs at least two blocks (v ≥ 2).
    TooFewBlocks,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotSquare { rows, cols } => {
                write!(f, "matrix must be square, got {rows}x{cols}")
            }
            Error::DimensionMismatch { context } => {
                write!(f, "dimension mismatch in {context}")
            }
            Error::NonFinite { context } => {
                write!(f, "non-finite entries in {context}")
            }
            Error::GainNotSet { plant } => {
                write!(f, "gain not set for plant {plant}")
            }
            Error::InvalidProbability => {
                write!(f, "probability must lie strictly between 0 and 1")
            }
            Error::InvalidKappa => {
                write!(f, "kappa must lie strictly between 0 and 1")
            }
            Error::InvalidCapacity { n, m } => {
                write!(f, "capacity must satisfy 0 < M < N, got M={m}, N={n}")
            }
            Error::BadPlantIndices => {
                write!(f, "plant indices must be exactly 1..N with no repeats")
            }
            Error::NotDivisible { n, m } => {
                write!(f, "N must be divisible by M, got N={n}, M={m}")
            }
            Error::NotSymmetric { context } => {
                write!(f, "matrix is not symmetric: {context}")
            }
            Error::NotPositiveDefinite { context } => {
                write!(f, "matrix is not positive definite: {context}")
            }
            Error::GenerationBudgetExhausted { plant, attempts } => {
                write!(
                    f,
                    "random generation for plant {plant} exhausted {attempts} attempts"
                )
            }
            Error::DivergentExpectation => {
                write!(f, "divergent expectation: second-moment spectral radius is not below 1")
            }
            Error::SynthesisRequired { plant } => {
                write!(f, "synthesis required first: plant {plant} has no gain")
            }
            Error::AssumptionsViolated => {
                write!(f, "configuration violates the standing assumptions")
            }
            Error::UnknownPlant { plant } => {
                write!(f, "plant {plant} does not appear in the partition")
            }
            Error::InvalidHorizon { horizon, available } => {
                write!(
                    f,
                    "horizon {horizon} exceeds available trajectory length {available}"
                )
            }
            Error::InvalidPartition { reason } => {
                write!(f, "invalid partition: {reason}")
            }
            Error::InvalidProbabilityVector { reason } => {
                write!(f, "invalid probability vector: {reason}")
            }
            Error::RationalOverflow { context } => {
                write!(f, "rational arithmetic overflow in {context}")
            }
            Error::TooFewBlocks => {
                write!(f, "at least two blocks are required (0 < M < N forces v >= 2)")
            }
        }
    }
}

impl core::error::Error for Error {}
