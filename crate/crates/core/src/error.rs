use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent input.
    Input,
    /// Input is well formed but a theorem hypothesis does not hold.
    Hypothesis,
    /// Numerical procedure did not meet its accuracy contract.
    Numeric,
    /// Internal consistency check failed.
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("structure tensor must be {n}x{n}x{n}")]
    BadShape { n: usize },

    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),

    #[error("algebra is not nilpotent: lower central series stabilizes at dimension {stable_dim}")]
    NotNilpotent { stable_dim: usize },

    #[error("BCH degree unsupported: nilpotency class {class} exceeds {max}")]
    BchDegreeUnsupported { class: usize, max: usize },

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    #[error("{0}")]
    Input(String),

    #[error("representation not square-integrable mod pker: orbit is not flat")]
    NotSquareIntegrable,

    #[error("character, no formal dimension: orbit is a point")]
    Character,

    #[error("element does not lie in the polarization")]
    NotInPolarization,

    #[error("orbit not flat; Theorem 1 hypotheses unmet")]
    HypothesesUnmet,

    #[error("generator set is not a strong Malcev basis: {0}")]
    NotMalcev(String),

    #[error("lattice generators are singular (zero determinant)")]
    SingularLattice,

    #[error("provide a basis adapted to the projective kernel")]
    NotAdapted,

    #[error("sampling insufficient: intersection fails at orbit point {point}")]
    SamplingInsufficient { point: String },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("translation {p} outside the safe window |p| <= {limit}")]
    OutsideWindow { p: f64, limit: f64 },

    #[error("grid: {0}")]
    Grid(String),

    #[error("matrix coefficient not converged within the quadrature window (boundary mass {mass:e})")]
    NotConverged { mass: f64 },

    #[error("grid too coarse: modulation frequency {freq} exceeds usable band {limit}")]
    Aliasing { freq: f64, limit: f64 },

    #[error("zero vector")]
    ZeroVector,

    #[error("n = {n} too large for exhaustive subgroup enumeration (max {max})")]
    TooLarge { n: usize, max: usize },

    #[error("necessity violated: {0}")]
    NecessityViolated(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            NotSquareIntegrable | Character | HypothesesUnmet => ErrorKind::Hypothesis,
            SamplingInsufficient { .. } | Inconsistent(_) | NecessityViolated(_) => {
                ErrorKind::Internal
            }
            NotConverged { .. } => ErrorKind::Numeric,
            _ => ErrorKind::Input,
        }
    }
}
