//! Error type shared across the crate.

use crate::capacity::CapacityEstimate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A sampled body without enough structure to measure (no samples, zero
    /// inradius, non-finite coordinates).
    #[error("degenerate body: {0}")]
    DegenerateBody(String),

    /// A body sample lies outside the closed set it is supposed to live in.
    #[error("containment violation: sample ({x}, {y}, {z}) is outside the domain by {depth:e}")]
    Containment { x: f64, y: f64, z: f64, depth: f64 },

    /// Ring condensers need 0 < r < R.
    #[error("invalid ring: inner radius {r}, outer radius {big_r}")]
    InvalidRing { r: f64, big_r: f64 },

    /// Only dimensions 2 and 3 are supported, and some routines are 2-d only.
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    /// A map was evaluated at a point where it is not defined.
    #[error("map undefined: {0}")]
    MapUndefined(String),

    /// An oracle returned a value contradicting an already-established fact.
    #[error("inconsistent oracle: {0}")]
    InconsistentOracle(String),

    /// Condenser plates overlap, touch, or cannot be told apart at the
    /// requested resolution.
    #[error("invalid condenser: {0}")]
    InvalidCondenser(String),

    /// The grid solver ran out of iterations; the last estimate is attached.
    #[error("capacity solver did not converge after {} iterations (residual {:e})", estimate.iterations, estimate.residual)]
    NonConvergence { estimate: Box<CapacityEstimate> },

    /// A formula was evaluated outside the range where it makes sense.
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// Bad command line arguments, config files, or input files.
    #[error("invalid input: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 for usage and input problems, 3 for
    /// solver non-convergence. (2 is reserved for coverage warnings, which
    /// are not errors.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } => 3,
            _ => 1,
        }
    }
}
