//! Error type shared by every module of the crate.
//!
//! Numeric failures carry enough structure that callers (in particular the
//! command-line driver) can serialize them as machine-readable objects and
//! decide on an exit status without string matching.

use thiserror::Error;

/// Crate-wide error enumeration.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The momentum is too small for the requested excitation level:
    /// purely real solutions require 2p >= N + 1/2.
    #[error("inadmissible momentum: 2p = {two_p} < N + 1/2 = {bound}")]
    Admissibility { two_p: f64, bound: f64 },

    /// A hole set that does not come from any partition.
    #[error("malformed hole set: {0}")]
    MalformedHoles(String),

    /// The fixed-point iteration ran out of its iteration budget.
    #[error("fixed point did not converge after {iterations} iterations: last step {last_delta:.3e}, contraction ratio {ratio:.3}")]
    NonConvergence {
        iterations: usize,
        last_delta: f64,
        ratio: f64,
    },

    /// The free-boundary counting constraint failed: the staircase value at
    /// the left edge did not match the number of holes.
    #[error("boundary constraint violated: ceil(z(omega) - 1/2) = {got}, expected {expected}")]
    ConstraintViolation { got: i64, expected: i64 },

    /// A function that must be strictly increasing was not, so a level
    /// crossing could not be bracketed.
    #[error("monotonicity violated while bracketing level {level} near y = {near}")]
    MonotonicityViolation { level: f64, near: f64 },

    /// The requested tail tolerance cannot be met by the truncation bound.
    #[error("tail tolerance {tol:.3e} unreachable: bound {bound:.3e} at cutoff {cutoff:.3e}")]
    TailTolUnreachable { tol: f64, bound: f64, cutoff: f64 },

    /// Two auxiliary-system roots collided.
    #[error("degenerate roots: |z_{i} - z_{j}| = {sep:.3e}")]
    DegenerateRoots { i: usize, j: usize, sep: f64 },

    /// The potential has a double pole on (or too close to) the positive
    /// real axis, so real-line shooting is not well posed.
    #[error("potential singular on the positive real axis: min |t^(2a+2) - z_k| = {min_dist:.3e} near t = {at:.6}")]
    RealAxisSingularity { min_dist: f64, at: f64 },

    /// An eigenvalue bracket or count did not behave as expected.
    #[error("eigenvalue search failure: {0}")]
    EigenvalueSearch(String),

    /// A root bracket could not be established or refined.
    #[error("bracketing failure: {0}")]
    Bracketing(String),

    /// No candidate spectral normalization reproduced the Bethe roots.
    #[error("scale convention unresolved: {detail}")]
    ConventionUnresolved { detail: String },

    /// Post-hoc verification of a converged state found a residual above
    /// the acceptance threshold.
    #[error("verification failed: worst residual {worst:.3e} above {tol:.3e}")]
    Verification { worst: f64, tol: f64 },

    /// Command-line usage error (bad flags, unparsable partition, alpha <= 1).
    #[error("usage: {0}")]
    Usage(String),

    /// Input/output failure while writing results.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag for serialized error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "Domain",
            Error::Admissibility { .. } => "Admissibility",
            Error::MalformedHoles(_) => "MalformedHoles",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::ConstraintViolation { .. } => "ConstraintViolation",
            Error::MonotonicityViolation { .. } => "MonotonicityViolation",
            Error::TailTolUnreachable { .. } => "TailTolUnreachable",
            Error::DegenerateRoots { .. } => "DegenerateRoots",
            Error::RealAxisSingularity { .. } => "RealAxisSingularity",
            Error::EigenvalueSearch(_) => "EigenvalueSearch",
            Error::Bracketing(_) => "Bracketing",
            Error::ConventionUnresolved { .. } => "ConventionUnresolved",
            Error::Verification { .. } => "Verification",
            Error::Usage(_) => "Usage",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }

    /// Process exit status the command-line driver should use: 1 for usage
    /// errors, 2 for numeric/solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            _ => 2,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
