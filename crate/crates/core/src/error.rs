use thiserror::Error;

/// Crate-wide error type. Numeric routines return `Result<_, Error>` and
/// never panic on bad input.
#[derive(Error, Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// Input matrix is not symmetric within the requested tolerance.
    #[error("matrix entry ({row},{col}) differs from its mirror by {asymmetry:e}")]
    NotSymmetric {
        row: usize,
        col: usize,
        asymmetry: f64,
    },

    /// Symmetric input failed the positive definiteness check.
    /// `index` is the first offending leading minor (1-based) when the
    /// failure was detected by Cholesky, or the position of the smallest
    /// eigenvalue otherwise.
    #[error("matrix is not positive definite (minor {index}, eigenvalue {eigenvalue:e})")]
    NotPositiveDefinite { index: usize, eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    /// The shape function is zero or negative at the evaluation point, so
    /// the log-density does not exist there.
    #[error("shape function is nonpositive at trace value {trace}")]
    NonpositiveDensity { trace: f64 },

    /// The generator has no Taylor expansion at the origin.
    #[error("generator `{0}` has no Taylor expansion at 0")]
    NoTaylorExpansion(String),

    /// An integral required by a normalizer or moment does not converge.
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    /// A series was cut at its maximum degree while the last layer still
    /// contributed more than the requested tolerance.
    #[error("series truncated at degree {terms_used} with layer magnitude {last_layer:e} above tolerance")]
    TruncationExceeded { terms_used: usize, last_layer: f64 },

    /// Layer magnitudes grew for several consecutive degrees past the
    /// midpoint of the truncation budget.
    #[error("series layers grew for {growing} consecutive degrees after degree {from_degree}; divergence suspected")]
    DivergenceSuspected { from_degree: usize, growing: usize },

    /// An alternating series ended on layers that were not decreasing, so
    /// the usual tail bound gives no error control.
    #[error("alternating series not converged: final layers {a:e}, {b:e} do not decrease")]
    AlternatingSeriesNotConverged { a: f64, b: f64 },

    /// A truncated distribution-function series did not reach the
    /// requested accuracy.
    #[error("series for a probability did not converge: {0}")]
    NonconvergedSeries(String),

    /// A scalar root search exhausted its bracket without a sign change.
    #[error("no root in ({lo}, {hi})")]
    NoRoot { lo: f64, hi: f64 },

    #[error("matrix is singular or numerically singular")]
    SingularMatrix,

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
