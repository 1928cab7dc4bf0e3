//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by series construction and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// Attempt to invert a series with no terms up to its order.
    #[error("cannot invert a series that is zero to its truncation order")]
    ZeroSeries,

    /// A nome must be (+1 or -1) times a positive rational power of q.
    #[error("invalid nome {0}: need coefficient +1 or -1 and exponent > 0")]
    InvalidNome(String),

    /// A lattice sum whose row minima never climb past the truncation order.
    #[error("sum does not converge formally: {0}")]
    NonConvergent(String),

    /// An Appell-Lerch bilateral term whose denominator has zero constant term.
    #[error("Appell-Lerch sum has a pole at bilateral index r = {0}")]
    PoleAtTerm(i64),

    /// The Appell-Lerch normalizer j(z; q) vanishes.
    #[error("degenerate z argument: j(z; nome) = 0")]
    DegenerateZ,

    /// A theta function in a denominator position vanishes.
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),

    /// The decomposer refuses a triangular sum it cannot rewrite exactly.
    #[error("unsupported triangular-sum shape: {0}")]
    UnsupportedShape(String),

    /// A quadrant piece found no reflection partner during decomposition.
    #[error("no pairing partner for quadrant piece: {0}")]
    PairingFailure(String),

    /// Expression-language syntax error.
    #[error("parse error at byte {offset}: expected {expected}")]
    Parse { offset: usize, expected: String },

    /// Registry lookup failure.
    #[error("unknown identity id: {0}")]
    UnknownIdentity(String),

    /// An evaluation error annotated with the AST path it occurred at.
    #[error("at {path}: {source}")]
    EvalAt {
        path: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wrap an error with the AST path of the node that raised it.
    pub fn at_path(self, path: &str) -> Error {
        match self {
            Error::EvalAt { path: inner, source } => Error::EvalAt {
                path: format!("{path}/{inner}"),
                source,
            },
            other => Error::EvalAt {
                path: path.to_string(),
                source: Box::new(other),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
