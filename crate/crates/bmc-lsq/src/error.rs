use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated a documented precondition (empty input, out-of-range index, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A run configuration is structurally valid but semantically rejected.
    #[error("configuration error: {0}")]
    Config(String),

    /// One or more semantic violations found while validating a configuration.
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    ConfigViolations(Vec<String>),

    /// A value outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A linear-algebra or floating-point failure that indicates an upstream
    /// invariant was broken (e.g. a factorization of a non-PD matrix).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The renormalized estimator has no mass on the slice at `x`; evaluating
    /// it there would divide by an untrustworthy denominator.
    #[error("unsupported slice: normalizer at x = {x} is {normalizer:e}, below the 1e-300 floor")]
    UnsupportedSlice { x: f64, normalizer: f64 },

    /// Malformed persisted data (bad magic, truncated payload, unparsable CSV).
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
