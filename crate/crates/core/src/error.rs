use thiserror::Error;

/// Errors raised by the estimation engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no observation has inputs dominated by the query point")]
    EmptyEffectiveSample,

    #[error("quantile level {0} is outside (0, 1)")]
    InvalidLevel(f64),

    #[error("k * p = {0} is an integer; the effective index is not unique")]
    IntegerIndex(f64),

    #[error("tail quantile spacing is zero; enlarge the tail fraction")]
    ZeroSpacing,

    #[error("tail quantile spacing ratio {0} is not positive")]
    NonPositiveRatio(f64),

    #[error("normalizer denominator is zero; increase m or k0")]
    ZeroDenominator,

    #[error("bias-cancelling system is degenerate (k1^-xi == k2^-xi)")]
    DegenerateSystem,

    #[error("invalid effective-index grid: {0}")]
    InvalidGrid(String),

    #[error("range [{h1}, {h2}] cannot hold {needed} distinct indices")]
    RangeTooNarrow { h1: usize, h2: usize, needed: usize },

    #[error("subsample size formula is non-positive ({0}); sample too small")]
    NonPositiveB(f64),

    #[error("initial chain value has zero posterior density")]
    NonFiniteStart,

    #[error("subsample {ordinal} stayed degenerate after {retries} redraws")]
    DegenerateSubsample { ordinal: usize, retries: usize },

    #[error("empty chain")]
    EmptyChain,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{failures} of {replications} replications failed (limit is 1%)")]
    StudyFailed { failures: usize, replications: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Variant name, used as a machine-readable reason.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyEffectiveSample => "EmptyEffectiveSample",
            Error::InvalidLevel(_) => "InvalidLevel",
            Error::IntegerIndex(_) => "IntegerIndex",
            Error::ZeroSpacing => "ZeroSpacing",
            Error::NonPositiveRatio(_) => "NonPositiveRatio",
            Error::ZeroDenominator => "ZeroDenominator",
            Error::DegenerateSystem => "DegenerateSystem",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::RangeTooNarrow { .. } => "RangeTooNarrow",
            Error::NonPositiveB(_) => "NonPositiveB",
            Error::NonFiniteStart => "NonFiniteStart",
            Error::DegenerateSubsample { .. } => "DegenerateSubsample",
            Error::EmptyChain => "EmptyChain",
            Error::InvalidInput(_) => "InvalidInput",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::StudyFailed { .. } => "StudyFailed",
        }
    }

    /// True for errors caused by the caller's data or settings rather than
    /// by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::InvalidConfig(_) | Error::InvalidGrid(_) | Error::RangeTooNarrow { .. }
        )
    }
}
