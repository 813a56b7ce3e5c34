use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("value {value} outside the allowed domain {domain}")]
    Domain { value: String, domain: &'static str },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// A configured resource bound was hit. `needed` is the estimate that
    /// tripped it, when one is known before doing the work.
    #[error("resource budget exceeded: {what} needs {needed}, limit is {limit}")]
    Budget {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    /// The oracle ran out of room before it could decide. Never a verdict.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("unsupported regime: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
