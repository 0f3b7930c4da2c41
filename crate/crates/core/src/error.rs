use thiserror::Error;

/// Errors raised by key management, signing and the protocol helpers.
///
/// Verification never returns an error: attacker-controlled input maps to an
/// invalid verdict instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parameters give {bits:.2} bits of index security, below the required {required:.2}")]
    ParameterRejected { bits: f64, required: f64 },

    #[error("nonce packet already consumed")]
    NonceReuse,

    #[error("PKG extraction failed verification")]
    RejectedExtraction,

    #[error("signing key expired at {expiry} (now {now})")]
    KeyExpired { expiry: u64, now: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown operator")]
    UnknownOperator,

    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
