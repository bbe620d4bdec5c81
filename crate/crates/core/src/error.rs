//! Crate-wide error type.
//!
//! Recoverable failures (I/O, malformed data, a peer disagreeing about
//! session parameters) surface through [`Error`]; violations of internal
//! protocol contracts (width mismatches, out-of-range shares) panic instead,
//! since they indicate a bug rather than a runtime condition.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("peer closed the connection mid-protocol")]
    PeerClosed,

    #[error("message desync: expected {expected}, peer sent {got}")]
    Desync { expected: String, got: String },

    #[error("session negotiation failed: {0}")]
    Negotiation(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error("accuracy oracle too close to a rounding boundary to certify")]
    OracleMargin,
}

pub type Result<T> = std::result::Result<T, Error>;
