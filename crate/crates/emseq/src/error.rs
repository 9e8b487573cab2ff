use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum EmError {
    #[error("requested {requested} bits exceeds storage limit of {limit}")]
    Capacity { requested: u64, limit: u64 },

    #[error("engine state does not correspond to the supplied sequence (first divergence at position {position})")]
    StateMismatch { position: u64 },

    #[error("empty word not allowed")]
    EmptyWord,

    #[error("word of length {len} exceeds the 63-bit word limit")]
    WordTooLong { len: usize },

    #[error("invalid bit character {found:?} at position {position}")]
    BadBitChar { position: usize, found: char },

    #[error("invalid range [{k}, {n}] over sequence of length {len}")]
    Range { k: u64, n: u64, len: u64 },

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("unsupported format version {0:#04x}")]
    VersionMismatch(u8),

    #[error("truncated payload: expected {expected} bytes, got {got}")]
    TruncatedPayload { expected: u64, got: u64 },

    #[error("unknown lemma id {0:?}")]
    UnknownLemma(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
