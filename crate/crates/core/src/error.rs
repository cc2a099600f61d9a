use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("file size {file_bits} bits is not a multiple of the subpacketization {required}")]
    Subpacketization { required: u64, file_bits: u64 },

    #[error("invalid demand vector: {0}")]
    InvalidDemands(String),

    #[error("user {user} cannot recover file {file}: slot {slot} is still missing")]
    DecodingFailure {
        user: usize,
        file: usize,
        slot: usize,
    },

    #[error("user {user} was asked to send {file}:{slot}, which is not in its cache")]
    EncodingViolation {
        user: usize,
        file: usize,
        slot: usize,
    },

    #[error("instance too large for exact mode: {outcomes} outcomes exceed the cap of {cap}")]
    InstanceTooLarge { outcomes: String, cap: u64 },

    #[error("memory {memory} is outside the curve domain [{lo}, {hi}]")]
    OutsideDomain {
        memory: String,
        lo: String,
        hi: String,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Undefined(String),
}

impl Error {
    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }
}
