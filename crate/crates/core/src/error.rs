use thiserror::Error;

/// Errors raised while configuring or running a caching experiment.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("cache size M={memory} outside [0, {files}]")]
    MemoryOutOfRange { memory: f64, files: usize },

    #[error("{users} users exceeds the supported maximum of {max}")]
    TooManyUsers { users: usize, max: usize },

    #[error("demand for file {file} out of range (N={files})")]
    DemandOutOfRange { file: usize, files: usize },

    #[error("demand vector has {got} entries, expected {expected}")]
    DemandLength { got: usize, expected: usize },

    #[error("user {user} is a member of the subset {subset}")]
    UserInSubset { user: usize, subset: String },

    #[error("signatures were not built for file {0}")]
    MissingSignature(usize),

    #[error("exhaustive search over {0} demand vectors exceeds the limit")]
    SearchTooLarge(u128),

    #[error("distinct demands need N >= K (N={files}, K={users})")]
    NotEnoughFiles { files: usize, users: usize },

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("unknown tree node {0}")]
    UnknownNode(u64),

    #[error("shared cache configuration: {0}")]
    SharedConfig(String),

    #[error("asynchronous schedule: {0}")]
    Schedule(String),

    #[error("mixture weights require N >= K (N={files}, K={users})")]
    MixtureRange { files: usize, users: usize },

    #[error("placement mismatch: {0}")]
    PlacementMismatch(String),

    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// A receiver could not reconstruct its requested content.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("user {user} needs bit {bit} of file {file} but does not cache it")]
    NotCached { user: usize, file: usize, bit: usize },

    #[error("message payload of {got} bits is shorter than the {needed}-bit subfile")]
    ShortPayload { got: usize, needed: usize },

    #[error("user {user}: {missing} bits of file {file} unrecovered")]
    Unrecovered { user: usize, file: usize, missing: usize },

    #[error("user {user}: file-combination system has rank {rank} < {needed}")]
    RankDeficient { user: usize, rank: usize, needed: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
