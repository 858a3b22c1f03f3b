use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported QAM order {0}, expected 4, 16 or 64")]
    UnsupportedQamOrder(u32),

    #[error("payload holds {got} bits, frame needs exactly {need}")]
    BitCount { need: usize, got: usize },

    #[error("payload bits must be 0 or 1")]
    NonBinaryBits,

    #[error("invalid frame spec: {0}")]
    InvalidSpec(String),

    #[error("invalid impairment config: {0}")]
    InvalidConfig(String),

    #[error("input matrix is identically zero")]
    ZeroInput,

    #[error("not enough observations: {got} columns, need at least {need}")]
    TooFewSamples { need: usize, got: usize },

    #[error("effective rank {rank} is below 2, nothing to separate")]
    RankDeficient { rank: usize },

    #[error("input is not whitened (max covariance deviation {0:.3e})")]
    NotWhitened(f64),

    #[error("requested {requested} components but only {available} whitened dimensions")]
    TooManyComponents { requested: usize, available: usize },

    #[error("training design is degenerate, ambiguity matrix unidentifiable")]
    DegenerateTraining,

    #[error("ambiguity matrix ill conditioned ({cond:.3e}), separation failed")]
    IllConditioned { cond: f64 },

    #[error("fewer than two components survive the SI-leak screen")]
    SiLeak,

    #[error("frame spec has no usable nonoverlapped long preamble")]
    MissingPreamble,

    #[error("all subcarriers failed separation")]
    AllSubcarriersFailed,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
