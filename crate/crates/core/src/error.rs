use thiserror::Error;

/// Errors raised by automaton construction, learning and normalization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),

    #[error("state index {index} out of range for an automaton with {n} states")]
    StateOutOfRange { index: usize, n: usize },

    #[error("series diverges: spectral radius {rho} is not below 1")]
    Divergent { rho: f64 },

    #[error("automaton is not probabilistic: {}", .0.join("; "))]
    NotProbabilistic(Vec<String>),

    #[error("sample is empty")]
    EmptySample,

    #[error("residual of `{0}` is undefined: no sample word has it as a prefix")]
    UndefinedResidual(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("normalization refused: {0}")]
    Uncertified(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("sampled word exceeded {0} symbols")]
    WordTooLong(usize),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the CLI for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Uncertified(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
