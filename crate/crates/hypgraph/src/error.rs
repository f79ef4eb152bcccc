use thiserror::Error;

/// Errors shared across the crate. Variant names follow the operation
/// contracts, so callers can match on the failure mode directly.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("potential depth {depth} induces a {states}-state transfer matrix, over the budget of {budget}")]
    DepthTooLarge {
        depth: usize,
        states: usize,
        budget: usize,
    },

    #[error("enumeration budget exceeded: {required} words requested, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("pressure equation is not monotone: {0}")]
    NotMonotone(String),

    #[error("no sign change of the pressure in [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("word {0:?} admits no periodic closure")]
    NonClosableWord(String),

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("not in the blender regime: {0}")]
    NotBlenderRegime(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
