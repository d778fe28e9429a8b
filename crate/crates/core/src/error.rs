use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quantile for r = {r} not reached before t = {horizon}")]
    UnreachableQuantile { r: f64, horizon: f64 },

    #[error("cannot concatenate at step {step}: first process is at state {left}, second starts at {right}")]
    Concatenation { step: usize, left: usize, right: usize },

    #[error("enumeration needs {required} items, cap is {cap}")]
    EnumerationCap { required: u128, cap: u128 },

    #[error("truncation horizon exceeds {max_steps} steps (horizon mass {horizon_mass})")]
    HorizonOverflow { horizon_mass: f64, max_steps: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("infeasible schedule: {0}")]
    Infeasible(String),

    #[error("log-variation undefined: density vanishes at t = {0}")]
    VariationUndefined(f64),

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
