use thiserror::Error;

use crate::symcalc::EvalError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("chart mismatch: expected `{expected}`, found `{found}`")]
    ChartMismatch { expected: String, found: String },
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("invalid groupoid model: {0}")]
    Model(String),
    #[error("form is not homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("function `{0}` vanishes or changes sign on the sample box")]
    Vanishing(String),
    #[error("function is not multiplicative: {0}")]
    NotMultiplicative(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
