use thiserror::Error;

use crate::risk::FitResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter for {id}: {rule}")]
    InvalidParameter { id: String, rule: String },

    #[error("argument r = {0} is outside the domain (0, inf)")]
    Domain(f64),

    #[error("central derivative requested at kink r = {0}")]
    Kink(f64),

    #[error("invalid link function: {0}")]
    InvalidLink(String),

    #[error("output y = {y} is outside the open interval ({a}, {b})")]
    OutputOutOfRange { y: f64, a: f64, b: f64 },

    #[error("prediction t = {0} is not finite")]
    NonFinitePrediction(f64),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("integral diverges near r0 = {r0}: {detail}")]
    DivergentIntegral { r0: f64, detail: String },

    #[error("generator g is not increasing: g({at}) = {value} < g({prev_at}) = {prev}")]
    NonMonotoneGenerator {
        at: f64,
        value: f64,
        prev_at: f64,
        prev: f64,
    },

    #[error("lemma hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("row {row}: {source}")]
    Row {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("dataset: {0}")]
    Dataset(String),

    #[error("RAE is undefined: every y equals the sample mean")]
    RaeUndefined,

    #[error("empirical risk is not finite at the initial model ({0})")]
    NonFiniteRisk(f64),

    #[error("line search step collapsed below 1e-18 after {} iterations", .0.risk_trace.len())]
    StepCollapse(Box<FitResult>),

    #[error("unknown loss id `{0}`")]
    UnknownLossId(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(id: impl Into<String>, rule: impl Into<String>) -> Self {
        Error::InvalidParameter {
            id: id.into(),
            rule: rule.into(),
        }
    }
}
