use thiserror::Error;

use crate::model::Assumption;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("divergent series: {0}")]
    DivergentSeries(String),

    #[error("assumption {assumption} violated: {detail}")]
    AssumptionViolated { assumption: Assumption, detail: String },

    #[error("count overflow at time step {step}")]
    Overflow { step: usize },

    #[error("trajectory fingerprint {found} does not match model fingerprint {expected}")]
    FingerprintMismatch { expected: String, found: String },

    #[error("enumeration requires bounded support: {0}")]
    UnboundedSupport(String),

    #[error("enumeration state space {states} exceeds cap {cap}")]
    StateExplosion { states: u128, cap: u128 },

    #[error("no solution of F(x) = {theta}: critical tilt is {theta_c} (attained: {attained})")]
    NoSolution { theta: f64, theta_c: f64, attained: bool },

    #[error("degenerate model: {0}")]
    Degenerate(String),

    #[error("Ḡ bound violated at k={k}: {what} = {value} > {bound}")]
    BoundViolation { k: usize, what: &'static str, value: f64, bound: f64 },

    #[error("tilted moment generating function diverges at every grid point")]
    DivergentMgf,

    #[error("expected tail count {expected:.1} below required {required}")]
    InsufficientTailMass { expected: f64, required: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
