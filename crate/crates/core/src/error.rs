use thiserror::Error;

use crate::series::MultiIndex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series shape mismatch: dim {0} order {1} vs dim {2} order {3}")]
    ShapeMismatch(usize, usize, usize, usize),

    #[error("inner series has a nonzero constant term")]
    NonzeroConstant,

    #[error("q = {0} is outside [0, 1)")]
    InvalidExponent(f64),

    #[error("kappa overflows for q = {0}")]
    KappaOverflow(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value is not exactly representable: {0}")]
    NotRepresentable(String),

    #[error("negative sample u1 = {value} at {at:?}")]
    NegativeSample { value: f64, at: Vec<f64> },

    #[error("transform is not invertible at {0:?}")]
    NotInvertible(Vec<f64>),

    #[error("denominator 1 + d_n v1 = {0} is below the guard threshold")]
    DenominatorGuard(f64),

    #[error("Newton iteration did not converge: {0}")]
    NewtonFailure(String),

    #[error("singular {m}x{m} block at multi-index {index}")]
    SingularBlock { m: usize, index: MultiIndex },

    #[error("smallness violated: epsilon0 = {epsilon0} exceeds threshold {threshold}")]
    SmallnessViolated { epsilon0: f64, threshold: f64 },

    #[error("order overflow: requested {0}, maximum {1}")]
    OrderOverflow(usize, usize),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("iteration did not converge after {iterations} steps (last change {change:e})")]
    NoConvergence { iterations: usize, change: f64 },

    #[error("no free boundary found: {0}")]
    NoInterface(String),

    #[error("tolerance breach in {check}: {measured:e} > {bound:e}")]
    ToleranceBreach { check: String, measured: f64, bound: f64 },

    #[error("unknown selector {0:?}; valid selectors are fb, weiss, norms, residual")]
    UnknownSelector(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("pipeline stopped: {source}")]
    Pipeline { source: Box<Error>, report: Box<crate::harness::ReportDocument> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
