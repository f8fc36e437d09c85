use thiserror::Error;

/// Errors raised by constructions, geometry evaluation and the run front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("singular evaluation in `{op}` (argument {value:e})")]
    SingularEvaluation { op: &'static str, value: f64 },

    #[error("point {point:?} lies outside the parameter box")]
    OutOfDomain { point: Vec<f64> },

    #[error("degenerate induced metric: Gram determinant {gram_det:e} below {threshold:e}")]
    RankDeficient { gram_det: f64, threshold: f64 },

    #[error("lift is not C-totally real: Lagrangian residual {residual:e} exceeds {tolerance:e}")]
    NotLagrangian { residual: f64, tolerance: f64 },

    #[error("parameter constraint violated: {0}")]
    Parameter(String),

    #[error("inadmissible profile: {0}")]
    InadmissibleProfile(String),

    #[error("null case (|u| = {u:e}): use the null warp construction")]
    NullCase { u: f64 },

    #[error("wrong case: {0}")]
    WrongCase(String),

    #[error("invalid flat Lagrangian factor: mixed-partial residual {residual:e} of the Im A0 form")]
    InvalidPsi3 { residual: f64 },

    #[error("construction error: {0}")]
    Construction(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
