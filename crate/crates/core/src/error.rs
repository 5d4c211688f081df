use crate::conditions::ValidationReport;
use crate::expr::EvalDefect;
use crate::monotone::MonotonicityVerdict;

/// Crate-wide error type. Validation *verdicts* (a shell failing a condition)
/// are not errors; they are reported through `ValidationReport`. Errors mean
/// the request itself was ill-posed or a precondition did not hold.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable x{} (problem has {n} variables)", index + 1)]
    UnknownVariable { index: usize, n: usize },

    #[error("evaluation failed at x = {x:?}: {defect}")]
    Eval { x: Vec<f64>, defect: EvalDefect },

    #[error("objective vectors have lengths {left} and {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid objective vector: {0}")]
    InvalidVector(String),

    #[error("{what} must not be empty")]
    Empty { what: &'static str },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid relaxation: {0}")]
    InvalidRelaxation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("precondition failed: {what}")]
    Precondition {
        what: String,
        /// Populated when the precondition was itself a shell validation.
        report: Option<Box<ValidationReport>>,
    },

    #[error("grid would hold {points} points (limit {limit})")]
    GridTooLarge { points: u128, limit: u128 },

    #[error("no feasible point in {evaluations} evaluations ({eval_failures} of them failed to evaluate)")]
    NoFeasiblePoints {
        evaluations: usize,
        eval_failures: usize,
    },

    #[error("monotonicity hypothesis rejected for {subject}: {reason}")]
    NotMonotone {
        subject: String,
        reason: String,
        /// Probe verdict with concrete violation witnesses, when a probe ran.
        verdict: Option<Box<MonotonicityVerdict>>,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error at line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
