use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {}", format_violations(.0))]
    InvalidNetwork(Vec<Violation>),
    #[error("unknown demand node `{0}`")]
    UnknownNode(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("network has no terminals (s, t)")]
    NoTerminals,
    #[error("path has no interior (failure-prone) nodes")]
    EmptyInterior,
    #[error("instance too large for oracle: {supplies} supply nodes exceed the cap of {cap}")]
    OracleTooLarge { supplies: usize, cap: usize },
    #[error("path enumeration exceeded its budget of {budget} paths")]
    PathBudgetExceeded { budget: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("p = {p} too large for sandwich guarantee (limit {limit})")]
    SandwichPrecondition { p: f64, limit: f64 },
    #[error("s and t are disconnected")]
    Disconnected,
    #[error("no disjoint pair exists")]
    NoDisjointPair,
    #[error("integer program is infeasible")]
    Infeasible,
    #[error("solver budget of {budget} branch nodes exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("inconsistent assignment: {0}")]
    InconsistentAssignment(String),
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
