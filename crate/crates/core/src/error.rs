use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("fractional solution is infeasible: terminal {from} reaches terminal {to} at distance {distance}")]
    Infeasible { from: usize, to: usize, distance: f64 },
    #[error("terminals {from} and {to} are joined by a zero-length path; no scaling makes the lengths feasible")]
    ZeroDistance { from: usize, to: usize },
    #[error("LP optimum is infinite: terminals {from} and {to} are joined by a path of uncuttable members")]
    InfiniteLp { from: usize, to: usize },
    #[error("iteration cap {cap} exceeded (certified gap {gap:.6})")]
    IterationCap { cap: u64, gap: f64 },
    #[error("instance too large for the exact oracle: {count} candidate members, limit {limit}")]
    GuardExceeded { count: usize, limit: usize },
    #[error("no finite cut separates the terminals")]
    NoFiniteCut,
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("node instance is not canonical: terminals {0} and {1} are adjacent")]
    NotCanonical(usize, usize),
    #[error("invalid parameter: {0}")]
    Param(String),
}
