use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Field point and source point coincide (or nearly so).
    #[error("degenerate distance {distance:e} m between field and source point")]
    DegenerateDistance { distance: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "could not place {groups} group centers with pairwise distance in [{min}, {max}] m after {attempts} attempts"
    )]
    InfeasibleGeometry {
        groups: usize,
        min: f64,
        max: f64,
        attempts: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("ill-conditioned {what}: condition number {condition:e} exceeds {limit:e}")]
    Conditioning {
        what: &'static str,
        condition: f64,
        limit: f64,
    },

    #[error("rate floors are infeasible: {0}")]
    Infeasible(String),

    #[error("warm start violates constraints: {0}")]
    InfeasibleWarmStart(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
