use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("parameter {name} = {value} violates {bound}")]
    Domain {
        name: &'static str,
        value: f64,
        bound: &'static str,
    },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("index ({i}, {j}) outside 1..={max}")]
    IndexOutOfRange { i: usize, j: usize, max: usize },
    #[error("time {t} outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },
    #[error("zero pivot at row {index} of tridiagonal elimination")]
    ZeroPivot { index: usize },
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

impl GameError {
    /// True for errors caused by caller input rather than numerical breakdown.
    pub fn is_parameter_error(&self) -> bool {
        matches!(
            self,
            GameError::Domain { .. }
                | GameError::LengthMismatch { .. }
                | GameError::IndexOutOfRange { .. }
                | GameError::TimeOutOfRange { .. }
        )
    }
}
