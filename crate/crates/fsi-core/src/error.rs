use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FsiError {
    #[error("collision: min(1+eta) = {margin:.6e} is not above {threshold:.6e}")]
    Collision { margin: f64, threshold: f64 },

    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("linear solver failed in {context}: residual {residual:.3e} after {iterations} iterations")]
    Solver {
        context: String,
        residual: f64,
        iterations: usize,
    },

    #[error("ball constraint violated: {0}")]
    Ball(String),

    #[error("horizon floor {t_min:.4e} reached without contraction")]
    HorizonFloor { t_min: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for FsiError {
    fn from(e: std::io::Error) -> Self {
        FsiError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FsiError>;

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(FsiError::Dimension { what, expected, got })
    }
}
