use thiserror::Error;

/// Errors raised by kernel construction, lattice summation and the analyses
/// built on top of them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("B-spline order must be in 1..={max}, got {order}")]
    InvalidOrder { order: i64, max: usize },

    #[error("invalid truncation policy: {0}")]
    InvalidPolicy(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite argument: {0}")]
    NonFinite(f64),

    #[error(
        "lattice sum for `{kernel}` did not reach {target:e} within radius {max_radius}; best bound {best_bound:e}"
    )]
    TruncationBudget {
        kernel: String,
        target: f64,
        max_radius: usize,
        best_bound: f64,
    },

    #[error("kernel `{kernel}` does not support {what}")]
    Unsupported { kernel: String, what: String },

    #[error("degenerate jump: left and right limits are both {0}")]
    DegenerateJump(f64),

    #[error(
        "kernel `{kernel}` fails the partition-of-unity precondition: defect {defect:e} exceeds {tolerance:e}"
    )]
    PartitionOfUnity {
        kernel: String,
        defect: f64,
        tolerance: f64,
    },

    #[error("kernel `{0}` is not even")]
    NotEven(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("symbol not invertible: minimum modulus {min_modulus:e} is below the floor {floor:e}")]
    SymbolNotInvertible { min_modulus: f64, floor: f64 },

    #[error(
        "interpolation defect {defect:e} exceeds tolerance {tolerance:e} at period {period}, radius {radius}; try a larger period or evaluation radius"
    )]
    Accuracy {
        defect: f64,
        tolerance: f64,
        period: usize,
        radius: usize,
    },
}

impl Error {
    /// Short machine-readable tag, used in CSV rows and exit-code mapping.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidOrder { .. } => "invalid-order",
            Error::InvalidPolicy(_) => "invalid-policy",
            Error::InvalidConfig(_) => "invalid-config",
            Error::NonFinite(_) => "non-finite",
            Error::TruncationBudget { .. } => "truncation-budget",
            Error::Unsupported { .. } => "unsupported",
            Error::DegenerateJump(_) => "degenerate-jump",
            Error::PartitionOfUnity { .. } => "partition-of-unity",
            Error::NotEven(_) => "not-even",
            Error::Domain(_) => "domain",
            Error::SymbolNotInvertible { .. } => "symbol-not-invertible",
            Error::Accuracy { .. } => "accuracy",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
