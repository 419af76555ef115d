use std::fmt;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),

    #[error("matrix is not Hermitian (||a - a*||_F = {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("invalid matrix data: {0}")]
    InvalidMatrix(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("element {index} is not unitary (residual {residual:.3e})")]
    NotUnitary { index: usize, residual: f64 },

    #[error("not a member of M_n (x) N^(x)K: off-block norm {residual:.3e} exceeds {tol:.1e}")]
    NotMember { residual: f64, tol: f64 },

    #[error("window exceeded: k = {k} is larger than the window K = {window}")]
    WindowExceeded { k: usize, window: usize },

    #[error("dimension cap exceeded: ambient dimension {dim} > cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("multiplier fails a necessary condition: {0}")]
    Screen(ScreenFailure),

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("singular Cayley denominator after {retries} step halvings")]
    SingularCayley { retries: usize },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Which necessary condition for a trace-form multiplier was violated.
#[derive(Debug, Clone, PartialEq)]
pub enum ScreenFailure {
    NonUnitDiagonal { index: usize, value: (f64, f64) },
    OutsideUnitDisk { row: usize, col: usize, modulus: f64 },
    NotHermitian { residual: f64 },
    NotPositive { min_eigenvalue: f64 },
}

impl fmt::Display for ScreenFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScreenFailure::NonUnitDiagonal { index, value } => {
                write!(f, "non-unit diagonal: m[{index}][{index}] = {} + {}i", value.0, value.1)
            }
            ScreenFailure::OutsideUnitDisk { row, col, modulus } => {
                write!(f, "entry outside the unit disk: |m[{row}][{col}]| = {modulus}")
            }
            ScreenFailure::NotHermitian { residual } => {
                write!(f, "not PSD: table is not Hermitian (residual {residual:.3e})")
            }
            ScreenFailure::NotPositive { min_eigenvalue } => {
                write!(f, "not PSD: minimum eigenvalue {min_eigenvalue:.3e}")
            }
        }
    }
}

impl ScreenFailure {
    /// Short machine-readable tag.
    pub fn tag(&self) -> &'static str {
        match self {
            ScreenFailure::NonUnitDiagonal { .. } => "non_unit_diagonal",
            ScreenFailure::OutsideUnitDisk { .. } => "outside_unit_disk",
            ScreenFailure::NotHermitian { .. } | ScreenFailure::NotPositive { .. } => "not_psd",
        }
    }
}
