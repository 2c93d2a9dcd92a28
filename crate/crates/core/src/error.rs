use thiserror::Error;

/// Errors raised by the numerical kernels and the physics layers built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is empty")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (relative residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("eigensolver did not converge")]
    ConvergenceFailure,

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("invalid probability distribution: {0}")]
    InvalidProbDist(String),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("tangent vector leaves the simplex (component sum {sum:e})")]
    OffSimplexTangent { sum: f64 },

    #[error("tangent has weight {value:e} on zero-probability component {index}")]
    DivergentDirection { index: usize, value: f64 },

    #[error("operator has weight {value:e} outside the support of the state at ({row}, {col})")]
    OutsideSupport { row: usize, col: usize, value: f64 },

    #[error("tangent operator is not traceless (trace {trace:e})")]
    NotTraceless { trace: f64 },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("outcome {outcome} has zero probability but varies with the parameter")]
    ZeroProbabilityOutcome { outcome: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("speed-limit rate violated at theta = {theta}: rate {rate} exceeds bound {bound}")]
    ViolationDetected { theta: f64, rate: f64, bound: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("level {index} is degenerate with the ground level")]
    DegenerateWithGround { index: usize },

    #[error("{requested} qubits requested, at most {max} supported")]
    TooManyQubits { requested: usize, max: usize },

    #[error("degenerate regime: satellite gap {eq} must exceed central gap {e0}")]
    DegenerateRegime { e0: f64, eq: f64 },

    #[error("statevector and stabilizer descriptions disagree: {0}")]
    CrossCheckMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
