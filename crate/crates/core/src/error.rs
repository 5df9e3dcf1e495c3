use thiserror::Error;

/// Errors raised by the numerical kernels and the checks built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver or series did not converge: {0}")]
    ConvergenceFailure(&'static str),

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:.3e}, floor {floor:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64, floor: f64 },

    #[error("antilinear map is singular (smallest singular value ratio {ratio:.3e})")]
    SingularMap { ratio: f64 },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Fock cutoff {0} is below the minimum of 2")]
    CutoffTooSmall(usize),

    #[error("grid under-resolves the oscillator states (orthonormality error {orthonormality_error:.3e})")]
    GridUnderResolved { orthonormality_error: f64 },

    #[error("tensor-product dimension {dimension} exceeds budget {budget}")]
    DimensionBudgetExceeded { dimension: usize, budget: usize },

    #[error("duplicate mode (wavevector {wavevector:?}, helicity {helicity})")]
    DuplicateMode { wavevector: [f64; 3], helicity: i8 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("not a state: {0}")]
    NotAState(String),

    #[error("vector is not cyclic and separating (cyclic: {cyclic}, separating: {separating})")]
    NotCyclicSeparating { cyclic: bool, separating: bool },

    #[error("operator is not in the algebra (distance {distance:.3e})")]
    NotInAlgebra { distance: f64 },

    #[error("modular operator is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("state is singular on the algebra (min eigenvalue {min_eigenvalue:.3e})")]
    SingularState { min_eigenvalue: f64 },

    #[error("input must be positive: {0}")]
    NonpositiveInput(&'static str),

    #[error("signal has zero norm")]
    ZeroSignal,

    #[error("effects do not form a POVM: {0}")]
    NotAPovm(String),

    #[error("initial state is not supported in the projector interval (outside norm {outside_norm:.3e})")]
    SupportViolation { outside_norm: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
