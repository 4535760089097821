use thiserror::Error;

/// Errors shared across the solver, spectral, and bound modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian: ||H - H*|| = {deviation:e} exceeds tolerance")]
    NotHermitian { deviation: f64 },
    #[error("factorization failed to converge")]
    NoConvergence,
    #[error("matrix is numerically singular")]
    Singular,
    #[error("coefficient matrix is not stable: eigenvalue {0} has Re >= 0")]
    Unstable(num_complex::Complex<f64>),
    #[error("(A, B) is not controllable: Krylov matrix rank {rank} < {n}")]
    NotControllable { rank: usize, n: usize },
    #[error("Lyapunov solve failed: {0}")]
    SolveFailure(String),
    #[error("problem size {n} exceeds cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("contour level {level:e} outside grid value range [{min:e}, {max:e}]")]
    LevelOutOfRange { level: f64, min: f64, max: f64 },
    #[error("contour at level {level:e} exits the grid box; enlarge the bounding box")]
    OpenContour { level: f64 },
    #[error("shift {0} is not in the open right half-plane")]
    NotInRightHalfPlane(num_complex::Complex<f64>),
    #[error("failed to generate a controllable random problem after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
