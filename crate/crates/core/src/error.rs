use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("input is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("ill-conditioned input: min eigenvalue {min_eigenvalue:.3e} below floor {floor:.3e}")]
    IllConditioned { min_eigenvalue: f64, floor: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid algebra shape: {0}")]
    InvalidShape(String),
    #[error("Hölder exponents do not match: 1/{a} + 1/{b} + 1/{c} != 1/{p}")]
    ExponentMismatch { a: f64, b: f64, c: f64, p: f64 },
    #[error("conjugation family is not normalized (defect {defect:.3e})")]
    NotNormalized { defect: f64 },
    #[error("degenerate pair: distance {distance:.3e} is below 1e-6")]
    DegeneratePair { distance: f64 },
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Whether the error signals a numerical breakdown rather than a bad argument.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::Singular | Error::IllConditioned { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
