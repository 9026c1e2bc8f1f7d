use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not Hermitian: deviation {deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("not unitary: deviation {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("block pattern violation: {0}")]
    NotSpider(String),

    #[error("privacy-squeezed state is not Bell diagonal: {0}")]
    NotBellDiagonal(String),

    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}
