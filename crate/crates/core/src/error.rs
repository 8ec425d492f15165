use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical kernels.
///
/// Domain errors (`Domain`, `DimMismatch`, `NotHermitian`) indicate invalid
/// inputs; the remaining variants indicate a numerical failure at runtime.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("{0}")]
    Domain(String),

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    /// QR iteration ran out of its iteration budget. Carries the diagonal of
    /// the last iterate as the best available eigenvalue estimates.
    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        estimates: Vec<Complex64>,
    },

    #[error("non-finite amplitude encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("propagator lost unitarity (deviation {deviation:.3e})")]
    UnitarityLoss { deviation: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by invalid input rather than a failed computation.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::DimMismatch { .. } | Error::Domain(_) | Error::NotHermitian { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
