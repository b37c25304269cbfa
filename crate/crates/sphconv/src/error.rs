//! Error types shared across the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by constructors, quadrature kernels and spectral fits.
#[derive(Debug, Clone, Error)]
pub enum SphError {
    #[error("matrix determinant {det} deviates from 1 beyond 1e-12")]
    InvalidDeterminant { det: f64 },

    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),

    #[error(
        "quadrature did not converge: doubling {nodes} nodes moved the value by {delta:.3e} (tol {tol:.1e})"
    )]
    NonConvergence { nodes: usize, delta: f64, tol: f64 },

    #[error(
        "spectral parameter {lambda} lies on the singular set of the series recursion (denominator {denom:.3e} at index {index})"
    )]
    SingularParameter {
        lambda: Complex64,
        index: usize,
        denom: f64,
    },

    #[error("c-function fit is ill-conditioned at lambda = {lambda} (condition {cond:.3e})")]
    IllConditionedFit { lambda: Complex64, cond: f64 },

    #[error(
        "truncation window too small: integrand magnitude {value:.3e} at the cutoff exceeds 1e-12"
    )]
    Truncated { value: f64 },

    #[error("atom at {location} is outside the admissible spectrum (real axis or i*[0,1])")]
    AtomOffSpectrum { location: Complex64 },

    #[error("invalid spectral measure: {0}")]
    InvalidMeasure(String),

    #[error("calibration file error: {0}")]
    Calibration(String),
}

pub type Result<T> = std::result::Result<T, SphError>;
