use thiserror::Error;

/// Errors raised by the toolkit. Every variant carries enough context to
/// explain which check failed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric (max asymmetry {asymmetry:.3e})")]
    NonSymmetric { asymmetry: f64 },
    #[error("symplectic spectrum is complex (discriminant {discriminant:.3e})")]
    ComplexSpectrum { discriminant: f64 },
    #[error("covariance matrix violates the uncertainty principle (nu_minus = {nu_minus:.6})")]
    Unphysical { nu_minus: f64 },
    #[error("single-mode state is unphysical (det V = {det:.6})")]
    UnphysicalState { det: f64 },
    #[error("steering party's block is singular (det = {det:.3e})")]
    DegenerateBlock { det: f64 },
    #[error("covariance determinant vanishes (det V = {det:.3e}); steerability is unbounded")]
    DegenerateState { det: f64 },
    #[error("parameter `{name}` must be a non-negative finite number, got {value}")]
    NegativeParameter { name: &'static str, value: f64 },
    #[error("channel (tau = {tau}, y = {y}) is not completely positive")]
    UnphysicalChannel { tau: f64, y: f64 },
    #[error("resource state is unphysical (nu_minus = {nu_minus:.6})")]
    UnphysicalResource { nu_minus: f64 },
    #[error("induced noise y = {y} is below |1 - tau| = {bound}")]
    NonPositiveNoise { y: f64, bound: f64 },
    #[error("resource energy diverges at tau = {tau} (finite only on the open interval ({lower}, {upper}))")]
    DivergentEnergy { tau: f64, lower: f64, upper: f64 },
    #[error("invalid steering budget {0}")]
    InvalidBudget(f64),
    #[error("average fidelity is undefined for the uniform alphabet (lambda = 0)")]
    UniformLimit,
    #[error("lambda must be non-negative, got {0}")]
    NegativeLambda(f64),
    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("gain must be finite and non-negative, got {0}")]
    InvalidGain(f64),
    #[error("at least {min} samples required, got {n}")]
    TooFewSamples { n: usize, min: usize },
    #[error("excess-noise covariance is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    InvalidUnravelling { min_eigenvalue: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
