//! Gaussian continuous-variable toolkit for steering-limited secure
//! teleportation of coherent-state alphabets.
//!
//! * [`gaussian`]: one- and two-mode covariance matrices, symplectic
//!   spectra, separability and Gaussian steerability.
//! * [`channels`]: phase-insensitive channels `(tau, y)` and their regions.
//! * [`teleport`]: the Braunstein–Kimble moment map, the channel it
//!   induces, and minimal-energy resources at fixed steerability.
//! * [`fidelity`]: average fidelities, the no-cloning benchmark and the
//!   steering-limited optima, with brute-force scan oracles.
//! * [`montecarlo`]: seedable stochastic estimates of the same quantities.
//! * [`sampling`]: random physical states for property checks.

pub mod channels;
pub mod error;
pub mod fidelity;
pub mod gaussian;
pub mod montecarlo;
pub mod sampling;
pub mod teleport;

pub use channels::{classify, ChannelClass, ChannelTag, PhaseInsensitiveChannel};
pub use error::{Error, Result};
pub use fidelity::{
    avg_fidelity, f_opt, no_cloning_threshold, s_ab_min, security_report, tau_opt, Alphabet,
    FidelityReport,
};
pub use gaussian::{
    squeezed_thermal, tmsv, SingleModeGaussian, SteeringDirection, SymplecticSpectrum, TwoModeCM,
};
pub use montecarlo::{McEstimate, RngStream};
pub use teleport::{
    accessible, bk_output, cross_steerability, induced_channel, optimal_resource_fixed_sab,
    optimal_resource_fixed_sba, ResourceSpec, SteeringBudget,
};
