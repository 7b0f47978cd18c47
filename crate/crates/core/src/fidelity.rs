//! Average teleportation fidelity of a Gaussian-distributed coherent-state
//! alphabet, the Gaussian no-cloning benchmark, and the steering-limited
//! optima.
//!
//! Every closed form here has a brute-force counterpart in [`scan`], which
//! only evaluates [`avg_fidelity`] along the accessible-region boundary.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::channels::PhaseInsensitiveChannel;
use crate::error::{Error, Result};
use crate::gaussian::{SteeringDirection, TOL};
use crate::teleport::{accessible, SteeringBudget};

/// Security verdicts require the fidelity to exceed the benchmark by more
/// than this margin; equality within rounding is not secure.
pub const SECURITY_TOL: f64 = 1e-9;

/// Gaussian prior `p(alpha) = (lambda / pi) exp(-lambda |alpha|²)` over
/// coherent amplitudes. `lambda = 0` is the uniform limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Alphabet {
    lambda: f64,
}

impl Alphabet {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_nan() || lambda < 0.0 || lambda.is_infinite() {
            return Err(Error::NegativeLambda(lambda));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn density(&self, alpha_abs_sq: f64) -> f64 {
        self.lambda / std::f64::consts::PI * (-self.lambda * alpha_abs_sq).exp()
    }

    pub fn threshold(&self) -> f64 {
        threshold_unchecked(self.lambda)
    }
}

fn check_lambda_positive(lambda: f64) -> Result<()> {
    if lambda == 0.0 {
        Err(Error::UniformLimit)
    } else if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveLambda(lambda))
    }
}

fn check_lambda_nonneg(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeLambda(lambda))
    }
}

fn check_budget(s: f64) -> Result<()> {
    if s.is_nan() || s < 0.0 {
        Err(Error::InvalidBudget(s))
    } else {
        Ok(())
    }
}

/// `2 lambda / (2 (1 - sqrt(tau))² + lambda (1 + y + tau))`.
pub fn avg_fidelity(tau: f64, y: f64, lambda: f64) -> Result<f64> {
    PhaseInsensitiveChannel::physical(tau, y)?;
    check_lambda_positive(lambda)?;
    Ok(avg_fidelity_unchecked(tau, y, lambda))
}

pub(crate) fn avg_fidelity_unchecked(tau: f64, y: f64, lambda: f64) -> f64 {
    let loss = 1.0 - tau.sqrt();
    2.0 * lambda / (2.0 * loss * loss + lambda * (1.0 + y + tau))
}

/// Gaussian-cloner benchmark for the alphabet; 2/3 at `lambda = 0`.
pub fn no_cloning_threshold(lambda: f64) -> Result<f64> {
    check_lambda_nonneg(lambda)?;
    Ok(threshold_unchecked(lambda))
}

fn threshold_unchecked(lambda: f64) -> f64 {
    if lambda <= SQRT_2 - 1.0 {
        2.0 * (1.0 + lambda) / (3.0 + lambda)
    } else {
        2.0 * lambda / (3.0 - 2.0 * SQRT_2 + 2.0 * lambda)
    }
}

/// `(1 + lambda)^-2`: where the benchmark contour touches `y = tau`.
pub fn tangency_point(lambda: f64) -> f64 {
    (1.0 + lambda).powi(-2)
}

/// Noise on the accessible-region boundary at transmissivity `tau`.
pub fn boundary_noise(tau: f64, budget: f64, direction: SteeringDirection) -> f64 {
    match direction {
        SteeringDirection::BToA => (-budget).exp() * tau,
        SteeringDirection::AToB => (-budget).exp(),
    }
}

/// Optimal transmissivity at a fixed steering budget. A zero budget is
/// accepted (B→A gives the tangency point).
pub fn tau_opt(lambda: f64, budget: f64, direction: SteeringDirection) -> Result<f64> {
    check_lambda_positive(lambda)?;
    check_budget(budget)?;
    Ok(tau_opt_unchecked(lambda, budget, direction))
}

fn tau_opt_unchecked(lambda: f64, s: f64, direction: SteeringDirection) -> f64 {
    if s.is_infinite() {
        return 1.0;
    }
    match direction {
        SteeringDirection::BToA => {
            let es = s.exp();
            let tangent = 4.0 * es * es / (lambda + es * (2.0 + lambda)).powi(2);
            tangent.max(1.0 / (1.0 + (-s).exp()))
        }
        SteeringDirection::AToB => {
            let tangent = 4.0 / (2.0 + lambda).powi(2);
            tangent.max(1.0 - (-s).exp())
        }
    }
}

/// Smallest `lambda` at which the optimum for `budget` moves onto the
/// clamp branch. Infinite when the clamp never activates (A→B at zero
/// budget, or any infinite budget).
pub fn clamp_onset(budget: f64, direction: SteeringDirection) -> Result<f64> {
    check_budget(budget)?;
    if budget.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let es = budget.exp();
    Ok(match direction {
        SteeringDirection::BToA => 2.0 * ((es * (es + 1.0)).sqrt() - es) / (es + 1.0),
        SteeringDirection::AToB if es > 1.0 => 2.0 * ((es / (es - 1.0)).sqrt() - 1.0),
        SteeringDirection::AToB => f64::INFINITY,
    })
}

/// Whether the optimum sits at the quantum-limited endpoint (clamp branch)
/// rather than at the tangency of the fidelity contour.
pub fn clamp_active(lambda: f64, budget: f64, direction: SteeringDirection) -> Result<bool> {
    check_lambda_positive(lambda)?;
    Ok(lambda > clamp_onset(budget, direction)?)
}

/// Optimal average fidelity at a fixed steering budget, using the explicit
/// branch conditions.
pub fn f_opt(lambda: f64, budget: f64, direction: SteeringDirection) -> Result<f64> {
    check_lambda_positive(lambda)?;
    check_budget(budget)?;
    if budget.is_infinite() {
        return Ok(1.0);
    }
    let es = budget.exp();
    let clamped = clamp_active(lambda, budget, direction)?;
    Ok(match (direction, clamped) {
        (SteeringDirection::BToA, false) => {
            2.0 * (lambda + es * (2.0 + lambda)) / (2.0 + lambda + es * (4.0 + lambda))
        }
        (SteeringDirection::BToA, true) => {
            lambda * (es + 1.0)
                / (1.0 + lambda + es * (2.0 + lambda - 2.0 * ((-budget).exp() + 1.0).sqrt()))
        }
        (SteeringDirection::AToB, false) => {
            2.0 * es * (2.0 + lambda) / (2.0 + lambda + es * (4.0 + lambda))
        }
        (SteeringDirection::AToB, true) => {
            let gap = (1.0 - (-budget).exp()).sqrt() - 1.0;
            lambda / (lambda + gap * gap)
        }
    })
}

/// Smallest A→B steerability that allows beating the benchmark.
pub fn s_ab_min(lambda: f64) -> Result<f64> {
    check_lambda_nonneg(lambda)?;
    let first = SQRT_2 - 1.0;
    Ok(if lambda <= first {
        (0.5 * (1.0 + lambda) * (2.0 + lambda)).ln()
    } else if lambda <= 2.0 * first {
        -(lambda / (lambda + 2.0) + (3.0 - 2.0 * SQRT_2) / lambda).ln()
    } else {
        2f64.ln()
    })
}

pub fn is_secure(f_avg: f64, threshold: f64) -> bool {
    f_avg > threshold + SECURITY_TOL
}

/// Bundled security verdict for one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityReport {
    pub f_avg: f64,
    pub threshold: f64,
    pub secure: bool,
    pub accessible: bool,
    pub tau: f64,
    pub y: f64,
    pub lambda: f64,
    pub budget: SteeringBudget,
    pub mc: Option<McSummary>,
}

/// Monte Carlo cross-check attached to a [`FidelityReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McSummary {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Whether the estimate lies within the caller's agreement band.
    pub agrees: bool,
}

pub fn security_report(
    tau: f64,
    y: f64,
    lambda: f64,
    budget: SteeringBudget,
) -> Result<FidelityReport> {
    let f_avg = avg_fidelity(tau, y, lambda)?;
    let threshold = no_cloning_threshold(lambda)?;
    Ok(FidelityReport {
        f_avg,
        threshold,
        secure: is_secure(f_avg, threshold),
        accessible: accessible(tau, y, &budget)?,
        tau,
        y,
        lambda,
        budget,
        mc: None,
    })
}

/// Brute-force optimisation along the accessible-region boundary.
pub mod scan {
    use super::*;
    use crate::teleport::finite_energy_interval;

    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct ScanOptimum {
        pub tau: f64,
        pub f: f64,
        /// Grid spacing of the scan.
        pub step: f64,
    }

    /// Maximises `avg_fidelity(tau, boundary_noise(tau))` over the closed
    /// physical segment of the boundary line using `points` equally spaced
    /// samples. The B→A segment is capped at `tau <= 4`.
    pub fn boundary_optimum(
        lambda: f64,
        budget: f64,
        direction: SteeringDirection,
        points: usize,
    ) -> Result<ScanOptimum> {
        check_lambda_positive(lambda)?;
        check_budget(budget)?;
        let (lo, hi) = finite_energy_interval(budget, direction);
        let hi = hi.min(4.0);
        let step = (hi - lo) / (points - 1) as f64;
        let mut best = ScanOptimum {
            tau: lo,
            f: f64::NEG_INFINITY,
            step,
        };
        for i in 0..points {
            let tau = lo + i as f64 * step;
            let y = boundary_noise(tau, budget, direction);
            if y < (1.0 - tau).abs() - TOL {
                continue;
            }
            let f = avg_fidelity_unchecked(tau, y, lambda);
            if f > best.f {
                best.tau = tau;
                best.f = f;
            }
        }
        Ok(best)
    }

    /// Maximises `avg_fidelity(tau, tau)` for `tau` on a grid over
    /// `[lo, hi]`; the benchmark contour touches this line.
    pub fn diagonal_optimum(lambda: f64, lo: f64, hi: f64, step: f64) -> Result<ScanOptimum> {
        check_lambda_positive(lambda)?;
        let n = ((hi - lo) / step).round() as usize + 1;
        let mut best = ScanOptimum {
            tau: lo,
            f: f64::NEG_INFINITY,
            step,
        };
        for i in 0..n {
            let tau = lo + i as f64 * step;
            if tau < 0.5 - TOL {
                continue; // y = tau is unphysical there
            }
            let f = avg_fidelity_unchecked(tau, tau, lambda);
            if f > best.f {
                best.tau = tau;
                best.f = f;
            }
        }
        Ok(best)
    }
}
