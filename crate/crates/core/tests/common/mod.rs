//! Helpers shared by the integration tests: reference predicates computed
//! straight from the complex Hermitian matrix inequalities, and seeded state
//! generators.

#![allow(dead_code)]

use cvteleport::montecarlo::Sampler;
use cvteleport::sampling::{random_physical_state, StateDistribution};
use cvteleport::{RngStream, SteeringDirection, TwoModeCM};
use nalgebra::{Complex, Matrix2, Matrix4};

pub const REFERENCE_TOL: f64 = 1e-9;

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn omega() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

/// `diag(wa, wb) ⊗ omega` with each factor `±1` or `0`.
fn symplectic_form(wa: f64, wb: f64) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&(omega() * wa));
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&(omega() * wb));
    m
}

/// Smallest eigenvalue of the Hermitian matrix `V + i W`.
pub fn min_hermitian_eigenvalue(v: &Matrix4<f64>, w: &Matrix4<f64>) -> f64 {
    let h = v.map(|x| Complex::new(x, 0.0)) + w.map(|x| Complex::new(0.0, x));
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `V + i Ω ⪰ 0`.
pub fn reference_physical(v: &TwoModeCM) -> bool {
    min_hermitian_eigenvalue(&v.matrix(), &symplectic_form(1.0, 1.0)) >= -REFERENCE_TOL
}

/// `V + i (Ω ⊕ -Ω) ⪰ 0`, the uncertainty relation of the partial transpose.
pub fn reference_separable(v: &TwoModeCM) -> bool {
    min_hermitian_eigenvalue(&v.matrix(), &symplectic_form(1.0, -1.0)) >= -REFERENCE_TOL
}

/// `V + i (0 ⊕ Ω_B) ⪰ 0` for A→B, `V + i (Ω_A ⊕ 0) ⪰ 0` for B→A: the
/// steered party alone has to satisfy the uncertainty relation.
pub fn reference_unsteerable(v: &TwoModeCM, direction: SteeringDirection) -> bool {
    let w = match direction {
        SteeringDirection::AToB => symplectic_form(0.0, 1.0),
        SteeringDirection::BToA => symplectic_form(1.0, 0.0),
    };
    min_hermitian_eigenvalue(&v.matrix(), &w) >= -REFERENCE_TOL
}

pub fn sampler(seed: u64) -> Sampler {
    RngStream::new(seed).sampler()
}

pub fn random_states(seed: u64, n: usize) -> Vec<TwoModeCM> {
    let mut s = sampler(seed);
    (0..n).map(|_| random_physical_state(&mut s)).collect()
}

/// Random states drawn with stronger two-mode squeezing, so that strongly
/// steerable states are well represented.
pub fn random_entangled_states(seed: u64, n: usize) -> Vec<TwoModeCM> {
    let dist = StateDistribution {
        max_two_mode_squeezing: 3.0,
        max_local_squeezing: 0.8,
        max_thermal_nu: 2.0,
        pure_fraction: 0.5,
    };
    let mut s = sampler(seed);
    (0..n).map(|_| dist.sample(&mut s)).collect()
}
