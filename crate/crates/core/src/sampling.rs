//! Random two-mode Gaussian states for property checks.
//!
//! A physical covariance matrix is `S (ν₁ 1 ⊕ ν₂ 1) Sᵀ` with `ν ≥ 1` and `S`
//! symplectic. `S` is built from two-mode squeezing, a beam splitter, local
//! squeezers and local rotations, all with random parameters.

use nalgebra::{Matrix2, Matrix4};

use crate::gaussian::{rotation, squeezer, TwoModeCM};
use crate::montecarlo::Sampler;

fn uniform_in(s: &mut Sampler, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * s.uniform()
}

fn local(sa: Matrix2<f64>, sb: Matrix2<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&sa);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&sb);
    m
}

fn two_mode_squeezer(r: f64) -> Matrix4<f64> {
    let (ch, sh) = (r.cosh(), r.sinh());
    let z = Matrix2::new(sh, 0.0, 0.0, -sh);
    let mut m = local(Matrix2::identity() * ch, Matrix2::identity() * ch);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&z);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&z);
    m
}

fn beam_splitter(theta: f64) -> Matrix4<f64> {
    let (s, c) = theta.sin_cos();
    let mut m = local(Matrix2::identity() * c, Matrix2::identity() * c);
    m.fixed_view_mut::<2, 2>(0, 2)
        .copy_from(&(Matrix2::identity() * s));
    m.fixed_view_mut::<2, 2>(2, 0)
        .copy_from(&(Matrix2::identity() * -s));
    m
}

/// Bounds on the random parameters.
#[derive(Debug, Clone, Copy)]
pub struct StateDistribution {
    pub max_two_mode_squeezing: f64,
    pub max_local_squeezing: f64,
    pub max_thermal_nu: f64,
    /// Probability that each symplectic eigenvalue is exactly 1.
    pub pure_fraction: f64,
}

impl Default for StateDistribution {
    fn default() -> Self {
        Self {
            max_two_mode_squeezing: 1.5,
            max_local_squeezing: 0.8,
            max_thermal_nu: 3.0,
            pure_fraction: 0.3,
        }
    }
}

impl StateDistribution {
    pub fn sample(&self, s: &mut Sampler) -> TwoModeCM {
        let mut nu = [1.0; 2];
        for v in &mut nu {
            if s.uniform() > self.pure_fraction {
                *v = uniform_in(s, 1.0, self.max_thermal_nu);
            }
        }
        let d = Matrix4::from_diagonal(&nalgebra::Vector4::new(nu[0], nu[0], nu[1], nu[1]));
        let tau = std::f64::consts::TAU;
        let symplectic = local(
            rotation(uniform_in(s, 0.0, tau)),
            rotation(uniform_in(s, 0.0, tau)),
        ) * local(
            squeezer(uniform_in(
                s,
                -self.max_local_squeezing,
                self.max_local_squeezing,
            )),
            squeezer(uniform_in(
                s,
                -self.max_local_squeezing,
                self.max_local_squeezing,
            )),
        ) * beam_splitter(uniform_in(s, 0.0, tau))
            * two_mode_squeezer(uniform_in(s, 0.0, self.max_two_mode_squeezing))
            * local(
                rotation(uniform_in(s, 0.0, tau)),
                rotation(uniform_in(s, 0.0, tau)),
            );
        let m = symplectic * d * symplectic.transpose();
        TwoModeCM::from_matrix(&((m + m.transpose()) * 0.5)).expect("symmetrised")
    }
}

/// Random physical two-mode state from the default distribution.
pub fn random_physical_state(s: &mut Sampler) -> TwoModeCM {
    StateDistribution::default().sample(s)
}

/// Random physical standard-form parameters `(a, b, c)`. With
/// `C = diag(-c, c)` the state is physical iff `ab - c² - 1 >= |a - b|`, so
/// `c` is drawn uniformly below that bound.
pub fn random_standard_form(s: &mut Sampler) -> (f64, f64, f64) {
    let a = uniform_in(s, 1.0, 6.0);
    let b = uniform_in(s, 1.0, 6.0);
    let c_max = (a * b - 1.0 - (a - b).abs()).max(0.0).sqrt();
    (a, b, c_max * s.uniform())
}
