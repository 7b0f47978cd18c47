//! Braunstein–Kimble teleportation as a moment map, the channel it induces,
//! the region of channels reachable with a bounded steering resource, and
//! the two minimal-energy resource families that saturate that region.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::channels::PhaseInsensitiveChannel;
use crate::error::{Error, Result};
use crate::gaussian::{z_matrix, SingleModeGaussian, SteeringDirection, TwoModeCM, TOL};

/// Relative margin kept from the quantum-limited endpoints of the
/// finite-energy interval.
pub const ENDPOINT_MARGIN: f64 = 1e-9;

/// Output of the BK protocol with gain `g`:
/// `d -> g d`, `V -> g² V + g² Z A Z + g (Z C + Cᵀ Z) + B`.
pub fn bk_output(
    resource: &TwoModeCM,
    gain: f64,
    input: &SingleModeGaussian,
) -> Result<SingleModeGaussian> {
    if !(gain.is_finite() && gain >= 0.0) {
        return Err(Error::InvalidGain(gain));
    }
    if !resource.is_physical() {
        let nu_minus = resource
            .symplectic_spectrum()
            .map(|s| s.nu_minus)
            .unwrap_or(f64::NAN);
        return Err(Error::UnphysicalResource { nu_minus });
    }
    input.ensure_physical()?;
    Ok(SingleModeGaussian {
        d: input.d * gain,
        v: input.v * gain * gain + resource_noise(resource, gain),
    })
}

/// Noise contributed by the resource: `g² Z A Z + g (Z C + Cᵀ Z) + B`.
pub fn resource_noise(resource: &TwoModeCM, gain: f64) -> Matrix2<f64> {
    let z = z_matrix();
    let a = resource.a();
    let c = resource.c();
    z * a * z * (gain * gain) + (z * c + c.transpose() * z) * gain + resource.b()
}

fn standard_form_resource(a: f64, b: f64, c: f64) -> Result<TwoModeCM> {
    let v = TwoModeCM::standard_form(a, b, c);
    if !v.is_physical() {
        let nu_minus = v
            .symplectic_spectrum()
            .map(|s| s.nu_minus)
            .unwrap_or(f64::NAN);
        return Err(Error::UnphysicalResource { nu_minus });
    }
    Ok(v)
}

/// Channel simulated by BK teleportation over a standard-form resource:
/// `tau = g²`, `y = g² a - 2 g c + b`.
pub fn induced_channel(a: f64, b: f64, c: f64, gain: f64) -> Result<PhaseInsensitiveChannel> {
    if !(gain.is_finite() && gain >= 0.0) {
        return Err(Error::InvalidGain(gain));
    }
    standard_form_resource(a, b, c)?;
    let tau = gain * gain;
    let y = tau * a - 2.0 * gain * c + b;
    let bound = (1.0 - tau).abs();
    if y < bound - TOL {
        return Err(Error::NonPositiveNoise { y, bound });
    }
    PhaseInsensitiveChannel::new(tau, y.max(0.0))
}

/// Steering available in the shared resource, per direction. Infinite
/// components impose no constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteeringBudget {
    pub s_ba: f64,
    pub s_ab: f64,
}

impl SteeringBudget {
    pub fn new(s_ba: f64, s_ab: f64) -> Result<Self> {
        for s in [s_ba, s_ab] {
            if s.is_nan() || s < 0.0 {
                return Err(Error::InvalidBudget(s));
            }
        }
        Ok(Self { s_ba, s_ab })
    }

    pub fn unlimited() -> Self {
        Self {
            s_ba: f64::INFINITY,
            s_ab: f64::INFINITY,
        }
    }

    pub fn get(&self, direction: SteeringDirection) -> f64 {
        match direction {
            SteeringDirection::BToA => self.s_ba,
            SteeringDirection::AToB => self.s_ab,
        }
    }
}

/// Whether `(tau, y)` can be simulated with the given budget:
/// `y >= e^{-s_ba} tau` and `y >= e^{-s_ab}`.
pub fn accessible(tau: f64, y: f64, budget: &SteeringBudget) -> Result<bool> {
    PhaseInsensitiveChannel::physical(tau, y)?;
    let ba_ok = budget.s_ba.is_infinite() || y >= (-budget.s_ba).exp() * tau - TOL;
    let ab_ok = budget.s_ab.is_infinite() || y >= (-budget.s_ab).exp() - TOL;
    Ok(ba_ok && ab_ok)
}

/// How a [`ResourceSpec`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResourceFamily {
    /// Saturates `y = e^{-s_ba} tau` at fixed B→A steerability.
    FixedSteeringBa,
    /// Saturates `y = e^{-s_ab}` at fixed A→B steerability.
    FixedSteeringAb,
    /// Any other standard-form state.
    Explicit,
}

/// Standard-form resource `(a, b, c)` together with the BK gain that uses it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub g: f64,
    pub direction: SteeringDirection,
    pub steering_budget: f64,
    pub energy: f64,
    pub family: ResourceFamily,
}

impl ResourceSpec {
    /// Wraps an arbitrary physical standard-form state; the budget is its
    /// steerability in `direction`.
    pub fn from_standard_form(
        a: f64,
        b: f64,
        c: f64,
        g: f64,
        direction: SteeringDirection,
    ) -> Result<Self> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::InvalidGain(g));
        }
        let v = standard_form_resource(a, b, c)?;
        Ok(Self {
            a,
            b,
            c,
            g,
            direction,
            steering_budget: v.steerability(direction)?,
            energy: v.mean_photon_number()?,
            family: ResourceFamily::Explicit,
        })
    }

    pub fn state(&self) -> TwoModeCM {
        TwoModeCM::standard_form(self.a, self.b, self.c)
    }

    pub fn tau(&self) -> f64 {
        self.g * self.g
    }

    pub fn channel(&self) -> Result<PhaseInsensitiveChannel> {
        induced_channel(self.a, self.b, self.c, self.g)
    }

    pub fn cross_steerability(&self) -> Result<f64> {
        cross_steerability(self)
    }
}

/// Open `tau` interval on which the family for `direction` has finite energy.
/// The upper end may be `+inf`.
pub fn finite_energy_interval(s: f64, direction: SteeringDirection) -> (f64, f64) {
    let e = (-s).exp();
    match direction {
        SteeringDirection::BToA => {
            let upper = if e >= 1.0 {
                f64::INFINITY
            } else {
                1.0 / (1.0 - e)
            };
            (1.0 / (1.0 + e), upper)
        }
        SteeringDirection::AToB => (1.0 - e, 1.0 + e),
    }
}

fn check_budget(s: f64) -> Result<()> {
    if s.is_finite() && s >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidBudget(s))
    }
}

fn check_interval(tau: f64, s: f64, direction: SteeringDirection) -> Result<()> {
    let (lower, upper) = finite_energy_interval(s, direction);
    let inside = tau.is_finite()
        && tau > lower * (1.0 + ENDPOINT_MARGIN)
        && (upper.is_infinite() || tau < upper * (1.0 - ENDPOINT_MARGIN));
    if inside {
        Ok(())
    } else {
        Err(Error::DivergentEnergy { tau, lower, upper })
    }
}

/// Physicality bound on `a` for the fixed-`s_ba` family; `a_plus` and
/// `a_minus` come from the two factors of the bona fide condition.
pub fn sba_family_min_a(tau: f64, s_ba: f64) -> Result<f64> {
    check_budget(s_ba)?;
    check_interval(tau, s_ba, SteeringDirection::BToA)?;
    let es = s_ba.exp();
    let em = (-s_ba).exp();
    let a_plus = (es + tau * (em + 1.0)) / (es * (tau - 1.0) + tau);
    let a_minus = (es + tau * (em - 1.0)) / (es * (1.0 - tau) + tau);
    Ok(a_plus.max(a_minus))
}

/// Physicality bound on `a` for the fixed-`s_ab` family.
pub fn sab_family_min_a(tau: f64, s_ab: f64) -> Result<f64> {
    check_budget(s_ab)?;
    check_interval(tau, s_ab, SteeringDirection::AToB)?;
    let es = s_ab.exp();
    let a_plus = 1.0 / (tau * (1.0 / (es + 1.0) - 1.0) + 1.0);
    let a_minus = 1.0 / (tau * (1.0 / (es - 1.0) + 1.0) - 1.0);
    Ok(a_plus.max(a_minus))
}

/// Error for a family member below its physicality bound, carrying the
/// offending symplectic eigenvalue when it is real.
fn below_family_bound(a: f64, b: f64, c: f64) -> Error {
    let nu_minus = TwoModeCM::standard_form(a, b, c)
        .symplectic_spectrum()
        .map_or(f64::NAN, |s| s.nu_minus);
    Error::UnphysicalResource { nu_minus }
}

/// Member of the fixed-`s_ba` family with a given `a`:
/// `b = (a - e^{-s}) tau`, `c = (a - e^{-s}) sqrt(tau)`, `g = sqrt(tau)`.
pub fn sba_family_member(tau: f64, s_ba: f64, a: f64) -> Result<ResourceSpec> {
    let a_min = sba_family_min_a(tau, s_ba)?;
    let k = a - (-s_ba).exp();
    let (b, c) = (k * tau, k * tau.sqrt());
    if a < a_min * (1.0 - TOL) {
        return Err(below_family_bound(a, b, c));
    }
    let energy = TwoModeCM::standard_form(a, b, c).mean_photon_number()?;
    Ok(ResourceSpec {
        a,
        b,
        c,
        g: tau.sqrt(),
        direction: SteeringDirection::BToA,
        steering_budget: s_ba,
        energy,
        family: ResourceFamily::FixedSteeringBa,
    })
}

/// Member of the fixed-`s_ab` family with a given `a`:
/// `b = a tau + e^{-s}`, `c = a sqrt(tau)`, `g = sqrt(tau)`.
pub fn sab_family_member(tau: f64, s_ab: f64, a: f64) -> Result<ResourceSpec> {
    let a_min = sab_family_min_a(tau, s_ab)?;
    let (b, c) = (a * tau + (-s_ab).exp(), a * tau.sqrt());
    if a < a_min * (1.0 - TOL) {
        return Err(below_family_bound(a, b, c));
    }
    let energy = TwoModeCM::standard_form(a, b, c).mean_photon_number()?;
    Ok(ResourceSpec {
        a,
        b,
        c,
        g: tau.sqrt(),
        direction: SteeringDirection::AToB,
        steering_budget: s_ab,
        energy,
        family: ResourceFamily::FixedSteeringAb,
    })
}

/// Minimal-energy resource simulating `(tau, e^{-s_ba} tau)` with B→A
/// steerability exactly `s_ba`.
pub fn optimal_resource_fixed_sba(tau: f64, s_ba: f64) -> Result<ResourceSpec> {
    sba_family_member(tau, s_ba, sba_family_min_a(tau, s_ba)?)
}

/// Minimal-energy resource simulating `(tau, e^{-s_ab})` with A→B
/// steerability exactly `s_ab`.
pub fn optimal_resource_fixed_sab(tau: f64, s_ab: f64) -> Result<ResourceSpec> {
    sab_family_member(tau, s_ab, sab_family_min_a(tau, s_ab)?)
}

pub fn optimal_resource(
    tau: f64,
    budget: f64,
    direction: SteeringDirection,
) -> Result<ResourceSpec> {
    match direction {
        SteeringDirection::BToA => optimal_resource_fixed_sba(tau, budget),
        SteeringDirection::AToB => optimal_resource_fixed_sab(tau, budget),
    }
}

/// A→B steerability of the fixed-`s_ba` family member with parameter `a`.
pub fn sba_family_cross_steerability(a: f64, tau: f64, s_ba: f64) -> f64 {
    -((-2.0 * s_ba).exp() * (a * s_ba.exp() - 1.0) * tau / a).ln()
}

/// B→A steerability of the fixed-`s_ab` family member with parameter `a`.
pub fn sab_family_cross_steerability(a: f64, tau: f64, s_ab: f64) -> f64 {
    -(a / (a * s_ab.exp() * tau + 1.0)).ln()
}

/// Steerability of the resource opposite to its budget direction. Family
/// members use the closed forms; explicit states use the measure.
pub fn cross_steerability(spec: &ResourceSpec) -> Result<f64> {
    let tau = spec.tau();
    let value = match spec.family {
        ResourceFamily::FixedSteeringBa => {
            sba_family_cross_steerability(spec.a, tau, spec.steering_budget)
        }
        ResourceFamily::FixedSteeringAb => {
            sab_family_cross_steerability(spec.a, tau, spec.steering_budget)
        }
        ResourceFamily::Explicit => {
            return spec.state().steerability(spec.direction.opposite());
        }
    };
    Ok(value.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::tmsv;
    use nalgebra::Complex;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn bk_with_uncorrelated_resource_adds_two_vacuum_units() {
        let s = SingleModeGaussian::coherent(Complex::new(0.7, -0.2));
        let out = bk_output(&TwoModeCM::identity(), 1.0, &s).unwrap();
        assert_eq!(out.d, s.d);
        assert_eq!(out.v, Matrix2::identity() * 3.0);
        for g in [-0.5, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                bk_output(&TwoModeCM::identity(), g, &s),
                Err(Error::InvalidGain(_))
            ));
            assert!(matches!(
                induced_channel(1.0, 1.0, 0.0, g),
                Err(Error::InvalidGain(_))
            ));
        }
    }

    #[test]
    fn zero_budget_families_are_unsteerable() {
        for tau in [0.6, 1.0, 1.7] {
            let spec = optimal_resource_fixed_sba(tau, 0.0).unwrap();
            let v = spec.state();
            assert!(v.is_physical());
            assert_eq!(v.steerability(SteeringDirection::BToA).unwrap(), 0.0);
            assert!(close(spec.channel().unwrap().y(), tau, 1e-12));
        }
        for tau in [0.3, 1.0, 1.9] {
            let spec = optimal_resource_fixed_sab(tau, 0.0).unwrap();
            let v = spec.state();
            assert!(v.is_physical());
            assert_eq!(v.steerability(SteeringDirection::AToB).unwrap(), 0.0);
            assert!(close(spec.channel().unwrap().y(), 1.0, 1e-12));
        }
        assert!(matches!(
            optimal_resource_fixed_sba(0.4, 0.0),
            Err(Error::DivergentEnergy { .. })
        ));
    }

    #[test]
    fn bk_with_tmsv() {
        let r: f64 = 0.5;
        let s = SingleModeGaussian::coherent(Complex::new(1.0, 1.0));
        let out = bk_output(&tmsv(r), 1.0, &s).unwrap();
        assert_eq!(out.d, s.d);
        let expected = 1.0 + 2.0 * (-2.0 * r).exp();
        assert!((out.v - Matrix2::identity() * expected).norm() < 1e-12);

        let ideal = bk_output(&tmsv(10.0), 1.0, &s).unwrap();
        assert!((ideal.v - Matrix2::identity()).norm() < 1e-8);
    }

    #[test]
    fn bk_rejects_unphysical_inputs() {
        let s = SingleModeGaussian::vacuum();
        assert!(matches!(
            bk_output(&TwoModeCM::identity().scaled(0.5), 1.0, &s),
            Err(Error::UnphysicalResource { .. })
        ));
        let bad = SingleModeGaussian {
            d: s.d,
            v: Matrix2::identity() * 0.1,
        };
        assert!(matches!(
            bk_output(&TwoModeCM::identity(), 1.0, &bad),
            Err(Error::UnphysicalState { .. })
        ));
    }

    #[test]
    fn induced_channel_examples() {
        let v = tmsv(0.5);
        let (a, c) = (v.a()[(0, 0)], v.c()[(1, 1)]);
        let ch = induced_channel(a, a, c, 1.0).unwrap();
        assert_eq!(ch.tau(), 1.0);
        assert!(close(ch.y(), 2.0 * (-1.0f64).exp(), 1e-12));
        assert!(close(ch.y(), 0.73576, 1e-5));

        let (e, ei) = (0.4f64.exp(), (-0.4f64).exp());
        let ch = induced_channel(e + ei + 1.0, e + 1.0, e + 1.0, 1.0).unwrap();
        assert!(close(ch.y(), ei, 1e-12));
        assert!(close(ch.y(), 0.67032, 1e-5));

        let ch = induced_channel(2.0, 1.7, 1.0, 0.0).unwrap();
        assert_eq!((ch.tau(), ch.y()), (0.0, 1.7));

        assert!(matches!(
            induced_channel(1.0, 1.0, 0.5, 1.0),
            Err(Error::UnphysicalResource { .. })
        ));
    }

    #[test]
    fn accessibility_examples() {
        let b = SteeringBudget::new(0.4, f64::INFINITY).unwrap();
        assert!(!accessible(1.0, 0.5, &b).unwrap());
        let b = SteeringBudget::new(0.4, 0.6).unwrap();
        assert!(accessible(1.0, 0.74, &b).unwrap());
        assert!(!accessible(1.0, 0.6, &b).unwrap());
        for (tau, y) in [(1.0, 0.0), (0.3, 0.7), (2.5, 1.5)] {
            assert!(accessible(tau, y, &SteeringBudget::unlimited()).unwrap());
        }
        assert!(matches!(
            accessible(0.5, 0.4, &b),
            Err(Error::UnphysicalChannel { .. })
        ));
        assert!(matches!(
            SteeringBudget::new(-0.1, 0.0),
            Err(Error::InvalidBudget(_))
        ));
    }

    #[test]
    fn fixed_sba_example() {
        let s: f64 = 0.4;
        let spec = optimal_resource_fixed_sba(1.0, s).unwrap();
        assert!(close(spec.a, s.exp() + (-s).exp() + 1.0, 1e-12));
        assert!(close(spec.a, 3.16214, 1e-5));
        assert!(close(spec.b, 2.49182, 1e-5));
        assert!(close(spec.c, 2.49182, 1e-5));
        let v = spec.state();
        assert!(close(v.symplectic_spectrum().unwrap().nu_minus, 1.0, 1e-6));
        assert!(close(
            v.steerability(SteeringDirection::BToA).unwrap(),
            s,
            1e-6
        ));
        let ch = spec.channel().unwrap();
        assert!(close(ch.y(), (-s).exp(), 1e-9));
        assert!(close(spec.cross_steerability().unwrap(), 0.63823, 1e-5));
        assert!(spec.energy.is_finite() && spec.energy > 0.0);
    }

    #[test]
    fn fixed_sba_endpoints_diverge() {
        let s: f64 = 0.4;
        let lower = 1.0 / (1.0 + (-s).exp());
        assert!(close(lower, 0.59869, 1e-5));
        assert!(matches!(
            optimal_resource_fixed_sba(lower, s),
            Err(Error::DivergentEnergy { .. })
        ));
        let upper = 1.0 / (1.0 - (-s).exp());
        assert!(matches!(
            optimal_resource_fixed_sba(upper, s),
            Err(Error::DivergentEnergy { .. })
        ));
        for bad in [-0.1, f64::INFINITY, f64::NAN] {
            assert!(matches!(
                optimal_resource_fixed_sba(1.0, bad),
                Err(Error::InvalidBudget(_))
            ));
        }
    }

    #[test]
    fn fixed_sab_example() {
        let s: f64 = 0.6;
        let spec = optimal_resource_fixed_sab(1.0, s).unwrap();
        assert!(close(spec.a, 2.82212, 1e-5));
        assert!(close(spec.b, 3.37093, 1e-5));
        assert!(close(spec.c, 2.82212, 1e-5));
        let v = spec.state();
        assert!(close(
            v.steerability(SteeringDirection::AToB).unwrap(),
            0.6,
            1e-6
        ));
        assert!(close(v.symplectic_spectrum().unwrap().nu_minus, 1.0, 1e-6));
        let ch = spec.channel().unwrap();
        assert!(close(ch.tau(), 1.0, 1e-12));
        assert!(close(ch.y(), 0.54881, 1e-5));
        assert!(close(ch.y(), (-s).exp(), 1e-9));
        let cross = spec.cross_steerability().unwrap();
        assert!(close(cross, 0.77770, 1e-5), "{cross}");
        assert!(close(
            cross,
            v.steerability(SteeringDirection::BToA).unwrap(),
            1e-6
        ));
    }

    #[test]
    fn fixed_sab_endpoints_diverge() {
        let s: f64 = 0.6;
        assert!(close(1.0 - (-s).exp(), 0.45119, 1e-5));
        for tau in [1.0 - (-s).exp(), 1.0 + (-s).exp(), 0.2, 3.0] {
            assert!(matches!(
                optimal_resource_fixed_sab(tau, s),
                Err(Error::DivergentEnergy { .. })
            ));
        }
    }

    #[test]
    fn cross_steerability_decreases_with_a() {
        let (tau, s) = (1.0, 0.4);
        let a_min = sba_family_min_a(tau, s).unwrap();
        let lean = sba_family_member(tau, s, a_min).unwrap();
        let rich = sba_family_member(tau, s, 10.0 * a_min).unwrap();
        let (x0, x1) = (
            lean.cross_steerability().unwrap(),
            rich.cross_steerability().unwrap(),
        );
        assert!(x1 < x0);
        assert!(close(
            x1,
            rich.state().steerability(SteeringDirection::AToB).unwrap(),
            1e-9
        ));
        // raising a keeps the channel and the budget direction fixed
        assert!(close(rich.channel().unwrap().y(), (-s).exp() * tau, 1e-9));
        assert!(close(
            rich.state().steerability(SteeringDirection::BToA).unwrap(),
            s,
            1e-9
        ));
        assert!(sba_family_member(tau, s, 0.9 * a_min).is_err());
    }

    #[test]
    fn min_a_matches_feasibility_scan() {
        // brute force: smallest a on a fine grid whose state is physical
        let cases = [
            (SteeringDirection::BToA, 0.7, 0.4),
            (SteeringDirection::BToA, 1.5, 0.4),
            (SteeringDirection::BToA, 1.0, 2.0),
            (SteeringDirection::AToB, 0.6, 0.6),
            (SteeringDirection::AToB, 1.3, 0.6),
            (SteeringDirection::AToB, 1.0, 0.1),
        ];
        for (dir, tau, s) in cases {
            let (closed, build): (f64, fn(f64, f64, f64) -> TwoModeCM) = match dir {
                SteeringDirection::BToA => (sba_family_min_a(tau, s).unwrap(), |t, s, a| {
                    let k = a - (-s).exp();
                    TwoModeCM::standard_form(a, k * t, k * t.sqrt())
                }),
                SteeringDirection::AToB => (sab_family_min_a(tau, s).unwrap(), |t, s, a| {
                    TwoModeCM::standard_form(a, a * t + (-s).exp(), a * t.sqrt())
                }),
            };
            let first_feasible = |start: f64, step: f64, count: usize| {
                (0..count)
                    .map(|i| start + i as f64 * step)
                    .find(|&a| build(tau, s, a).is_physical())
                    .expect("feasible a within scan range")
            };
            let coarse = first_feasible(1.0, 1e-2, 100_000);
            let step = 1e-6;
            let scanned = first_feasible(coarse - 1e-2, step, 20_000);
            assert!(
                (scanned - closed).abs() <= 2.0 * step,
                "{dir:?} tau={tau} s={s}: scan {scanned} closed {closed}"
            );
        }
    }
}
