//! Single-mode phase-insensitive Gaussian channels `X = sqrt(tau) 1`,
//! `Y = y 1`, and their classification in the `(tau, y)` plane.

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{SingleModeGaussian, TwoModeCM, TOL};

/// Phase-covariant channel with transmissivity (or gain) `tau` and added
/// noise `y`. Construction only rejects negative or non-finite values;
/// complete positivity is checked where it matters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseInsensitiveChannel {
    tau: f64,
    y: f64,
}

fn check_param(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::NegativeParameter { name, value })
    }
}

impl PhaseInsensitiveChannel {
    pub fn new(tau: f64, y: f64) -> Result<Self> {
        Ok(Self {
            tau: check_param("tau", tau)?,
            y: check_param("y", y)?,
        })
    }

    /// Like [`new`](Self::new) but also requires complete positivity.
    pub fn physical(tau: f64, y: f64) -> Result<Self> {
        let ch = Self::new(tau, y)?;
        ch.ensure_physical()?;
        Ok(ch)
    }

    pub fn identity() -> Self {
        Self { tau: 1.0, y: 0.0 }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn x_matrix(&self) -> Matrix2<f64> {
        Matrix2::identity() * self.tau.sqrt()
    }

    pub fn y_matrix(&self) -> Matrix2<f64> {
        Matrix2::identity() * self.y
    }

    /// Complete positivity: `y >= |1 - tau|`.
    pub fn is_physical(&self) -> bool {
        self.y >= (1.0 - self.tau).abs() - TOL
    }

    pub(crate) fn ensure_physical(&self) -> Result<()> {
        if self.is_physical() {
            Ok(())
        } else {
            Err(Error::UnphysicalChannel {
                tau: self.tau,
                y: self.y,
            })
        }
    }

    pub fn classify(&self) -> ChannelClass {
        ChannelClass::of(self.tau, self.y)
    }

    /// `d -> sqrt(tau) d`, `V -> tau V + y 1`.
    pub fn apply(&self, s: &SingleModeGaussian) -> Result<SingleModeGaussian> {
        self.ensure_physical()?;
        s.ensure_physical()?;
        Ok(SingleModeGaussian {
            d: s.d * self.tau.sqrt(),
            v: s.v * self.tau + self.y_matrix(),
        })
    }

    /// Acts on mode B of a two-mode state: `A -> A`, `C -> sqrt(tau) C`,
    /// `B -> tau B + y 1`.
    pub fn apply_one_sided(&self, v: &TwoModeCM) -> Result<TwoModeCM> {
        self.ensure_physical()?;
        v.ensure_physical()?;
        TwoModeCM::from_blocks(
            *v.a(),
            v.b() * self.tau + self.y_matrix(),
            v.c() * self.tau.sqrt(),
        )
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.ensure_physical()?;
        other.ensure_physical()?;
        Ok(Self {
            tau: self.tau * other.tau,
            y: self.tau * other.y + self.y,
        })
    }
}

/// Which CP-boundary channel a point represents, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelTag {
    Identity,
    AttenuatorLimited,
    AmplifierLimited,
    Interior,
    Unphysical,
}

/// Region membership of a `(tau, y)` point. Boundaries are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChannelClass {
    pub unphysical: bool,
    pub entanglement_breaking: bool,
    pub sb_b_to_a: bool,
    pub sb_a_to_b: bool,
    pub tag: ChannelTag,
}

impl ChannelClass {
    fn of(tau: f64, y: f64) -> Self {
        let cp_bound = (1.0 - tau).abs();
        if y < cp_bound - TOL {
            return Self {
                unphysical: true,
                entanglement_breaking: false,
                sb_b_to_a: false,
                sb_a_to_b: false,
                tag: ChannelTag::Unphysical,
            };
        }
        let tag = if (tau - 1.0).abs() <= TOL && y <= TOL {
            ChannelTag::Identity
        } else if y <= cp_bound + TOL && tau < 1.0 {
            ChannelTag::AttenuatorLimited
        } else if y <= cp_bound + TOL && tau > 1.0 {
            ChannelTag::AmplifierLimited
        } else {
            ChannelTag::Interior
        };
        Self {
            unphysical: false,
            entanglement_breaking: y >= 1.0 + tau - TOL,
            sb_b_to_a: y >= 0.5 * (1.0 + (2.0 * tau - 1.0).abs()) - TOL,
            sb_a_to_b: y >= cp_bound.max(1.0) - TOL,
            tag,
        }
    }
}

/// Classifies the point `(tau, y)` of the phase-covariant half plane.
pub fn classify(tau: f64, y: f64) -> Result<ChannelClass> {
    check_param("tau", tau)?;
    check_param("y", y)?;
    Ok(ChannelClass::of(tau, y))
}
