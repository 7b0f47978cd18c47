//! Covariance-matrix algebra for one- and two-mode Gaussian states.
//!
//! Conventions: quadratures are ordered `(q_A, p_A, q_B, p_B)` and the vacuum
//! covariance matrix is the identity. A coherent state `|alpha>` therefore has
//! displacement `sqrt(2) * (Re alpha, Im alpha)`.
//!
//! The Hermitian matrix inequalities that define physicality, separability
//! and unsteerability are evaluated through real equivalents: the symplectic
//! spectrum, the spectrum of the partial transpose, and the Schur complement
//! of the steering party's block.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, Matrix2, Matrix4, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance applied to the decisive scalar of every boundary
/// predicate. Boundary cases resolve to the non-strict side.
pub const TOL: f64 = 1e-9;

/// Direction of EPR steering. `BToA` means Bob steers Alice's mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SteeringDirection {
    #[serde(rename = "ba")]
    BToA,
    #[serde(rename = "ab")]
    AToB,
}

impl SteeringDirection {
    pub fn opposite(self) -> Self {
        match self {
            Self::BToA => Self::AToB,
            Self::AToB => Self::BToA,
        }
    }
}

impl fmt::Display for SteeringDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::BToA => "ba",
            Self::AToB => "ab",
        })
    }
}

impl FromStr for SteeringDirection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ba" | "b->a" | "b2a" => Ok(Self::BToA),
            "ab" | "a->b" | "a2b" => Ok(Self::AToB),
            other => Err(format!(
                "unknown steering direction `{other}` (expected `ba` or `ab`)"
            )),
        }
    }
}

fn max_asymmetry2(m: &Matrix2<f64>) -> f64 {
    (m[(0, 1)] - m[(1, 0)]).abs()
}

fn max_asymmetry4(m: &Matrix4<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in (i + 1)..4 {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Relative rounding allowance for invariants computed from large entries.
const ROUNDING: f64 = 64.0 * f64::EPSILON;

/// `diag(1, -1)`.
pub(crate) fn z_matrix() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

/// Single-mode rotation by `phi`, a passive symplectic map.
pub fn rotation(phi: f64) -> Matrix2<f64> {
    let (s, c) = phi.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Single-mode squeezer `diag(e^{-r}, e^{r})`.
pub fn squeezer(r: f64) -> Matrix2<f64> {
    Matrix2::new((-r).exp(), 0.0, 0.0, r.exp())
}

/// One-mode Gaussian state: displacement and covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeGaussian {
    pub d: Vector2<f64>,
    pub v: Matrix2<f64>,
}

impl SingleModeGaussian {
    pub fn new(d: Vector2<f64>, v: Matrix2<f64>) -> Result<Self> {
        let asymmetry = max_asymmetry2(&v);
        if asymmetry > TOL {
            return Err(Error::NonSymmetric { asymmetry });
        }
        Ok(Self { d, v })
    }

    pub fn vacuum() -> Self {
        Self {
            d: Vector2::zeros(),
            v: Matrix2::identity(),
        }
    }

    /// Coherent state `|alpha>`: `d = sqrt(2) (Re alpha, Im alpha)`, `V = 1`.
    pub fn coherent(alpha: Complex<f64>) -> Self {
        Self {
            d: displacement_of(alpha),
            v: Matrix2::identity(),
        }
    }

    /// Thermal state with mean photon number `nbar`.
    pub fn thermal(nbar: f64) -> Self {
        Self {
            d: Vector2::zeros(),
            v: Matrix2::identity() * (2.0 * nbar + 1.0),
        }
    }

    pub fn is_physical(&self) -> bool {
        self.v.determinant() >= 1.0 - TOL && self.v.trace() > 0.0
    }

    pub(crate) fn ensure_physical(&self) -> Result<()> {
        if self.is_physical() {
            Ok(())
        } else {
            Err(Error::UnphysicalState {
                det: self.v.determinant(),
            })
        }
    }

    /// Mean photon number of the centred state, `(tr V - 2) / 4`.
    pub fn mean_photon_number(&self) -> Result<f64> {
        self.ensure_physical()?;
        Ok(photon_number_from_trace(self.v.trace(), 1))
    }
}

/// Displacement vector of the coherent state `|alpha>`.
pub fn displacement_of(alpha: Complex<f64>) -> Vector2<f64> {
    Vector2::new(alpha.re, alpha.im) * std::f64::consts::SQRT_2
}

fn photon_number_from_trace(trace: f64, n_modes: usize) -> f64 {
    let n = n_modes as f64;
    ((trace - 2.0 * n) / (4.0 * n)).max(0.0)
}

/// Symplectic invariants of a two-mode covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymplecticSpectrum {
    pub nu_plus: f64,
    pub nu_minus: f64,
    /// `det A + det B + 2 det C`.
    pub delta: f64,
    pub det_v: f64,
}

impl SymplecticSpectrum {
    /// Roots of `x² - Delta x + det V`, the characteristic polynomial of
    /// `nu²`. Used for matrices that are not positive definite, where the
    /// roots may be complex.
    fn from_invariants(delta: f64, det_v: f64, disc_tol: f64) -> Result<Self> {
        let disc = delta * delta - 4.0 * det_v;
        if disc < -disc_tol {
            return Err(Error::ComplexSpectrum { discriminant: disc });
        }
        let big = 0.5 * (delta + disc.max(0.0).sqrt());
        let small = if big != 0.0 { det_v / big } else { 0.0 };
        Ok(Self {
            nu_plus: big.max(0.0).sqrt(),
            nu_minus: small.clamp(0.0, big.max(0.0)).sqrt(),
            delta,
            det_v,
        })
    }
}

/// `omega ⊕ omega` with `omega = [[0, 1], [-1, 0]]`.
fn symplectic_form() -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for k in [0, 2] {
        m[(k, k + 1)] = 1.0;
        m[(k + 1, k)] = -1.0;
    }
    m
}

/// Squared symplectic eigenvalues `(nu-², nu+²)` of a positive
/// semidefinite matrix, or `None` if it has an eigenvalue below `-eig_tol`.
///
/// With `K = V^{1/2} Ω V^{1/2}` antisymmetric, `Kᵀ K` is symmetric with
/// eigenvalues `nu-², nu-², nu+², nu+²`. Unlike the roots of the
/// characteristic polynomial, these stay accurate to rounding when
/// `nu+ = nu-`, as for every pure state.
fn williamson_squares(m: &Matrix4<f64>, eig_tol: f64) -> Option<(f64, f64)> {
    let eig = m.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l < -eig_tol) {
        return None;
    }
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let half = eig.eigenvectors * Matrix4::from_diagonal(&roots) * eig.eigenvectors.transpose();
    let k = half * symplectic_form() * half;
    let mut sq: Vec<f64> = (k.transpose() * k)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    sq.sort_by(f64::total_cmp);
    Some((0.5 * (sq[0] + sq[1]), 0.5 * (sq[2] + sq[3])))
}

/// Two-mode covariance matrix in block form `[[A, C], [C^T, B]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCM {
    a: Matrix2<f64>,
    b: Matrix2<f64>,
    c: Matrix2<f64>,
}

impl TwoModeCM {
    pub fn from_blocks(a: Matrix2<f64>, b: Matrix2<f64>, c: Matrix2<f64>) -> Result<Self> {
        let asymmetry = max_asymmetry2(&a).max(max_asymmetry2(&b));
        if asymmetry > TOL {
            return Err(Error::NonSymmetric { asymmetry });
        }
        Ok(Self::from_blocks_unchecked(a, b, c))
    }

    /// Splits a 4x4 matrix into blocks. The stored blocks are symmetrised.
    pub fn from_matrix(m: &Matrix4<f64>) -> Result<Self> {
        let asymmetry = max_asymmetry4(m);
        if asymmetry > TOL {
            return Err(Error::NonSymmetric { asymmetry });
        }
        let sym = (m + m.transpose()) * 0.5;
        Ok(Self::from_blocks_unchecked(
            sym.fixed_view::<2, 2>(0, 0).into_owned(),
            sym.fixed_view::<2, 2>(2, 2).into_owned(),
            sym.fixed_view::<2, 2>(0, 2).into_owned(),
        ))
    }

    fn from_blocks_unchecked(a: Matrix2<f64>, b: Matrix2<f64>, c: Matrix2<f64>) -> Self {
        let sym = |m: Matrix2<f64>| (m + m.transpose()) * 0.5;
        Self {
            a: sym(a),
            b: sym(b),
            c,
        }
    }

    /// Standard form with `A = a 1`, `B = b 1`, `C = diag(-c, c)`, without a
    /// physicality check.
    pub fn standard_form(a: f64, b: f64, c: f64) -> Self {
        Self {
            a: Matrix2::identity() * a,
            b: Matrix2::identity() * b,
            c: Matrix2::new(-c, 0.0, 0.0, c),
        }
    }

    pub fn identity() -> Self {
        Self::standard_form(1.0, 1.0, 0.0)
    }

    pub fn a(&self) -> &Matrix2<f64> {
        &self.a
    }

    pub fn b(&self) -> &Matrix2<f64> {
        &self.b
    }

    pub fn c(&self) -> &Matrix2<f64> {
        &self.c
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.a);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.b);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.c);
        m.fixed_view_mut::<2, 2>(2, 0)
            .copy_from(&self.c.transpose());
        m
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            a: self.a * factor,
            b: self.b * factor,
            c: self.c * factor,
        }
    }

    /// Applies local maps `S_A ⊕ S_B` by congruence.
    pub fn apply_local(&self, sa: &Matrix2<f64>, sb: &Matrix2<f64>) -> Self {
        Self::from_blocks_unchecked(
            sa * self.a * sa.transpose(),
            sb * self.b * sb.transpose(),
            sa * self.c * sb.transpose(),
        )
    }

    pub fn det(&self) -> f64 {
        self.matrix().determinant()
    }

    pub fn symplectic_spectrum(&self) -> Result<SymplecticSpectrum> {
        let delta = self.a.determinant() + self.b.determinant() + 2.0 * self.c.determinant();
        let det_v = self.det();
        match williamson_squares(&self.matrix(), self.eigen_tol()) {
            Some((lo, hi)) => Ok(SymplecticSpectrum {
                nu_plus: hi.sqrt(),
                nu_minus: lo.sqrt(),
                delta,
                det_v,
            }),
            None => SymplecticSpectrum::from_invariants(
                delta,
                det_v,
                TOL.max(ROUNDING * self.scale().powi(4)),
            ),
        }
    }

    /// Largest absolute entry.
    fn scale(&self) -> f64 {
        self.a.amax().max(self.b.amax()).max(self.c.amax())
    }

    /// Tolerance on quadratic invariants (`nu²`, Schur determinants). Equal
    /// to [`TOL`] unless entries are so large that rounding dominates, as for
    /// near-EPR states.
    fn quadratic_tol(&self) -> f64 {
        TOL.max(ROUNDING * self.scale().powi(2))
    }

    /// Covariance matrix of the partially transposed state (`p_B -> -p_B`).
    pub fn partial_transpose(&self) -> Self {
        let z = z_matrix();
        Self {
            a: self.a,
            b: z * self.b * z,
            c: self.c * z,
        }
    }

    /// Tolerance on eigenvalues of `V`, which carry rounding of order
    /// `eps * scale`.
    fn eigen_tol(&self) -> f64 {
        TOL.max(ROUNDING * self.scale())
    }

    /// Bona fide condition: `V >= 0` and `nu_minus >= 1` up to [`TOL`].
    pub fn is_physical(&self) -> bool {
        self.smallest_nu_at_least_one(&self.matrix())
    }

    /// `nu_minus(m) >= 1 - TOL` for `m` either `V` or its partial transpose
    /// (both have the entries, hence the rounding, of `V`). The test is on
    /// `nu²` since that is what the eigensolver returns.
    fn smallest_nu_at_least_one(&self, m: &Matrix4<f64>) -> bool {
        match williamson_squares(m, self.eigen_tol()) {
            Some((lo, _)) => lo >= 1.0 - (2.0 * TOL).max(self.quadratic_tol()),
            None => false,
        }
    }

    pub(crate) fn ensure_physical(&self) -> Result<()> {
        if self.is_physical() {
            return Ok(());
        }
        let nu_minus = self
            .symplectic_spectrum()
            .map(|s| s.nu_minus)
            .unwrap_or(f64::NAN);
        Err(Error::Unphysical { nu_minus })
    }

    /// Mean photon number per mode, `(tr V - 4) / 8`.
    pub fn mean_photon_number(&self) -> Result<f64> {
        self.ensure_physical()?;
        Ok(photon_number_from_trace(self.matrix().trace(), 2))
    }

    /// PPT criterion; exact for two-mode Gaussian states.
    pub fn is_separable(&self) -> Result<bool> {
        self.ensure_physical()?;
        Ok(self.smallest_nu_at_least_one(&self.partial_transpose().matrix()))
    }

    /// Schur complement of the steering party's block: `A - C B^-1 C^T` for
    /// `BToA`, `B - C^T A^-1 C` for `AToB`.
    pub fn schur_complement(&self, direction: SteeringDirection) -> Result<Matrix2<f64>> {
        let (steered, steering, cross) = match direction {
            SteeringDirection::BToA => (self.a, self.b, self.c),
            SteeringDirection::AToB => (self.b, self.a, self.c.transpose()),
        };
        let det = steering.determinant();
        if det.abs() <= TOL {
            return Err(Error::DegenerateBlock { det });
        }
        let inv = steering
            .try_inverse()
            .ok_or(Error::DegenerateBlock { det })?;
        Ok(steered - cross * inv * cross.transpose())
    }

    pub fn is_unsteerable(&self, direction: SteeringDirection) -> Result<bool> {
        self.ensure_physical()?;
        let m = self.schur_complement(direction)?;
        Ok(m.determinant() >= 1.0 - self.quadratic_tol() && m.trace() > 0.0)
    }

    /// Gaussian steerability `max{0, ½ ln(det X / det V)}` with `X` the
    /// steering party's reduced covariance matrix (natural log).
    pub fn steerability(&self, direction: SteeringDirection) -> Result<f64> {
        self.ensure_physical()?;
        let det_v = self.det();
        if det_v <= TOL {
            return Err(Error::DegenerateState { det: det_v });
        }
        let det_steering = match direction {
            SteeringDirection::BToA => self.b.determinant(),
            SteeringDirection::AToB => self.a.determinant(),
        };
        // det V / det X is the determinant of the Schur complement.
        let ratio = det_v / det_steering;
        if ratio >= 1.0 - self.quadratic_tol() {
            return Ok(0.0);
        }
        Ok(0.5 * (det_steering / det_v).ln())
    }
}

/// Two-mode squeezed vacuum: `a = b = cosh 2r`, `c = sinh 2r`.
pub fn tmsv(r: f64) -> TwoModeCM {
    let (s, c) = ((2.0 * r).sinh(), (2.0 * r).cosh());
    TwoModeCM::standard_form(c, c, s)
}

/// Two-mode squeezed thermal state in standard form; rejects unphysical
/// parameter triples.
pub fn squeezed_thermal(a: f64, b: f64, c: f64) -> Result<TwoModeCM> {
    for (name, value) in [("a", a), ("b", b), ("c", c)] {
        if !value.is_finite() {
            return Err(Error::NegativeParameter { name, value });
        }
    }
    let v = TwoModeCM::standard_form(a, b, c);
    v.ensure_physical()?;
    Ok(v)
}
