//! Seedable Monte Carlo checks of the closed-form fidelities.
//!
//! # Random streams
//!
//! [`RngStream`] names a ChaCha20 keystream: the key is expanded from a
//! 64-bit seed with `SeedableRng::seed_from_u64` and the 64-bit stream id
//! selects an independent substream. Substreams are derived
//! deterministically from the parent id and an index, so a run is fully
//! determined by `(seed, parameters)`.
//!
//! Uniforms are `u = ((x >> 11) + 1) * 2^-53` for each `u64` output `x`,
//! which lies in `(0, 1]`. Normal deviates come in pairs from the
//! Box–Muller transform `sqrt(-2 ln u1) * (cos 2πu2, sin 2πu2)`.
//!
//! # Sharding
//!
//! Estimators split `n` into fixed-size chunks; chunk `i` draws from
//! substream `i` and the per-chunk moments are merged in chunk order. The
//! result is therefore independent of how many worker threads run.

use nalgebra::{Complex, Matrix2, Vector2};
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::PhaseInsensitiveChannel;
use crate::error::{Error, Result};
use crate::gaussian::{displacement_of, SingleModeGaussian};
use crate::teleport::{bk_output, ResourceSpec};

/// Samples per shard.
pub const CHUNK: usize = 4096;
const MIN_CHANNEL_SAMPLES: usize = 100;
const MIN_BK_SAMPLES: usize = 1000;
/// Negative eigenvalues of the excess-noise covariance above this are
/// rounding and get clamped to zero.
const UNRAVEL_TOL: f64 = 1e-9;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Identifies a deterministic random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RngStream {
    seed: u64,
    stream: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substream(&self, index: u64) -> Self {
        Self {
            seed: self.seed,
            stream: splitmix64(self.stream ^ splitmix64(index.wrapping_add(1))),
        }
    }

    pub fn sampler(&self) -> Sampler {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        Sampler { rng, spare: None }
    }
}

/// Draws uniforms and normals from one stream.
pub struct Sampler {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl Sampler {
    /// Uniform on `(0, 1]`.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let (u1, u2) = (self.uniform(), self.uniform());
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Mean and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
    pub seed: u64,
}

impl McEstimate {
    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

/// Running first and second moments (Welford), mergeable across shards.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64) * (other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }

    pub fn estimate(&self, seed: u64) -> McEstimate {
        McEstimate {
            mean: self.mean,
            std_error: self.std_error(),
            n: self.n,
            seed,
        }
    }
}

fn chunk_sizes(n: usize) -> impl IndexedParallelIterator<Item = (u64, usize)> {
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(move |i| (i as u64, CHUNK.min(n - i * CHUNK)))
}

/// Draws `alpha` from `p(alpha) ∝ exp(-lambda |alpha|²)`: real and
/// imaginary parts are independent normals with variance `1 / (2 lambda)`.
pub fn sample_alpha(lambda: f64, sampler: &mut Sampler) -> Result<Complex<f64>> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let sigma = (0.5 / lambda).sqrt();
    let re = sigma * sampler.standard_normal();
    let im = sigma * sampler.standard_normal();
    Ok(Complex::new(re, im))
}

/// `<alpha| rho |alpha>` for a Gaussian `rho`:
/// `2 / sqrt(det(1 + V)) * exp(-δᵀ (1 + V)⁻¹ δ)`, `δ = d - sqrt(2)(Re α, Im α)`.
pub fn coherent_fidelity(alpha: Complex<f64>, out: &SingleModeGaussian) -> Result<f64> {
    out.ensure_physical()?;
    let sum = Matrix2::identity() + out.v;
    let det = sum.determinant();
    let inv = sum.try_inverse().ok_or(Error::UnphysicalState {
        det: out.v.determinant(),
    })?;
    let delta = out.d - displacement_of(alpha);
    Ok(2.0 / det.sqrt() * (-(delta.transpose() * inv * delta)[(0, 0)]).exp())
}

/// Monte Carlo estimate of the alphabet-averaged fidelity of `(tau, y)`.
pub fn mc_channel_fidelity(
    tau: f64,
    y: f64,
    lambda: f64,
    n: usize,
    rng: &RngStream,
) -> Result<McEstimate> {
    let channel = PhaseInsensitiveChannel::physical(tau, y)?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    if n < MIN_CHANNEL_SAMPLES {
        return Err(Error::TooFewSamples {
            n,
            min: MIN_CHANNEL_SAMPLES,
        });
    }
    let shards: Vec<Result<Moments>> = chunk_sizes(n)
        .map(|(index, len)| {
            let mut sampler = rng.substream(index).sampler();
            let mut m = Moments::default();
            for _ in 0..len {
                let alpha = sample_alpha(lambda, &mut sampler)?;
                let out = channel.apply(&SingleModeGaussian::coherent(alpha))?;
                m.push(coherent_fidelity(alpha, &out)?);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::default();
    for shard in shards {
        total.merge(&shard?);
    }
    Ok(total.estimate(rng.seed()))
}

/// Linear map `L` with `L Lᵀ = cov` for a symmetric PSD 2x2 matrix, via its
/// eigendecomposition.
fn psd_factor(cov: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let eig = cov.symmetric_eigen();
    let mut scales = Vector2::zeros();
    for i in 0..2 {
        let ev = eig.eigenvalues[i];
        if ev < -UNRAVEL_TOL {
            return Err(Error::InvalidUnravelling { min_eigenvalue: ev });
        }
        scales[i] = ev.max(0.0).sqrt();
    }
    Ok(eig.eigenvectors * Matrix2::from_diagonal(&scales))
}

/// Empirical statistics of a run-by-run BK simulation for one input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BkRunSummary {
    /// Per-run fidelity with the input coherent state.
    pub fidelity: McEstimate,
    /// Ensemble mean of the output displacement and its standard error.
    pub mean_d: Vector2<f64>,
    pub mean_d_se: Vector2<f64>,
    /// Ensemble covariance of the output state (mixture of coherent states)
    /// and the standard error of each entry.
    pub cov: Matrix2<f64>,
    pub cov_se: Matrix2<f64>,
    /// Output moments predicted by [`bk_output`].
    pub predicted: SingleModeGaussian,
}

/// Covariance of the displacement noise `ξ` in the coherent-state
/// unravelling of the BK output: `(V_out - 1) / 2`.
///
/// With `d = sqrt(2) (Re α, Im α)`, `V` is twice the quadrature covariance,
/// so a mixture of coherent states whose centres have covariance `Σ` has
/// `V = 1 + 2 Σ`.
pub fn unravelling_covariance(spec: &ResourceSpec) -> Result<Matrix2<f64>> {
    let out = bk_output(&spec.state(), spec.g, &SingleModeGaussian::vacuum())?;
    Ok(excess(&out))
}

fn excess(out: &SingleModeGaussian) -> Matrix2<f64> {
    (out.v - Matrix2::identity()) * 0.5
}

/// Simulates BK teleportation of `|alpha>` run by run.
///
/// In the Heisenberg picture the output quadratures are
/// `q = g q_in - g q_A + q_B`, `p = g p_in + g p_A + p_B`. For a coherent
/// input the output is a mixture of coherent states centred at
/// `g d_in + ξ`. The covariance of `ξ` is half of `V_out - 1`, where
/// `V_out` holds the input vacuum noise `g² 1` plus the resource noise and
/// the subtracted identity is what each coherent component carries itself
/// (see [`unravelling_covariance`]).
pub fn mc_bk_teleport(
    spec: &ResourceSpec,
    alpha: Complex<f64>,
    n: usize,
    rng: &RngStream,
) -> Result<BkRunSummary> {
    if n < MIN_BK_SAMPLES {
        return Err(Error::TooFewSamples {
            n,
            min: MIN_BK_SAMPLES,
        });
    }
    let input = SingleModeGaussian::coherent(alpha);
    let predicted = bk_output(&spec.state(), spec.g, &input)?;
    let factor = psd_factor(&excess(&predicted))?;
    let centre = input.d * spec.g;
    let target = displacement_of(alpha);

    // fidelity, d_q, d_p, (d_q)², (d_p)², d_q d_p about the predicted centre
    let shards: Vec<[Moments; 6]> = chunk_sizes(n)
        .map(|(index, len)| {
            let mut sampler = rng.substream(index).sampler();
            let mut m = [Moments::default(); 6];
            for _ in 0..len {
                let xi =
                    factor * Vector2::new(sampler.standard_normal(), sampler.standard_normal());
                let d = centre + xi;
                let miss = d - target;
                m[0].push((-0.5 * miss.norm_squared()).exp());
                m[1].push(d[0]);
                m[2].push(d[1]);
                m[3].push(xi[0] * xi[0]);
                m[4].push(xi[1] * xi[1]);
                m[5].push(xi[0] * xi[1]);
            }
            m
        })
        .collect();
    let mut total = [Moments::default(); 6];
    for shard in &shards {
        for (t, s) in total.iter_mut().zip(shard) {
            t.merge(s);
        }
    }
    let cov = Matrix2::new(
        1.0 + 2.0 * total[3].mean(),
        2.0 * total[5].mean(),
        2.0 * total[5].mean(),
        1.0 + 2.0 * total[4].mean(),
    );
    let cov_se = Matrix2::new(
        total[3].std_error(),
        total[5].std_error(),
        total[5].std_error(),
        total[4].std_error(),
    ) * 2.0;
    Ok(BkRunSummary {
        fidelity: total[0].estimate(rng.seed()),
        mean_d: Vector2::new(total[1].mean(), total[2].mean()),
        mean_d_se: Vector2::new(total[1].std_error(), total[2].std_error()),
        cov,
        cov_se,
        predicted,
    })
}

/// Nested estimate of the alphabet-averaged BK fidelity: `outer` amplitudes
/// from `p_lambda`, `inner` runs each. Each outer sample contributes the mean
/// of its inner runs.
pub fn mc_bk_average_fidelity(
    spec: &ResourceSpec,
    lambda: f64,
    outer: usize,
    inner: usize,
    rng: &RngStream,
) -> Result<McEstimate> {
    if outer < 2 || inner == 0 {
        return Err(Error::TooFewSamples {
            n: outer.min(inner),
            min: 2,
        });
    }
    let zero = SingleModeGaussian::vacuum();
    let predicted = bk_output(&spec.state(), spec.g, &zero)?;
    let factor = psd_factor(&excess(&predicted))?;
    let alphas = rng.substream(u64::MAX);
    let runs = rng.substream(u64::MAX - 1);

    let shards: Vec<Result<Moments>> = chunk_sizes(outer)
        .map(|(index, len)| {
            let mut alpha_sampler = alphas.substream(index).sampler();
            let mut run_sampler = runs.substream(index).sampler();
            let mut m = Moments::default();
            for _ in 0..len {
                let alpha = sample_alpha(lambda, &mut alpha_sampler)?;
                let target = displacement_of(alpha);
                let centre = target * spec.g;
                let mut acc = 0.0;
                for _ in 0..inner {
                    let xi = factor
                        * Vector2::new(
                            run_sampler.standard_normal(),
                            run_sampler.standard_normal(),
                        );
                    acc += (-0.5 * (centre + xi - target).norm_squared()).exp();
                }
                m.push(acc / inner as f64);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::default();
    for shard in shards {
        total.merge(&shard?);
    }
    Ok(total.estimate(rng.seed()))
}
