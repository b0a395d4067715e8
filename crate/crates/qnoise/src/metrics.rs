//! Scalar noise metrics and the conversion algebra between them.
//!
//! The four linear functions of the average gate fidelity — the fidelity F,
//! the infidelity r, the benchmarking decay rate p, and the chi-matrix
//! element chi00 — are related by affine maps that depend only on the
//! dimension. The unitarity u and the coherence angle
//! θ = arccos(p/√u) complete the scalar picture: θ = 0 for depolarizing
//! noise and θ = arccos p for unitary noise.
//!
//! Algebraic metrics are computed from the Liouville view only. The
//! Monte-Carlo estimators [`fidelity_mc`] and [`unitarity_mc`] average over
//! Haar-random pure states and serve as independent oracles.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::Channel;
use crate::error::{Error, Result};

/// One of the four affinely related fidelity-like quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Fidelity,
    Infidelity,
    DecayRate,
    Chi00,
}

impl Metric {
    /// Range the metric can take for a CPTP channel; intervals are clamped
    /// to it.
    pub fn range(&self) -> (f64, f64) {
        match self {
            Metric::Fidelity | Metric::Chi00 | Metric::Infidelity => (0.0, 1.0),
            Metric::DecayRate => (-1.0, 1.0),
        }
    }
}

/// A metric together with the dimension it refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricKind {
    pub metric: Metric,
    pub dim: usize,
}

impl MetricKind {
    pub fn new(metric: Metric, dim: usize) -> Self {
        MetricKind { metric, dim }
    }
}

/// Applies the affine relation between two metrics of the same dimension.
///
/// Converting there and back returns the input up to rounding.
pub fn convert(value: f64, from: MetricKind, to: MetricKind) -> Result<f64> {
    if from.dim != to.dim {
        return Err(Error::DimensionMismatch {
            left: from.dim,
            right: to.dim,
        });
    }
    let d = from.dim as f64;
    use Metric::*;
    let out = match (from.metric, to.metric) {
        (a, b) if a == b => value,
        (Fidelity, Infidelity) => 1.0 - value,
        (Infidelity, Fidelity) => 1.0 - value,
        (Fidelity, DecayRate) => (d * value - 1.0) / (d - 1.0),
        (DecayRate, Fidelity) => ((d - 1.0) * value + 1.0) / d,
        (Fidelity, Chi00) => ((d + 1.0) * value - 1.0) / d,
        (Chi00, Fidelity) => (d * value + 1.0) / (d + 1.0),
        (Infidelity, DecayRate) => 1.0 - d / (d - 1.0) * value,
        (DecayRate, Infidelity) => (d - 1.0) / d * (1.0 - value),
        (Infidelity, Chi00) => 1.0 - (d + 1.0) / d * value,
        (Chi00, Infidelity) => d / (d + 1.0) * (1.0 - value),
        (DecayRate, Chi00) => ((d * d - 1.0) * value + 1.0) / (d * d),
        (Chi00, DecayRate) => (d * d * value - 1.0) / (d * d - 1.0),
        _ => unreachable!("all ordered pairs covered"),
    };
    Ok(out)
}

/// The full scalar bundle for one channel.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChannelMetrics {
    pub fidelity: f64,
    pub infidelity: f64,
    pub decay_rate: f64,
    pub chi00: f64,
    pub unitarity: f64,
    pub coherence_angle: f64,
}

impl ChannelMetrics {
    /// Computes all six metrics; fails for a channel with vanishing
    /// unitarity, where the coherence angle is undefined.
    pub fn of(ch: &Channel) -> Result<Self> {
        let p = decay_rate(ch);
        let u = unitarity(ch);
        let theta = coherence_angle(ch)?;
        let d = ch.dim();
        let f = convert(
            p,
            MetricKind::new(Metric::DecayRate, d),
            MetricKind::new(Metric::Fidelity, d),
        )?;
        Ok(ChannelMetrics {
            fidelity: f,
            infidelity: 1.0 - f,
            decay_rate: p,
            chi00: chi00(ch),
            unitarity: u,
            coherence_angle: theta,
        })
    }
}

/// chi00 element of the chi matrix, computed from the Liouville trace.
pub fn chi00(ch: &Channel) -> f64 {
    let d2 = (ch.dim() * ch.dim()) as f64;
    ch.liouville().trace() / d2
}

/// Benchmarking decay rate `p = tr(E_u) / (d²−1)`.
pub fn decay_rate(ch: &Channel) -> f64 {
    let n = ch.liouville().nrows() as f64;
    (ch.liouville().trace() - 1.0) / (n - 1.0)
}

/// Unitarity `u = ‖E_u‖²_F / (d²−1)`; equals 1 iff the channel is unitary.
pub fn unitarity(ch: &Channel) -> f64 {
    let l = ch.liouville();
    let n = l.nrows();
    let mut sum = 0.0;
    for j in 1..n {
        for i in 1..n {
            sum += l[(i, j)] * l[(i, j)];
        }
    }
    sum / (n as f64 - 1.0)
}

/// Average gate fidelity to the identity.
pub fn fidelity(ch: &Channel) -> f64 {
    let d = ch.dim() as f64;
    ((d - 1.0) * decay_rate(ch) + 1.0) / d
}

/// Infidelity `r = 1 − F`.
pub fn infidelity(ch: &Channel) -> f64 {
    1.0 - fidelity(ch)
}

/// Coherence angle `θ = arccos(p/√u)`.
///
/// Negative decay rates are allowed and give θ > π/2.
pub fn coherence_angle(ch: &Channel) -> Result<f64> {
    let u = unitarity(ch);
    if u <= 0.0 {
        return Err(Error::DegenerateChannel(
            "unitarity is zero, coherence angle undefined",
        ));
    }
    Ok(angle_from_parts(decay_rate(ch), u))
}

/// `arccos(p/√u)` for precomputed parts.
///
/// The ratio is clamped into [−1, 1] so rounding overshoot cannot produce a
/// NaN; see [`crate::realmat::snapped_acos`] for the endpoint handling.
pub fn angle_from_parts(p: f64, u: f64) -> f64 {
    crate::realmat::snapped_acos((p / u.sqrt()).clamp(-1.0, 1.0))
}

/// Samples a Haar-random pure state as a normalized vector of standard
/// complex Gaussians.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    loop {
        let v = DVector::from_iterator(
            dim,
            (0..dim).map(|_| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            }),
        );
        let norm = v.norm();
        if norm > 1e-12 {
            return v / Complex64::new(norm, 0.0);
        }
    }
}

fn per_sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Compensated summation; plain accumulation over 1e5 terms loses enough
/// precision to swamp the standard error of a zero-variance estimator.
fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

fn mc_estimate<F>(n_samples: usize, sample: F) -> (f64, f64)
where
    F: Fn(u64) -> f64 + Sync,
{
    let values: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(&sample)
        .collect();
    let n = n_samples as f64;
    let mean = kahan_sum(values.iter().copied()) / n;
    if n_samples < 2 {
        return (mean, 0.0);
    }
    let var = kahan_sum(values.iter().map(|v| (v - mean).powi(2))) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Monte-Carlo estimate of the average gate fidelity over Haar-random pure
/// states. Deterministic for a fixed seed, independent of thread count.
pub fn fidelity_mc(ch: &Channel, n_samples: usize, seed: u64) -> (f64, f64) {
    let basis = ch.basis().clone();
    let d = ch.dim();
    let l = ch.liouville();
    mc_estimate(n_samples, move |i| {
        let mut rng = per_sample_rng(seed, i);
        let psi = haar_state(d, &mut rng);
        let rho = &psi * psi.adjoint();
        let coords = basis.coords(&rho);
        let out = l * &coords;
        coords.dot(&out)
    })
}

/// Monte-Carlo estimate of the unitarity: the traceless part of each sampled
/// projector is fed through the channel, so the non-unital vector never
/// contributes.
pub fn unitarity_mc(ch: &Channel, n_samples: usize, seed: u64) -> (f64, f64) {
    let basis = ch.basis().clone();
    let d = ch.dim();
    let l = ch.liouville();
    let scale = d as f64 / (d as f64 - 1.0);
    mc_estimate(n_samples, move |i| {
        let mut rng = per_sample_rng(seed, i);
        let psi = haar_state(d, &mut rng);
        let rho = &psi * psi.adjoint();
        let mut coords = basis.coords(&rho);
        coords[0] = 0.0;
        let out = l * &coords;
        scale * out.norm_squared()
    })
}
