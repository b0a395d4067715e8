//! Constructors for named channels and random channel ensembles.
//!
//! Besides the standard single-parameter families (depolarizing, Pauli,
//! amplitude damping), this module provides the rotation-damping family
//! whose composites saturate the composite-decay bounds, Haar-random
//! unitaries, Stinespring-random CPTP channels, and targeted generation of
//! channels with prescribed fidelity and unitarity.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::basis::OperatorBasis;
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::metrics::{convert, Metric, MetricKind};

/// Parameters for targeted random channel generation.
///
/// When both targets are set they must be jointly feasible: the decay rate
/// implied by the fidelity target must satisfy `p² ≤ u`.
#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    pub dim: usize,
    pub target_fidelity: Option<f64>,
    pub target_unitarity: Option<f64>,
    pub tolerance: f64,
    pub kraus_rank: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(dim: usize, seed: u64) -> Self {
        EnsembleSpec {
            dim,
            target_fidelity: None,
            target_unitarity: None,
            tolerance: 1e-9,
            kraus_rank: dim * dim,
            seed,
        }
    }

    pub fn fidelity(mut self, f: f64) -> Self {
        self.target_fidelity = Some(f);
        self
    }

    pub fn unitarity(mut self, u: f64) -> Self {
        self.target_unitarity = Some(u);
        self
    }
}

/// The identity channel on dimension `d`.
pub fn identity(d: usize) -> Result<Channel> {
    Ok(Channel::identity(OperatorBasis::for_dim(d)?))
}

/// Depolarizing channel `ρ ↦ pρ + (1−p) I/d`, with Liouville matrix
/// `diag(1, p, …, p)`.
pub fn depolarizing(p: f64, d: usize) -> Result<Channel> {
    let d2 = (d * d) as f64;
    let lower = -1.0 / (d2 - 1.0);
    if !(lower..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            what: "depolarizing parameter",
            value: p,
        });
    }
    let basis = OperatorBasis::for_dim(d)?;
    let n = d * d;
    let mut l = DMatrix::identity(n, n);
    for k in 1..n {
        l[(k, k)] = p;
    }
    Channel::from_liouville(l, basis)
}

/// Pauli channel with the given probability vector over Pauli strings.
/// The probabilities index the Pauli basis ordering, so the chi matrix is
/// `diag(probs)`.
pub fn pauli_channel(probs: &[f64]) -> Result<Channel> {
    let n = probs.len();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n || !d.is_power_of_two() || d < 2 {
        return Err(Error::InvalidBasis(format!(
            "{n} probabilities do not index a Pauli string basis"
        )));
    }
    if let Some(&bad) = probs.iter().find(|&&q| q < 0.0) {
        return Err(Error::OutOfRange {
            what: "pauli probability",
            value: bad,
        });
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::OutOfRange {
            what: "pauli probability sum",
            value: total,
        });
    }
    let basis = OperatorBasis::pauli(d)?;
    let root_d = Complex64::new((d as f64).sqrt(), 0.0);
    let kraus: Vec<DMatrix<Complex64>> = probs
        .iter()
        .enumerate()
        .filter(|(_, &q)| q > 0.0)
        .map(|(k, &q)| basis.element(k) * (root_d * Complex64::new(q.sqrt(), 0.0)))
        .collect();
    Channel::from_kraus(&kraus, basis)
}

/// Unitary channel `ρ ↦ UρU†`.
pub fn unitary_channel(u: &DMatrix<Complex64>, d: usize) -> Result<Channel> {
    let basis = OperatorBasis::for_dim(d)?;
    Channel::from_kraus(std::slice::from_ref(u), basis)
}

/// Phase unitary `diag(e^{iφ}, e^{−iφ}) ⊗ I_{d/2}` as a channel. Its chi00
/// equals `cos²φ` and composition adds phases.
pub fn phase_unitary(phi: f64, d: usize) -> Result<Channel> {
    if d % 2 != 0 {
        return Err(Error::OutOfRange {
            what: "phase unitary dimension (must be even)",
            value: d as f64,
        });
    }
    let half = d / 2;
    let mut u = DMatrix::<Complex64>::zeros(d, d);
    for k in 0..half {
        u[(k, k)] = Complex64::new(phi.cos(), phi.sin());
        u[(half + k, half + k)] = Complex64::new(phi.cos(), -phi.sin());
    }
    unitary_channel(&u, d)
}

/// Qubit channel with Liouville matrix
/// `diag-block [1, γR(θ), λ]` in the Pauli basis: a z-axis rotation by θ
/// with transverse contraction γ and longitudinal contraction λ.
///
/// Its metrics are `p = (2γcosθ + λ)/3` and `u = (2γ² + λ²)/3`. Membership
/// in the CPTP set is decided numerically through the Choi matrix.
pub fn rotation_damping_qubit(gamma: f64, lambda: f64, theta: f64) -> Result<Channel> {
    let basis = OperatorBasis::pauli(2)?;
    let mut l = DMatrix::<f64>::zeros(4, 4);
    l[(0, 0)] = 1.0;
    l[(1, 1)] = gamma * theta.cos();
    l[(1, 2)] = -gamma * theta.sin();
    l[(2, 1)] = gamma * theta.sin();
    l[(2, 2)] = gamma * theta.cos();
    l[(3, 3)] = lambda;
    let ch = Channel::from_liouville(l, basis)?;
    let report = ch.validate_cptp(1e-9);
    if !report.is_cp {
        return Err(Error::NotCompletelyPositive {
            min_eigenvalue: report.min_choi_eigenvalue,
        });
    }
    Ok(ch)
}

/// Amplitude damping with rate `gamma_ad` followed by a z-rotation by
/// `rotation` radians about the damping axis. Non-unital for any positive
/// damping.
pub fn amplitude_damping_qubit(gamma_ad: f64, rotation: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&gamma_ad) {
        return Err(Error::OutOfRange {
            what: "amplitude damping rate",
            value: gamma_ad,
        });
    }
    let basis = OperatorBasis::pauli(2)?;
    let half = rotation / 2.0;
    let rz = [
        Complex64::new(half.cos(), -half.sin()),
        Complex64::new(half.cos(), half.sin()),
    ];
    let mut k0 = DMatrix::<Complex64>::zeros(2, 2);
    k0[(0, 0)] = rz[0];
    k0[(1, 1)] = rz[1] * Complex64::new((1.0 - gamma_ad).sqrt(), 0.0);
    let mut k1 = DMatrix::<Complex64>::zeros(2, 2);
    k1[(0, 1)] = rz[0] * Complex64::new(gamma_ad.sqrt(), 0.0);
    Channel::from_kraus(&[k0, k1], basis)
}

/// Haar-random unitary via QR of a complex Gaussian matrix with the
/// R-diagonal phases folded back in.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..d {
        let diag = r[(k, k)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Haar-random orthogonal matrix via QR of a real Gaussian matrix.
pub fn haar_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..d {
        if r[(k, k)] < 0.0 {
            for i in 0..d {
                q[(i, k)] = -q[(i, k)];
            }
        }
    }
    q
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-random unitary channel. Deterministic per seed.
pub fn random_unitary(d: usize, seed: u64) -> Result<Channel> {
    let mut rng = rng_for(seed);
    let u = haar_unitary(d, &mut rng);
    unitary_channel(&u, d)
}

/// Random CPTP channel from a Stinespring isometry: the first `d` columns of
/// a Haar unitary on `d·kraus_rank` dimensions.
pub fn random_cptp(d: usize, kraus_rank: usize, seed: u64) -> Result<Channel> {
    if kraus_rank < 1 || kraus_rank > d * d {
        return Err(Error::OutOfRange {
            what: "kraus rank",
            value: kraus_rank as f64,
        });
    }
    let mut rng = rng_for(seed);
    random_cptp_with(d, kraus_rank, &mut rng)
}

/// As [`random_cptp`] but drawing from a caller-supplied generator.
pub fn random_cptp_with<R: Rng + ?Sized>(
    d: usize,
    kraus_rank: usize,
    rng: &mut R,
) -> Result<Channel> {
    let big = d * kraus_rank;
    let w = haar_unitary(big, rng);
    let mut kraus = Vec::with_capacity(kraus_rank);
    for j in 0..kraus_rank {
        let mut a = DMatrix::<Complex64>::zeros(d, d);
        for i in 0..d {
            for c in 0..d {
                a[(i, c)] = w[(i + d * j, c)];
            }
        }
        kraus.push(a);
    }
    let basis = OperatorBasis::for_dim(d)?;
    Channel::from_kraus(&kraus, basis)
}

/// Random unital channel as a mixture of Haar-random unitaries.
pub fn random_unital(d: usize, n_unitaries: usize, seed: u64) -> Result<Channel> {
    if n_unitaries == 0 {
        return Err(Error::EmptyInput("unitary mixture"));
    }
    let mut rng = rng_for(seed);
    let mut weights: Vec<f64> = (0..n_unitaries).map(|_| rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut kraus = Vec::with_capacity(n_unitaries);
    for &w in &weights {
        let u = haar_unitary(d, &mut rng);
        kraus.push(u * Complex64::new(w.sqrt(), 0.0));
    }
    let basis = OperatorBasis::for_dim(d)?;
    Channel::from_kraus(&kraus, basis)
}

/// Conjugates a channel by a unitary: `U ∘ X ∘ U†`. Preserves the decay
/// rate and the unitarity.
pub fn conjugate_by_unitary(ch: &Channel, u: &DMatrix<Complex64>) -> Result<Channel> {
    let d = ch.dim();
    let forward = unitary_channel(u, d)?;
    let backward = unitary_channel(&u.adjoint(), d)?;
    forward.compose(ch)?.compose(&backward)
}

/// Generates a channel hitting optional fidelity and unitarity targets.
///
/// The channel is seeded from the rotation-damping family, which spans the
/// reachable (p, u) combinations, then conjugated by a Haar-random unitary;
/// conjugation preserves both targets while randomizing everything else.
/// Targeted generation is a single-qubit construction.
pub fn random_with_targets(spec: &EnsembleSpec) -> Result<Channel> {
    let mut rng = rng_for(spec.seed);
    match (spec.target_fidelity, spec.target_unitarity) {
        (None, None) => random_cptp_with(spec.dim, spec.kraus_rank, &mut rng),
        (f_target, u_target) => {
            if spec.dim != 2 {
                return Err(Error::InfeasibleTargets(format!(
                    "targeted generation is defined for qubits, got d = {}",
                    spec.dim
                )));
            }
            let p_target = match f_target {
                Some(f) => convert(
                    f,
                    MetricKind::new(Metric::Fidelity, 2),
                    MetricKind::new(Metric::DecayRate, 2),
                )?,
                // Fidelity left free: draw p in [0, √u].
                None => {
                    let cap = u_target.unwrap_or(1.0).max(0.0).sqrt();
                    rng.random::<f64>() * cap
                }
            };
            let u_target = match u_target {
                Some(u) => u,
                // Unitarity left free: draw u in the feasible band [p², 1].
                None => {
                    let floor = p_target * p_target;
                    floor + rng.random::<f64>() * (1.0 - floor)
                }
            };
            if !(0.0..=1.0 + 1e-12).contains(&u_target) {
                return Err(Error::InfeasibleTargets(format!(
                    "unitarity target {u_target} outside [0, 1]"
                )));
            }
            if p_target * p_target > u_target + spec.tolerance {
                return Err(Error::InfeasibleTargets(format!(
                    "p² = {} exceeds unitarity target {u_target}",
                    p_target * p_target
                )));
            }
            let seeded = rotation_damping_with_targets(p_target, u_target, spec.tolerance)?;
            let u = haar_unitary(2, &mut rng);
            conjugate_by_unitary(&seeded, &u)
        }
    }
}

/// Solves the rotation-damping family for the requested (p, u) pair: the
/// two contractions are pinned at √u, which matches the unitarity exactly,
/// and the rotation angle is root-found against the decay rate.
fn rotation_damping_with_targets(p: f64, u: f64, tol: f64) -> Result<Channel> {
    let s = u.sqrt();
    // p(θ) = s(2cosθ + 1)/3 is monotone on [0, π]; bisect.
    let p_of = |theta: f64| s * (2.0 * theta.cos() + 1.0) / 3.0;
    if p > p_of(0.0) + tol || p < p_of(std::f64::consts::PI) - tol {
        return Err(Error::InfeasibleTargets(format!(
            "decay rate {p} unreachable at unitarity {u}"
        )));
    }
    let mut lo = 0.0f64;
    let mut hi = std::f64::consts::PI;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p_of(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let theta = 0.5 * (lo + hi);
    let achieved = p_of(theta);
    if (achieved - p).abs() > tol.max(1e-12) {
        return Err(Error::RootFinding(format!(
            "decay rate target {p}, reached {achieved}"
        )));
    }
    rotation_damping_qubit(s, s, theta)
}

/// Per-item seed for ensemble generation: results are independent of how
/// work is distributed across threads.
pub fn item_seed(master: u64, index: u64) -> u64 {
    master.wrapping_add(index)
}
