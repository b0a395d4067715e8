//! Standard and interleaved randomized benchmarking on single-qubit gate
//! sets.
//!
//! A [`GateSet`] stores the group unitaries with their composition and
//! inverse tables, plus a per-gate noise assignment. Survival probabilities
//! come in two flavors: [`survival_exact`] composes the twirled error
//! channel (valid for gate-independent noise; in interleaved mode the
//! twirled object is the composite error of the interleaved gate and the
//! set average), while [`survival_sampled`] runs the protocol itself —
//! uniformly random sequences with the exact inversion element appended and
//! noise applied after every ideal gate, including the inversion.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::OperatorBasis;
use crate::bounds::{interleaved_chi00_bounds, interleaved_decay_bounds, BoundInterval};
use crate::channel::{liouville_distance, Channel};
use crate::error::{Error, Result};
use crate::metrics::{angle_from_parts, convert, Metric, MetricKind};

/// Default sequence lengths: powers of two up to 128.
pub const DEFAULT_LENGTHS: [usize; 8] = [1, 2, 4, 8, 16, 32, 64, 128];
/// Default number of sampled sequences per length.
pub const DEFAULT_NSEQS: usize = 200;

const PROJECTIVE_TOL: f64 = 1e-6;

/// Benchmarking mode: plain random sequences, or a fixed gate interleaved
/// after every random gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RbMode {
    Standard,
    /// Interleave the gate with this index.
    Interleaved(usize),
}

/// A finite group of unitaries with per-gate noise channels.
#[derive(Debug, Clone)]
pub struct GateSet {
    name: String,
    dim: usize,
    basis: Arc<OperatorBasis>,
    unitaries: Vec<DMatrix<Complex64>>,
    gate_liouvilles: Vec<DMatrix<f64>>,
    noise: Vec<Channel>,
    /// Noise for the dedicated interleaved slot; when unset, the
    /// interleaved gate carries its per-gate noise. Keeping the slot
    /// separate lets the interleaved gate coincide with a group element
    /// (including the identity) without its error leaking into the random
    /// draws.
    interleaved_noise: Option<Channel>,
    mult: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    identity_index: usize,
}

impl GateSet {
    /// Builds a gate set from unitaries forming a group up to global phase.
    /// Fails if the set is not closed or misses inverses or the identity.
    pub fn from_unitaries(name: &str, unitaries: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if unitaries.is_empty() {
            return Err(Error::EmptyInput("gate set"));
        }
        let dim = unitaries[0].nrows();
        let basis = OperatorBasis::for_dim(dim)?;
        let n = unitaries.len();
        let d_f = dim as f64;

        let find = |m: &DMatrix<Complex64>| -> Option<usize> {
            unitaries
                .iter()
                .position(|u| ((u.adjoint() * m).trace().norm() - d_f).abs() < PROJECTIVE_TOL)
        };

        let identity_index = unitaries
            .iter()
            .position(|u| (u.trace().norm() - d_f).abs() < PROJECTIVE_TOL)
            .ok_or_else(|| Error::InvalidBasis(format!("gate set {name} lacks the identity")))?;

        let mut mult = vec![vec![0usize; n]; n];
        for a in 0..n {
            for b in 0..n {
                let product = &unitaries[a] * &unitaries[b];
                mult[a][b] = find(&product).ok_or_else(|| {
                    Error::InvalidBasis(format!("gate set {name} not closed at ({a}, {b})"))
                })?;
            }
        }
        let mut inverse = vec![0usize; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| mult[a][b] == identity_index && mult[b][a] == identity_index)
                .ok_or_else(|| {
                    Error::InvalidBasis(format!("gate {a} of {name} has no inverse"))
                })?;
        }

        let mut gate_liouvilles = Vec::with_capacity(n);
        let noise = vec![Channel::identity(basis.clone()); n];
        for u in &unitaries {
            let ch = Channel::from_kraus(std::slice::from_ref(u), basis.clone())?;
            gate_liouvilles.push(ch.liouville().clone());
        }

        Ok(GateSet {
            name: name.to_string(),
            dim,
            basis,
            unitaries,
            gate_liouvilles,
            noise,
            interleaved_noise: None,
            mult,
            inverse,
            identity_index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &Arc<OperatorBasis> {
        &self.basis
    }

    pub fn unitary(&self, index: usize) -> &DMatrix<Complex64> {
        &self.unitaries[index]
    }

    pub fn identity_index(&self) -> usize {
        self.identity_index
    }

    pub fn product_of(&self, after: usize, before: usize) -> usize {
        self.mult[after][before]
    }

    pub fn inverse_of(&self, index: usize) -> usize {
        self.inverse[index]
    }

    pub fn noise(&self, index: usize) -> &Channel {
        &self.noise[index]
    }

    /// Assigns the same noise channel to every gate.
    pub fn set_uniform_noise(&mut self, ch: &Channel) -> Result<()> {
        self.check_noise(ch)?;
        self.noise = vec![ch.clone(); self.len()];
        Ok(())
    }

    /// Assigns noise to a single gate.
    pub fn set_gate_noise(&mut self, index: usize, ch: Channel) -> Result<()> {
        self.check_noise(&ch)?;
        if index >= self.len() {
            return Err(Error::MissingNoise(index));
        }
        self.noise[index] = ch;
        Ok(())
    }

    /// Assigns a dedicated error channel to the interleaved slot,
    /// overriding the interleaved gate's per-gate noise.
    pub fn set_interleaved_noise(&mut self, ch: Option<Channel>) -> Result<()> {
        if let Some(ch) = &ch {
            self.check_noise(ch)?;
        }
        self.interleaved_noise = ch;
        Ok(())
    }

    /// The error applied in the interleaved slot for gate `h`.
    pub fn interleaved_noise_for(&self, h: usize) -> &Channel {
        self.interleaved_noise.as_ref().unwrap_or(&self.noise[h])
    }

    fn check_noise(&self, ch: &Channel) -> Result<()> {
        if ch.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: ch.dim(),
                right: self.dim,
            });
        }
        Ok(())
    }

    /// True when every gate carries the same noise channel.
    pub fn is_gate_independent(&self) -> bool {
        self.noise
            .iter()
            .all(|ch| liouville_distance(ch, &self.noise[0]) < 1e-12)
    }

    /// Frame potential `Σ_{g,h} |tr(g†h)|⁴ / |G|²`; equals 2 exactly for a
    /// unitary 2-design.
    pub fn frame_potential(&self) -> f64 {
        let n = self.len();
        let mut sum = 0.0;
        for g in &self.unitaries {
            for h in &self.unitaries {
                sum += (g.adjoint() * h).trace().norm().powi(4);
            }
        }
        sum / (n * n) as f64
    }

    /// The uniform average of the per-gate noise channels.
    pub fn average_error(&self) -> Result<Channel> {
        let n = self.len() as f64;
        let mut acc = self.noise[0].liouville().clone();
        for ch in &self.noise[1..] {
            acc += ch.liouville();
        }
        Channel::from_liouville(acc / n, self.basis.clone())
    }

    /// Gate-set twirl: the uniform average of `U_g† ∘ ch ∘ U_g`. For a
    /// 2-design this is the depolarizing channel with the same decay rate.
    pub fn twirl(&self, ch: &Channel) -> Result<Channel> {
        if ch.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: ch.dim(),
                right: self.dim,
            });
        }
        let n = self.basis.dim() * self.basis.dim();
        let mut acc = DMatrix::<f64>::zeros(n, n);
        for l in &self.gate_liouvilles {
            acc += l.transpose() * ch.liouville() * l;
        }
        Channel::from_liouville(acc / self.len() as f64, self.basis.clone())
    }
}

fn pauli_matrix(which: usize) -> DMatrix<Complex64> {
    let zero = Complex64::default();
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match which {
        0 => DMatrix::from_row_slice(2, 2, &[one, zero, zero, one]),
        1 => DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
        2 => DMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]),
        _ => DMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]),
    }
}

/// Deterministic global-phase normalization: the first entry of magnitude
/// above 1e-6 is rotated to the positive real axis.
fn normalize_phase(mut u: DMatrix<Complex64>) -> DMatrix<Complex64> {
    if let Some(pivot) = u.iter().find(|c| c.norm() > 1e-6).copied() {
        let phase = pivot / pivot.norm();
        u *= phase.conj();
    }
    u
}

/// Generates the projective closure of a generator list.
fn close_group(generators: &[DMatrix<Complex64>], cap: usize) -> Result<Vec<DMatrix<Complex64>>> {
    let d = generators[0].nrows() as f64;
    let mut elements: Vec<DMatrix<Complex64>> =
        vec![normalize_phase(DMatrix::identity(generators[0].nrows(), generators[0].ncols()))];
    let contains = |set: &[DMatrix<Complex64>], m: &DMatrix<Complex64>| {
        set.iter()
            .any(|u| ((u.adjoint() * m).trace().norm() - d).abs() < PROJECTIVE_TOL)
    };
    for g in generators {
        if !contains(&elements, g) {
            elements.push(normalize_phase(g.clone()));
        }
    }
    loop {
        let mut added = false;
        let snapshot = elements.clone();
        for a in &snapshot {
            for g in generators {
                let product = a * g;
                if !contains(&elements, &product) {
                    elements.push(normalize_phase(product));
                    added = true;
                    if elements.len() > cap {
                        return Err(Error::InvalidBasis(format!(
                            "group closure exceeded {cap} elements"
                        )));
                    }
                }
            }
        }
        if !added {
            return Ok(elements);
        }
    }
}

/// The 24-element single-qubit Clifford group, generated by the Hadamard
/// and phase gates, with phases normalized.
pub fn clifford_24() -> GateSet {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let h = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(s2, 0.0),
            Complex64::new(s2, 0.0),
            Complex64::new(s2, 0.0),
            Complex64::new(-s2, 0.0),
        ],
    );
    let s = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0, 0.0),
            Complex64::default(),
            Complex64::default(),
            Complex64::new(0.0, 1.0),
        ],
    );
    let elements = close_group(&[h, s], 30).expect("clifford closure");
    assert_eq!(elements.len(), 24);
    GateSet::from_unitaries("clifford24", elements).expect("clifford group tables")
}

/// The 12-element subgroup of the Clifford group isomorphic to the
/// tetrahedral rotation group: π rotations about x and y together with the
/// 2π/3 rotation about (1,1,1)/√3. It is a unitary 2-design.
pub fn twodesign_12() -> GateSet {
    let i = Complex64::new(0.0, 1.0);
    let x_pi = pauli_matrix(1) * (-i);
    let y_pi = pauli_matrix(2) * (-i);
    let diag = {
        let sum = pauli_matrix(1) + pauli_matrix(2) + pauli_matrix(3);
        (DMatrix::identity(2, 2) - sum * i) * Complex64::new(0.5, 0.0)
    };
    let elements = close_group(&[x_pi, y_pi, diag], 20).expect("tetrahedral closure");
    assert_eq!(elements.len(), 12);
    GateSet::from_unitaries("twodesign12", elements).expect("tetrahedral group tables")
}

/// Projector onto the first computational basis state, the default
/// preparation and measurement.
pub fn ground_projector(d: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(d, d);
    m[(0, 0)] = Complex64::new(1.0, 0.0);
    m
}

fn effective_error(gs: &GateSet, mode: RbMode) -> Result<Channel> {
    if !gs.is_gate_independent() {
        return Err(Error::GateDependentNoise);
    }
    let noise = gs.noise(0);
    match mode {
        RbMode::Standard => Ok(noise.clone()),
        RbMode::Interleaved(h) => {
            if h >= gs.len() {
                return Err(Error::MissingNoise(h));
            }
            gs.interleaved_noise_for(h).compose(noise)
        }
    }
}

/// Exact sequence-averaged survival probability for gate-independent noise.
///
/// Averaging over uniform sequences reduces the noisy chain to
/// `⟨⟨E| L_noise · T^m |ρ⟩⟩` where `T` is the gate-set twirl of the error
/// (the composite error of the interleaved gate and the set average in
/// interleaved mode) and the leading factor is the inversion gate's noise.
pub fn survival_exact(
    gs: &GateSet,
    mode: RbMode,
    m: usize,
    state: &DMatrix<Complex64>,
    meas: &DMatrix<Complex64>,
) -> Result<f64> {
    if m < 1 {
        return Err(Error::OutOfRange {
            what: "sequence length",
            value: m as f64,
        });
    }
    let effective = effective_error(gs, mode)?;
    let twirled = gs.twirl(&effective)?;
    let noise = gs.noise(0);
    let mut v = gs.basis.coords(state);
    for _ in 0..m {
        v = twirled.liouville() * v;
    }
    v = noise.liouville() * v;
    Ok(gs.basis.coords(meas).dot(&v))
}

/// Sampled survival probability: `n_seqs` uniformly random sequences of `m`
/// gates (with the interleaved gate inserted after each in interleaved
/// mode), the exact inversion element appended, and per-gate noise applied
/// after every ideal gate. Returns the mean and its standard error;
/// deterministic for a fixed seed independent of thread count.
pub fn survival_sampled(
    gs: &GateSet,
    mode: RbMode,
    m: usize,
    n_seqs: usize,
    seed: u64,
    state: &DMatrix<Complex64>,
    meas: &DMatrix<Complex64>,
) -> Result<(f64, f64)> {
    if m < 1 || n_seqs < 1 {
        return Err(Error::OutOfRange {
            what: "sequence parameters",
            value: 0.0,
        });
    }
    if let RbMode::Interleaved(h) = mode {
        if h >= gs.len() {
            return Err(Error::MissingNoise(h));
        }
    }
    let rho = gs.basis.coords(state);
    let effect = gs.basis.coords(meas);
    let values: Vec<f64> = (0..n_seqs as u64)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx.wrapping_add(1));
            let mut v = rho.clone();
            let mut cumulative = gs.identity_index();
            for _ in 0..m {
                let g = rng.random_range(0..gs.len());
                v = &gs.gate_liouvilles[g] * v;
                v = gs.noise(g).liouville() * v;
                cumulative = gs.product_of(g, cumulative);
                if let RbMode::Interleaved(h) = mode {
                    v = &gs.gate_liouvilles[h] * v;
                    v = gs.interleaved_noise_for(h).liouville() * v;
                    cumulative = gs.product_of(h, cumulative);
                }
            }
            let inv = gs.inverse_of(cumulative);
            v = &gs.gate_liouvilles[inv] * v;
            v = gs.noise(inv).liouville() * v;
            effect.dot(&v)
        })
        .collect();
    let n = n_seqs as f64;
    let mean = values.iter().sum::<f64>() / n;
    if n_seqs < 2 {
        return Ok((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Result of fitting `y = A·p^m + B`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    /// Euclidean norm of the residuals at the optimum.
    pub residual: f64,
}

/// Sum of squared residuals for the best (A, B) at fixed p, together with
/// those coefficients.
fn profile_residual(points: &[(usize, f64)], p: f64) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mut s_x = 0.0;
    let mut s_xx = 0.0;
    let mut s_y = 0.0;
    let mut s_xy = 0.0;
    for &(m, y) in points {
        let x = p.powi(m as i32);
        s_x += x;
        s_xx += x * x;
        s_y += y;
        s_xy += x * y;
    }
    let det = n * s_xx - s_x * s_x;
    let (a, b) = if det.abs() < 1e-14 {
        (0.0, s_y / n)
    } else {
        (
            (n * s_xy - s_x * s_y) / det,
            (s_xx * s_y - s_x * s_xy) / det,
        )
    };
    let ssr: f64 = points
        .iter()
        .map(|&(m, y)| {
            let r = y - a * p.powi(m as i32) - b;
            r * r
        })
        .sum();
    (ssr, a, b)
}

/// Least-squares fit of `y = A·p^m + B` by a grid over p followed by
/// golden-section refinement. Exact-model inputs recover p to 1e-9.
///
/// An unidentifiable decay (constant data) comes back with `a ≈ 0` rather
/// than an error; inspect the coefficients.
pub fn fit_decay(points: &[(usize, f64)]) -> Result<DecayFit> {
    let mut lengths: Vec<usize> = points.iter().map(|&(m, _)| m).collect();
    lengths.sort_unstable();
    lengths.dedup();
    if lengths.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 distinct sequence lengths, got {}",
            lengths.len()
        )));
    }

    let grid_points = 2000;
    let mut best_p = 0.0;
    let mut best_ssr = f64::INFINITY;
    for k in 0..=grid_points {
        let p = k as f64 / grid_points as f64;
        let (ssr, _, _) = profile_residual(points, p);
        if ssr < best_ssr {
            best_ssr = ssr;
            best_p = p;
        }
    }
    let step = 1.0 / grid_points as f64;
    let mut lo = (best_p - step).max(0.0);
    let mut hi = (best_p + step).min(1.0);
    // Golden-section search on the profiled residual.
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = profile_residual(points, x1).0;
    let mut f2 = profile_residual(points, x2).0;
    for _ in 0..100 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = profile_residual(points, x1).0;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = profile_residual(points, x2).0;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let p = 0.5 * (lo + hi);
    let (ssr, a, b) = profile_residual(points, p);
    if !p.is_finite() || !ssr.is_finite() {
        return Err(Error::Fit("residual did not converge".into()));
    }
    Ok(DecayFit {
        a,
        b,
        p,
        residual: ssr.sqrt(),
    })
}

/// How the survival curve is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RbMethod {
    /// Exact sequence averaging via the twirled channel (gate-independent
    /// noise only).
    ExactAverage,
    /// Protocol sampling with `n_seqs` random sequences per length.
    Sampled { n_seqs: usize, seed: u64 },
}

/// One point of a survival curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RbPoint {
    pub length: usize,
    pub survival: f64,
    pub std_error: f64,
}

/// A complete benchmarking run: per-length survivals plus the fitted decay.
#[derive(Debug, Clone, Serialize)]
pub struct RbRun {
    pub mode: String,
    pub points: Vec<RbPoint>,
    pub fit: DecayFit,
}

/// Runs a full benchmarking experiment over the given lengths and fits the
/// decay curve.
pub fn run_rb(
    gs: &GateSet,
    mode: RbMode,
    lengths: &[usize],
    method: RbMethod,
    state: &DMatrix<Complex64>,
    meas: &DMatrix<Complex64>,
) -> Result<RbRun> {
    if lengths.is_empty() {
        return Err(Error::EmptyInput("sequence lengths"));
    }
    if lengths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange {
            what: "sequence lengths (must be strictly increasing)",
            value: 0.0,
        });
    }
    let mut points = Vec::with_capacity(lengths.len());
    for (k, &m) in lengths.iter().enumerate() {
        let (survival, std_error) = match method {
            RbMethod::ExactAverage => (survival_exact(gs, mode, m, state, meas)?, 0.0),
            RbMethod::Sampled { n_seqs, seed } => {
                // One seed stream per length keeps points independent.
                survival_sampled(gs, mode, m, n_seqs, seed.wrapping_add(k as u64 * 0x9e37), state, meas)?
            }
        };
        if !(-1e-9..=1.0 + 1e-9).contains(&survival) {
            return Err(Error::OutOfRange {
                what: "survival probability",
                value: survival,
            });
        }
        points.push(RbPoint {
            length: m,
            survival,
            std_error,
        });
    }
    let fit = fit_decay(
        &points
            .iter()
            .map(|pt| (pt.length, pt.survival))
            .collect::<Vec<_>>(),
    )?;
    Ok(RbRun {
        mode: match mode {
            RbMode::Standard => "standard".to_string(),
            RbMode::Interleaved(h) => format!("interleaved({h})"),
        },
        points,
        fit,
    })
}

/// Fidelity intervals for an interleaved gate from the two fitted decays,
/// via both inversion routes.
#[derive(Debug, Clone, Serialize)]
pub struct InterleavedReport {
    /// Interval from inverting the chi00 pair bound (no unitarity input).
    pub chi00_route: BoundInterval,
    /// Interval from the unitarity-aware decay bound.
    pub unitarity_route: BoundInterval,
}

/// Combines the standard decay `p_std`, the interleaved decay `p_int`, and
/// the reference error's unitarity into fidelity intervals for the
/// interleaved gate.
pub fn interleaved_report(p_std: f64, p_int: f64, u_ref: f64, d: usize) -> Result<InterleavedReport> {
    let p_kind = MetricKind::new(Metric::DecayRate, d);
    let chi_kind = MetricKind::new(Metric::Chi00, d);
    let chi_comp = convert(p_int, p_kind, chi_kind)?;
    let chi_ref = convert(p_std, p_kind, chi_kind)?;
    let chi00_route =
        interleaved_chi00_bounds(chi_comp, chi_ref)?.convert_to(Metric::Fidelity, d)?;
    let theta_ref = angle_from_parts(p_std, u_ref);
    let unitarity_route = interleaved_decay_bounds(p_int, u_ref, theta_ref)?
        .convert_to(Metric::Fidelity, d)?;
    Ok(InterleavedReport {
        chi00_route,
        unitarity_route,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{decay_rate, fidelity, infidelity, unitarity};
    use crate::zoo;

    #[test]
    fn clifford_group_structure() {
        let gs = clifford_24();
        assert_eq!(gs.len(), 24);
        // Closure is total by construction; spot-check inverses and the
        // identity element.
        for a in 0..gs.len() {
            let inv = gs.inverse_of(a);
            assert_eq!(gs.product_of(a, inv), gs.identity_index());
            assert_eq!(gs.product_of(inv, a), gs.identity_index());
        }
        assert!((gs.frame_potential() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn twodesign_subgroup_structure() {
        let gs = twodesign_12();
        assert_eq!(gs.len(), 12);
        assert!((gs.frame_potential() - 2.0).abs() < 1e-10);
        for a in 0..gs.len() {
            let inv = gs.inverse_of(a);
            assert_eq!(gs.product_of(a, inv), gs.identity_index());
        }
    }

    #[test]
    fn twirl_of_any_channel_is_depolarizing() {
        let gs = twodesign_12();
        for seed in [1, 2, 3] {
            let ch = zoo::random_cptp(2, 4, seed).unwrap();
            let twirled = gs.twirl(&ch).unwrap();
            let expected = zoo::depolarizing(decay_rate(&ch), 2).unwrap();
            assert!(
                liouville_distance(&twirled, &expected) < 1e-10,
                "seed {seed}"
            );
        }
        let ad = zoo::amplitude_damping_qubit(0.2, 0.3).unwrap();
        let twirled = gs.twirl(&ad).unwrap();
        let expected = zoo::depolarizing(decay_rate(&ad), 2).unwrap();
        assert!(liouville_distance(&twirled, &expected) < 1e-10);
    }

    #[test]
    fn average_error_is_linear() {
        let mut gs = twodesign_12();
        // Noiseless gives the identity channel.
        let avg = gs.average_error().unwrap();
        assert!(liouville_distance(&avg, &zoo::identity(2).unwrap()) < 1e-14);

        // Constant assignment averages to itself.
        let dep = zoo::depolarizing(0.99, 2).unwrap();
        gs.set_uniform_noise(&dep).unwrap();
        assert!(liouville_distance(&gs.average_error().unwrap(), &dep) < 1e-14);

        // Mixed assignment: infidelity of the average is the average of
        // the infidelities.
        let rot = zoo::rotation_damping_qubit(1.0, 1.0, 0.07).unwrap();
        let mut expected_r = 0.0;
        for g in 0..gs.len() {
            let ch = if g % 2 == 0 { dep.clone() } else { rot.clone() };
            expected_r += infidelity(&ch);
            gs.set_gate_noise(g, ch).unwrap();
        }
        expected_r /= gs.len() as f64;
        assert!((infidelity(&gs.average_error().unwrap()) - expected_r).abs() < 1e-12);
        assert!(!gs.is_gate_independent());
    }

    #[test]
    fn exact_survival_noiseless_and_depolarizing() {
        let gs = twodesign_12();
        let rho = ground_projector(2);
        for m in [1, 5, 20] {
            let s = survival_exact(&gs, RbMode::Standard, m, &rho, &rho).unwrap();
            assert!((s - 1.0).abs() < 1e-12, "noiseless m={m}");
        }

        let mut gs = twodesign_12();
        let p = 0.97;
        gs.set_uniform_noise(&zoo::depolarizing(p, 2).unwrap()).unwrap();
        for m in [1, 2, 8, 33] {
            let s = survival_exact(&gs, RbMode::Standard, m, &rho, &rho).unwrap();
            // The inversion gate is noisy too, so the curve is
            // (p/2)·p^m + 1/2: the prefactor absorbs the extra factor and
            // the decay rate stays p.
            let expected = 0.5 * p * p.powi(m as i32) + 0.5;
            assert!((s - expected).abs() < 1e-12, "m={m}: {s} vs {expected}");
        }
        let run = run_rb(
            &gs,
            RbMode::Standard,
            &[1, 2, 4, 8, 16, 32],
            RbMethod::ExactAverage,
            &rho,
            &rho,
        )
        .unwrap();
        assert!((run.fit.p - p).abs() < 1e-9);
        assert!((run.fit.a - 0.5 * p).abs() < 1e-7);
    }

    #[test]
    fn exact_survival_requires_gate_independent_noise() {
        let mut gs = twodesign_12();
        gs.set_gate_noise(3, zoo::depolarizing(0.9, 2).unwrap()).unwrap();
        let rho = ground_projector(2);
        assert!(matches!(
            survival_exact(&gs, RbMode::Standard, 4, &rho, &rho),
            Err(Error::GateDependentNoise)
        ));
    }

    #[test]
    fn sampled_survival_noiseless_and_deterministic() {
        let gs = twodesign_12();
        let rho = ground_projector(2);
        let (mean, se) = survival_sampled(&gs, RbMode::Standard, 10, 50, 4, &rho, &rho).unwrap();
        assert!((mean - 1.0).abs() < 1e-12);
        assert!(se < 1e-12);

        let mut gs = twodesign_12();
        gs.set_uniform_noise(&zoo::rotation_damping_qubit(0.98, 0.97, 0.05).unwrap())
            .unwrap();
        let a = survival_sampled(&gs, RbMode::Standard, 16, 100, 7, &rho, &rho).unwrap();
        let b = survival_sampled(&gs, RbMode::Standard, 16, 100, 7, &rho, &rho).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampled_matches_closed_form_for_depolarizing() {
        let mut gs = twodesign_12();
        let p = 0.96;
        gs.set_uniform_noise(&zoo::depolarizing(p, 2).unwrap()).unwrap();
        let rho = ground_projector(2);
        for m in [2, 9] {
            let (mean, se) =
                survival_sampled(&gs, RbMode::Standard, m, 500, 11, &rho, &rho).unwrap();
            let expected = 0.5 * p * p.powi(m as i32) + 0.5;
            // Depolarizing noise is twirl-invariant so every sequence has
            // the same survival; the sampled estimate is exact.
            assert!((mean - expected).abs() < 3.0 * se + 1e-12, "m={m}");
        }
    }

    #[test]
    fn sampled_tracks_exact_average_across_configurations() {
        let rho = ground_projector(2);
        let mut worst: f64 = 0.0;
        let mut configs = 0;
        for seed in 0..25 {
            let noise = if seed % 2 == 0 {
                zoo::random_with_targets(
                    &zoo::EnsembleSpec::new(2, 600 + seed).fidelity(0.99),
                )
                .unwrap()
            } else {
                zoo::rotation_damping_qubit(0.99, 0.985, 0.01 * seed as f64).unwrap()
            };
            for (k, mode) in [RbMode::Standard, RbMode::Interleaved(0)].iter().enumerate() {
                let mut gs = twodesign_12();
                gs.set_uniform_noise(&noise).unwrap();
                let m = 4 + (seed as usize % 5);
                let exact = survival_exact(&gs, *mode, m, &rho, &rho).unwrap();
                let (mean, se) = survival_sampled(
                    &gs,
                    *mode,
                    m,
                    400,
                    7000 + seed * 2 + k as u64,
                    &rho,
                    &rho,
                )
                .unwrap();
                if se > 0.0 {
                    worst = worst.max((mean - exact).abs() / se);
                }
                configs += 1;
            }
        }
        assert_eq!(configs, 50);
        assert!(worst <= 4.0, "worst z {worst}");
    }

    #[test]
    fn interleaved_exact_decay_matches_twirled_composite() {
        let mut gs = twodesign_12();
        let noise = zoo::rotation_damping_qubit(0.995, 0.99, 0.02).unwrap();
        gs.set_uniform_noise(&noise).unwrap();
        let h = 3;
        let composite = gs.noise(h).compose(&noise).unwrap();
        let expected_p = decay_rate(&gs.twirl(&composite).unwrap());

        let rho = ground_projector(2);
        let lengths: Vec<usize> = (1..=12).collect();
        let run = run_rb(
            &gs,
            RbMode::Interleaved(h),
            &lengths,
            RbMethod::ExactAverage,
            &rho,
            &rho,
        )
        .unwrap();
        assert!(
            (run.fit.p - expected_p).abs() < 1e-10,
            "{} vs {expected_p}",
            run.fit.p
        );
    }

    #[test]
    fn fit_recovers_exact_models() {
        for &p in &[0.8f64, 0.9, 0.97, 0.995, 0.9999] {
            // Identifiability needs lengths reaching m·(1−p) = O(1), so the
            // grid scales with the expected decay constant.
            let mut lengths = vec![];
            let mut m = 1usize;
            while (m as f64) * (1.0 - p) < 6.0 && m < (1 << 20) {
                lengths.push(m);
                m *= 2;
            }
            let points: Vec<(usize, f64)> = lengths
                .iter()
                .map(|&m| (m, 0.5 * p.powi(m as i32) + 0.5))
                .collect();
            let fit = fit_decay(&points).unwrap();
            assert!((fit.p - p).abs() < 1e-9, "p={p}: fitted {}", fit.p);
            assert!((fit.a - 0.5).abs() < 1e-7);
            assert!((fit.b - 0.5).abs() < 1e-7);
            assert!(fit.residual < 1e-9);
        }
    }

    #[test]
    fn fit_flags_degenerate_inputs() {
        // Constant data: p unidentifiable, reported through a ≈ 0.
        let points: Vec<(usize, f64)> = (1..=10).map(|m| (m, 1.0)).collect();
        let fit = fit_decay(&points).unwrap();
        assert!(fit.a.abs() < 1e-9);
        assert!((fit.b - 1.0).abs() < 1e-9);

        // Too few distinct lengths.
        assert!(fit_decay(&[(3, 0.9), (3, 0.8), (3, 0.7)]).is_err());
        assert!(fit_decay(&[(1, 0.9), (2, 0.8)]).is_err());
    }

    #[test]
    fn fit_from_noisy_samples_recovers_truth() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};
        let p = 0.99f64;
        let sigma = 0.002;
        let normal = Normal::new(0.0, sigma).unwrap();
        let lengths: Vec<usize> = DEFAULT_LENGTHS.to_vec();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        // Propagated uncertainty on p from the linearized model.
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let points: Vec<(usize, f64)> = lengths
                .iter()
                .map(|&m| {
                    (
                        m,
                        0.5 * p.powi(m as i32) + 0.5 + normal.sample(&mut rng),
                    )
                })
                .collect();
            let fit = fit_decay(&points).unwrap();
            let sigma_p = propagated_p_uncertainty(&points, fit, sigma);
            worst = worst.max((fit.p - p).abs() / sigma_p);
        }
        assert!(worst <= 3.0, "worst normalized error {worst}");
    }

    fn propagated_p_uncertainty(points: &[(usize, f64)], fit: DecayFit, sigma: f64) -> f64 {
        // Gauss-Newton covariance for the parameters (p, A, B).
        let mut jtj = [[0.0f64; 3]; 3];
        for &(m, _) in points {
            let mf = m as f64;
            let row = [
                fit.a * mf * fit.p.powi(m as i32 - 1),
                fit.p.powi(m as i32),
                1.0,
            ];
            for i in 0..3 {
                for j in 0..3 {
                    jtj[i][j] += row[i] * row[j];
                }
            }
        }
        let m = nalgebra::Matrix3::from_fn(|i, j| jtj[i][j]);
        let inv = m.try_inverse().expect("invertible normal equations");
        (inv[(0, 0)]).sqrt() * sigma
    }

    #[test]
    fn run_rb_validates_lengths() {
        let gs = twodesign_12();
        let rho = ground_projector(2);
        assert!(run_rb(
            &gs,
            RbMode::Standard,
            &[4, 2, 8],
            RbMethod::ExactAverage,
            &rho,
            &rho
        )
        .is_err());
        assert!(run_rb(&gs, RbMode::Standard, &[], RbMethod::ExactAverage, &rho, &rho).is_err());
    }

    #[test]
    fn interleaved_report_collapses_for_depolarizing_reference() {
        // Noiseless interleaved gate over a depolarizing reference: the
        // unitarity route pins the gate fidelity exactly.
        let p_ref = 0.99;
        let report = interleaved_report(p_ref, p_ref, p_ref * p_ref, 2).unwrap();
        assert!(report.unitarity_route.width() < 1e-9);
        assert!((report.unitarity_route.lower - 1.0).abs() < 1e-9);
        // The chi00 route stays wide.
        assert!(report.chi00_route.width() > 1e-3);
    }

    #[test]
    fn unitarity_of_average_error_feeds_report() {
        // End-to-end smoke test of the report plumbing on exact decays.
        let mut gs = twodesign_12();
        let noise = zoo::rotation_damping_qubit(0.996, 0.995, 0.015).unwrap();
        gs.set_uniform_noise(&noise).unwrap();
        let rho = ground_projector(2);
        let lengths: Vec<usize> = vec![1, 2, 4, 8, 16, 32];
        let h = 5;
        let std_run = run_rb(&gs, RbMode::Standard, &lengths, RbMethod::ExactAverage, &rho, &rho)
            .unwrap();
        let int_run = run_rb(
            &gs,
            RbMode::Interleaved(h),
            &lengths,
            RbMethod::ExactAverage,
            &rho,
            &rho,
        )
        .unwrap();
        let report =
            interleaved_report(std_run.fit.p, int_run.fit.p, unitarity(&noise), 2).unwrap();
        let truth = fidelity(gs.noise(h));
        assert!(report.chi00_route.contains(truth, 1e-9));
        assert!(report.unitarity_route.contains(truth, 1e-9));
        assert!(report.unitarity_route.width() <= report.chi00_route.width());
    }
}
