//! Monte-Carlo soundness sweeps for every inequality in the crate.
//!
//! Each sweep draws adversarial random inputs, evaluates the corresponding
//! bound, and records the worst signed violation (positive means the bound
//! was broken; negative means the worst trial still had margin). Sweeps are
//! deterministic for a fixed seed and independent of the number of worker
//! threads: every trial derives its own generator from the master seed.
//!
//! The `halfwidth_scale` knob shrinks the certified intervals and exists so
//! the harness can prove it detects violations; anything below 1 makes the
//! sweeps fail loudly.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    chi00_pair_bounds, chi00_seq_lower, composite_decay_bound, decay_pair_bounds,
    interleaved_decay_bounds,
};
use crate::channel::Channel;
use crate::error::Result;
use crate::metrics::{angle_from_parts, chi00, decay_rate, unitarity};
use crate::realmat::{
    operator_norm, pair_trace_bounds, product_trace_bound, saturating_rotation,
    unital_block_sigma_check,
};
use crate::zoo::{
    self, conjugate_by_unitary, haar_orthogonal, haar_unitary, item_seed, random_cptp_with,
};

/// Parameters shared by all sweeps.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub trials: u64,
    pub seed: u64,
    /// Longest composite sequence exercised by the sequence sweeps.
    pub max_m: usize,
    /// Interval shrink factor for harness self-tests; 1.0 in normal use.
    pub halfwidth_scale: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            trials: 10_000,
            seed: 1,
            max_m: 8,
            halfwidth_scale: 1.0,
        }
    }
}

impl SweepConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        SweepConfig {
            trials,
            seed,
            ..SweepConfig::default()
        }
    }
}

/// Outcome of one inequality sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub inequality: String,
    pub trials: u64,
    /// Worst signed violation across trials; positive means broken.
    pub max_violation: f64,
    /// Threshold the violation is judged against.
    pub tolerance: f64,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.max_violation <= self.tolerance
    }
}

fn max_over_trials<F>(trials: u64, per_trial: F) -> f64
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .map(per_trial)
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

fn random_channel(d: usize, rng: &mut ChaCha8Rng) -> Channel {
    let rank = rng.random_range(1..=d * d);
    random_cptp_with(d, rank, rng).expect("random channel construction")
}

/// chi00 of a random composite pair stays inside the pair bound.
pub fn sweep_chi00_pair(d: usize, cfg: &SweepConfig) -> SweepReport {
    let scale = cfg.halfwidth_scale;
    let max_violation = max_over_trials(cfg.trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(item_seed(cfg.seed, i));
        let x = random_channel(d, &mut rng);
        let y = random_channel(d, &mut rng);
        let measured = chi00(&x.compose(&y).expect("equal dims"));
        let b = chi00_pair_bounds(chi00(&x), chi00(&y)).expect("valid chi00");
        let center = 0.5 * (b.lower + b.upper);
        let half = scale * 0.5 * b.width();
        (center - half - measured).max(measured - center - half)
    });
    SweepReport {
        inequality: format!("chi00-pair-d{d}"),
        trials: cfg.trials,
        max_violation,
        tolerance: 1e-9,
    }
}

/// chi00 of a random composite sequence satisfying the angle condition
/// stays above the sequence lower bound.
pub fn sweep_chi00_sequence(d: usize, cfg: &SweepConfig) -> SweepReport {
    let scale = cfg.halfwidth_scale;
    let max_m = cfg.max_m.max(2);
    let max_violation = max_over_trials(cfg.trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(item_seed(cfg.seed, i).wrapping_add(0x5e9));
        let m = rng.random_range(2..=max_m);
        // Split an angle budget below π/2 across the sequence, then build
        // channels hitting those chi00 values exactly as mixtures of the
        // identity with a random channel.
        let budget = rng.random::<f64>() * std::f64::consts::FRAC_PI_2 * 0.999;
        let mut weights: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w *= budget / total;
        }
        let mut channels = Vec::with_capacity(m);
        for &angle in &weights {
            let target_chi = angle.cos().powi(2);
            let ch = loop {
                let raw = random_channel(d, &mut rng);
                let chi_raw = chi00(&raw);
                if chi_raw < target_chi {
                    let eps = (1.0 - target_chi) / (1.0 - chi_raw);
                    let n = d * d;
                    let l = DMatrix::<f64>::identity(n, n) * (1.0 - eps)
                        + raw.liouville() * eps;
                    break Channel::from_liouville(l, raw.basis().clone())
                        .expect("mixture is trace preserving");
                }
            };
            channels.push(ch);
        }
        let chis: Vec<f64> = channels.iter().map(chi00).collect();
        let b = chi00_seq_lower(&chis).expect("valid chi00 sequence");
        debug_assert!(b.assumptions.is_empty(), "angle budget leaked above π/2");
        let measured = chi00(&Channel::compose_seq(&channels).expect("equal dims"));
        // Shrinking moves the lower endpoint up towards the measured value.
        scale * b.lower + (1.0 - scale) - measured
    });
    SweepReport {
        inequality: format!("chi00-sequence-d{d}"),
        trials: cfg.trials,
        max_violation,
        tolerance: 1e-9,
    }
}

/// Normalized composite decay rate of a random pair stays inside
/// [cos(θx+θy), cos(θx−θy)].
pub fn sweep_decay_pair(d: usize, cfg: &SweepConfig) -> SweepReport {
    let scale = cfg.halfwidth_scale;
    let max_violation = max_over_trials(cfg.trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(item_seed(cfg.seed, i).wrapping_add(0xdec));
        let x = random_channel(d, &mut rng);
        let y = random_channel(d, &mut rng);
        let (px, ux) = (decay_rate(&x), unitarity(&x));
        let (py, uy) = (decay_rate(&y), unitarity(&y));
        let measured = decay_rate(&x.compose(&y).expect("equal dims"));
        let b = decay_pair_bounds(px, ux, py, uy).expect("valid parameters");
        // Judge on the normalized ratio scale.
        let norm = (ux * uy).sqrt();
        let ratio = measured / norm;
        let center = 0.5 * (b.lower + b.upper) / norm;
        let half = scale * 0.5 * b.width() / norm;
        (center - half - ratio).max(ratio - center - half)
    });
    SweepReport {
        inequality: format!("decay-pair-d{d}"),
        trials: cfg.trials,
        max_violation,
        tolerance: 1e-9,
    }
}

/// Equal-parameter ensembles (unitary conjugates of a fixed channel) keep
/// their composite decay within the fold bound.
pub fn sweep_composite_decay(d: usize, cfg: &SweepConfig, unital: bool) -> SweepReport {
    let scale = cfg.halfwidth_scale;
    let max_m = cfg.max_m.max(2);
    let max_violation = max_over_trials(cfg.trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(item_seed(cfg.seed, i).wrapping_add(0xf01d));
        let base = if unital {
            zoo::random_unital(d, 4, item_seed(cfg.seed, i).wrapping_add(0xbb))
                .expect("unital base channel")
        } else {
            random_channel(d, &mut rng)
        };
        let m = rng.random_range(2..=max_m);
        let members: Vec<Channel> = (0..m)
            .map(|_| {
                let u = haar_unitary(d, &mut rng);
                conjugate_by_unitary(&base, &u).expect("conjugation")
            })
            .collect();
        let p = decay_rate(&base);
        let u = unitarity(&base);
        let composite = Channel::compose_seq(&members).expect("equal dims");
        let deviation = (decay_rate(&composite) - p.powi(m as i32)).abs();
        let bound = composite_decay_bound(p, u, m, d, unital).expect("valid parameters");
        deviation - scale * bound.halfwidth
    });
    let label = if unital { "unital" } else { "general" };
    SweepReport {
        inequality: format!("composite-decay-{label}-d{d}"),
        trials: cfg.trials,
        max_violation,
        tolerance: 1e-9,
    }
}

/// The interleaved inversion interval contains the individual gate's decay
/// rate for random gate/reference pairs.
pub fn sweep_interleaved_decay(d: usize, cfg: &SweepConfig) -> SweepReport {
    let scale = cfg.halfwidth_scale;
    let max_violation = max_over_trials(cfg.trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(item_seed(cfg.seed, i).wrapping_add(0x1417));
        let gate = random_channel(d, &mut rng);
        let reference = random_channel(d, &mut rng);
        let composite = gate.compose(&reference).expect("equal dims");
        let u_ref = unitarity(&reference);
        let theta_ref = angle_from_parts(decay_rate(&reference), u_ref);
        let b = interleaved_decay_bounds(decay_rate(&composite), u_ref, theta_ref)
            .expect("valid reference");
        let center = 0.5 * (b.lower + b.upper);
        let half = scale * 0.5 * b.width();
        let measured = decay_rate(&gate);
        (center - half - measured).max(measured - center - half)
    });
    SweepReport {
        inequality: format!("interleaved-decay-d{d}"),
        trials: cfg.trials,
        max_violation,
        tolerance: 1e-9,
    }
}

/// The normalized product trace of Gaussian real matrix pairs stays inside
/// [cos(θ1+θ2), cos(θ1−θ2)].
pub fn sweep_pair_trace_real(d: usize, cfg: &SweepConfig) -> SweepReport {
    let scale = cfg.halfwidth_scale;
    let max_violation = max_over_trials(cfg.trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(item_seed(cfg.seed, i).wrapping_add(0x6a55));
        let m1 = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let m2 = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let (lower, value, upper) = pair_trace_bounds(&m1, &m2).expect("nonzero matrices");
        let center = 0.5 * (lower + upper);
        let half = scale * 0.5 * (upper - lower);
        (center - half - value).max(value - center - half)
    });
    SweepReport {
        inequality: format!("pair-trace-d{d}"),
        trials: cfg.trials,
        max_violation,
        tolerance: 1e-9,
    }
}

/// The block-rotation family attains the pair-trace endpoints exactly.
pub fn sweep_saturation_real(d: usize, _cfg: &SweepConfig) -> SweepReport {
    debug_assert!(d % 2 == 0);
    let grid = 20usize;
    let mut worst = f64::NEG_INFINITY;
    let mut trials = 0u64;
    for i in 0..grid {
        for j in 0..grid {
            let theta1 = (i as f64 + 0.5) / grid as f64 * std::f64::consts::FRAC_PI_2;
            let theta2 = (j as f64 + 0.5) / grid as f64 * std::f64::consts::FRAC_PI_2;
            let norm1 = 0.5 + i as f64 * 0.1;
            let norm2 = 0.5 + j as f64 * 0.1;
            let m1 = saturating_rotation(norm1, theta1, d).expect("even dimension");
            let m2 = saturating_rotation(norm2, theta2, d).expect("even dimension");
            let (lower, value, _) = pair_trace_bounds(&m1, &m2).expect("nonzero");
            worst = worst.max((value - lower).abs());
            let m2_flip = saturating_rotation(norm2, -theta2, d).expect("even dimension");
            let (_, value, upper) = pair_trace_bounds(&m1, &m2_flip).expect("nonzero");
            worst = worst.max((value - upper).abs());
            trials += 2;
        }
    }
    SweepReport {
        inequality: format!("pair-trace-saturation-d{d}"),
        trials,
        max_violation: worst,
        tolerance: 1e-12,
    }
}

/// Orthogonal-conjugate families of a fixed real matrix satisfy the
/// telescoping product bound (both prefactor forms).
pub fn sweep_product_trace_real(d: usize, cfg: &SweepConfig) -> SweepReport {
    let scale = cfg.halfwidth_scale;
    let max_m = cfg.max_m.max(2);
    let max_violation = max_over_trials(cfg.trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(item_seed(cfg.seed, i).wrapping_add(0x9a0d));
        let mut base = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        // Normalize to u ≤ 1 and orient the trace nonnegative.
        let target_u = 0.2 + 0.8 * rng.random::<f64>();
        base *= (d as f64 * target_u).sqrt() / base.norm();
        if base.trace() < 0.0 {
            base = -base;
        }
        let m = rng.random_range(2..=max_m);
        let mats: Vec<DMatrix<f64>> = (0..m)
            .map(|_| {
                let o = haar_orthogonal(d, &mut rng);
                &o * &base * o.transpose()
            })
            .collect();
        let mut sigma: f64 = 0.0;
        let mut prefix = DMatrix::<f64>::identity(d, d);
        for mat in &mats {
            prefix = &prefix * mat;
            sigma = sigma.max(operator_norm(&prefix));
        }
        let out = product_trace_bound(&mats, sigma).expect("hypotheses hold by construction");
        (out.deviation - scale * out.bound_geometric)
            .max(out.bound_geometric - scale * out.bound_binomial)
    });
    SweepReport {
        inequality: format!("product-trace-d{d}"),
        trials: cfg.trials,
        max_violation,
        tolerance: 1e-9,
    }
}

/// Largest singular value of the unital block: √(d/2) for random CPTP
/// channels, 1 for random unital channels.
pub fn sweep_unital_sigma(d: usize, cfg: &SweepConfig) -> Vec<SweepReport> {
    let general = max_over_trials(cfg.trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(item_seed(cfg.seed, i).wrapping_add(0x51a));
        let ch = random_channel(d, &mut rng);
        let check = unital_block_sigma_check(&ch);
        check.sigma_max - check.general_bound
    });
    let unital = max_over_trials(cfg.trials, |i| {
        let ch = zoo::random_unital(d, 4, item_seed(cfg.seed, i).wrapping_add(0x51b))
            .expect("unital channel");
        let check = unital_block_sigma_check(&ch);
        debug_assert!(check.unital);
        check.sigma_max - 1.0
    });
    vec![
        SweepReport {
            inequality: format!("unital-block-sigma-general-d{d}"),
            trials: cfg.trials,
            max_violation: general,
            tolerance: 1e-9,
        },
        SweepReport {
            inequality: format!("unital-block-sigma-unital-d{d}"),
            trials: cfg.trials,
            max_violation: unital,
            tolerance: 1e-9,
        },
    ]
}

/// All channel-level bound sweeps over the given dimensions.
pub fn run_bounds_sweeps(dims: &[usize], cfg: &SweepConfig) -> Result<Vec<SweepReport>> {
    let mut reports = Vec::new();
    for &d in dims {
        reports.push(sweep_chi00_pair(d, cfg));
        reports.push(sweep_chi00_sequence(d, cfg));
        reports.push(sweep_decay_pair(d, cfg));
        reports.push(sweep_composite_decay(d, cfg, false));
        reports.push(sweep_composite_decay(d, cfg, true));
        reports.push(sweep_interleaved_decay(d, cfg));
        reports.extend(sweep_unital_sigma(d, cfg));
    }
    Ok(reports)
}

/// All real-matrix sweeps over the given dimensions.
pub fn run_appendix_sweeps(dims: &[usize], cfg: &SweepConfig) -> Result<Vec<SweepReport>> {
    let mut reports = Vec::new();
    for &d in dims {
        reports.push(sweep_pair_trace_real(d, cfg));
        if d % 2 == 0 {
            reports.push(sweep_saturation_real(d, cfg));
        }
        reports.push(sweep_product_trace_real(d, cfg));
    }
    Ok(reports)
}
