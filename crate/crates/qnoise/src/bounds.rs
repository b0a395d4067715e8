//! Certified intervals for metrics of composed channels.
//!
//! All bounds are closed-form functions of the component metrics. Intervals
//! are clamped to the metric's valid range and carry assumption flags
//! instead of failing when a hypothesis is violated, so callers always get
//! a valid (possibly trivial) interval.
//!
//! The pair and sequence bounds on chi00 are conveniently stated in angle
//! space: with `angle(X) = arccos √chi00(X)`, composing two channels can
//! only move the angle within `[|a − b|, a + b]`, and both endpoints are
//! attained by commuting phase unitaries.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{angle_from_parts, convert, Metric, MetricKind};
use crate::realmat::geometric_sum_s;

/// Flag recorded when the angle-sum hypothesis of a lower bound fails and
/// the trivial endpoint is reported instead.
pub const FLAG_ANGLE_CONDITION_VIOLATED: &str = "angle condition violated";
/// Flag recorded when a bound uses the unital improvement.
pub const FLAG_UNITAL: &str = "unital";

/// A certified `[lower, upper]` interval for one metric kind.
#[derive(Debug, Clone, Serialize)]
pub struct BoundInterval {
    #[serde(skip)]
    pub metric: Metric,
    pub lower: f64,
    pub upper: f64,
    /// Which bound produced the interval.
    pub source: &'static str,
    /// Hypotheses that were applied or found violated.
    pub assumptions: Vec<String>,
}

impl BoundInterval {
    fn new(metric: Metric, lower: f64, upper: f64, source: &'static str) -> Self {
        let (lo, hi) = metric.range();
        let lower = lower.clamp(lo, hi);
        let upper = upper.clamp(lo, hi);
        debug_assert!(lower <= upper + 1e-15);
        BoundInterval {
            metric,
            lower: lower.min(upper),
            upper,
            source,
            assumptions: Vec::new(),
        }
    }

    fn flag(mut self, flag: &str) -> Self {
        self.assumptions.push(flag.to_string());
        self
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.lower - slack && value <= self.upper + slack
    }

    /// Maps the interval through the affine metric conversions; the maps
    /// are monotone (order-reversing between fidelity-like and infidelity),
    /// so endpoints map to endpoints.
    pub fn convert_to(&self, to: Metric, dim: usize) -> Result<BoundInterval> {
        let from_kind = MetricKind::new(self.metric, dim);
        let to_kind = MetricKind::new(to, dim);
        let a = convert(self.lower, from_kind, to_kind)?;
        let b = convert(self.upper, from_kind, to_kind)?;
        let mut out = BoundInterval::new(to, a.min(b), a.max(b), self.source);
        out.assumptions = self.assumptions.clone();
        Ok(out)
    }
}

fn check_unit_range(what: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange { what, value });
    }
    Ok(())
}

/// chi00 angle `arccos √chi00`, the quantity that adds under composition.
pub fn chi00_angle(chi00: f64) -> f64 {
    chi00.clamp(0.0, 1.0).sqrt().acos()
}

/// Two-sided bound on `chi00(XY)` from the component values.
///
/// In angle space the endpoints are `cos²(a+b)` and `cos²(a−b)` — the
/// centered form `χx·χy + (1−χx)(1−χy) ± 2√(χx·χy(1−χx)(1−χy))` —
/// and commuting phase unitaries attain both, so the interval cannot be
/// narrowed. The lower endpoint only binds while `a + b ≤ π/2`; past that
/// the cos² wraps upward and the true chi00 can be arbitrarily small
/// (a completely depolarizing pair at d = 3 breaks the centered form), so
/// the endpoint degrades to 0 and the interval is flagged.
pub fn chi00_pair_bounds(chi_x: f64, chi_y: f64) -> Result<BoundInterval> {
    check_unit_range("chi00 of first channel", chi_x)?;
    check_unit_range("chi00 of second channel", chi_y)?;
    let a = chi00_angle(chi_x);
    let b = chi00_angle(chi_y);
    let upper = (a - b).cos().powi(2);
    if a + b <= std::f64::consts::FRAC_PI_2 {
        Ok(BoundInterval::new(
            Metric::Chi00,
            (a + b).cos().powi(2),
            upper,
            "pair-composition",
        ))
    } else {
        Ok(
            BoundInterval::new(Metric::Chi00, 0.0, upper, "pair-composition")
                .flag(FLAG_ANGLE_CONDITION_VIOLATED),
        )
    }
}

/// Lower bound on `chi00` of a composed sequence.
///
/// Valid when the angles sum to at most π/2; otherwise the lower endpoint
/// degrades to 0 and the interval is flagged.
pub fn chi00_seq_lower(chis: &[f64]) -> Result<BoundInterval> {
    if chis.is_empty() {
        return Err(Error::EmptyInput("chi00 sequence"));
    }
    for &chi in chis {
        check_unit_range("chi00 in sequence", chi)?;
    }
    let angle_sum: f64 = chis.iter().map(|&c| chi00_angle(c)).sum();
    if angle_sum <= std::f64::consts::FRAC_PI_2 {
        let lower = angle_sum.cos().powi(2);
        Ok(BoundInterval::new(
            Metric::Chi00,
            lower,
            1.0,
            "sequence-composition",
        ))
    } else {
        Ok(
            BoundInterval::new(Metric::Chi00, 0.0, 1.0, "sequence-composition")
                .flag(FLAG_ANGLE_CONDITION_VIOLATED),
        )
    }
}

/// Worst-case growth of the infidelity over `m` equal-infidelity steps.
#[derive(Debug, Clone, Serialize)]
pub struct InfidelityGrowth {
    /// Exact upper bound on the composite infidelity.
    pub upper: f64,
    /// The leading-order value `m²r`.
    pub leading_order: f64,
    /// Whether the angle-sum hypothesis held; if not, `upper` is the
    /// largest infidelity compatible with chi00 ∈ [0, 1].
    pub angle_condition_met: bool,
}

/// Upper bound on `r(X_1…X_m)` for `m` channels of equal infidelity `r`,
/// which scales as `m²r` to leading order.
pub fn infidelity_growth_upper(r: f64, m: usize, d: usize) -> Result<InfidelityGrowth> {
    let max_r = d as f64 / (d as f64 + 1.0);
    if !(0.0..=max_r).contains(&r) {
        return Err(Error::OutOfRange {
            what: "infidelity",
            value: r,
        });
    }
    if m < 1 {
        return Err(Error::OutOfRange {
            what: "sequence length",
            value: m as f64,
        });
    }
    let chi = convert(
        r,
        MetricKind::new(Metric::Infidelity, d),
        MetricKind::new(Metric::Chi00, d),
    )?;
    let angle = chi00_angle(chi) * m as f64;
    let leading_order = (m * m) as f64 * r;
    if angle <= std::f64::consts::FRAC_PI_2 {
        let chi_lower = angle.cos().powi(2);
        let upper = convert(
            chi_lower,
            MetricKind::new(Metric::Chi00, d),
            MetricKind::new(Metric::Infidelity, d),
        )?;
        Ok(InfidelityGrowth {
            upper,
            leading_order,
            angle_condition_met: true,
        })
    } else {
        Ok(InfidelityGrowth {
            upper: max_r,
            leading_order,
            angle_condition_met: false,
        })
    }
}

fn check_decay_unitarity_pair(p: f64, u: f64) -> Result<()> {
    if !(u > 0.0 && u <= 1.0 + 1e-12) {
        return Err(Error::OutOfRange {
            what: "unitarity",
            value: u,
        });
    }
    if p * p > u + 1e-9 {
        return Err(Error::OutOfRange {
            what: "decay rate (p² must not exceed u)",
            value: p,
        });
    }
    Ok(())
}

/// Two-sided bound on `p(XY)` from the decay rates and unitarities of the
/// components: `p(XY)/√(u_x u_y)` lies between `cos(θx + θy)` and
/// `cos(θx − θy)`.
pub fn decay_pair_bounds(p_x: f64, u_x: f64, p_y: f64, u_y: f64) -> Result<BoundInterval> {
    check_decay_unitarity_pair(p_x, u_x)?;
    check_decay_unitarity_pair(p_y, u_y)?;
    let theta_x = angle_from_parts(p_x, u_x);
    let theta_y = angle_from_parts(p_y, u_y);
    let scale = (u_x * u_y).sqrt();
    Ok(BoundInterval::new(
        Metric::DecayRate,
        scale * (theta_x + theta_y).cos(),
        scale * (theta_x - theta_y).cos(),
        "decay-pair",
    ))
}

/// Halfwidths for the decay rate of `m` equal-parameter channels around
/// `p^m`.
#[derive(Debug, Clone, Serialize)]
pub struct CompositeDecayBound {
    /// The reference value `p^m`.
    pub center: f64,
    /// Halfwidth with the binomial prefactor `C(m,2)`.
    pub halfwidth: f64,
    /// Tighter halfwidth using the geometric sum `S(p, m) ≤ C(m,2)`.
    pub halfwidth_geometric: f64,
    /// Singular-value prefactor used: √(d/2) in general, 1 for unital
    /// ensembles.
    pub sigma: f64,
}

/// Bound on `|p(X_1…X_m) − p^m|` for `m` channels sharing decay rate `p`
/// and unitarity `u`. The prefactor improves from √(d/2) to 1 when every
/// channel is unital.
pub fn composite_decay_bound(
    p: f64,
    u: f64,
    m: usize,
    d: usize,
    unital: bool,
) -> Result<CompositeDecayBound> {
    check_decay_unitarity_pair(p, u)?;
    if m < 1 {
        return Err(Error::OutOfRange {
            what: "sequence length",
            value: m as f64,
        });
    }
    let theta = angle_from_parts(p, u);
    let sigma = if unital { 1.0 } else { (d as f64 / 2.0).sqrt() };
    let sin2 = theta.sin().powi(2);
    let binom = (m * (m - 1)) as f64 / 2.0;
    // The geometric-sum route bounds the telescoping terms by |p| powers.
    let s = geometric_sum_s(p.abs().min(1.0), m);
    Ok(CompositeDecayBound {
        center: p.powi(m as i32),
        halfwidth: sigma * binom * u * sin2,
        halfwidth_geometric: sigma * s * u * sin2,
        sigma,
    })
}

/// Upper bound on the composite infidelity of `m` equal channels in terms
/// of the infidelity and coherence angle:
/// `m(r − (d−1)θ²/(2d)) + m²(d−1)θ²/(2d)`.
///
/// Valid for unital channels or single-qubit operations; the caller asserts
/// that hypothesis. At θ = 0 this is the linear regime `m·r`; at
/// `(d−1)θ² = 2dr` it reproduces the quadratic regime `m²r`.
pub fn intermediate_regime_upper(r: f64, theta: f64, d: usize, m: usize) -> f64 {
    let df = d as f64;
    let mf = m as f64;
    let coherent = (df - 1.0) * theta * theta / (2.0 * df);
    mf * (r - coherent) + mf * mf * coherent
}

/// Inverts the pair bound to recover the chi00 of an individual gate from
/// the composite and reference values, working in angle space.
pub fn interleaved_chi00_bounds(chi_composite: f64, chi_reference: f64) -> Result<BoundInterval> {
    check_unit_range("composite chi00", chi_composite)?;
    check_unit_range("reference chi00", chi_reference)?;
    let a = chi00_angle(chi_composite);
    let b = chi00_angle(chi_reference);
    let upper = (a - b).cos().powi(2);
    if a + b <= std::f64::consts::FRAC_PI_2 {
        Ok(BoundInterval::new(
            Metric::Chi00,
            (a + b).cos().powi(2),
            upper,
            "interleaved-chi00",
        ))
    } else {
        Ok(
            BoundInterval::new(Metric::Chi00, 0.0, upper, "interleaved-chi00")
                .flag(FLAG_ANGLE_CONDITION_VIOLATED),
        )
    }
}

/// Width (in infidelity) of the interleaved estimate when the composite
/// infidelity is about twice the reference infidelity: `4√2·r_ref`.
pub fn interleaved_uncertainty_naive(r_ref: f64) -> f64 {
    4.0 * std::f64::consts::SQRT_2 * r_ref
}

/// Trivial bound `r(E_h) ≤ |G|·r(E)` from the linearity of the infidelity
/// in the gate-set average; requires no interleaved experiment.
pub fn naive_group_bound(r_avg: f64, group_size: usize) -> f64 {
    group_size as f64 * r_avg
}

/// Unitarity-aware bound on the decay rate of an individual gate from the
/// composite decay rate and the reference's (u, θ):
/// `|p(X) − γ·cosθ_y| ≤ sinθ_y·√(1−γ²)` with `γ = p(XY)/√u_y`.
pub fn interleaved_decay_bounds(
    p_composite: f64,
    u_reference: f64,
    theta_reference: f64,
) -> Result<BoundInterval> {
    if !(u_reference > 0.0 && u_reference <= 1.0 + 1e-12) {
        return Err(Error::OutOfRange {
            what: "reference unitarity",
            value: u_reference,
        });
    }
    let gamma = (p_composite / u_reference.sqrt()).clamp(-1.0, 1.0);
    let center = gamma * theta_reference.cos();
    let halfwidth = theta_reference.sin() * (1.0 - gamma * gamma).sqrt();
    Ok(BoundInterval::new(
        Metric::DecayRate,
        center - halfwidth,
        center + halfwidth,
        "interleaved-decay",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{chi00, decay_rate, unitarity};
    use crate::zoo;

    #[test]
    fn pair_bounds_examples() {
        let b = chi00_pair_bounds(1.0, 1.0).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));

        let b = chi00_pair_bounds(0.3f64.cos().powi(2), 0.5f64.cos().powi(2)).unwrap();
        assert!((b.lower - 0.8f64.cos().powi(2)).abs() < 1e-12);
        assert!((b.upper - 0.2f64.cos().powi(2)).abs() < 1e-12);
        assert!((b.lower - 0.4854002).abs() < 1e-6);
        assert!((b.upper - 0.9605305).abs() < 1e-6);

        let b = chi00_pair_bounds(0.5, 0.5).unwrap();
        assert!(b.lower.abs() < 1e-30);
        assert_eq!(b.upper, 1.0);

        // Past the π/2 angle sum the lower endpoint is trivial and flagged;
        // a completely depolarizing pair at d = 3 sits far below the
        // centered form's wrapped endpoint.
        let chi_dep = 1.0 / 9.0;
        let b = chi00_pair_bounds(chi_dep, chi_dep).unwrap();
        assert_eq!(b.lower, 0.0);
        assert_eq!(b.assumptions, vec![FLAG_ANGLE_CONDITION_VIOLATED]);
        assert!(b.contains(chi_dep, 0.0));

        assert!(chi00_pair_bounds(1.2, 0.5).is_err());
    }

    #[test]
    fn pair_bound_attained_by_phase_unitaries() {
        let (phi, th) = (0.3, 0.5);
        let x = zoo::phase_unitary(phi, 2).unwrap();
        let y = zoo::phase_unitary(th, 2).unwrap();
        let composite = x.compose(&y).unwrap();
        let b = chi00_pair_bounds(chi00(&x), chi00(&y)).unwrap();
        assert!((chi00(&composite) - b.lower).abs() < 1e-12);
        let y_neg = zoo::phase_unitary(-th, 2).unwrap();
        let composite = x.compose(&y_neg).unwrap();
        assert!((chi00(&composite) - b.upper).abs() < 1e-12);
    }

    #[test]
    fn pair_bound_width_monotonicity() {
        // With one channel noiseless the composite chi00 is pinned, for
        // every value of the other input.
        for k in 0..=40 {
            let chi = k as f64 / 40.0;
            assert!(chi00_pair_bounds(chi, 1.0).unwrap().width() < 1e-15);
        }
        // On the unflagged region the width sin(2a)sin(2b) shrinks
        // monotonically as either input approaches 1.
        for &fixed in &[0.8, 0.9, 0.99] {
            let mut prev = f64::INFINITY;
            for k in 0..=50 {
                let chi = 0.8 + 0.2 * k as f64 / 50.0;
                let b = chi00_pair_bounds(chi, fixed).unwrap();
                assert!(b.assumptions.is_empty());
                assert!(b.width() <= prev + 1e-12, "width not nonincreasing");
                prev = b.width();
            }
        }
    }

    #[test]
    fn sequence_lower_examples() {
        let b = chi00_seq_lower(&[0.7]).unwrap();
        assert!((b.lower - 0.7).abs() < 1e-15);
        assert_eq!(b.upper, 1.0);

        let chis: Vec<f64> = [0.2f64, 0.3, 0.4].iter().map(|a| a.cos().powi(2)).collect();
        let b = chi00_seq_lower(&chis).unwrap();
        assert!((b.lower - 0.9f64.cos().powi(2)).abs() < 1e-12);
        assert!((b.lower - 0.386399).abs() < 2e-6);
        let channels: Vec<_> = [0.2, 0.3, 0.4]
            .iter()
            .map(|&a| zoo::phase_unitary(a, 2).unwrap())
            .collect();
        let composite = crate::channel::Channel::compose_seq(&channels).unwrap();
        assert!((chi00(&composite) - b.lower).abs() < 1e-12);

        // Angle sum beyond π/2 degrades the lower endpoint to 0.
        let chi = 0.6f64.cos().powi(2);
        let b = chi00_seq_lower(&[chi, chi, chi]).unwrap();
        assert_eq!(b.lower, 0.0);
        assert_eq!(b.assumptions, vec![FLAG_ANGLE_CONDITION_VIOLATED]);

        assert!(chi00_seq_lower(&[]).is_err());
    }

    #[test]
    fn infidelity_growth_examples() {
        let g = infidelity_growth_upper(0.0, 5, 2).unwrap();
        assert_eq!(g.upper, 0.0);

        let g = infidelity_growth_upper(0.001, 2, 2).unwrap();
        assert!((g.leading_order - 0.004).abs() < 1e-15);
        assert!((g.upper - 0.004).abs() < 2e-5, "upper {}", g.upper);
        assert!(g.angle_condition_met);

        let g = infidelity_growth_upper(0.0025, 1, 2).unwrap();
        assert!((g.upper - 0.0025).abs() < 1e-12);

        // Condition violation reports the kind maximum.
        let g = infidelity_growth_upper(0.6, 50, 2).unwrap();
        assert!(!g.angle_condition_met);
        assert!((g.upper - 2.0 / 3.0).abs() < 1e-15);

        assert!(infidelity_growth_upper(0.9, 2, 2).is_err());
    }

    #[test]
    fn decay_pair_examples() {
        // Depolarizing pair: interval collapses to the product.
        let b = decay_pair_bounds(0.9, 0.81, 0.8, 0.64).unwrap();
        assert!((b.lower - 0.72).abs() < 1e-12);
        assert!((b.upper - 0.72).abs() < 1e-12);

        // Two unitaries: endpoints cos(θx ± θy).
        let (tx, ty) = (0.2f64, 0.35f64);
        let b = decay_pair_bounds(tx.cos(), 1.0, ty.cos(), 1.0).unwrap();
        assert!((b.lower - (tx + ty).cos()).abs() < 1e-12);
        assert!((b.upper - (tx - ty).cos()).abs() < 1e-12);
        // Composed qubit z-rotations land inside and, for small angles,
        // close to the endpoints. Exact attainment would need a unital
        // block of the rotation ⊗ identity form, which the 3-dimensional
        // qubit block cannot realize.
        let rot = |angle: f64| zoo::rotation_damping_qubit(1.0, 1.0, angle).unwrap();
        let (ax, ay) = (0.3, 0.44);
        let x = rot(ax);
        let y = rot(ay);
        let b = decay_pair_bounds(decay_rate(&x), 1.0, decay_rate(&y), 1.0).unwrap();
        let aligned = decay_rate(&x.compose(&y).unwrap());
        assert!(b.contains(aligned, 1e-12));
        assert!((aligned - b.lower).abs() < 3e-3);
        let opposed = decay_rate(&x.compose(&rot(-ay)).unwrap());
        assert!(b.contains(opposed, 1e-12));
        assert!((opposed - b.upper).abs() < 3e-3);

        // Zero-width case from the reference being depolarizing-like.
        let b = decay_pair_bounds(0.99, 1.0, 0.99, 0.9801).unwrap();
        assert!(b.width() < 1e-12);

        assert!(decay_pair_bounds(0.9, 0.5, 0.5, 1.0).is_err());
        assert!(decay_pair_bounds(0.5, 0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn composite_decay_trivial_cases() {
        // θ = 0: halfwidth vanishes for depolarizing ensembles.
        let b = composite_decay_bound(0.9, 0.81, 5, 2, false).unwrap();
        assert_eq!(b.halfwidth, 0.0);
        assert_eq!(b.halfwidth_geometric, 0.0);
        // m = 1: no pair interactions.
        let b = composite_decay_bound(0.9, 1.0, 1, 2, false).unwrap();
        assert_eq!(b.halfwidth, 0.0);
        assert!((b.center - 0.9).abs() < 1e-15);
    }

    #[test]
    fn composite_decay_saturating_family() {
        // Four copies of a slightly rotated near-identity channel come
        // within 10% of the unital bound.
        let ch = zoo::rotation_damping_qubit(0.999, 0.999, 0.02).unwrap();
        let p = decay_rate(&ch);
        let u = unitarity(&ch);
        let m = 4;
        let composite =
            crate::channel::Channel::compose_seq(&vec![ch.clone(), ch.clone(), ch.clone(), ch])
                .unwrap();
        let deviation = (decay_rate(&composite) - p.powi(m as i32)).abs();
        let bound = composite_decay_bound(p, u, m, 2, true).unwrap();
        assert!(deviation <= bound.halfwidth + 1e-12);
        assert!(
            deviation >= 0.5 * bound.halfwidth,
            "not saturating: {deviation} vs {}",
            bound.halfwidth
        );
        // Geometric form is at least as tight.
        assert!(bound.halfwidth_geometric <= bound.halfwidth + 1e-15);
        assert!(deviation <= bound.halfwidth_geometric + 1e-12);
    }

    #[test]
    fn intermediate_regime_limits() {
        // θ = 0 recovers linear scaling.
        assert!((intermediate_regime_upper(0.001, 0.0, 2, 7) - 0.007).abs() < 1e-15);
        // (d−1)θ² = 2dr recovers quadratic scaling.
        let r = 0.001;
        let d = 2;
        let theta = (2.0 * d as f64 * r / (d as f64 - 1.0)).sqrt();
        let m = 6;
        let bound = intermediate_regime_upper(r, theta, d, m);
        assert!((bound - (m * m) as f64 * r).abs() < 1e-12);
        // Worked example.
        assert!((intermediate_regime_upper(0.001, 0.02, 2, 10) - 0.019).abs() < 1e-12);
    }

    #[test]
    fn interleaved_chi00_examples() {
        // Perfect reference pins the interval.
        let b = interleaved_chi00_bounds(0.98, 1.0).unwrap();
        assert!((b.lower - 0.98).abs() < 1e-12);
        assert!((b.upper - 0.98).abs() < 1e-12);

        let b = interleaved_chi00_bounds(0.8f64.cos().powi(2), 0.5f64.cos().powi(2)).unwrap();
        assert!((b.lower - 1.3f64.cos().powi(2)).abs() < 1e-12);
        assert!((b.upper - 0.3f64.cos().powi(2)).abs() < 1e-12);
        // Both compatible phase unitaries produce composites inside the
        // original pair bound.
        for gate_angle in [0.3, 1.3] {
            let gate = zoo::phase_unitary(gate_angle, 2).unwrap();
            let reference = zoo::phase_unitary(0.5, 2).unwrap();
            let composite = gate.compose(&reference).unwrap();
            let pair = chi00_pair_bounds(chi00(&gate), chi00(&reference)).unwrap();
            assert!(pair.contains(chi00(&composite), 1e-12));
        }

        // Angle overflow flags and degrades the lower endpoint.
        let b = interleaved_chi00_bounds(0.9f64.cos().powi(2), 0.8f64.cos().powi(2)).unwrap();
        assert_eq!(b.lower, 0.0);
        assert_eq!(b.assumptions, vec![FLAG_ANGLE_CONDITION_VIOLATED]);
    }

    #[test]
    fn interleaved_width_matches_naive_uncertainty_estimate() {
        assert_eq!(interleaved_uncertainty_naive(0.0), 0.0);
        assert!((interleaved_uncertainty_naive(0.0025) - 0.014142).abs() < 2e-6);

        // The angle-space interval width in infidelity units tracks 4√2·r
        // to within 20% in the regime r_comp ≈ 2·r_ref.
        for &r_ref in &[0.001, 0.0025, 0.005] {
            let chi_ref = convert(
                r_ref,
                MetricKind::new(Metric::Infidelity, 2),
                MetricKind::new(Metric::Chi00, 2),
            )
            .unwrap();
            let chi_comp = convert(
                2.0 * r_ref,
                MetricKind::new(Metric::Infidelity, 2),
                MetricKind::new(Metric::Chi00, 2),
            )
            .unwrap();
            let b = interleaved_chi00_bounds(chi_comp, chi_ref)
                .unwrap()
                .convert_to(Metric::Infidelity, 2)
                .unwrap();
            let width = b.width();
            let naive = interleaved_uncertainty_naive(r_ref);
            assert!(
                (width - naive).abs() <= 0.2 * naive,
                "r_ref={r_ref}: width {width} vs naive {naive}"
            );
        }
    }

    #[test]
    fn naive_group_bound_examples() {
        assert!((naive_group_bound(0.0025, 12) - 0.03).abs() < 1e-15);
        assert_eq!(naive_group_bound(0.0, 100), 0.0);
        // The 12-element group's naive bound is about 3/√2 looser than the
        // interleaved width at the same reference infidelity.
        let r = 0.0025;
        let ratio = naive_group_bound(r, 12) / interleaved_uncertainty_naive(r);
        assert!((ratio - 3.0 / std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn interleaved_decay_examples() {
        // Depolarizing reference: width 0, gate decay recovered exactly.
        let b = interleaved_decay_bounds(0.9 * 0.95, 0.95 * 0.95, 0.0).unwrap();
        assert!(b.width() < 1e-12);
        assert!((b.lower - 0.9).abs() < 1e-12);

        // γ = 1 pins the interval at cosθ.
        let theta: f64 = 0.3;
        let b = interleaved_decay_bounds(1.0, 1.0, theta).unwrap();
        assert!(b.width() < 1e-12);
        assert!((b.lower - theta.cos()).abs() < 1e-12);

        assert!(interleaved_decay_bounds(0.5, 0.0, 0.1).is_err());
    }

    #[test]
    fn interleaved_decay_soundness_on_random_pairs() {
        for trial in 0..200 {
            let gate = zoo::random_cptp(2, 4, 9000 + trial).unwrap();
            let reference = zoo::random_cptp(2, 4, 9500 + trial).unwrap();
            let composite = gate.compose(&reference).unwrap();
            let u_ref = unitarity(&reference);
            let theta_ref = angle_from_parts(decay_rate(&reference), u_ref);
            let b = interleaved_decay_bounds(decay_rate(&composite), u_ref, theta_ref).unwrap();
            assert!(
                b.contains(decay_rate(&gate), 1e-9),
                "trial {trial}: p {} outside [{}, {}]",
                decay_rate(&gate),
                b.lower,
                b.upper
            );
        }
    }

    #[test]
    fn interval_json_shape() {
        let b = chi00_pair_bounds(0.5, 0.5).unwrap();
        let json = serde_json::to_value(&b).unwrap();
        let obj = json.as_object().unwrap();
        assert_eq!(obj.len(), 4);
        for key in ["lower", "upper", "source", "assumptions"] {
            assert!(obj.contains_key(key), "missing {key}");
        }
    }
}
