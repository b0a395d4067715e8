//! Trace inequalities for real matrices.
//!
//! The coherence angle of a real matrix, `θ(M) = arccos(tr M / (√d ‖M‖_F))`,
//! controls how far the normalized trace of a product can drift from the
//! product of normalized traces. This module provides the angle, the
//! two-matrix trace bounds, the rotation family that saturates them, the
//! telescoping bound for products of equal-parameter matrices, and the
//! geometric sum appearing in its prefactor.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::channel::Channel;
use crate::error::{Error, Result};

/// `arccos` with the argument clamped into [−1, 1] and values within a few
/// ulps of the endpoints snapped to them; a one-ulp fluctuation near ±1
/// otherwise turns into a spurious angle of order 1e-8.
pub fn snapped_acos(x: f64) -> f64 {
    let snap = 8.0 * f64::EPSILON;
    if x >= 1.0 - snap {
        0.0
    } else if x <= -1.0 + snap {
        std::f64::consts::PI
    } else {
        x.acos()
    }
}

/// Scalar summary of a real square matrix.
#[derive(Debug, Clone, Serialize)]
pub struct RealMatrixStats {
    pub dim: usize,
    pub trace: f64,
    pub frobenius_norm: f64,
    pub coherence_angle: f64,
    pub max_singular_value: f64,
}

impl RealMatrixStats {
    pub fn of(m: &DMatrix<f64>) -> Result<Self> {
        let norm = m.norm();
        if norm == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        Ok(RealMatrixStats {
            dim: m.nrows(),
            trace: m.trace(),
            frobenius_norm: norm,
            coherence_angle: coherence_angle_real(m)?,
            max_singular_value: operator_norm(m),
        })
    }
}

/// Largest singular value.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Coherence angle `θ(M) = arccos(tr M / (√d ‖M‖_F)) ∈ [0, π]`.
pub fn coherence_angle_real(m: &DMatrix<f64>) -> Result<f64> {
    let norm = m.norm();
    if norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let d = m.nrows() as f64;
    Ok(snapped_acos((m.trace() / (d.sqrt() * norm)).clamp(-1.0, 1.0)))
}

/// Bounds on the normalized trace of a product:
/// `cos(θ1 + θ2) ≤ tr(M1 M2) / (‖M1‖_F ‖M2‖_F) ≤ cos(θ1 − θ2)`.
///
/// Returns `(lower, value, upper)`.
pub fn pair_trace_bounds(m1: &DMatrix<f64>, m2: &DMatrix<f64>) -> Result<(f64, f64, f64)> {
    if m1.nrows() != m2.nrows() || m1.ncols() != m2.ncols() {
        return Err(Error::DimensionMismatch {
            left: m1.nrows(),
            right: m2.nrows(),
        });
    }
    let t1 = coherence_angle_real(m1)?;
    let t2 = coherence_angle_real(m2)?;
    let value = (m1 * m2).trace() / (m1.norm() * m2.norm());
    Ok(((t1 + t2).cos(), value, (t1 - t2).cos()))
}

/// The block-rotation family `(norm/√d)·R(θ) ⊗ I_{d/2}` with Frobenius norm
/// `norm` and coherence angle `θ`; pairs drawn from it saturate both trace
/// bounds.
pub fn saturating_rotation(norm: f64, theta: f64, d: usize) -> Result<DMatrix<f64>> {
    if d % 2 != 0 || d == 0 {
        return Err(Error::OutOfRange {
            what: "saturating rotation dimension (must be even)",
            value: d as f64,
        });
    }
    if norm <= 0.0 {
        return Err(Error::OutOfRange {
            what: "frobenius norm",
            value: norm,
        });
    }
    let scale = norm / (d as f64).sqrt();
    let half = d / 2;
    let mut m = DMatrix::zeros(d, d);
    for k in 0..half {
        m[(2 * k, 2 * k)] = scale * theta.cos();
        m[(2 * k, 2 * k + 1)] = -scale * theta.sin();
        m[(2 * k + 1, 2 * k)] = scale * theta.sin();
        m[(2 * k + 1, 2 * k + 1)] = scale * theta.cos();
    }
    Ok(m)
}

/// Geometric sum `S(p, m) = Σ_{i=1}^{m−1} i·p^{i−1}`.
///
/// Closed form `(1 − m·p^{m−1} + (m−1)·p^m) / (1−p)²` away from `p = 1`,
/// and `S(1, m) = C(m, 2)` exactly. The numerator cancels against the
/// `(1−p)²` denominator, losing about `m·ε/(1−p)²` of relative accuracy,
/// so for `1−p < 0.05` the direct sum takes over; that keeps the two
/// routes within 1e-12 of each other everywhere. Intended domain is
/// `p ∈ [0, 1]`, `m ≥ 1`.
pub fn geometric_sum_s(p: f64, m: usize) -> f64 {
    if m <= 1 {
        return 0.0;
    }
    let mf = m as f64;
    if p == 1.0 {
        return mf * (mf - 1.0) / 2.0;
    }
    if (1.0 - p).abs() < 0.05 {
        return geometric_sum_direct(p, m);
    }
    (1.0 - mf * p.powi(m as i32 - 1) + (mf - 1.0) * p.powi(m as i32)) / (1.0 - p).powi(2)
}

/// Direct-summation oracle for [`geometric_sum_s`].
pub fn geometric_sum_direct(p: f64, m: usize) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for i in 1..m {
        sum += i as f64 * power;
        power *= p;
    }
    sum
}

/// Result of the product-trace bound evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct ProductTraceBound {
    /// `|tr(M_1…M_m)/d − p^m|`.
    pub deviation: f64,
    /// `σ_max · S(p, m) · u · sin²θ`.
    pub bound_geometric: f64,
    /// `σ_max · C(m,2) · u · sin²θ`.
    pub bound_binomial: f64,
}

const HYPOTHESIS_TOL: f64 = 1e-9;

/// Evaluates the telescoping bound for a family of real matrices sharing
/// coherence angle, normalized trace `p = tr/d ≤ 1`, and normalized square
/// norm `u = ‖·‖²_F/d ≤ 1`.
///
/// Every hypothesis is verified, including `‖M_1…M_j‖₂ ≤ sigma_max` for all
/// prefixes; violations are reported with the offending index. The
/// geometric-sum prefactor is evaluated at |p| so it stays an upper bound
/// for trace-negative families. The telescoping also runs over the empty
/// prefix (the identity, operator norm 1), so the constant entering the
/// bound is `max(sigma_max, 1)`; handing in a contraction factor below 1
/// cannot tighten the result.
pub fn product_trace_bound(
    matrices: &[DMatrix<f64>],
    sigma_max: f64,
) -> Result<ProductTraceBound> {
    if matrices.is_empty() {
        return Err(Error::EmptyInput("matrix product"));
    }
    let d = matrices[0].nrows();
    let df = d as f64;
    let theta = coherence_angle_real(&matrices[0])?;
    let p = matrices[0].trace() / df;
    let u = matrices[0].norm_squared() / df;
    for (index, m) in matrices.iter().enumerate() {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::HypothesisViolated {
                index,
                what: format!("dimension {} instead of {d}", m.nrows()),
            });
        }
        let angle = coherence_angle_real(m)?;
        if (angle - theta).abs() > HYPOTHESIS_TOL {
            return Err(Error::HypothesisViolated {
                index,
                what: format!("coherence angle {angle} differs from {theta}"),
            });
        }
        let pm = m.trace() / df;
        if (pm - p).abs() > HYPOTHESIS_TOL {
            return Err(Error::HypothesisViolated {
                index,
                what: format!("normalized trace {pm} differs from {p}"),
            });
        }
        let um = m.norm_squared() / df;
        if (um - u).abs() > HYPOTHESIS_TOL {
            return Err(Error::HypothesisViolated {
                index,
                what: format!("normalized square norm {um} differs from {u}"),
            });
        }
    }
    if p > 1.0 + HYPOTHESIS_TOL {
        return Err(Error::OutOfRange {
            what: "normalized trace",
            value: p,
        });
    }
    if u > 1.0 + HYPOTHESIS_TOL {
        return Err(Error::OutOfRange {
            what: "normalized square norm",
            value: u,
        });
    }
    let mut product = matrices[0].clone();
    let mut norm2 = operator_norm(&product);
    if norm2 > sigma_max + HYPOTHESIS_TOL {
        return Err(Error::HypothesisViolated {
            index: 0,
            what: format!("prefix operator norm {norm2} exceeds {sigma_max}"),
        });
    }
    for (index, m) in matrices.iter().enumerate().skip(1) {
        product = &product * m;
        norm2 = operator_norm(&product);
        if norm2 > sigma_max + HYPOTHESIS_TOL {
            return Err(Error::HypothesisViolated {
                index,
                what: format!("prefix operator norm {norm2} exceeds {sigma_max}"),
            });
        }
    }
    let m = matrices.len();
    let deviation = (product.trace() / df - p.powi(m as i32)).abs();
    let sin2 = theta.sin().powi(2);
    let binom = (m * (m - 1)) as f64 / 2.0;
    let sigma = sigma_max.max(1.0);
    Ok(ProductTraceBound {
        deviation,
        bound_geometric: sigma * geometric_sum_s(p.abs().min(1.0), m) * u * sin2,
        bound_binomial: sigma * binom * u * sin2,
    })
}

/// Comparison of a channel's unital-block largest singular value against
/// the √(d/2) bound for general channels and 1 for unital channels.
#[derive(Debug, Clone, Serialize)]
pub struct SigmaCheck {
    pub sigma_max: f64,
    pub general_bound: f64,
    pub within_general: bool,
    /// Whether the channel is unital (vanishing non-unital vector).
    pub unital: bool,
    pub within_unital: bool,
}

/// Checks the singular values of the unital block.
pub fn unital_block_sigma_check(ch: &Channel) -> SigmaCheck {
    let sigma = operator_norm(&ch.unital_block());
    let general = (ch.dim() as f64 / 2.0).sqrt();
    let unital = ch.nonunital_vector().norm() <= 1e-9;
    SigmaCheck {
        sigma_max: sigma,
        general_bound: general,
        within_general: sigma <= general + 1e-9,
        unital,
        within_unital: unital && sigma <= 1.0 + 1e-9,
    }
}
