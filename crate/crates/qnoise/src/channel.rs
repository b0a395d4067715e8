//! Quantum channels and conversions between their representations.
//!
//! The canonical internal form is the real Liouville (transfer) matrix in a
//! Hermitian trace-orthonormal basis; Kraus, chi, and Choi views are derived
//! on demand and cached. For a trace-preserving map the Liouville matrix has
//! block form with first row `(1, 0, …, 0)`, a non-unital column below the 1,
//! and the unital block on the diagonal.

use std::sync::{Arc, OnceLock};

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{unvectorize, BasisKind, OperatorBasis};
use crate::error::{Error, Result};

/// Default tolerance for trace-preservation and complete-positivity checks.
pub const DEFAULT_CPTP_TOL: f64 = 1e-9;
/// Eigenvalues of the Choi matrix below this cutoff are dropped when
/// extracting Kraus operators.
pub const KRAUS_EIGENVALUE_CUTOFF: f64 = 1e-10;

/// A quantum channel stored as its real Liouville matrix.
///
/// Channels are immutable after construction; all operations are pure and
/// the cached views are computed at most once, so values can be shared
/// freely across threads.
#[derive(Debug)]
pub struct Channel {
    basis: Arc<OperatorBasis>,
    liouville: DMatrix<f64>,
    kraus: OnceLock<Vec<DMatrix<Complex64>>>,
    chi: OnceLock<DMatrix<Complex64>>,
    choi: OnceLock<DMatrix<Complex64>>,
}

impl Clone for Channel {
    fn clone(&self) -> Self {
        Channel {
            basis: self.basis.clone(),
            liouville: self.liouville.clone(),
            kraus: self.kraus.clone(),
            chi: self.chi.clone(),
            choi: self.choi.clone(),
        }
    }
}

/// Outcome of a CPTP validation pass.
#[derive(Debug, Clone, Serialize)]
pub struct CptpReport {
    pub is_tp: bool,
    /// Largest deviation of the first Liouville row from `(1, 0, …, 0)`.
    pub tp_deviation: f64,
    pub is_cp: bool,
    /// Minimum eigenvalue of the Choi matrix.
    pub min_choi_eigenvalue: f64,
    pub tolerance: f64,
}

impl CptpReport {
    pub fn is_cptp(&self) -> bool {
        self.is_tp && self.is_cp
    }
}

impl Channel {
    /// Wraps a Liouville matrix, checking its shape and trace-preserving row.
    pub fn from_liouville(liouville: DMatrix<f64>, basis: Arc<OperatorBasis>) -> Result<Self> {
        let d = basis.dim();
        let n = d * d;
        if liouville.nrows() != n || liouville.ncols() != n {
            return Err(Error::DimensionMismatch {
                left: liouville.nrows(),
                right: n,
            });
        }
        let mut dev = (liouville[(0, 0)] - 1.0).abs();
        for k in 1..n {
            dev = dev.max(liouville[(0, k)].abs());
        }
        if dev > DEFAULT_CPTP_TOL {
            return Err(Error::NotTracePreserving { deviation: dev });
        }
        Ok(Channel {
            basis,
            liouville,
            kraus: OnceLock::new(),
            chi: OnceLock::new(),
            choi: OnceLock::new(),
        })
    }

    /// The identity channel.
    pub fn identity(basis: Arc<OperatorBasis>) -> Self {
        let n = basis.dim() * basis.dim();
        Channel {
            basis,
            liouville: DMatrix::identity(n, n),
            kraus: OnceLock::new(),
            chi: OnceLock::new(),
            choi: OnceLock::new(),
        }
    }

    /// Builds a channel from Kraus operators, validating trace preservation.
    pub fn from_kraus(kraus: &[DMatrix<Complex64>], basis: Arc<OperatorBasis>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::EmptyInput("kraus operator list"));
        }
        let d = basis.dim();
        for a in kraus {
            if a.nrows() != d || a.ncols() != d {
                return Err(Error::DimensionMismatch {
                    left: a.nrows().max(a.ncols()),
                    right: d,
                });
            }
        }
        // Σ A† A = I within tolerance.
        let mut sum = DMatrix::<Complex64>::zeros(d, d);
        for a in kraus {
            sum += a.adjoint() * a;
        }
        let mut dev: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let expected = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::default()
                };
                dev = dev.max((sum[(i, j)] - expected).norm());
            }
        }
        if dev > DEFAULT_CPTP_TOL {
            return Err(Error::NotTracePreserving { deviation: dev });
        }

        // Superoperator in the elementary basis: Σ_j conj(A_j) ⊗ A_j, then
        // rotate into the Hermitian basis. The result is real because the
        // map is Hermiticity-preserving.
        let n = d * d;
        let mut elem = DMatrix::<Complex64>::zeros(n, n);
        for a in kraus {
            elem += a.conjugate().kronecker(a);
        }
        let v = basis.transform();
        let rotated = v.adjoint() * elem * v;
        let liouville = rotated.map(|c| c.re);
        let mut ch = Channel::from_liouville(liouville, basis)?;
        ch.kraus = OnceLock::from(kraus.to_vec());
        Ok(ch)
    }

    /// Builds a channel from its chi matrix, using the convention
    /// `E(ρ) = d Σ_kl chi_kl B_k ρ B_l†`.
    pub fn from_chi(chi: &DMatrix<Complex64>, basis: Arc<OperatorBasis>) -> Result<Self> {
        let d = basis.dim();
        let n = d * d;
        if chi.nrows() != n || chi.ncols() != n {
            return Err(Error::DimensionMismatch {
                left: chi.nrows(),
                right: n,
            });
        }
        let herm_dev = (chi - chi.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if herm_dev > DEFAULT_CPTP_TOL {
            return Err(Error::InvalidChi(format!(
                "not Hermitian (deviation {herm_dev:.3e})"
            )));
        }
        let trace = chi.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > DEFAULT_CPTP_TOL {
            return Err(Error::InvalidChi(format!(
                "trace {} instead of 1",
                trace.re
            )));
        }
        let symmetrized = (chi + chi.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(symmetrized);
        let mut kraus = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda < -DEFAULT_CPTP_TOL {
                return Err(Error::InvalidChi(format!(
                    "not positive semidefinite (eigenvalue {lambda:.3e})"
                )));
            }
            if lambda <= KRAUS_EIGENVALUE_CUTOFF {
                continue;
            }
            let scale = Complex64::new((d as f64 * lambda).sqrt(), 0.0);
            let coeffs = DVector::from_iterator(
                n,
                eig.eigenvectors.column(k).iter().map(|c| c * scale),
            );
            kraus.push(basis.matrix_from_complex_coords(&coeffs));
        }
        if kraus.is_empty() {
            return Err(Error::InvalidChi("all eigenvalues negligible".into()));
        }
        Channel::from_kraus(&kraus, basis)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &Arc<OperatorBasis> {
        &self.basis
    }

    pub fn liouville(&self) -> &DMatrix<f64> {
        &self.liouville
    }

    /// The Choi matrix, obtained by reshuffling the elementary-basis
    /// superoperator. Normalized so that `tr J = d` for a TP map.
    pub fn choi(&self) -> &DMatrix<Complex64> {
        self.choi.get_or_init(|| {
            let v = self.basis.transform();
            let complex_l = self.liouville.map(|x| Complex64::new(x, 0.0));
            let elem = v * complex_l * v.adjoint();
            let j = reshuffle(&elem, self.dim());
            // Symmetrize away rounding asymmetry; the Choi matrix of a
            // Hermiticity-preserving map is exactly Hermitian.
            (&j + j.adjoint()) * Complex64::new(0.5, 0.0)
        })
    }

    /// The chi matrix with respect to this channel's operator basis.
    pub fn to_chi(&self) -> &DMatrix<Complex64> {
        self.chi.get_or_init(|| {
            let v = self.basis.transform();
            let scale = Complex64::new(1.0 / self.dim() as f64, 0.0);
            v.adjoint() * self.choi() * v * scale
        })
    }

    /// Kraus operators from the Choi eigendecomposition.
    ///
    /// Eigenvalues in `[-tol, 0)` are clamped to zero and dropped together
    /// with everything below the cutoff; a lower eigenvalue is a CP
    /// violation and fails. Each operator is phase-fixed so that its trace
    /// is a nonnegative real.
    pub fn to_kraus(&self) -> Result<&[DMatrix<Complex64>]> {
        if let Some(k) = self.kraus.get() {
            return Ok(k);
        }
        let computed = self.compute_kraus()?;
        Ok(self.kraus.get_or_init(|| computed))
    }

    fn compute_kraus(&self) -> Result<Vec<DMatrix<Complex64>>> {
        let d = self.dim();
        let eig = SymmetricEigen::new(self.choi().clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut kraus = Vec::new();
        for k in order {
            let lambda = eig.eigenvalues[k];
            if lambda < -DEFAULT_CPTP_TOL {
                return Err(Error::NotCompletelyPositive {
                    min_eigenvalue: lambda,
                });
            }
            if lambda <= KRAUS_EIGENVALUE_CUTOFF {
                continue;
            }
            let col = eig.eigenvectors.column(k);
            let root = Complex64::new(lambda.sqrt(), 0.0);
            let scaled = DVector::from_iterator(d * d, col.iter().map(|c| c * root));
            let mut a = unvectorize(&scaled, d);
            let tr = a.trace();
            if tr.norm() > 1e-12 {
                a *= tr.conj() / tr.norm();
            }
            kraus.push(a);
        }
        if kraus.is_empty() {
            return Err(Error::NotCompletelyPositive {
                min_eigenvalue: eig.eigenvalues.iter().cloned().fold(f64::NAN, f64::min),
            });
        }
        Ok(kraus)
    }

    /// Composition `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Channel) -> Result<Channel> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        if self.basis.kind() != other.basis.kind() {
            return Err(Error::InvalidBasis(
                "cannot compose channels expressed in different bases".into(),
            ));
        }
        Channel::from_liouville(&self.liouville * &other.liouville, self.basis.clone())
    }

    /// Composition of a sequence, folded left to right: the last channel in
    /// the slice acts first.
    pub fn compose_seq(channels: &[Channel]) -> Result<Channel> {
        let first = channels.first().ok_or(Error::EmptyInput("channel sequence"))?;
        let mut acc = first.clone();
        for ch in &channels[1..] {
            acc = acc.compose(ch)?;
        }
        Ok(acc)
    }

    /// The `(d²−1) × (d²−1)` unital block of the Liouville matrix.
    pub fn unital_block(&self) -> DMatrix<f64> {
        let n = self.liouville.nrows();
        self.liouville.view((1, 1), (n - 1, n - 1)).into_owned()
    }

    /// The non-unital vector (first column below the leading 1).
    pub fn nonunital_vector(&self) -> DVector<f64> {
        let n = self.liouville.nrows();
        DVector::from_iterator(n - 1, (1..n).map(|i| self.liouville[(i, 0)]))
    }

    /// Checks trace preservation and complete positivity at tolerance `tol`.
    pub fn validate_cptp(&self, tol: f64) -> CptpReport {
        let n = self.liouville.nrows();
        let mut tp_dev = (self.liouville[(0, 0)] - 1.0).abs();
        for k in 1..n {
            tp_dev = tp_dev.max(self.liouville[(0, k)].abs());
        }
        let eig = SymmetricEigen::new(self.choi().clone());
        let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        CptpReport {
            is_tp: tp_dev <= tol,
            tp_deviation: tp_dev,
            is_cp: min_eig >= -tol,
            min_choi_eigenvalue: min_eig,
            tolerance: tol,
        }
    }

    /// Applies the channel to a Hermitian operator.
    pub fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let coords = self.basis.coords(rho);
        let out = &self.liouville * coords;
        self.basis.matrix_from_coords(&out)
    }

    /// Serializes to the JSON channel format.
    pub fn to_json(&self) -> String {
        let n = self.liouville.nrows();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| self.liouville[(i, j)]).collect())
            .collect();
        let file = ChannelFile {
            dim: self.dim(),
            basis: self.basis.kind().label().to_string(),
            liouville: rows,
        };
        serde_json::to_string_pretty(&file).expect("channel serialization cannot fail")
    }

    /// Parses the JSON channel format.
    pub fn from_json(text: &str) -> Result<Channel> {
        let file: ChannelFile = serde_json::from_str(text)?;
        let kind = BasisKind::from_label(&file.basis)?;
        let basis = OperatorBasis::new(file.dim, kind)?;
        let n = file.dim * file.dim;
        if file.liouville.len() != n || file.liouville.iter().any(|row| row.len() != n) {
            return Err(Error::MalformedFile(format!(
                "liouville matrix must be {n} x {n}"
            )));
        }
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in file.liouville.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        Channel::from_liouville(m, basis)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Channel> {
        let text = std::fs::read_to_string(path)?;
        Channel::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelFile {
    dim: usize,
    basis: String,
    liouville: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct KrausFile {
    kraus: Vec<Vec<[f64; 2]>>,
}

/// Parses the Kraus import format: each operator is a flat row-major list of
/// `[re, im]` pairs.
pub fn kraus_from_json(text: &str) -> Result<Vec<DMatrix<Complex64>>> {
    let file: KrausFile = serde_json::from_str(text)?;
    if file.kraus.is_empty() {
        return Err(Error::EmptyInput("kraus operator list"));
    }
    let mut out = Vec::with_capacity(file.kraus.len());
    for entries in &file.kraus {
        let d = (entries.len() as f64).sqrt().round() as usize;
        if d * d != entries.len() || d == 0 {
            return Err(Error::MalformedFile(format!(
                "kraus operator with {} entries is not square",
                entries.len()
            )));
        }
        let values: Vec<Complex64> = entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        out.push(DMatrix::from_row_slice(d, d, &values));
    }
    Ok(out)
}

/// Serializes Kraus operators to the import format.
pub fn kraus_to_json(kraus: &[DMatrix<Complex64>]) -> String {
    let file = KrausFile {
        kraus: kraus
            .iter()
            .map(|a| {
                let d = a.nrows();
                let mut entries = Vec::with_capacity(d * d);
                for i in 0..d {
                    for j in 0..d {
                        entries.push([a[(i, j)].re, a[(i, j)].im]);
                    }
                }
                entries
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("kraus serialization cannot fail")
}

/// Reshuffles between the elementary superoperator and Choi orderings.
/// The index permutation is an involution, so the same function converts in
/// both directions.
fn reshuffle(m: &DMatrix<Complex64>, d: usize) -> DMatrix<Complex64> {
    let n = d * d;
    let mut out = DMatrix::zeros(n, n);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    out[(b + d * e, a + d * c)] = m[(a * d + b, c * d + e)];
                }
            }
        }
    }
    out
}

/// Largest absolute difference between two Liouville matrices.
pub fn liouville_distance(a: &Channel, b: &Channel) -> f64 {
    (a.liouville() - b.liouville())
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::OperatorBasis;

    fn qubit_basis() -> Arc<OperatorBasis> {
        OperatorBasis::pauli(2).unwrap()
    }

    fn cmat(d: usize, entries: &[(f64, f64)]) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(
            d,
            d,
            &entries
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn identity_kraus_gives_identity_liouville() {
        let basis = qubit_basis();
        let id = cmat(2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let ch = Channel::from_kraus(&[id], basis).unwrap();
        let eye = DMatrix::<f64>::identity(4, 4);
        assert!((ch.liouville() - eye).amax() < 1e-14);
    }

    #[test]
    fn phase_unitary_chi00_matches_closed_form() {
        // diag(e^{i 0.3}, e^{-i 0.3}) has chi00 = cos^2(0.3).
        let basis = qubit_basis();
        let phi: f64 = 0.3;
        let u = cmat(
            2,
            &[
                (phi.cos(), phi.sin()),
                (0.0, 0.0),
                (0.0, 0.0),
                (phi.cos(), -phi.sin()),
            ],
        );
        let ch = Channel::from_kraus(&[u], basis).unwrap();
        let chi = ch.to_chi();
        assert!((chi[(0, 0)].re - phi.cos().powi(2)).abs() < 1e-12);
        assert!((chi[(0, 0)].re - 0.912668).abs() < 5e-7);
    }

    #[test]
    fn non_tp_kraus_is_rejected() {
        let basis = qubit_basis();
        let a = cmat(2, &[(0.9, 0.0), (0.0, 0.0), (0.0, 0.0), (0.9, 0.0)]);
        match Channel::from_kraus(&[a], basis) {
            Err(Error::NotTracePreserving { .. }) => {}
            other => panic!("expected TP violation, got {other:?}"),
        }
    }

    #[test]
    fn chi_of_identity_is_e00() {
        let basis = qubit_basis();
        let ch = Channel::identity(basis);
        let chi = ch.to_chi();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                assert!((chi[(i, j)] - Complex64::new(expected, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn from_chi_diagonal_pauli_channel_has_diagonal_liouville() {
        let basis = qubit_basis();
        let mut chi = DMatrix::<Complex64>::zeros(4, 4);
        for (k, p) in [0.97, 0.01, 0.01, 0.01].iter().enumerate() {
            chi[(k, k)] = Complex64::new(*p, 0.0);
        }
        let ch = Channel::from_chi(&chi, basis).unwrap();
        let l = ch.liouville();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(l[(i, j)].abs() < 1e-12, "off-diagonal {i},{j} = {}", l[(i, j)]);
                }
            }
        }
        // Round trip back to chi.
        let chi_back = ch.to_chi();
        assert!((chi_back - &chi).iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-10);
    }

    #[test]
    fn from_chi_rejects_bad_inputs() {
        let basis = qubit_basis();
        // Negative eigenvalue.
        let mut chi = DMatrix::<Complex64>::zeros(4, 4);
        chi[(0, 0)] = Complex64::new(1.1, 0.0);
        chi[(1, 1)] = Complex64::new(-0.1, 0.0);
        assert!(Channel::from_chi(&chi, basis.clone()).is_err());
        // Wrong trace.
        let mut chi = DMatrix::<Complex64>::zeros(4, 4);
        chi[(0, 0)] = Complex64::new(0.5, 0.0);
        assert!(Channel::from_chi(&chi, basis).is_err());
    }

    #[test]
    fn to_kraus_identity_is_single_operator() {
        let basis = qubit_basis();
        let ch = Channel::identity(basis);
        let kraus = ch.to_kraus().unwrap();
        assert_eq!(kraus.len(), 1);
        // Phase convention makes the trace positive, so this is exactly I.
        let eye = DMatrix::<Complex64>::identity(2, 2);
        assert!((&kraus[0] - eye).iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-12);
    }

    #[test]
    fn cp_violation_detected_via_choi() {
        // Qubit "depolarizing" with p = 1.2 is TP but not CP.
        let basis = qubit_basis();
        let mut l = DMatrix::<f64>::identity(4, 4);
        for k in 1..4 {
            l[(k, k)] = 1.2;
        }
        let ch = Channel::from_liouville(l, basis).unwrap();
        let report = ch.validate_cptp(1e-9);
        assert!(report.is_tp);
        assert!(!report.is_cp);
        assert!(report.min_choi_eigenvalue < -1e-4);
        assert!(ch.to_kraus().is_err());
    }

    #[test]
    fn compose_with_identity_is_identity_operation() {
        let basis = qubit_basis();
        let mut l = DMatrix::<f64>::identity(4, 4);
        for k in 1..4 {
            l[(k, k)] = 0.9;
        }
        let ch = Channel::from_liouville(l, basis.clone()).unwrap();
        let id = Channel::identity(basis);
        let composed = ch.compose(&id).unwrap();
        assert!(liouville_distance(&composed, &ch) < 1e-15);
    }

    #[test]
    fn unital_block_and_nonunital_vector_reassemble() {
        let basis = qubit_basis();
        // Amplitude damping has a nonzero non-unital vector.
        let g: f64 = 0.11;
        let k0 = cmat(
            2,
            &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), ((1.0 - g).sqrt(), 0.0)],
        );
        let k1 = cmat(2, &[(0.0, 0.0), (g.sqrt(), 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let ch = Channel::from_kraus(&[k0, k1], basis).unwrap();
        let block = ch.unital_block();
        let vec = ch.nonunital_vector();
        assert!(vec.norm() > 1e-3);
        let l = ch.liouville();
        for i in 0..3 {
            assert!((vec[i] - l[(i + 1, 0)]).abs() == 0.0);
            for j in 0..3 {
                assert!((block[(i, j)] - l[(i + 1, j + 1)]).abs() == 0.0);
            }
        }
    }

    #[test]
    fn json_round_trip_reproduces_liouville() {
        let basis = qubit_basis();
        let mut l = DMatrix::<f64>::identity(4, 4);
        l[(1, 1)] = 0.987654321012345;
        l[(2, 2)] = 0.987654321012345;
        l[(1, 2)] = -0.0123456789;
        l[(2, 1)] = 0.0123456789;
        l[(3, 3)] = 0.975;
        let ch = Channel::from_liouville(l, basis).unwrap();
        let text = ch.to_json();
        let back = Channel::from_json(&text).unwrap();
        assert!(liouville_distance(&ch, &back) < 1e-12);
    }

    #[test]
    fn kraus_json_round_trip() {
        let text = r#"{"kraus": [[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]]}"#;
        let ops = kraus_from_json(text).unwrap();
        assert_eq!(ops.len(), 1);
        assert_eq!(ops[0].nrows(), 2);
        let round = kraus_from_json(&kraus_to_json(&ops)).unwrap();
        assert!((&round[0] - &ops[0]).iter().map(|c| c.norm()).fold(0.0, f64::max) == 0.0);
    }

    #[test]
    fn kraus_expansion_coefficients_reproduce_chi00() {
        // Decompose each Kraus operator as sqrt(a d)(cos(α) B0 + sin(α) v·B)
        // and check chi00 = Σ a_j cos²(α_j) together with Σ a_j = 1.
        let basis = qubit_basis();
        let g: f64 = 0.2;
        let k0 = cmat(
            2,
            &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), ((1.0 - g).sqrt(), 0.0)],
        );
        let k1 = cmat(2, &[(0.0, 0.0), (g.sqrt(), 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let ch = Channel::from_kraus(&[k0, k1], basis.clone()).unwrap();
        let d = 2.0;
        let mut a_sum = 0.0;
        let mut chi00_sum = 0.0;
        for op in ch.to_kraus().unwrap() {
            let norm_sq = op.iter().map(|c| c.norm_sqr()).sum::<f64>();
            let a_j = norm_sq / d;
            // ⟨B0, A⟩ = tr(A)/√d is nonnegative by the phase convention.
            let overlap = op.trace() / Complex64::new(d.sqrt(), 0.0);
            assert!(overlap.im.abs() < 1e-12 && overlap.re > -1e-12);
            let cos_alpha = overlap.re / (a_j * d).sqrt();
            a_sum += a_j;
            chi00_sum += a_j * cos_alpha.powi(2);
        }
        assert!((a_sum - 1.0).abs() < 1e-12);
        assert!((chi00_sum - ch.to_chi()[(0, 0)].re).abs() < 1e-12);
    }
}
