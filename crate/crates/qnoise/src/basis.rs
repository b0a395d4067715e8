//! Trace-orthonormal Hermitian operator bases.
//!
//! A basis `{B_0 = I/√d, B_1, …, B_{d²−1}}` of Hermitian matrices with
//! `tr(B_j† B_k) = δ_jk` underlies the chi-matrix and Liouville
//! representations of a channel. Two constructions are provided: tensor
//! products of normalized Pauli matrices (powers of two) and generalized
//! Gell-Mann matrices (any dimension).

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which family of basis matrices to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// Normalized tensor products of I, X, Y, Z. Requires `d` a power of two.
    Pauli,
    /// Generalized Gell-Mann matrices, valid for any `d ≥ 2`.
    GellMann,
}

impl BasisKind {
    pub fn label(&self) -> &'static str {
        match self {
            BasisKind::Pauli => "pauli",
            BasisKind::GellMann => "gell-mann",
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "pauli" => Ok(BasisKind::Pauli),
            "gell-mann" => Ok(BasisKind::GellMann),
            other => Err(Error::InvalidBasis(format!("unknown kind {other:?}"))),
        }
    }
}

/// An ordered trace-orthonormal basis of Hermitian `d × d` matrices.
///
/// The first element is always `I/√d`. The ordering is fixed so that
/// chi matrices are reproducible: Pauli strings are enumerated
/// lexicographically (I, X, Y, Z per factor, identity string first);
/// Gell-Mann matrices are ordered as symmetric, antisymmetric, then
/// diagonal generators.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    dim: usize,
    kind: BasisKind,
    elements: Vec<DMatrix<Complex64>>,
    /// d² × d² unitary whose k-th column is the column-major vectorization
    /// of `B_k`.
    transform: DMatrix<Complex64>,
}

impl OperatorBasis {
    /// Builds the basis for dimension `d`.
    pub fn new(dim: usize, kind: BasisKind) -> Result<Arc<Self>> {
        if dim < 2 {
            return Err(Error::InvalidBasis(format!("dimension {dim} < 2")));
        }
        let elements = match kind {
            BasisKind::Pauli => {
                if !dim.is_power_of_two() {
                    return Err(Error::InvalidBasis(format!(
                        "pauli basis requires a power-of-two dimension, got {dim}"
                    )));
                }
                build_pauli(dim)
            }
            BasisKind::GellMann => build_gell_mann(dim),
        };
        let mut transform = DMatrix::zeros(dim * dim, dim * dim);
        for (k, b) in elements.iter().enumerate() {
            transform.set_column(k, &vectorize(b));
        }
        Ok(Arc::new(OperatorBasis {
            dim,
            kind,
            elements,
            transform,
        }))
    }

    pub fn pauli(dim: usize) -> Result<Arc<Self>> {
        Self::new(dim, BasisKind::Pauli)
    }

    pub fn gell_mann(dim: usize) -> Result<Arc<Self>> {
        Self::new(dim, BasisKind::GellMann)
    }

    /// Pauli basis when the dimension is a power of two, Gell-Mann otherwise.
    pub fn for_dim(dim: usize) -> Result<Arc<Self>> {
        if dim.is_power_of_two() {
            Self::pauli(dim)
        } else {
            Self::gell_mann(dim)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn elements(&self) -> &[DMatrix<Complex64>] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &DMatrix<Complex64> {
        &self.elements[k]
    }

    /// The unitary basis-change matrix between elementary (vectorized) and
    /// basis coordinates.
    pub fn transform(&self) -> &DMatrix<Complex64> {
        &self.transform
    }

    /// Real expansion coordinates of a Hermitian matrix: `c_k = tr(B_k m)`.
    pub fn coords(&self, m: &DMatrix<Complex64>) -> DVector<f64> {
        DVector::from_iterator(
            self.elements.len(),
            self.elements.iter().map(|b| {
                let mut acc = Complex64::default();
                for j in 0..self.dim {
                    for i in 0..self.dim {
                        // tr(B m) = Σ_ij B[i,j] m[j,i]
                        acc += b[(i, j)] * m[(j, i)];
                    }
                }
                acc.re
            }),
        )
    }

    /// Reassembles `Σ_k c_k B_k` from real coordinates.
    pub fn matrix_from_coords(&self, coords: &DVector<f64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (k, b) in self.elements.iter().enumerate() {
            out += b * Complex64::new(coords[k], 0.0);
        }
        out
    }

    /// Reassembles `Σ_k c_k B_k` from complex coordinates.
    pub fn matrix_from_complex_coords(&self, coords: &DVector<Complex64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (k, b) in self.elements.iter().enumerate() {
            out += b * coords[k];
        }
        out
    }

    /// Gram matrix `tr(B_j† B_k)`; equals the identity for a valid basis.
    pub fn gram(&self) -> DMatrix<Complex64> {
        let n = self.elements.len();
        DMatrix::from_fn(n, n, |j, k| {
            (self.elements[j].adjoint() * &self.elements[k]).trace()
        })
    }
}

/// Column-major vectorization.
pub fn vectorize(m: &DMatrix<Complex64>) -> DVector<Complex64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`] for a square `d × d` matrix.
pub fn unvectorize(v: &DVector<Complex64>, dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_column_slice(dim, dim, v.as_slice())
}

fn pauli_matrices() -> [DMatrix<Complex64>; 4] {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        DMatrix::from_row_slice(2, 2, &[one, zero, zero, one]),
        DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
        DMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]),
        DMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]),
    ]
}

fn build_pauli(dim: usize) -> Vec<DMatrix<Complex64>> {
    let n_qubits = dim.trailing_zeros() as usize;
    let singles = pauli_matrices();
    let norm = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    let count = dim * dim;
    let mut out = Vec::with_capacity(count);
    for index in 0..count {
        // Big-endian base-4 digits: the first factor varies slowest, so the
        // string I…I comes first and the order is lexicographic in (I,X,Y,Z).
        let mut m = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        for q in (0..n_qubits).rev() {
            let digit = (index >> (2 * q)) & 3;
            m = m.kronecker(&singles[digit]);
        }
        out.push(m * norm);
    }
    out
}

fn build_gell_mann(dim: usize) -> Vec<DMatrix<Complex64>> {
    let d = dim;
    let mut out = Vec::with_capacity(d * d);
    let zero = DMatrix::<Complex64>::zeros(d, d);
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);

    let mut identity = zero.clone();
    let id_coeff = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for j in 0..d {
        identity[(j, j)] = id_coeff;
    }
    out.push(identity);

    // Symmetric generators (E_jk + E_kj)/√2 for j < k.
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = zero.clone();
            m[(j, k)] = inv_sqrt2;
            m[(k, j)] = inv_sqrt2;
            out.push(m);
        }
    }
    // Antisymmetric generators −i(E_jk − E_kj)/√2 for j < k.
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = zero.clone();
            m[(j, k)] = Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2);
            m[(k, j)] = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
            out.push(m);
        }
    }
    // Diagonal generators diag(1, …, 1, −l, 0, …)/√(l(l+1)).
    for l in 1..d {
        let mut m = zero.clone();
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        for j in 0..l {
            m[(j, j)] = Complex64::new(norm, 0.0);
        }
        m[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
        out.push(m);
    }
    out
}
