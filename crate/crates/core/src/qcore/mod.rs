//! Dense complex linear algebra and the handful of quantum-information
//! measures the rest of the crate is built on.
//!
//! Tensor products use one convention everywhere: row-major Kronecker
//! ordering with the leftmost factor varying slowest.

mod expm;
mod measures;

pub use expm::matexp;
pub use measures::{
    coherence_phase, concurrence_2x2, entanglement_entropy, partial_trace, schmidt_coefficients,
    CoherencePhase,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for constructor invariants (norms, tags, traces).
pub const CONSTRUCT_TOL: f64 = 1e-12;
/// Tolerance for quantities accumulated over an evolution.
pub const EVOLUTION_TOL: f64 = 1e-9;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Wraps an angle into (−π, π].
pub fn wrap_phase(phase: f64) -> f64 {
    use std::f64::consts::PI;
    let mut p = phase.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn unitarity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs_diff(&(m.adjoint() * m), &CMatrix::identity(n, n))
}

fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Structural promise carried by an [`Operator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpTag {
    Unitary,
    Hermitian,
    General,
}

/// A dense complex square matrix with a validated structural tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    entries: CMatrix,
    tag: OpTag,
}

impl Operator {
    /// Builds an operator, checking squareness, finiteness and the tag.
    pub fn new(entries: CMatrix, tag: OpTag) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFiniteEntries);
        }
        match tag {
            OpTag::Unitary => {
                let residual = unitarity_residual(&entries);
                if residual >= CONSTRUCT_TOL {
                    return Err(Error::NotUnitary { residual });
                }
            }
            OpTag::Hermitian => {
                let residual = hermiticity_residual(&entries);
                if residual >= CONSTRUCT_TOL {
                    return Err(Error::NotHermitian { residual });
                }
            }
            OpTag::General => {}
        }
        Ok(Self { entries, tag })
    }

    pub fn general(entries: CMatrix) -> Result<Self> {
        Self::new(entries, OpTag::General)
    }

    pub fn hermitian(entries: CMatrix) -> Result<Self> {
        Self::new(entries, OpTag::Hermitian)
    }

    pub fn unitary(entries: CMatrix) -> Result<Self> {
        Self::new(entries, OpTag::Unitary)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
            tag: OpTag::Unitary,
        }
    }

    /// The zero matrix, tagged hermitian.
    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
            tag: OpTag::Hermitian,
        }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn tag(&self) -> OpTag {
        self.tag
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            entries: self.entries.adjoint(),
            tag: self.tag,
        }
    }

    /// Matrix product `self · rhs`. Two unitaries give a unitary.
    pub fn compose(&self, rhs: &Operator) -> Result<Operator> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}-dim and {}-dim operators",
                self.dim(),
                rhs.dim()
            )));
        }
        let tag = if self.tag == OpTag::Unitary && rhs.tag == OpTag::Unitary {
            OpTag::Unitary
        } else {
            OpTag::General
        };
        Operator::new(&self.entries * &rhs.entries, tag)
    }

    pub fn scale(&self, s: f64) -> Operator {
        let tag = match self.tag {
            OpTag::Hermitian => OpTag::Hermitian,
            _ => OpTag::General,
        };
        Operator {
            entries: &self.entries * C64::new(s, 0.0),
            tag,
        }
    }

    /// Sum of two operators; hermitian if both are.
    pub fn add(&self, rhs: &Operator) -> Result<Operator> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}-dim and {}-dim operators",
                self.dim(),
                rhs.dim()
            )));
        }
        let tag = if self.tag == OpTag::Hermitian && rhs.tag == OpTag::Hermitian {
            OpTag::Hermitian
        } else {
            OpTag::General
        };
        Ok(Operator {
            entries: &self.entries + &rhs.entries,
            tag,
        })
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    /// Applies the operator to a ket without renormalizing.
    pub fn apply(&self, ket: &Ket) -> Result<CVector> {
        if self.dim() != ket.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}-dim operator applied to {}-dim ket",
                self.dim(),
                ket.dim()
            )));
        }
        Ok(&self.entries * &ket.amplitudes)
    }
}

/// A normalized state vector with explicit tensor-factor structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: CVector,
    factor_dims: Vec<usize>,
}

fn check_factor_dims(len: usize, factor_dims: &[usize]) -> Result<()> {
    if factor_dims.is_empty() || factor_dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!(
            "factor dimensions must be positive and non-empty, got {factor_dims:?}"
        )));
    }
    let product: usize = factor_dims.iter().product();
    if product != len {
        return Err(Error::DimensionMismatch(format!(
            "factor dimensions {factor_dims:?} multiply to {product}, state has {len} amplitudes"
        )));
    }
    Ok(())
}

impl Ket {
    /// Builds a ket from amplitudes that must already be unit norm.
    pub fn new(amplitudes: CVector, factor_dims: Vec<usize>) -> Result<Self> {
        check_factor_dims(amplitudes.len(), &factor_dims)?;
        let norm = amplitudes.norm();
        if !norm.is_finite() || (norm - 1.0).abs() >= CONSTRUCT_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes,
            factor_dims,
        })
    }

    /// Builds a ket after dividing out the norm of `amplitudes`.
    pub fn normalized(amplitudes: CVector, factor_dims: Vec<usize>) -> Result<Self> {
        check_factor_dims(amplitudes.len(), &factor_dims)?;
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
            factor_dims,
        })
    }

    pub fn from_slice(amplitudes: &[C64], factor_dims: Vec<usize>) -> Result<Self> {
        Self::new(CVector::from_column_slice(amplitudes), factor_dims)
    }

    /// Computational basis state `index` of a space with the given factors.
    pub fn basis(factor_dims: Vec<usize>, index: usize) -> Result<Self> {
        let dim: usize = factor_dims.iter().product();
        if index >= dim {
            return Err(Error::DimensionMismatch(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = CVector::zeros(dim);
        amps[index] = ONE;
        Self::new(amps, factor_dims)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "inner product of {}-dim and {}-dim kets",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Fidelity |⟨self|other⟩| and, when it exceeds `1e-9`, the phase
    /// arg⟨self|other⟩ in (−π, π].
    pub fn overlap_phase(&self, other: &Ket) -> Result<(f64, Option<f64>)> {
        let z = self.inner(other)?;
        let fidelity = z.norm();
        let phase = (fidelity > EVOLUTION_TOL).then(|| wrap_phase(z.arg()));
        Ok((fidelity, phase))
    }

    /// Applies a unitary. The norm drift is checked against the evolution
    /// tolerance and then removed so the constructor invariant holds.
    pub fn evolve(&self, u: &Operator) -> Result<Ket> {
        let next = u.apply(self)?;
        let norm = next.norm();
        if (norm - 1.0).abs() >= EVOLUTION_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Ket {
            amplitudes: next.unscale(norm),
            factor_dims: self.factor_dims.clone(),
        })
    }

    /// Same amplitudes, regrouped into different factors.
    pub fn with_factor_dims(&self, factor_dims: Vec<usize>) -> Result<Ket> {
        check_factor_dims(self.dim(), &factor_dims)?;
        Ok(Ket {
            amplitudes: self.amplitudes.clone(),
            factor_dims,
        })
    }

    pub fn projector(&self) -> DensityOperator {
        DensityOperator {
            entries: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    entries: CMatrix,
}

impl DensityOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "density operator must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let herm = hermiticity_residual(&entries);
        if herm >= CONSTRUCT_TOL {
            return Err(Error::InvalidDensity(format!(
                "not hermitian (residual {herm:e})"
            )));
        }
        let trace = entries.trace();
        if (trace - ONE).norm() >= CONSTRUCT_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
        }
        let min_eig = entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }
}

/// Kronecker product with the leftmost factor varying slowest.
pub trait Tensor: Sized {
    fn tensor(&self, rhs: &Self) -> Self;
}

impl Tensor for Operator {
    fn tensor(&self, rhs: &Self) -> Self {
        let tag = match (self.tag, rhs.tag) {
            (OpTag::Unitary, OpTag::Unitary) => OpTag::Unitary,
            (OpTag::Hermitian, OpTag::Hermitian) => OpTag::Hermitian,
            _ => OpTag::General,
        };
        Operator {
            entries: self.entries.kronecker(&rhs.entries),
            tag,
        }
    }
}

impl Tensor for Ket {
    fn tensor(&self, rhs: &Self) -> Self {
        let mut factor_dims = self.factor_dims.clone();
        factor_dims.extend_from_slice(&rhs.factor_dims);
        Ket {
            amplitudes: self.amplitudes.kronecker(&rhs.amplitudes),
            factor_dims,
        }
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Kronecker product of a whole list, left to right.
pub fn tensor_all<T: Tensor + Clone>(items: &[T]) -> Option<T> {
    let (first, rest) = items.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, x| acc.tensor(x)))
}

/// Pauli matrices σx, σy, σz in the computational basis.
pub fn pauli() -> [CMatrix; 3] {
    let sx = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let sy = CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
    let sz = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    [sx, sy, sz]
}
