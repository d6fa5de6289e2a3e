use super::{wrap_phase, CMatrix, DensityOperator, Ket, C64, ZERO};
use crate::error::{Error, Result};

/// Splits every flat index of a multi-factor space into a pair
/// `(index over kept factors, index over the rest)`.
struct Bipartition {
    kept_dim: usize,
    rest_dim: usize,
    split: Vec<(usize, usize)>,
}

impl Bipartition {
    fn new(factor_dims: &[usize], keep: &[usize]) -> Result<Self> {
        let mut is_kept = vec![false; factor_dims.len()];
        for &k in keep {
            if k >= factor_dims.len() {
                return Err(Error::DimensionMismatch(format!(
                    "factor index {k} out of range for {} factors",
                    factor_dims.len()
                )));
            }
            if is_kept[k] {
                return Err(Error::DimensionMismatch(format!(
                    "factor index {k} listed twice"
                )));
            }
            is_kept[k] = true;
        }
        let total: usize = factor_dims.iter().product();
        let kept_dim: usize = factor_dims
            .iter()
            .zip(&is_kept)
            .filter(|(_, &k)| k)
            .map(|(d, _)| d)
            .product();
        let rest_dim = total / kept_dim;

        let mut split = Vec::with_capacity(total);
        for flat in 0..total {
            // Leftmost factor is the slowest digit.
            let mut rem = flat;
            let mut digits = vec![0usize; factor_dims.len()];
            for (f, &d) in factor_dims.iter().enumerate().rev() {
                digits[f] = rem % d;
                rem /= d;
            }
            let (mut a, mut b) = (0usize, 0usize);
            for (f, &d) in factor_dims.iter().enumerate() {
                if is_kept[f] {
                    a = a * d + digits[f];
                } else {
                    b = b * d + digits[f];
                }
            }
            split.push((a, b));
        }
        Ok(Self {
            kept_dim,
            rest_dim,
            split,
        })
    }

    /// Amplitudes rearranged into a `kept × rest` matrix.
    fn reshape(&self, amplitudes: &[C64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.kept_dim, self.rest_dim);
        for (amp, &(a, b)) in amplitudes.iter().zip(&self.split) {
            m[(a, b)] = *amp;
        }
        m
    }
}

/// Traces out every factor not listed in `keep`. Kept factors stay in their
/// original relative order.
pub fn partial_trace(
    rho: &DensityOperator,
    factor_dims: &[usize],
    keep: &[usize],
) -> Result<DensityOperator> {
    let total: usize = factor_dims.iter().product();
    if factor_dims.is_empty() || total != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "factor dimensions {factor_dims:?} do not match a {}-dim density operator",
            rho.dim()
        )));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    let part = Bipartition::new(factor_dims, &keep_sorted)?;

    // Group flat indices by their traced-out digit.
    let mut by_rest: Vec<Vec<(usize, usize)>> = vec![Vec::new(); part.rest_dim];
    for (flat, &(a, b)) in part.split.iter().enumerate() {
        by_rest[b].push((a, flat));
    }
    let mut out = CMatrix::zeros(part.kept_dim, part.kept_dim);
    let entries = rho.entries();
    for group in &by_rest {
        for &(a, i) in group {
            for &(a2, j) in group {
                out[(a, a2)] += entries[(i, j)];
            }
        }
    }
    DensityOperator::new(out)
}

/// Schmidt coefficients of `psi` across (`part`, complement), descending.
pub fn schmidt_coefficients(psi: &Ket, part: &[usize]) -> Result<Vec<f64>> {
    let bip = Bipartition::new(psi.factor_dims(), part)?;
    let m = bip.reshape(psi.amplitudes().as_slice());
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Von Neumann entropy in bits of the reduced state on `bipartition`.
pub fn entanglement_entropy(psi: &Ket, bipartition: &[usize]) -> Result<f64> {
    if psi.factor_dims().len() < 2 {
        return Err(Error::DimensionMismatch(format!(
            "entanglement entropy needs at least two factors, got {:?}",
            psi.factor_dims()
        )));
    }
    let s = schmidt_coefficients(psi, bipartition)?;
    let weights: Vec<f64> = s.iter().map(|x| x * x).collect();
    let total: f64 = weights.iter().sum();
    let h = weights
        .iter()
        .map(|w| w / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum::<f64>();
    Ok(h.max(0.0))
}

/// Pure-state concurrence `2|det M|` of a two-qubit ket.
pub fn concurrence_2x2(psi: &Ket) -> Result<f64> {
    if psi.factor_dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "concurrence needs factor dims [2, 2], got {:?}",
            psi.factor_dims()
        )));
    }
    let a = psi.amplitudes();
    let det = a[0] * a[3] - a[1] * a[2];
    Ok((2.0 * det.norm()).min(1.0))
}

/// Relative phase and fringe visibility of a qubit density operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherencePhase {
    /// arg ρ₁₀ in (−π, π].
    pub phase: f64,
    /// 2|ρ₁₀|.
    pub visibility: f64,
}

pub fn coherence_phase(rho: &DensityOperator) -> Result<CoherencePhase> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "coherence phase needs a 2x2 density operator, got {}",
            rho.dim()
        )));
    }
    let r10 = rho.entries()[(1, 0)];
    let visibility = (2.0 * r10.norm()).min(1.0);
    if visibility <= 1e-9 || r10 == ZERO {
        return Err(Error::PhaseUndefined(visibility));
    }
    Ok(CoherencePhase {
        phase: wrap_phase(r10.arg()),
        visibility,
    })
}
