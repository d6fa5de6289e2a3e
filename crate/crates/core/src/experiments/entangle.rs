use std::f64::consts::FRAC_1_SQRT_2;

use crate::dynamics::partial_swap_phase;
use crate::error::{Error, Result};
use crate::par;
use crate::qcore::{
    concurrence_2x2, entanglement_entropy, CMatrix, Ket, Operator, Tensor, C64, ONE,
};
use crate::spinrep::SpinLabel;

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementSweepPoint {
    pub alpha: f64,
    /// Factor on the |x₂x₄⟩ branch, e^{−2πiαS}.
    pub branch_phase: C64,
    pub concurrence: f64,
    pub entropy_bits: f64,
    /// Amplitudes on |x₁x₃⟩, |x₁x₄⟩, |x₂x₃⟩, |x₂x₄⟩.
    pub amplitudes: [C64; 4],
}

fn beam_splitter() -> Operator {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    Operator::unitary(CMatrix::from_row_slice(2, 2, &[h, h, h, -h]))
        .expect("balanced beam splitter is unitary")
}

/// Two particles, each sent through a balanced beam splitter, then the
/// x₂ and x₄ paths are swapped by a rotation through α of a full turn.
/// Only the |x₂x₄⟩ branch picks up the rotation factor.
pub fn beamsplitter_entanglement(s: SpinLabel, alpha: f64) -> Result<EntanglementSweepPoint> {
    let branch_phase = partial_swap_phase(s, alpha, s.two_s() as i32)?;
    let bs = beam_splitter();
    let input = Ket::basis(vec![2], 0)?;
    let split = input.evolve(&bs)?;
    let psi = split.tensor(&split);

    let swap = Operator::unitary(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        ONE,
        ONE,
        ONE,
        branch_phase,
    ])))?;
    let out = psi.evolve(&swap)?;
    let a = out.amplitudes();
    let amplitudes = [a[0], a[1], a[2], a[3]];
    Ok(EntanglementSweepPoint {
        alpha,
        branch_phase,
        concurrence: concurrence_2x2(&out)?,
        entropy_bits: entanglement_entropy(&out, &[0])?,
        amplitudes,
    })
}

/// Evaluates every α (in parallel when enabled) and returns the points
/// sorted by α.
pub fn entanglement_sweep(s: SpinLabel, alphas: &[f64]) -> Result<Vec<EntanglementSweepPoint>> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("empty alpha list".into()));
    }
    let mut points = par::try_map(alphas, |&a| beamsplitter_entanglement(s, a))?;
    points.sort_by(|p, q| p.alpha.total_cmp(&q.alpha));
    Ok(points)
}

/// Inclusive grid start, start+step, …, stop. The last point snaps to `stop`
/// when it lands within 1e−9·step of it.
pub fn alpha_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "grid step must be positive, got {step}"
        )));
    }
    if !(start.is_finite() && stop.is_finite()) || start > stop {
        return Err(Error::InvalidParameter(format!(
            "bad grid bounds {start}..{stop}"
        )));
    }
    let span = (stop - start) / step;
    let n = (span + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|i| start + i as f64 * step).collect();
    if let Some(last) = grid.last_mut() {
        if (stop - *last).abs() < 1e-9 * step {
            *last = stop;
        }
    }
    for &a in &grid {
        crate::dynamics::check_alpha(a)?;
    }
    Ok(grid)
}
