use std::f64::consts::PI;

use crate::dynamics::{check_alpha, precession_unitary};
use crate::error::Result;
use crate::qcore::{
    coherence_phase, partial_trace, CMatrix, DensityOperator, Ket, Operator, Tensor, C64,
};
use crate::spinrep::{SpinLabel, Vec3};

/// What happens to a particle carried once around a circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransportModel {
    /// The spin precesses with the rotating frame: U = exp(−i·2πα·S_z).
    Dynamical,
    /// Transport only relabels the mode; no phase is generated.
    ModeRelabeling,
}

impl TransportModel {
    pub fn name(self) -> &'static str {
        match self {
            TransportModel::Dynamical => "dynamical",
            TransportModel::ModeRelabeling => "mode_relabeling",
        }
    }
}

impl std::str::FromStr for TransportModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "dynamical" => Ok(TransportModel::Dynamical),
            "mode_relabeling" | "mode-relabeling" => Ok(TransportModel::ModeRelabeling),
            other => Err(format!(
                "unknown model '{other}' (expected dynamical or mode_relabeling)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerReport {
    pub model: TransportModel,
    pub spin: SpinLabel,
    pub alpha: f64,
    /// 2m of the system state the rotation acted on.
    pub two_m: i32,
    pub control_state: DensityOperator,
    /// arg ρ₁₀ of the control qubit; `None` when visibility ≤ 1e−9.
    pub phase: Option<f64>,
    pub visibility: f64,
}

/// Control qubit in |+⟩ drives the transport of a spin-S particle prepared
/// in its highest-weight state; the phase kicked back onto the control is
/// read from its reduced density operator.
pub fn controlled_rotation_interferometer(
    s: SpinLabel,
    alpha: f64,
    model: TransportModel,
) -> Result<InterferometerReport> {
    interferometer_with_state(s, alpha, model, s.two_s() as i32)
}

/// As [`controlled_rotation_interferometer`] with the system in |m⟩, m = two_m/2.
pub fn interferometer_with_state(
    s: SpinLabel,
    alpha: f64,
    model: TransportModel,
    two_m: i32,
) -> Result<InterferometerReport> {
    check_alpha(alpha)?;
    let d = s.dim();
    let system = Ket::basis(vec![d], s.index_of(two_m)?)?;
    let control = Ket::from_slice(
        &[C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2],
        vec![2],
    )?;
    let psi = control.tensor(&system);

    let transport = match model {
        TransportModel::Dynamical => precession_unitary(s, &Vec3::z(), 2.0 * PI * alpha)?,
        TransportModel::ModeRelabeling => Operator::identity(d),
    };
    let mut controlled = CMatrix::identity(2 * d, 2 * d);
    controlled
        .view_mut((d, d), (d, d))
        .copy_from(transport.entries());
    let controlled = Operator::unitary(controlled)?;

    let out = psi.evolve(&controlled)?;
    let control_state = partial_trace(&out.projector(), &[2, d], &[0])?;
    let (phase, visibility) = match coherence_phase(&control_state) {
        Ok(c) => (Some(c.phase), c.visibility),
        Err(_) => (None, 2.0 * control_state.entries()[(1, 0)].norm()),
    };
    Ok(InterferometerReport {
        model,
        spin: s,
        alpha,
        two_m,
        control_state,
        phase,
        visibility,
    })
}
