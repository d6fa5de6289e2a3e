//! Spin precession in a rotating frame, H = p²/2m + S·Ω (ħ = 1).
//!
//! Evolution is U = exp(−iHt), so a coaxial rotation through total angle θ
//! multiplies the S_z eigenstate |m⟩ by e^{−iθm}. At θ = 2π every m in a
//! multiplet picks up the same factor (−1)^{2S}; that statement does not
//! depend on the sign convention, but intermediate phases do, so reports
//! carry [`PHASE_CONVENTION`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qcore::{matexp, CMatrix, Ket, Operator, Tensor, C64};
use crate::spinrep::{spin_operators, SpinLabel, Vec3};

pub const PHASE_CONVENTION: &str =
    "H = +S.Omega, U = exp(-i H t); phase = arg <psi0|psi(t)> in (-pi, pi]";

/// Largest lattice handled by the dense propagator.
pub const MAX_LATTICE_SITES: usize = 64;

/// Piecewise-constant angular velocity: Ω(t) = ω_k on [t_k, t_{k+1}).
/// The last sample only marks the end time.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationSchedule {
    samples: Vec<(f64, Vec3)>,
}

impl RotationSchedule {
    pub fn new(samples: Vec<(f64, Vec3)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidSchedule(
                "need at least two samples to define an interval".into(),
            ));
        }
        for (t, w) in &samples {
            if !t.is_finite() || w.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidSchedule("non-finite sample".into()));
            }
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidSchedule(
                "sample times must be strictly increasing".into(),
            ));
        }
        Ok(Self { samples })
    }

    /// Constant ω over `[0, duration]`, split into `steps` intervals.
    pub fn constant(omega: Vec3, duration: f64, steps: usize) -> Result<Self> {
        Self::from_rate_fn(duration, steps, |_| omega)
    }

    /// ω(t) = k·t along `axis`, left-sampled on `steps` intervals, with k
    /// chosen so the sampled schedule turns through exactly `total_angle`.
    pub fn linear_ramp(axis: Vec3, total_angle: f64, duration: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidSchedule(
                "a ramp needs at least two steps".into(),
            ));
        }
        let dt = duration / steps as f64;
        let n = steps as f64;
        let k = total_angle / (dt * dt * n * (n - 1.0) / 2.0);
        Self::from_rate_fn(duration, steps, |t| axis * (k * t))
    }

    /// Two constant segments: the first lasts `split·duration` and covers
    /// `angle_split·total_angle`, the second covers the rest.
    pub fn two_step(
        axis: Vec3,
        total_angle: f64,
        duration: f64,
        split: f64,
        angle_split: f64,
    ) -> Result<Self> {
        if !(0.0 < split && split < 1.0) {
            return Err(Error::InvalidSchedule(format!(
                "time split {split} must lie in (0, 1)"
            )));
        }
        let t1 = split * duration;
        let w1 = angle_split * total_angle / t1;
        let w2 = (1.0 - angle_split) * total_angle / (duration - t1);
        Self::new(vec![
            (0.0, axis * w1),
            (t1, axis * w2),
            (duration, Vec3::zeros()),
        ])
    }

    /// Contiguous coaxial segments `(t0, t1, ω_z)`.
    pub fn from_z_segments(segments: &[(f64, f64, f64)]) -> Result<Self> {
        let Some(last) = segments.last() else {
            return Err(Error::InvalidSchedule("no segments".into()));
        };
        for w in segments.windows(2) {
            if w[0].1 != w[1].0 {
                return Err(Error::InvalidSchedule(format!(
                    "segment ending at {} is followed by one starting at {}",
                    w[0].1, w[1].0
                )));
            }
        }
        let mut samples: Vec<(f64, Vec3)> = segments
            .iter()
            .map(|&(t0, _, wz)| (t0, Vec3::new(0.0, 0.0, wz)))
            .collect();
        samples.push((last.1, Vec3::zeros()));
        Self::new(samples)
    }

    fn from_rate_fn(duration: f64, steps: usize, rate: impl Fn(f64) -> Vec3) -> Result<Self> {
        if steps == 0 || !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "need steps ≥ 1 and positive duration, got {steps} and {duration}"
            )));
        }
        let dt = duration / steps as f64;
        let mut samples: Vec<(f64, Vec3)> = (0..steps)
            .map(|k| {
                let t = k as f64 * dt;
                (t, rate(t))
            })
            .collect();
        samples.push((duration, Vec3::zeros()));
        Self::new(samples)
    }

    pub fn samples(&self) -> &[(f64, Vec3)] {
        &self.samples
    }

    /// (Δt_k, ω_k) for every interval.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, Vec3)> + '_ {
        self.samples.windows(2).map(|w| (w[1].0 - w[0].0, w[0].1))
    }

    pub fn duration(&self) -> f64 {
        self.samples[self.samples.len() - 1].0 - self.samples[0].0
    }

    /// Σ |ω_k|·Δt_k.
    pub fn total_angle(&self) -> f64 {
        self.intervals().map(|(dt, w)| w.norm() * dt).sum()
    }

    /// The common rotation axis, if every nonzero ω_k lies along one line.
    pub fn common_axis(&self) -> Option<Vec3> {
        let mut axis: Option<Vec3> = None;
        for (_, w) in self.intervals() {
            let n = w.norm();
            if n == 0.0 {
                continue;
            }
            let u = w / n;
            match axis {
                None => axis = Some(u),
                Some(a) if a.cross(&u).norm() < 1e-12 => {}
                Some(_) => return None,
            }
        }
        Some(axis.unwrap_or_else(Vec3::z))
    }
}

/// exp(−i t ω·S).
pub fn precession_unitary(s: SpinLabel, omega: &Vec3, t: f64) -> Result<Operator> {
    let generator = spin_operators(s).dot(omega);
    matexp(&generator, C64::new(0.0, -t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeResult {
    pub final_state: Ket,
    /// arg⟨ψ₀|ψ_final⟩ in (−π, π]; `None` when the fidelity is ≤ 1e−9.
    pub accumulated_phase: Option<f64>,
    /// |⟨ψ₀|ψ_final⟩|.
    pub fidelity: f64,
}

impl ExchangeResult {
    pub fn phase(&self) -> Result<f64> {
        self.accumulated_phase
            .ok_or(Error::PhaseUndefined(self.fidelity))
    }
}

/// Evolves `initial` through the time-ordered product of the schedule's
/// piecewise-constant precession unitaries.
pub fn exchange_phase(
    s: SpinLabel,
    schedule: &RotationSchedule,
    initial: &Ket,
) -> Result<ExchangeResult> {
    if initial.dim() != s.dim() {
        return Err(Error::DimensionMismatch(format!(
            "spin {s} needs a {}-dim state, got {}",
            s.dim(),
            initial.dim()
        )));
    }
    let ops = spin_operators(s);
    let mut state = initial.clone();
    for (dt, w) in schedule.intervals() {
        let u = matexp(&ops.dot(&w), C64::new(0.0, -dt))?;
        state = state.evolve(&u)?;
    }
    let (fidelity, accumulated_phase) = initial.overlap_phase(&state)?;
    Ok(ExchangeResult {
        final_state: state,
        accumulated_phase,
        fidelity: fidelity.min(1.0),
    })
}

/// e^{−2πiαm}: the factor picked up by |m⟩ under a coaxial rotation through
/// the fraction α of a full turn. `two_m` is 2m.
pub fn partial_swap_phase(s: SpinLabel, alpha: f64, two_m: i32) -> Result<C64> {
    check_alpha(alpha)?;
    s.index_of(two_m)?;
    Ok(C64::from_polar(1.0, -PI * alpha * f64::from(two_m)))
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(())
}

/// ω₁·S⁽¹⁾ ⊗ I + I ⊗ ω₂·S⁽²⁾.
pub fn two_particle_hamiltonian(
    s1: SpinLabel,
    s2: SpinLabel,
    omega1: &Vec3,
    omega2: &Vec3,
) -> Operator {
    let h1 = spin_operators(s1).dot(omega1);
    let h2 = spin_operators(s2).dot(omega2);
    let i1 = Operator::identity(s1.dim());
    let i2 = Operator::identity(s2.dim());
    h1.tensor(&i2)
        .add(&i1.tensor(&h2))
        .expect("both terms act on the same product space")
}

/// Local two-particle precession, returned in factorized form U₁ ⊗ U₂.
pub fn two_particle_unitary(
    s1: SpinLabel,
    s2: SpinLabel,
    omega1: &Vec3,
    omega2: &Vec3,
    t: f64,
) -> Result<Operator> {
    let u = precession_unitary(s1, omega1, t)?.tensor(&precession_unitary(s2, omega2, t)?);
    debug_assert!({
        let direct = matexp(
            &two_particle_hamiltonian(s1, s2, omega1, omega2),
            C64::new(0.0, -t),
        )?;
        u.max_abs_diff(&direct) < 1e-9
    });
    Ok(u)
}

/// Periodic second-difference kinetic matrix with unit lattice spacing,
/// K_xy = (2δ_xy − δ_{x,y+1} − δ_{x,y−1}) / 2m.
pub fn kinetic_matrix(n_sites: usize, mass: f64) -> Result<Operator> {
    if n_sites == 0 || n_sites > MAX_LATTICE_SITES {
        return Err(Error::InvalidParameter(format!(
            "lattice needs 1..={MAX_LATTICE_SITES} sites, got {n_sites}"
        )));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::NonPositiveMass(mass));
    }
    let scale = 1.0 / (2.0 * mass);
    let mut k = CMatrix::zeros(n_sites, n_sites);
    for x in 0..n_sites {
        k[(x, x)] += C64::new(2.0 * scale, 0.0);
        k[(x, (x + 1) % n_sites)] -= C64::new(scale, 0.0);
        k[(x, (x + n_sites - 1) % n_sites)] -= C64::new(scale, 0.0);
    }
    Operator::hermitian(k)
}

/// H = K ⊗ I + Σ_x |x⟩⟨x| ⊗ ω(x)·S.
pub fn lattice_hamiltonian(
    n_sites: usize,
    mass: f64,
    s: SpinLabel,
    omega_field: &[Vec3],
) -> Result<Operator> {
    if omega_field.len() != n_sites {
        return Err(Error::DimensionMismatch(format!(
            "{} field values for {n_sites} sites",
            omega_field.len()
        )));
    }
    let d = s.dim();
    let kinetic = kinetic_matrix(n_sites, mass)?.tensor(&Operator::identity(d));
    let ops = spin_operators(s);
    let mut h = kinetic.into_entries();
    for (x, w) in omega_field.iter().enumerate() {
        let mut block = h.view_mut((x * d, x * d), (d, d));
        block += ops.dot(w).entries();
    }
    Operator::hermitian(h)
}

/// Evolves a (site ⊗ spin) state under the lattice Hamiltonian for time t.
pub fn lattice_evolution(
    n_sites: usize,
    mass: f64,
    s: SpinLabel,
    omega_field: &[Vec3],
    t: f64,
    initial: &Ket,
) -> Result<Ket> {
    let d = s.dim();
    if initial.dim() != n_sites * d {
        return Err(Error::DimensionMismatch(format!(
            "{n_sites} sites with spin {s} need dimension {}, got {}",
            n_sites * d,
            initial.dim()
        )));
    }
    let h = lattice_hamiltonian(n_sites, mass, s, omega_field)?;
    let u = matexp(&h, C64::new(0.0, -t))?;
    initial.with_factor_dims(vec![n_sites, d])?.evolve(&u)
}

/// Schedule-independence check: the phase of the highest-weight state for
/// each schedule, or `None` where it is undefined.
pub fn schedule_phases(
    s: SpinLabel,
    schedules: &[RotationSchedule],
) -> Result<Vec<ExchangeResult>> {
    let initial = Ket::basis(vec![s.dim()], 0)?;
    crate::par::try_map(schedules, |sch| exchange_phase(s, sch, &initial))
}

/// Residual of the norm of `ket` against 1, for evolution diagnostics.
pub fn norm_drift(ket: &Ket) -> f64 {
    (ket.amplitudes().norm() - 1.0).abs()
}
