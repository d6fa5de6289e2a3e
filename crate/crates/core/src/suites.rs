//! Seeded randomized checks shared by the command-line front end and the
//! acceptance tests. Every table is a pure function of its seed.

use std::f64::consts::PI;

use nalgebra::Rotation3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{schedule_phases, RotationSchedule};
use crate::error::{Error, Result};
use crate::galilean::{
    apply_boost, ll_matrices, plane_wave_solutions, verify_squaring, ConditionResiduals,
    GalileanBoost,
};
use crate::par;
use crate::qcore::{max_abs_diff, CMatrix, C64};
use crate::spinrep::{random_unit_vector, rotation, verify_majorana_rotation, SpinLabel, Vec3};

pub const SQUARING_POINTS: usize = 100;
pub const NULLITY_MOMENTA: usize = 20;
pub const BOOST_TRIALS: usize = 20;

fn uniform_vec<R: Rng>(rng: &mut R, half_width: f64) -> Vec3 {
    Vec3::new(
        rng.random_range(-half_width..=half_width),
        rng.random_range(-half_width..=half_width),
        rng.random_range(-half_width..=half_width),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationPhaseRow {
    pub spin: SpinLabel,
    pub axes: usize,
    /// max over axes of max|D^S(n̂, 2π) − (−1)^{2S}·I|.
    pub max_deviation: f64,
}

/// Full-turn rotation against (−1)^{2S}·I for each spin on `n_axes` random axes.
pub fn rotation_phase_table(
    spins: &[SpinLabel],
    n_axes: usize,
    seed: u64,
) -> Result<Vec<RotationPhaseRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axes: Vec<Vec3> = (0..n_axes).map(|_| random_unit_vector(&mut rng)).collect();
    par::try_map(spins, |&s| {
        let n = s.dim();
        let target = CMatrix::identity(n, n) * C64::new(f64::from(s.exchange_sign()), 0.0);
        let mut max_deviation = 0.0f64;
        for axis in &axes {
            let d = rotation(s, axis, 2.0 * PI)?;
            max_deviation = max_deviation.max(max_abs_diff(d.entries(), &target));
        }
        Ok(RotationPhaseRow {
            spin: s,
            axes: n_axes,
            max_deviation,
        })
    })
}

/// Majorana-embedding rotation residual on one seeded random axis and angle.
pub fn majorana_check(s: SpinLabel, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axis = random_unit_vector(&mut rng);
    let angle = rng.random_range(0.0..2.0 * PI);
    verify_majorana_rotation(s, &axis, angle)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveEquationReport {
    pub mass: f64,
    pub conditions: ConditionResiduals,
    /// Largest squaring residual over the random (E, p) grid.
    pub max_squaring_residual: f64,
    /// On-shell null-space dimension at each random momentum.
    pub nullities: Vec<usize>,
    /// Largest M(E′, p′)·ψ′ residual over the random boosts.
    pub max_covariance_residual: f64,
}

impl WaveEquationReport {
    pub fn nullities_all_two(&self) -> bool {
        self.nullities.iter().all(|&k| k == 2)
    }
}

/// Algebraic conditions, squaring on a random off-shell grid, on-shell
/// nullity, and boost covariance of random plane waves.
pub fn wave_equation_suite(mass: f64, seed: u64) -> Result<WaveEquationReport> {
    let rep = ll_matrices(mass)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let grid: Vec<(f64, Vec3)> = (0..SQUARING_POINTS)
        .map(|_| (rng.random_range(-5.0..=5.0), uniform_vec(&mut rng, 2.0)))
        .collect();
    let max_squaring_residual = par::map(&grid, |(e, p)| verify_squaring(&rep, p, *e))
        .into_iter()
        .fold(0.0, f64::max);

    let momenta: Vec<Vec3> = (0..NULLITY_MOMENTA)
        .map(|_| uniform_vec(&mut rng, 2.0))
        .collect();
    let nullities = par::map(&momenta, |p| rep.nullity(rep.shell_energy(p), p));

    let trials: Vec<(GalileanBoost, Vec3, usize)> = (0..BOOST_TRIALS)
        .map(|_| {
            let axis = random_unit_vector(&mut rng);
            let angle = rng.random_range(0.0..2.0 * PI);
            let rot = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
            let boost = GalileanBoost {
                velocity: uniform_vec(&mut rng, 1.0),
                rotation: *rot.matrix(),
                displacement: uniform_vec(&mut rng, 1.0),
                phase_const: rng.random_range(-PI..=PI),
            };
            (boost, uniform_vec(&mut rng, 2.0), rng.random_range(0..2))
        })
        .collect();
    let covariance = par::try_map(&trials, |(boost, p, which)| {
        let sols = plane_wave_solutions(&rep, p)?;
        match apply_boost(boost, &sols[*which], &rep) {
            Ok(out) => Ok(out.residual(&rep)),
            Err(Error::CovarianceViolation { residual }) => Ok(residual),
            Err(e) => Err(e),
        }
    })?;
    let max_covariance_residual = covariance.into_iter().fold(0.0, f64::max);

    Ok(WaveEquationReport {
        mass,
        conditions: rep.condition_residuals(),
        max_squaring_residual,
        nullities,
        max_covariance_residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleRow {
    pub name: String,
    pub total_angle: f64,
    /// arg⟨ψ₀|ψ_final⟩ for the highest-weight start, if defined.
    pub phase: Option<f64>,
    pub fidelity: f64,
    /// |⟨ψ₀|ψ_final⟩ − e^{−iSθ}| for a coaxial z schedule through θ;
    /// `None` when the schedule is not about z.
    pub deviation: Option<f64>,
}

/// The expected overlap factor e^{−iS∫ω_z dt} when every ω_k lies on the z axis.
pub fn coaxial_z_factor(s: SpinLabel, schedule: &RotationSchedule) -> Option<C64> {
    let mut angle = 0.0;
    for (dt, w) in schedule.intervals() {
        if w.x != 0.0 || w.y != 0.0 {
            return None;
        }
        angle += w.z * dt;
    }
    Some(C64::from_polar(1.0, -s.spin() * angle))
}

/// Runs each named schedule from the highest-weight state.
pub fn schedule_table(
    s: SpinLabel,
    schedules: &[(String, RotationSchedule)],
) -> Result<Vec<ScheduleRow>> {
    let bare: Vec<RotationSchedule> = schedules.iter().map(|(_, sch)| sch.clone()).collect();
    let results = schedule_phases(s, &bare)?;
    Ok(schedules
        .iter()
        .zip(results)
        .map(|((name, sch), r)| {
            let overlap = r
                .accumulated_phase
                .map_or(C64::new(0.0, 0.0), |ph| C64::from_polar(r.fidelity, ph));
            ScheduleRow {
                name: name.clone(),
                total_angle: sch.total_angle(),
                phase: r.accumulated_phase,
                fidelity: r.fidelity,
                deviation: coaxial_z_factor(s, sch).map(|want| (overlap - want).norm()),
            }
        })
        .collect())
}

/// Constant, linear-ramp and two-step schedules about z, each turning
/// through 2π in unit time.
pub fn standard_full_turn_schedules() -> Result<Vec<(String, RotationSchedule)>> {
    let z = Vec3::z();
    Ok(vec![
        (
            "constant".into(),
            RotationSchedule::constant(z * (2.0 * PI), 1.0, 16)?,
        ),
        (
            "ramp".into(),
            RotationSchedule::linear_ramp(z, 2.0 * PI, 1.0, 256)?,
        ),
        (
            "two_step".into(),
            RotationSchedule::two_step(z, 2.0 * PI, 1.0, 0.3, 0.7)?,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_table_is_clean() {
        let spins: Vec<SpinLabel> = (0..=4).map(SpinLabel::from_two_s).collect();
        let rows = rotation_phase_table(&spins, 10, 5).unwrap();
        assert_eq!(rows.len(), 5);
        for r in rows {
            assert!(r.max_deviation < 1e-10, "{} {}", r.spin, r.max_deviation);
        }
    }

    #[test]
    fn majorana_residuals() {
        for two_s in 1..=6u32 {
            assert!(majorana_check(SpinLabel::from_two_s(two_s), 9).unwrap() < 1e-10);
        }
        assert!(majorana_check(SpinLabel::ZERO, 9).is_err());
    }

    #[test]
    fn wave_equation_suite_passes() {
        let r = wave_equation_suite(1.0, 3).unwrap();
        assert!(r.conditions.max() < 1e-12);
        assert!(r.max_squaring_residual < 1e-10);
        assert_eq!(r.nullities.len(), NULLITY_MOMENTA);
        assert!(r.nullities_all_two());
        assert!(r.max_covariance_residual < 1e-9);
        assert!(r.max_squaring_residual > 0.0);
        let again = wave_equation_suite(1.0, 3).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn full_turn_schedules_agree() {
        let schedules = standard_full_turn_schedules().unwrap();
        for two_s in 1..=3u32 {
            let s = SpinLabel::from_two_s(two_s);
            for row in schedule_table(s, &schedules).unwrap() {
                assert!((row.total_angle - 2.0 * PI).abs() < 1e-12);
                assert!(row.deviation.unwrap() < 1e-9, "{} {}", row.name, two_s);
            }
        }
    }

    #[test]
    fn off_axis_schedule_has_no_reference() {
        let sch = RotationSchedule::constant(Vec3::x(), 1.0, 2).unwrap();
        let rows = schedule_table(SpinLabel::HALF, &[("x".into(), sch)]).unwrap();
        assert!(rows[0].deviation.is_none());
    }
}
