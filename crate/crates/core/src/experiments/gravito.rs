use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spinrep::Vec3;

pub const CURL_POINTS: usize = 10;
pub const CURL_SEED: u64 = 0x6772_6176;

/// Central-difference curl of `field` at `r` with spacing `h`.
pub fn curl_central<F: Fn(&Vec3) -> Vec3>(field: F, r: &Vec3, h: f64) -> Vec3 {
    let d = |j: usize| {
        let mut e = Vec3::zeros();
        e[j] = h;
        (field(&(r + e)) - field(&(r - e))) / (2.0 * h)
    };
    let (dx, dy, dz) = (d(0), d(1), d(2));
    Vec3::new(dy.z - dz.y, dz.x - dx.z, dx.y - dy.x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurlReport {
    pub omega: Vec3,
    pub grid_h: f64,
    pub points: Vec<Vec3>,
    pub max_abs_deviation: f64,
    /// Relative to |2Ω|; equals the absolute deviation when Ω = 0.
    pub max_rel_deviation: f64,
}

/// Checks ∇×(Ω×r) = 2Ω at seeded random points in [−1, 1]³.
pub fn gravito_curl_check(omega: &Vec3, grid_h: f64, seed: u64) -> Result<CurlReport> {
    if !(grid_h > 0.0 && grid_h <= 0.1) {
        return Err(Error::InvalidParameter(format!(
            "grid spacing must lie in (0, 0.1], got {grid_h}"
        )));
    }
    if !omega.iter().all(|c| c.is_finite()) {
        return Err(Error::NonFiniteEntries);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec3> = (0..CURL_POINTS)
        .map(|_| {
            Vec3::new(
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            )
        })
        .collect();
    let target = 2.0 * omega;
    let max_abs_deviation = points
        .iter()
        .map(|r| (curl_central(|p| omega.cross(p), r, grid_h) - target).norm())
        .fold(0.0, f64::max);
    let scale = target.norm();
    let max_rel_deviation = if scale > 0.0 {
        max_abs_deviation / scale
    } else {
        max_abs_deviation
    };
    Ok(CurlReport {
        omega: *omega,
        grid_h,
        points,
        max_abs_deviation,
        max_rel_deviation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EFieldReport {
    pub dt: f64,
    /// E_g = −dA/dt at every sample time.
    pub field: Vec<Vec3>,
}

/// Second-order finite-difference E_g = −dA/dt from uniformly sampled A.
/// Interior points use central differences; the ends use one-sided
/// three-point stencils.
pub fn gravito_efield_check(a_schedule: &[Vec3], dt: f64) -> Result<EFieldReport> {
    let n = a_schedule.len();
    if n < 3 {
        return Err(Error::TooFewSamples(n));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let a = a_schedule;
    let field = (0..n)
        .map(|i| {
            let deriv = if i == 0 {
                (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * dt)
            } else if i == n - 1 {
                (3.0 * a[n - 1] - 4.0 * a[n - 2] + a[n - 3]) / (2.0 * dt)
            } else {
                (a[i + 1] - a[i - 1]) / (2.0 * dt)
            };
            -deriv
        })
        .collect();
    Ok(EFieldReport { dt, field })
}
