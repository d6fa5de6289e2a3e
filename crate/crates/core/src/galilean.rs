//! The first-order Galilean wave equation `(A·E + B·p + C)Φ = 0` whose square
//! is `2m(E − p²/2m)`, its plane-wave solutions, and how those solutions
//! transform under Galilean boosts.
//!
//! Plane waves are taken as Φ ∝ e^{i(p·x − Et)} with ħ = 1. Four-spinors are
//! stored as two 2-spinors (φ, ξ): the block index is the leftmost tensor
//! factor, the spin index the rightmost.

use nalgebra::{Matrix3, Rotation3};

use crate::error::{Error, Result};
use crate::qcore::{
    max_abs_diff, pauli, CMatrix, CVector, Ket, OpTag, Operator, Tensor, C64, I, ONE,
};
use crate::spinrep::{rotation, SpinLabel, Vec3};

/// Residual allowed on the algebraic conditions of a representation.
pub const CONDITION_TOL: f64 = 1e-12;
/// Residual allowed on `M(E,p)·ψ = 0` for stored solutions.
pub const SOLUTION_TOL: f64 = 1e-10;
/// Residual allowed on the wave equation after a boost.
pub const COVARIANCE_TOL: f64 = 1e-9;
/// Relative singular-value cutoff used to count null vectors.
pub const NULLITY_REL_TOL: f64 = 1e-10;

/// Matrices (A, B₁, B₂, B₃, C) realizing the linear equation for mass m.
#[derive(Debug, Clone, PartialEq)]
pub struct LLRep {
    pub a: Operator,
    pub b: [Operator; 3],
    pub c: Operator,
    pub mass: f64,
}

/// Worst residual of each squaring condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionResiduals {
    /// A² = 0
    pub a_squared: f64,
    /// C² = 0
    pub c_squared: f64,
    /// {A, Bᵢ} = 0
    pub a_b: f64,
    /// {C, Bᵢ} = 0
    pub c_b: f64,
    /// {A, C} = 2m·I
    pub a_c: f64,
    /// {Bᵢ, Bⱼ} = −2δᵢⱼ·I
    pub b_b: f64,
}

impl ConditionResiduals {
    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("a_squared", self.a_squared),
            ("c_squared", self.c_squared),
            ("anticomm_a_b", self.a_b),
            ("anticomm_c_b", self.c_b),
            ("anticomm_a_c", self.a_c),
            ("anticomm_b_b", self.b_b),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }
}

fn anticomm(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x * y + y * x
}

impl LLRep {
    /// Accepts any 4×4 quintuple that satisfies the squaring conditions.
    pub fn new(a: Operator, b: [Operator; 3], c: Operator, mass: f64) -> Result<Self> {
        check_mass(mass)?;
        if [&a, &b[0], &b[1], &b[2], &c].iter().any(|m| m.dim() != 4) {
            return Err(Error::DimensionMismatch(
                "representation matrices must be 4x4".into(),
            ));
        }
        let rep = Self { a, b, c, mass };
        let res = rep.condition_residuals();
        if res.max() >= CONDITION_TOL {
            return Err(Error::InvalidParameter(format!(
                "matrices violate the squaring conditions: {res:?}"
            )));
        }
        Ok(rep)
    }

    pub fn condition_residuals(&self) -> ConditionResiduals {
        let a = self.a.entries();
        let c = self.c.entries();
        let zero = CMatrix::zeros(4, 4);
        let id = CMatrix::identity(4, 4);
        let mut res = ConditionResiduals {
            a_squared: max_abs_diff(&(a * a), &zero),
            c_squared: max_abs_diff(&(c * c), &zero),
            a_b: 0.0,
            c_b: 0.0,
            a_c: max_abs_diff(&anticomm(a, c), &(&id * C64::new(2.0 * self.mass, 0.0))),
            b_b: 0.0,
        };
        for (i, bi) in self.b.iter().enumerate() {
            let bi = bi.entries();
            res.a_b = res.a_b.max(max_abs_diff(&anticomm(a, bi), &zero));
            res.c_b = res.c_b.max(max_abs_diff(&anticomm(c, bi), &zero));
            for (j, bj) in self.b.iter().enumerate() {
                let target = if i == j {
                    &id * C64::new(-2.0, 0.0)
                } else {
                    zero.clone()
                };
                res.b_b = res
                    .b_b
                    .max(max_abs_diff(&anticomm(bi, bj.entries()), &target));
            }
        }
        res
    }

    /// M(E, p) = A·E + B·p + C.
    pub fn wave_operator(&self, e: f64, p: &Vec3) -> CMatrix {
        self.a.entries() * C64::new(e, 0.0)
            + self.b[0].entries() * C64::new(p.x, 0.0)
            + self.b[1].entries() * C64::new(p.y, 0.0)
            + self.b[2].entries() * C64::new(p.z, 0.0)
            + self.c.entries()
    }

    pub fn shell_energy(&self, p: &Vec3) -> f64 {
        p.norm_squared() / (2.0 * self.mass)
    }

    /// Number of singular values of M(E,p) below the relative cutoff.
    pub fn nullity(&self, e: f64, p: &Vec3) -> usize {
        null_space(&self.wave_operator(e, p)).len()
    }
}

fn check_mass(mass: f64) -> Result<()> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::NonPositiveMass(mass));
    }
    Ok(())
}

/// The reference representation in 2×2 block form:
/// A = [[0, I], [0, 0]], C = [[0, 0], [2m·I, 0]], Bᵢ = i·[[σᵢ, 0], [0, −σᵢ]].
pub fn ll_matrices(mass: f64) -> Result<LLRep> {
    check_mass(mass)?;
    let block = |r: usize, c: usize, m: &CMatrix| {
        let mut e = CMatrix::zeros(2, 2);
        e[(r, c)] = ONE;
        e.kronecker(m)
    };
    let id2 = CMatrix::identity(2, 2);
    let a = block(0, 1, &id2);
    let c = block(1, 0, &(&id2 * C64::new(2.0 * mass, 0.0)));
    let z = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, -ONE]));
    let b = pauli().map(|s| Operator::general(z.kronecker(&s) * I).expect("4x4"));
    LLRep::new(Operator::general(a)?, b, Operator::general(c)?, mass)
}

/// max |M(e,p)² − 2m(e − p²/2m)·I|, valid on- and off-shell.
pub fn verify_squaring(rep: &LLRep, p: &Vec3, e: f64) -> f64 {
    let m = rep.wave_operator(e, p);
    let target = 2.0 * rep.mass * (e - rep.shell_energy(p));
    max_abs_diff(
        &(&m * &m),
        &(CMatrix::identity(4, 4) * C64::new(target, 0.0)),
    )
}

/// Orthonormal null vectors of `m` by relative singular-value thresholding.
pub fn null_space(m: &CMatrix) -> Vec<CVector> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = NULLITY_REL_TOL * sigma_max.max(f64::MIN_POSITIVE);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < cutoff || sigma_max == 0.0)
        .map(|(i, _)| v_t.row(i).adjoint())
        .collect()
}

/// An on-shell plane wave with its four-spinor (φ, ξ).
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaveSolution {
    pub momentum: Vec3,
    pub energy: f64,
    pub spinor: Ket,
}

impl PlaneWaveSolution {
    /// Validates the dispersion relation and `M(E,p)·ψ = 0`.
    pub fn new(rep: &LLRep, momentum: Vec3, energy: f64, spinor: Ket) -> Result<Self> {
        if spinor.dim() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "four-spinor expected, got dimension {}",
                spinor.dim()
            )));
        }
        let shell = rep.shell_energy(&momentum);
        if (energy - shell).abs() >= SOLUTION_TOL * shell.max(1.0) {
            return Err(Error::InvalidSolution(format!(
                "energy {energy} is off shell (expected {shell})"
            )));
        }
        let sol = Self {
            momentum,
            energy,
            spinor,
        };
        let residual = sol.residual(rep);
        if residual >= SOLUTION_TOL {
            return Err(Error::InvalidSolution(format!(
                "wave-equation residual {residual:e}"
            )));
        }
        Ok(sol)
    }

    /// max |M(E,p)·ψ|.
    pub fn residual(&self, rep: &LLRep) -> f64 {
        let out = rep.wave_operator(self.energy, &self.momentum) * self.spinor.amplitudes();
        out.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn phi(&self) -> CVector {
        self.spinor.amplitudes().rows(0, 2).into_owned()
    }

    pub fn xi(&self) -> CVector {
        self.spinor.amplitudes().rows(2, 2).into_owned()
    }

    /// max |φ − (iσ·p/2m)·ξ|; holds for the reference representation.
    pub fn spinor_constraint_residual(&self, mass: f64) -> f64 {
        let expected = sigma_dot(&self.momentum) * self.xi() * C64::new(0.0, 1.0 / (2.0 * mass));
        (self.phi() - expected)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

fn sigma_dot(v: &Vec3) -> CMatrix {
    let [sx, sy, sz] = pauli();
    sx * C64::new(v.x, 0.0) + sy * C64::new(v.y, 0.0) + sz * C64::new(v.z, 0.0)
}

/// The two independent on-shell solutions at momentum `p`.
pub fn plane_wave_solutions(rep: &LLRep, p: &Vec3) -> Result<Vec<PlaneWaveSolution>> {
    let e = rep.shell_energy(p);
    let null = null_space(&rep.wave_operator(e, p));
    if null.len() != 2 {
        return Err(Error::UnexpectedNullity(null.len()));
    }
    null.into_iter()
        .map(|v| {
            let spinor = Ket::normalized(v, vec![2, 2])?;
            PlaneWaveSolution::new(rep, *p, e, spinor)
        })
        .collect()
}

/// x′ = R·x + v·t + d, t′ = t, with the constant C of the phase f(x, t).
#[derive(Debug, Clone, PartialEq)]
pub struct GalileanBoost {
    pub velocity: Vec3,
    pub rotation: Matrix3<f64>,
    pub displacement: Vec3,
    pub phase_const: f64,
}

impl GalileanBoost {
    pub fn new(
        velocity: Vec3,
        rotation: Matrix3<f64>,
        displacement: Vec3,
        phase_const: f64,
    ) -> Result<Self> {
        let orth = (rotation.transpose() * rotation - Matrix3::identity())
            .abs()
            .max();
        if orth >= 1e-12 {
            return Err(Error::InvalidBoost(format!(
                "rotation is not orthogonal (residual {orth:e})"
            )));
        }
        let det = rotation.determinant();
        if (det - 1.0).abs() >= 1e-12 {
            return Err(Error::InvalidBoost(format!(
                "rotation has determinant {det}"
            )));
        }
        Ok(Self {
            velocity,
            rotation,
            displacement,
            phase_const,
        })
    }

    pub fn identity() -> Self {
        Self {
            velocity: Vec3::zeros(),
            rotation: Matrix3::identity(),
            displacement: Vec3::zeros(),
            phase_const: 0.0,
        }
    }

    pub fn pure_velocity(velocity: Vec3) -> Self {
        Self {
            velocity,
            ..Self::identity()
        }
    }

    pub fn pure_rotation(axis: &Vec3, angle: f64) -> Result<Self> {
        let rot = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(*axis), angle);
        Self::new(Vec3::zeros(), *rot.matrix(), Vec3::zeros(), 0.0)
    }

    /// The single transformation equal to applying `self` and then `next`.
    /// The phase constant picks up m·v₂·(R₂d₁).
    pub fn then(&self, next: &GalileanBoost, mass: f64) -> GalileanBoost {
        GalileanBoost {
            velocity: next.rotation * self.velocity + next.velocity,
            rotation: next.rotation * self.rotation,
            displacement: next.rotation * self.displacement + next.displacement,
            phase_const: self.phase_const
                + next.phase_const
                + mass * next.velocity.dot(&(next.rotation * self.displacement)),
        }
    }

    pub fn transform_point(&self, x: &Vec3, t: f64) -> Vec3 {
        self.rotation * x + self.velocity * t + self.displacement
    }

    /// The SU(2) element D^{1/2}(R), fixed up to the double-cover sign.
    pub fn spin_half_rotation(&self) -> Result<Operator> {
        let rot = Rotation3::from_matrix_unchecked(self.rotation);
        match rot.axis_angle() {
            Some((axis, angle)) => rotation(SpinLabel::HALF, &axis.into_inner(), angle),
            None => Ok(Operator::identity(2)),
        }
    }
}

/// f(x, t) = ½m|v|²t + m v·(R x) + C.
pub fn boost_phase(boost: &GalileanBoost, mass: f64, x: &Vec3, t: f64) -> f64 {
    let v = &boost.velocity;
    0.5 * mass * v.norm_squared() * t + mass * v.dot(&(boost.rotation * x)) + boost.phase_const
}

/// Transforms a plane-wave solution: p′ = Rp + mv, E′ = E + v·(Rp) + ½m|v|²,
/// and the spinor picks up D^{1/2}(R) on each block, the boost mixing
/// φ′ = φ + (i/2)σ·v ξ, and the constant phase e^{i(C − p′·d)}.
pub fn apply_boost(
    boost: &GalileanBoost,
    sol: &PlaneWaveSolution,
    rep: &LLRep,
) -> Result<PlaneWaveSolution> {
    let m = rep.mass;
    let v = &boost.velocity;
    let rp = boost.rotation * sol.momentum;
    let p_new = rp + v * m;
    let e_new = sol.energy + v.dot(&rp) + 0.5 * m * v.norm_squared();

    let d = boost.spin_half_rotation()?;
    let rotate = Operator::identity(2).tensor(&d);
    let mut mix = CMatrix::identity(4, 4);
    mix.view_mut((0, 2), (2, 2))
        .copy_from(&(sigma_dot(v) * C64::new(0.0, 0.5)));
    let phase = C64::from_polar(1.0, boost.phase_const - p_new.dot(&boost.displacement));
    let transformed = mix * rotate.entries() * sol.spinor.amplitudes() * phase;

    let residual = (rep.wave_operator(e_new, &p_new) * &transformed)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if !residual.is_finite() || residual >= COVARIANCE_TOL {
        return Err(Error::CovarianceViolation { residual });
    }
    let spinor = Ket::normalized(transformed, vec![2, 2])?;
    PlaneWaveSolution::new(rep, p_new, e_new, spinor)
}

/// Conjugates every matrix by an invertible `s`, giving an equivalent
/// representation.
pub fn similarity_transform(rep: &LLRep, s: &CMatrix) -> Result<LLRep> {
    let s_inv = s
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidParameter("similarity matrix is singular".into()))?;
    let conj = |o: &Operator| Operator::new(s * o.entries() * &s_inv, OpTag::General);
    LLRep::new(
        conj(&rep.a)?,
        [conj(&rep.b[0])?, conj(&rep.b[1])?, conj(&rep.b[2])?],
        conj(&rep.c)?,
        rep.mass,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn reference_conditions_hold() {
        for mass in [0.3, 1.0, 7.5] {
            let rep = ll_matrices(mass).unwrap();
            let res = rep.condition_residuals();
            assert!(res.max() < 1e-12, "{res:?}");
        }
        assert_eq!(ll_matrices(0.0), Err(Error::NonPositiveMass(0.0)));
        assert!(ll_matrices(-1.0).is_err());
        assert!(ll_matrices(f64::NAN).is_err());
    }

    #[test]
    fn worked_products_at_unit_mass() {
        let rep = ll_matrices(1.0).unwrap();
        let (a, c) = (rep.a.entries(), rep.c.entries());
        assert_eq!(anticomm(a, c), CMatrix::identity(4, 4) * C64::new(2.0, 0.0));
        assert_eq!(a * a, CMatrix::zeros(4, 4));
        let (b1, b2) = (rep.b[0].entries(), rep.b[1].entries());
        assert_eq!(anticomm(b1, b2), CMatrix::zeros(4, 4));
        assert_eq!(b1 * b1, -CMatrix::identity(4, 4));
    }

    #[test]
    fn squaring_examples() {
        let rep = ll_matrices(1.0).unwrap();
        assert!(verify_squaring(&rep, &Vec3::zeros(), 0.0) < 1e-12);
        let m = rep.wave_operator(0.0, &Vec3::zeros());
        assert!(max_abs_diff(&(&m * &m), &CMatrix::zeros(4, 4)) < 1e-12);

        let pz = Vec3::z();
        let m = rep.wave_operator(0.5, &pz);
        assert!(max_abs_diff(&(&m * &m), &CMatrix::zeros(4, 4)) < 1e-12);
        let m = rep.wave_operator(0.0, &pz);
        assert!(max_abs_diff(&(&m * &m), &-CMatrix::identity(4, 4)) < 1e-12);
    }

    #[test]
    fn rest_frame_solutions_have_no_upper_spinor() {
        let rep = ll_matrices(1.0).unwrap();
        let sols = plane_wave_solutions(&rep, &Vec3::zeros()).unwrap();
        assert_eq!(sols.len(), 2);
        for s in &sols {
            assert_eq!(s.energy, 0.0);
            assert!(s.phi().norm() < 1e-12);
        }
        let g = sols[0].spinor.inner(&sols[1].spinor).unwrap();
        assert!(g.norm() < 1e-12);
    }

    #[test]
    fn moving_solutions_obey_the_spinor_constraint() {
        let rep = ll_matrices(1.0).unwrap();
        let sols = plane_wave_solutions(&rep, &Vec3::z()).unwrap();
        assert_eq!(sols.len(), 2);
        for s in &sols {
            assert!((s.energy - 0.5).abs() < 1e-15);
            assert!(s.spinor_constraint_residual(1.0) < 1e-12);
            // φ = (i σz / 2) ξ componentwise
            let (phi, xi) = (s.phi(), s.xi());
            assert!((phi[0] - xi[0] * C64::new(0.0, 0.5)).norm() < 1e-12);
            assert!((phi[1] + xi[1] * C64::new(0.0, 0.5)).norm() < 1e-12);
        }
    }

    #[test]
    fn determinant_has_double_root_on_shell() {
        // Fit det M(E) through 5 energies with a quartic and compare to (p² − 2mE)².
        let mass = 1.3;
        let rep = ll_matrices(mass).unwrap();
        let p = Vec3::new(0.4, -1.1, 0.7);
        let p2 = p.norm_squared();
        let energies: [f64; 5] = [-2.0, -0.5, 0.0, 1.0, 2.5];
        let vander = nalgebra::DMatrix::from_fn(5, 5, |i, k| energies[i].powi(k as i32));
        let dets = nalgebra::DVector::from_iterator(
            5,
            energies
                .iter()
                .map(|&e| rep.wave_operator(e, &p).determinant().re),
        );
        let coeffs = vander.lu().solve(&dets).unwrap();
        // (p² − 2mE)² = p⁴ − 4m p² E + 4m² E²
        let expected = [p2 * p2, -4.0 * mass * p2, 4.0 * mass * mass, 0.0, 0.0];
        for (c, e) in coeffs.iter().zip(expected) {
            assert!((c - e).abs() < 1e-9, "{coeffs} vs {expected:?}");
        }
        for &e in &energies {
            assert!(rep.wave_operator(e, &p).determinant().im.abs() < 1e-12);
        }
    }

    #[test]
    fn nullity_on_and_off_shell() {
        let rep = ll_matrices(0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = Vec3::new(
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
            );
            let e = rep.shell_energy(&p);
            assert_eq!(rep.nullity(e, &p), 2);
            assert_eq!(rep.nullity(e + 1e-5, &p), 0);
            assert_eq!(rep.nullity(e - 0.3, &p), 0);
        }
    }

    #[test]
    fn boost_phase_examples() {
        let x = Vec3::new(0.3, 0.2, -1.0);
        assert_eq!(boost_phase(&GalileanBoost::identity(), 1.0, &x, 4.0), 0.0);
        let b = GalileanBoost::pure_velocity(Vec3::z());
        assert!((boost_phase(&b, 1.0, &Vec3::new(0.0, 0.0, 2.0), 3.0) - 3.5).abs() < 1e-15);
        let c = GalileanBoost {
            phase_const: 0.7,
            ..GalileanBoost::pure_velocity(Vec3::new(1.0, 2.0, 3.0))
        };
        assert_eq!(boost_phase(&c, 2.0, &Vec3::zeros(), 0.0), 0.7);
    }

    #[test]
    fn identity_boost_is_identity() {
        let rep = ll_matrices(1.0).unwrap();
        let p = Vec3::new(0.2, 0.1, -0.4);
        for sol in plane_wave_solutions(&rep, &p).unwrap() {
            let out = apply_boost(&GalileanBoost::identity(), &sol, &rep).unwrap();
            assert!((out.momentum - sol.momentum).norm() < 1e-15);
            assert!(
                max_abs_diff(
                    &CMatrix::from_column_slice(4, 1, out.spinor.amplitudes().as_slice()),
                    &CMatrix::from_column_slice(4, 1, sol.spinor.amplitudes().as_slice()),
                ) < 1e-15
            );
        }
    }

    #[test]
    fn rest_solution_boosted_along_z() {
        let rep = ll_matrices(1.0).unwrap();
        let sol = &plane_wave_solutions(&rep, &Vec3::zeros()).unwrap()[0];
        let out = apply_boost(&GalileanBoost::pure_velocity(Vec3::z()), sol, &rep).unwrap();
        assert!((out.momentum - Vec3::z()).norm() < 1e-15);
        assert!((out.energy - 0.5).abs() < 1e-15);
        assert!(out.residual(&rep) < 1e-12);
    }

    #[test]
    fn rotation_only_boost_rotates_momentum_and_spinor() {
        let rep = ll_matrices(1.0).unwrap();
        let p = Vec3::new(1.0, 0.5, 0.25);
        let boost = GalileanBoost::pure_rotation(&Vec3::z(), PI).unwrap();
        for sol in plane_wave_solutions(&rep, &p).unwrap() {
            let out = apply_boost(&boost, &sol, &rep).unwrap();
            assert!((out.momentum - Vec3::new(-1.0, -0.5, 0.25)).norm() < 1e-14);
            assert!((out.energy - sol.energy).abs() < 1e-14);
            assert!(out.residual(&rep) < 1e-12);
            // ξ′ = D^{1/2}(ẑ, π) ξ = diag(−i, i) ξ
            let xi = sol.xi();
            let xi_new = out.xi();
            assert!((xi_new[0] - xi[0] * C64::new(0.0, -1.0)).norm() < 1e-12);
            assert!((xi_new[1] - xi[1] * C64::new(0.0, 1.0)).norm() < 1e-12);
        }
    }

    fn random_boost(rng: &mut ChaCha8Rng) -> GalileanBoost {
        let axis = crate::spinrep::random_unit_vector(rng);
        let angle = rng.random_range(-PI..PI);
        let rot = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
        let mut v3 = || {
            Vec3::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            )
        };
        let v = v3();
        let d = v3();
        GalileanBoost::new(v, *rot.matrix(), d, 0.37).unwrap()
    }

    #[test]
    fn composed_boost_matches_sequential_boosts() {
        let mass = 1.7;
        let rep = ll_matrices(mass).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let b1 = random_boost(&mut rng);
            let b2 = random_boost(&mut rng);
            let both = b1.then(&b2, mass);
            let p = Vec3::new(rng.random_range(-1.0..1.0), 0.3, -0.2);
            let sol = &plane_wave_solutions(&rep, &p).unwrap()[1];
            let seq = apply_boost(&b2, &apply_boost(&b1, sol, &rep).unwrap(), &rep).unwrap();
            let direct = apply_boost(&both, sol, &rep).unwrap();
            assert!((seq.momentum - direct.momentum).norm() < 1e-9);
            assert!((seq.energy - direct.energy).abs() < 1e-9);
            // Spinors agree up to the SU(2) double-cover sign.
            let (fid, phase) = seq.spinor.overlap_phase(&direct.spinor).unwrap();
            assert!((fid - 1.0).abs() < 1e-9);
            let phase = phase.unwrap();
            assert!(
                phase.abs() < 1e-9 || (phase.abs() - PI).abs() < 1e-9,
                "{phase}"
            );

            // f₁(x,t) + f₂(x′,t) = f(x,t) mod 2π
            let x = Vec3::new(0.1, -0.7, 1.3);
            let t = 0.9;
            let xp = b1.transform_point(&x, t);
            let lhs = boost_phase(&b1, mass, &x, t) + boost_phase(&b2, mass, &xp, t);
            let rhs = boost_phase(&both, mass, &x, t);
            assert!(crate::qcore::wrap_phase(lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_boosts_rejected() {
        let mut skew = Matrix3::identity();
        skew[(0, 1)] = 0.1;
        assert!(GalileanBoost::new(Vec3::zeros(), skew, Vec3::zeros(), 0.0).is_err());
        let reflect = Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        assert!(GalileanBoost::new(Vec3::zeros(), reflect, Vec3::zeros(), 0.0).is_err());
    }

    #[test]
    fn other_representations_are_accepted_and_broken_ones_rejected() {
        let rep = ll_matrices(1.0).unwrap();
        // A unitary change of basis keeps every condition.
        let u = crate::spinrep::rotation(
            SpinLabel::from_two_s(3),
            &Vec3::new(0.2, 0.9, -0.1).normalize(),
            1.1,
        )
        .unwrap();
        let other = similarity_transform(&rep, u.entries()).unwrap();
        assert!(other.condition_residuals().max() < 1e-12);
        let mut broken = rep.clone();
        broken.c = Operator::general(rep.c.entries() * C64::new(2.0, 0.0)).unwrap();
        assert!(LLRep::new(broken.a, broken.b, broken.c, 1.0).is_err());
    }
}
