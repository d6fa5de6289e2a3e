//! Spin-S operators, rotation matrices `D^S(n̂, θ)`, and the realization of
//! spin S on the symmetric subspace of 2S qubits.
//!
//! Multiplets are ordered by descending magnetic quantum number,
//! m = S, S−1, …, −S. Inside the qubit construction a qubit in |1⟩ carries
//! m = +½ and a qubit in |0⟩ carries m = −½, so that |0…0⟩ is the m = −S
//! state and |1…1⟩ the m = +S state.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qcore::{matexp, max_abs_diff, CMatrix, Operator, Tensor, C64, I, ONE, ZERO};

pub type Vec3 = Vector3<f64>;

/// Spin quantum number stored as the integer 2S.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinLabel {
    two_s: u32,
}

impl SpinLabel {
    pub const ZERO: SpinLabel = SpinLabel { two_s: 0 };
    pub const HALF: SpinLabel = SpinLabel { two_s: 1 };
    pub const ONE: SpinLabel = SpinLabel { two_s: 2 };

    pub const fn from_two_s(two_s: u32) -> Self {
        Self { two_s }
    }

    pub fn two_s(self) -> u32 {
        self.two_s
    }

    pub fn spin(self) -> f64 {
        f64::from(self.two_s) / 2.0
    }

    /// Multiplet dimension 2S + 1.
    pub fn dim(self) -> usize {
        self.two_s as usize + 1
    }

    pub fn is_half_integer(self) -> bool {
        self.two_s % 2 == 1
    }

    /// (−1)^{2S}.
    pub fn exchange_sign(self) -> i32 {
        if self.is_half_integer() {
            -1
        } else {
            1
        }
    }

    /// 2m for each basis state, in basis order (2S, 2S−2, …, −2S).
    pub fn two_m_values(self) -> Vec<i32> {
        let two_s = self.two_s as i32;
        (0..=two_s).map(|k| two_s - 2 * k).collect()
    }

    /// Basis index of the state with quantum number m = two_m / 2.
    pub fn index_of(self, two_m: i32) -> Result<usize> {
        let two_s = self.two_s as i32;
        if two_m.abs() > two_s || (two_s - two_m) % 2 != 0 {
            return Err(Error::BadQuantumNumber {
                two_s: self.two_s,
                two_m,
            });
        }
        Ok(((two_s - two_m) / 2) as usize)
    }
}

impl std::fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_half_integer() {
            write!(f, "{}/2", self.two_s)
        } else {
            write!(f, "{}", self.two_s / 2)
        }
    }
}

/// Hermitian spin components in units of ħ.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOps {
    pub sx: Operator,
    pub sy: Operator,
    pub sz: Operator,
}

impl SpinOps {
    pub fn components(&self) -> [&Operator; 3] {
        [&self.sx, &self.sy, &self.sz]
    }

    pub fn dim(&self) -> usize {
        self.sz.dim()
    }

    /// v · S for a real 3-vector.
    pub fn dot(&self, v: &Vec3) -> Operator {
        let m = self.sx.entries() * C64::new(v.x, 0.0)
            + self.sy.entries() * C64::new(v.y, 0.0)
            + self.sz.entries() * C64::new(v.z, 0.0);
        // Sum of real multiples of hermitian matrices.
        Operator::hermitian(m).expect("real combination of spin components is hermitian")
    }

    /// Largest residual of [Sx,Sy] = iSz and its cyclic partners.
    pub fn commutator_residual(&self) -> f64 {
        let [x, y, z] = self.components().map(|o| o.entries().clone());
        let comm = |a: &CMatrix, b: &CMatrix| a * b - b * a;
        [
            max_abs_diff(&comm(&x, &y), &(&z * I)),
            max_abs_diff(&comm(&y, &z), &(&x * I)),
            max_abs_diff(&comm(&z, &x), &(&y * I)),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Residual of Sx² + Sy² + Sz² = S(S+1)·I.
    pub fn casimir_residual(&self, s: SpinLabel) -> f64 {
        let [x, y, z] = self.components().map(|o| o.entries().clone());
        let c = &x * &x + &y * &y + &z * &z;
        let n = self.dim();
        let j = s.spin();
        max_abs_diff(
            &c,
            &(CMatrix::identity(n, n) * C64::new(j * (j + 1.0), 0.0)),
        )
    }
}

/// Ladder-operator construction in the descending-m basis.
pub fn spin_operators(s: SpinLabel) -> SpinOps {
    let n = s.dim();
    let j = s.spin();
    let mut raise = CMatrix::zeros(n, n);
    let mut sz = CMatrix::zeros(n, n);
    for k in 0..n {
        let m = j - k as f64;
        sz[(k, k)] = C64::new(m, 0.0);
        if k > 0 {
            // S+|m⟩ = sqrt(S(S+1) − m(m+1)) |m+1⟩, and |m+1⟩ sits at index k−1.
            raise[(k - 1, k)] = C64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let lower = raise.adjoint();
    let sx = (&raise + &lower) * C64::new(0.5, 0.0);
    let sy = (&raise - &lower) * C64::new(0.0, -0.5);
    SpinOps {
        sx: Operator::hermitian(sx).expect("Sx hermitian"),
        sy: Operator::hermitian(sy).expect("Sy hermitian"),
        sz: Operator::hermitian(sz).expect("Sz hermitian"),
    }
}

fn check_axis(axis: &Vec3) -> Result<()> {
    let norm = axis.norm();
    if !norm.is_finite() || (norm - 1.0).abs() >= 1e-12 {
        return Err(Error::BadAxis { norm });
    }
    Ok(())
}

/// D^S(n̂, θ) = exp(−iθ n̂·S).
pub fn rotation(s: SpinLabel, axis: &Vec3, angle: f64) -> Result<Operator> {
    check_axis(axis)?;
    if !angle.is_finite() {
        return Err(Error::InvalidParameter(format!("rotation angle {angle}")));
    }
    let generator = spin_operators(s).dot(axis);
    matexp(&generator, C64::new(0.0, -angle))
}

/// Uniformly distributed unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z).normalize()
}

const TWO_PI_SEED: u64 = 0x2b1_5eed;

/// The scalar λ with D^S(n̂, 2π) = λ·I, checked on three random axes.
pub fn two_pi_phase(s: SpinLabel) -> Result<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(TWO_PI_SEED);
    let n = s.dim();
    let mut lambda: Option<C64> = None;
    for _ in 0..3 {
        let axis = random_unit_vector(&mut rng);
        let d = rotation(s, &axis, 2.0 * PI)?;
        let l = d.entries().trace() / C64::new(n as f64, 0.0);
        let residual = max_abs_diff(d.entries(), &(CMatrix::identity(n, n) * l));
        let drift = lambda.map_or(0.0, |prev| (prev - l).norm());
        if residual.max(drift) >= 1e-10 {
            return Err(Error::NotScalar {
                residual: residual.max(drift),
            });
        }
        lambda.get_or_insert(l);
    }
    Ok(lambda.expect("three axes checked"))
}

/// Spin-½ operators in the qubit basis (|0⟩, |1⟩) = (m = −½, m = +½).
pub fn qubit_spin_operators() -> SpinOps {
    let flip = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let ops = spin_operators(SpinLabel::HALF);
    let conj = |o: &Operator| {
        Operator::hermitian(&flip * o.entries() * &flip).expect("permutation keeps hermiticity")
    };
    SpinOps {
        sx: conj(&ops.sx),
        sy: conj(&ops.sy),
        sz: conj(&ops.sz),
    }
}

/// D^{1/2}(n̂, θ) expressed in the qubit basis.
pub fn qubit_rotation(axis: &Vec3, angle: f64) -> Result<Operator> {
    check_axis(axis)?;
    matexp(&qubit_spin_operators().dot(axis), C64::new(0.0, -angle))
}

/// Spin S realized on the permutation-symmetric subspace of 2S qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaEmbedding {
    pub spin: SpinLabel,
    /// (2S+1) × 2^{2S}. Row r is the normalized Dicke state with
    /// m = S − r, so `isometry · isometry† = I`.
    pub isometry: CMatrix,
    /// Projector onto the symmetric subspace, averaged over all qubit
    /// permutations.
    pub symmetrizer: CMatrix,
}

impl MajoranaEmbedding {
    pub fn n_qubits(&self) -> usize {
        self.spin.two_s() as usize
    }

    /// Pulls a 2^{2S}-dimensional qubit operator back to the spin-S basis:
    /// `isometry · op · isometry†`.
    pub fn compress(&self, op: &CMatrix) -> CMatrix {
        &self.isometry * op * self.isometry.adjoint()
    }

    /// Collective spin component Σ_i S_a^{(i)} on the qubit register.
    pub fn collective(&self, axis: &Vec3) -> CMatrix {
        let single = qubit_spin_operators().dot(axis);
        let n = self.n_qubits();
        let id = Operator::identity(2);
        let mut total = CMatrix::zeros(1 << n, 1 << n);
        for site in 0..n {
            let factors: Vec<Operator> = (0..n)
                .map(|k| {
                    if k == site {
                        single.clone()
                    } else {
                        id.clone()
                    }
                })
                .collect();
            let term = crate::qcore::tensor_all(&factors).expect("n ≥ 1");
            total += term.entries();
        }
        total
    }
}

fn binomial(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// Swaps qubit factors `a` and `b` of a basis index over `n` qubits.
fn transpose_bits(index: usize, a: usize, b: usize, n: usize) -> usize {
    // factor 0 is the most significant bit
    let (pa, pb) = (n - 1 - a, n - 1 - b);
    let (ba, bb) = ((index >> pa) & 1, (index >> pb) & 1);
    if ba == bb {
        index
    } else {
        index ^ ((1 << pa) | (1 << pb))
    }
}

/// Symmetrizer over `n` qubits via S_n = (1/n) Σ_i T(i, n) · (S_{n−1} ⊗ I).
fn symmetrizer(n: usize) -> CMatrix {
    let mut sym = CMatrix::identity(2, 2);
    for k in 2..=n {
        let lifted = sym.kronecker(&CMatrix::identity(2, 2));
        let dim = 1usize << k;
        let mut next = CMatrix::zeros(dim, dim);
        for i in 0..k {
            for row in 0..dim {
                let src = transpose_bits(row, i, k - 1, k);
                for col in 0..dim {
                    next[(row, col)] += lifted[(src, col)];
                }
            }
        }
        sym = next * C64::new(1.0 / k as f64, 0.0);
    }
    sym
}

pub fn majorana_embedding(s: SpinLabel) -> Result<MajoranaEmbedding> {
    let n = s.two_s();
    if n == 0 {
        return Err(Error::InvalidParameter(
            "the qubit construction needs 2S ≥ 1".into(),
        ));
    }
    if n > 12 {
        return Err(Error::InvalidParameter(format!(
            "2S = {n} exceeds the dense qubit-register limit of 12"
        )));
    }
    let dim = 1usize << n;
    let mut isometry = CMatrix::zeros(s.dim(), dim);
    for row in 0..s.dim() {
        let ones = n - row as u32;
        let amp = 1.0 / (binomial(n, ones) as f64).sqrt();
        for idx in (0..dim).filter(|i| i.count_ones() == ones) {
            isometry[(row, idx)] = C64::new(amp, 0.0);
        }
    }
    Ok(MajoranaEmbedding {
        spin: s,
        isometry,
        symmetrizer: symmetrizer(n as usize),
    })
}

/// max |D^S(n̂,θ) − V·(D^{1/2})^{⊗2S}·V†| with V the Dicke isometry.
pub fn verify_majorana_rotation(s: SpinLabel, axis: &Vec3, angle: f64) -> Result<f64> {
    let emb = majorana_embedding(s)?;
    let direct = rotation(s, axis, angle)?;
    let single = qubit_rotation(axis, angle)?;
    let mut product = single.clone();
    for _ in 1..emb.n_qubits() {
        product = product.tensor(&single);
    }
    Ok(max_abs_diff(
        direct.entries(),
        &emb.compress(product.entries()),
    ))
}
