use nalgebra::linalg::SymmetricEigen;

use super::{CMatrix, OpTag, Operator, C64};
use crate::error::{Error, Result};

/// Returns `exp(scale · h)`.
///
/// Hermitian inputs go through an eigendecomposition, so `exp(-i t H)` is
/// unitary to roundoff. Everything else uses scaling and squaring with a
/// degree-13 Padé approximant.
pub fn matexp(h: &Operator, scale: C64) -> Result<Operator> {
    if h.tag() == OpTag::Hermitian {
        spectral(h.entries(), scale)
    } else {
        let out = pade_scaling_squaring(&(h.entries() * scale))?;
        Operator::general(out)
    }
}

fn spectral(h: &CMatrix, scale: C64) -> Result<Operator> {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let f = (scale * lambda).exp();
        for z in scaled.column_mut(j).iter_mut() {
            *z *= f;
        }
    }
    let out = scaled * v.adjoint();
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFiniteEntries);
    }
    let tag = if scale.re == 0.0 {
        OpTag::Unitary
    } else if scale.im == 0.0 {
        OpTag::Hermitian
    } else {
        OpTag::General
    };
    // Hermitian tagging is exact only up to roundoff in V·D·V†.
    let out = if tag == OpTag::Hermitian {
        (&out + out.adjoint()) * C64::new(0.5, 0.0)
    } else {
        out
    };
    Operator::new(out, tag)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade_scaling_squaring(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::NonFiniteEntries);
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * C64::new(2f64.powi(-squarings), 0.0);

    let ident = CMatrix::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| C64::new(PADE13[k], 0.0);

    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &ident * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &ident * b(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or(Error::NonFiniteEntries)?;
    for _ in 0..squarings {
        r = &r * &r;
        if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntries);
        }
    }
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFiniteEntries);
    }
    Ok(r)
}
