//! Flat complex ambient spaces `C^{n+1}` and `C_1^{n+1}`.
//!
//! The Hermitian form is `sum_k eps_k z_k conj(w_k)` with `eps_1 = -1` for the
//! Lorentzian signature and `+1` otherwise. The real inner product used for
//! lengths and angles is its real part. The model hypersurface is
//! `{ <z, z> = 1/c }`: the sphere `S^{2n+1}(c)` for `c > 0` and anti-de Sitter
//! space `H_1^{2n+1}(c)` for `c < 0`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for fiber comparisons.
pub const HOPF_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signature {
    Definite,
    Lorentz,
}

impl Signature {
    /// Sign of the `k`-th coordinate in the Hermitian form.
    #[inline]
    pub fn eps(self, k: usize) -> f64 {
        match (self, k) {
            (Signature::Lorentz, 0) => -1.0,
            _ => 1.0,
        }
    }
}

/// Ambient `C^{n+1}` (definite) or `C_1^{n+1}` (Lorentzian) together with the
/// curvature `c` of the model hypersurface; the base space has holomorphic
/// sectional curvature `4c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianSpace {
    complex_dim: usize,
    signature: Signature,
    base_curvature: f64,
}

impl HermitianSpace {
    pub fn new(complex_dim: usize, signature: Signature, base_curvature: f64) -> Result<Self> {
        if complex_dim == 0 {
            return Err(Error::ContractViolation("complex dimension must be positive".into()));
        }
        match signature {
            Signature::Definite if base_curvature > 0.0 => {}
            Signature::Lorentz if base_curvature < 0.0 => {}
            _ => {
                return Err(Error::ContractViolation(format!(
                    "signature {signature:?} is incompatible with c = {base_curvature}"
                )))
            }
        }
        Ok(Self { complex_dim, signature, base_curvature })
    }

    /// `C^{n+1}` over the unit sphere, `c = 1`.
    pub fn projective(complex_dim: usize) -> Self {
        Self { complex_dim, signature: Signature::Definite, base_curvature: 1.0 }
    }

    /// `C_1^{n+1}` over `H_1^{2n+1}(-1)`, `c = -1`.
    pub fn hyperbolic(complex_dim: usize) -> Self {
        Self { complex_dim, signature: Signature::Lorentz, base_curvature: -1.0 }
    }

    pub fn complex_dim(&self) -> usize {
        self.complex_dim
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn base_curvature(&self) -> f64 {
        self.base_curvature
    }

    /// `eps_k` for coordinate `k`.
    #[inline]
    pub fn eps(&self, k: usize) -> f64 {
        self.signature.eps(k)
    }

    fn check_dim(&self, v: &CVector) -> Result<()> {
        if v.len() != self.complex_dim {
            return Err(Error::ContractViolation(format!(
                "vector of length {} in a space of complex dimension {}",
                v.len(),
                self.complex_dim
            )));
        }
        Ok(())
    }
}

/// A point or vector of the ambient space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CVector(pub Vec<Complex64>);

impl CVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn from_reals(re: &[f64]) -> Self {
        Self(re.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    /// Euclidean length of the underlying real vector.
    pub fn euclidean_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<usize> for CVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl Add for &CVector {
    type Output = CVector;
    fn add(self, rhs: &CVector) -> CVector {
        CVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CVector {
    type Output = CVector;
    fn sub(self, rhs: &CVector) -> CVector {
        CVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &CVector {
    type Output = CVector;
    fn mul(self, rhs: f64) -> CVector {
        CVector(self.0.iter().map(|a| a * rhs).collect())
    }
}

/// Hermitian form `sum_k eps_k z_k conj(w_k)`.
pub fn herm_inner(z: &CVector, w: &CVector, space: &HermitianSpace) -> Result<Complex64> {
    space.check_dim(z)?;
    space.check_dim(w)?;
    Ok(herm_unchecked(&z.0, &w.0, space.signature()))
}

#[inline]
pub(crate) fn herm_unchecked(z: &[Complex64], w: &[Complex64], sig: Signature) -> Complex64 {
    z.iter()
        .zip(w)
        .enumerate()
        .map(|(k, (a, b))| a * b.conj() * sig.eps(k))
        .sum()
}

/// Real part of the Hermitian form; this is the metric `<,>` (or `<,>_1`).
#[inline]
pub(crate) fn real_inner(z: &[Complex64], w: &[Complex64], sig: Signature) -> f64 {
    z.iter()
        .zip(w)
        .enumerate()
        .map(|(k, (a, b))| sig.eps(k) * (a.re * b.re + a.im * b.im))
        .sum()
}

/// `<z, J w>` without materializing `J w`.
#[inline]
pub(crate) fn real_inner_j(z: &[Complex64], w: &[Complex64], sig: Signature) -> f64 {
    // J w = i w = (-w.im, w.re)
    z.iter()
        .zip(w)
        .enumerate()
        .map(|(k, (a, b))| sig.eps(k) * (-a.re * b.im + a.im * b.re))
        .sum()
}

/// The complex structure: multiplication by `i`.
#[allow(non_snake_case)]
pub fn apply_J(z: &CVector) -> CVector {
    CVector(z.0.iter().map(|c| Complex64::new(-c.im, c.re)).collect())
}

/// `|Re <z, z> - 1/c|`.
pub fn space_residual(z: &CVector, space: &HermitianSpace) -> Result<f64> {
    let q = herm_inner(z, z, space)?.re;
    Ok((q - 1.0 / space.base_curvature()).abs())
}

/// Whether `w = e^{i theta} z` for some phase, i.e. both points lie on one Hopf fiber.
pub fn hopf_equivalent(z: &CVector, w: &CVector, space: &HermitianSpace, tol: f64) -> Result<bool> {
    let zz = herm_inner(z, z, space)?.re;
    if zz.abs() < 1e-12 || z.euclidean_norm() < 1e-12 {
        return Err(Error::DegenerateInput("fiber comparison against a null vector".into()));
    }
    let wz = herm_inner(w, z, space)?;
    if wz.norm() < 1e-300 {
        return Ok(false);
    }
    // for w = e^{i theta} z, <w, z> = e^{i theta} <z, z> with <z, z> real
    let phase = (wz / zz).arg();
    let rotated = z.scale(Complex64::from_polar(1.0, phase));
    Ok((w - &rotated).euclidean_norm() <= tol)
}
