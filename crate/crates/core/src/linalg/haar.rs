//! Random single-qubit rotations and the closed-form Haar moments used as
//! oracles against sampled averages.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;

use super::{ComplexMatrix, Mat2};
use crate::error::{Error, Result};

/// Angles of the SU(2) parametrisation
///
/// ```text
/// ⎡  cos φ e^{iψ}    sin φ e^{iχ} ⎤
/// ⎣ -sin φ e^{-iχ}   cos φ e^{-iψ} ⎦
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarRotationParams {
    /// In `[0, π/2]`.
    pub phi: f64,
    /// In `[0, 2π)`.
    pub psi: f64,
    /// In `[0, 2π)`.
    pub chi_angle: f64,
}

impl HaarRotationParams {
    /// Maps three uniforms on `[0, 1)` to Haar-distributed angles:
    /// `φ = arcsin √ξ`, `ψ = 2π u`, `χ = 2π v`.
    pub fn from_uniforms(xi: f64, u: f64, v: f64) -> Self {
        Self {
            phi: xi.sqrt().asin(),
            psi: 2.0 * PI * u,
            chi_angle: 2.0 * PI * v,
        }
    }

    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let xi: f64 = rng.gen();
        let u: f64 = rng.gen();
        let v: f64 = rng.gen();
        Self::from_uniforms(xi, u, v)
    }

    pub fn matrix(&self) -> Mat2 {
        debug_assert!((0.0..=FRAC_PI_2).contains(&self.phi));
        let (s, c) = self.phi.sin_cos();
        Mat2::new(
            Complex64::from_polar(c, self.psi),
            Complex64::from_polar(s, self.chi_angle),
            -Complex64::from_polar(s, -self.chi_angle),
            Complex64::from_polar(c, -self.psi),
        )
    }
}

/// Draws a Haar-random SU(2) rotation. Consumes exactly three uniforms
/// (ξ, ψ, χ in that order).
pub fn sample_haar_su2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    HaarRotationParams::sample(rng).matrix()
}

fn ensure_qubit_operator(m: &ComplexMatrix) -> Result<()> {
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: m.dim(),
        });
    }
    Ok(())
}

/// Haar average `⟨Tr[A R B R†]⟩ = Tr[A] Tr[B] / 2` on one qubit.
pub fn haar_moment_first(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    ensure_qubit_operator(a)?;
    ensure_qubit_operator(b)?;
    Ok(a.trace() * b.trace() / 2.0)
}

/// Haar average `⟨Tr[ρ R†AR ρ R†BR]⟩` on one qubit:
/// `(1/3)Tr[AB](1 − P/2) + (1/3)Tr[A]Tr[B](P − 1/2)` with `P = Tr[ρ²]`.
pub fn haar_moment_second(
    rho: &ComplexMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<Complex64> {
    ensure_qubit_operator(rho)?;
    ensure_qubit_operator(a)?;
    ensure_qubit_operator(b)?;
    let tr = rho.trace();
    if (tr - 1.0).norm() > 1e-9 {
        return Err(Error::invalid(format!("Tr[ρ] = {tr}, expected 1")));
    }
    let purity = rho.matmul(rho)?.trace();
    let tr_ab = a.matmul(b)?.trace();
    Ok(tr_ab * (1.0 - purity / 2.0) / 3.0 + a.trace() * b.trace() * (purity - 0.5) / 3.0)
}
