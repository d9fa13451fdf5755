use std::ops::Mul;

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Single-qubit operator, stored row-major as `[m00, m01, m10, m11]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [Complex64; 4]);

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([ONE, ZERO, ZERO, ONE]);
    pub const PAULI_X: Mat2 = Mat2([ZERO, ONE, ONE, ZERO]);
    pub const PAULI_Y: Mat2 = Mat2([ZERO, Complex64::new(0.0, -1.0), I, ZERO]);
    pub const PAULI_Z: Mat2 = Mat2([ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0)]);

    pub fn new(m00: Complex64, m01: Complex64, m10: Complex64, m11: Complex64) -> Self {
        Mat2([m00, m01, m10, m11])
    }

    /// Projector |b⟩⟨b| for a computational-basis bit.
    pub fn basis_projector(bit: bool) -> Self {
        if bit {
            Mat2([ZERO, ZERO, ZERO, ONE])
        } else {
            Mat2([ONE, ZERO, ZERO, ZERO])
        }
    }

    /// State (I + r·σ)/2 for a Bloch vector `r`.
    pub fn from_bloch(r: [f64; 3]) -> Self {
        let [x, y, z] = r;
        Mat2([
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        ])
    }

    /// Bloch vector of a single-qubit density operator.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let [_, m01, m10, _] = self.0;
        let m00 = self.0[0];
        let m11 = self.0[3];
        [
            (m01 + m10).re,
            (m10 - m01).im,
            (m00 - m11).re,
        ]
    }

    /// `exp(-i v·σ)` for a real vector `v`, in closed form.
    pub fn exp_pauli(v: [f64; 3]) -> Self {
        let theta = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if theta == 0.0 {
            return Self::IDENTITY;
        }
        let (s, c) = theta.sin_cos();
        let (nx, ny, nz) = (v[0] / theta, v[1] / theta, v[2] / theta);
        // cos θ I − i sin θ (n·σ)
        Mat2([
            Complex64::new(c, -s * nz),
            Complex64::new(-s * ny, -s * nx),
            Complex64::new(s * ny, -s * nx),
            Complex64::new(c, s * nz),
        ])
    }

    #[inline]
    pub fn adjoint(&self) -> Self {
        let [a, b, c, d] = self.0;
        Mat2([a.conj(), c.conj(), b.conj(), d.conj()])
    }

    #[inline]
    pub fn trace(&self) -> Complex64 {
        self.0[0] + self.0[3]
    }

    /// `self * rho * self†`.
    #[inline]
    pub fn conjugate(&self, rho: &Mat2) -> Mat2 {
        *self * *rho * self.adjoint()
    }

    /// `Re Tr[self * other]`.
    #[inline]
    pub fn real_overlap(&self, other: &Mat2) -> f64 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = other.0;
        (a * e + b * g + c * f + d * h).re
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Mat2(self.0.map(|z| z * s))
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn unitary_deviation(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::IDENTITY)
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_vec(self.0.to_vec()).expect("four entries form a 2x2 matrix")
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    #[inline]
    fn mul(self, rhs: Mat2) -> Mat2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = rhs.0;
        Mat2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }
}

impl std::ops::Add for Mat2 {
    type Output = Mat2;

    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
            self.0[3] + rhs.0[3],
        ])
    }
}

impl TryFrom<&ComplexMatrix> for Mat2 {
    type Error = Error;

    fn try_from(m: &ComplexMatrix) -> Result<Self> {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: m.dim(),
            });
        }
        let s = m.as_slice();
        Ok(Mat2([s[0], s[1], s[2], s[3]]))
    }
}

impl From<Mat2> for ComplexMatrix {
    fn from(m: Mat2) -> Self {
        m.to_matrix()
    }
}
