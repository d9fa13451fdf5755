//! Cyclic Jacobi eigendecomposition for complex Hermitian matrices and the
//! spectral synthesis `exp(-i G)`.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// `A = V diag(values) V†`, with eigenvectors in the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
    pub sweeps: usize,
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition by cyclic complex Jacobi rotations. Converges when the
/// off-diagonal Frobenius norm drops below `1e-14 · max(1, ‖A‖_F)`.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    a.ensure_hermitian()?;
    let n = a.dim();
    let mut m = a.clone();
    // symmetrise so round-off in the input cannot stall convergence
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    // eigenvectors accumulate as the rows of `vt = V^T`, keeping updates contiguous
    let mut vt = ComplexMatrix::identity(n);
    let tol = OFF_DIAGONAL_TOL * a.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    while off_diagonal_norm(&m) >= tol {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut vt, p, q);
            }
        }
    }

    let values = (0..n).map(|i| m[(i, i)].re).collect();
    Ok(HermitianEigen {
        values,
        vectors: vt.transpose(),
        sweeps,
    })
}

/// Zeroes `m[p][q]` with `m ← J† m J`, `V ← V J` where
/// `J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]` on the `(p, q)` plane and
/// `φ = arg m[p][q]`. Only rows `p` and `q` are computed; the columns follow
/// from Hermiticity.
fn rotate(m: &mut ComplexMatrix, vt: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let b = apq.norm();
    if b < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / b; // e^{iφ}
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * b);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J entries
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let n = m.dim();
    let data = m.as_mut_slice();
    // rows of J† m
    let (head, tail) = data.split_at_mut(q * n);
    let row_p = &mut head[p * n..(p + 1) * n];
    let row_q = &mut tail[..n];
    for k in 0..n {
        let (mpk, mqk) = (row_p[k], row_q[k]);
        row_p[k] = jpp.conj() * mpk + jqp.conj() * mqk;
        row_q[k] = jpq.conj() * mpk + jqq.conj() * mqk;
    }
    // J only mixes columns p and q, so the other entries of these rows are final
    let new_pp = row_p[p] * jpp + row_p[q] * jqp;
    let new_qq = row_q[p] * jpq + row_q[q] * jqq;
    row_p[p] = Complex64::new(new_pp.re, 0.0);
    row_q[q] = Complex64::new(new_qq.re, 0.0);
    row_p[q] = Complex64::new(0.0, 0.0);
    row_q[p] = Complex64::new(0.0, 0.0);
    for k in 0..n {
        if k != p && k != q {
            data[k * n + p] = data[p * n + k].conj();
            data[k * n + q] = data[q * n + k].conj();
        }
    }

    let w = vt.as_mut_slice();
    let (head, tail) = w.split_at_mut(q * n);
    let row_p = &mut head[p * n..(p + 1) * n];
    let row_q = &mut tail[..n];
    for k in 0..n {
        let (vkp, vkq) = (row_p[k], row_q[k]);
        row_p[k] = vkp * jpp + vkq * jqp;
        row_q[k] = vkp * jpq + vkq * jqq;
    }
}

/// `exp(-i g)` for Hermitian `g`, by spectral decomposition. The result is
/// checked to be unitary within `1e-10`.
pub fn unitary_from_hermitian_generator(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(g)?;
    let n = g.dim();
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&lambda| Complex64::from_polar(1.0, -lambda))
        .collect();
    // U = V diag(phases) V†
    let mut scaled = eig.vectors.clone();
    for i in 0..n {
        for k in 0..n {
            scaled[(i, k)] *= phases[k];
        }
    }
    let u = scaled.matmul_adjoint(&eig.vectors)?;
    u.ensure_unitary()?;
    Ok(u)
}
