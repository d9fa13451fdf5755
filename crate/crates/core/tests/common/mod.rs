//! Independent oracles: everything here is built from naive dense algebra,
//! with its own Haar sampler and matrix exponential, so it shares no code
//! paths with the simulator beyond the matrix container.

#![allow(dead_code)]

use fidelity_decay::linalg::{ComplexMatrix, Mat2};
use fidelity_decay::noise::{CorrelationClass, NoiseModelConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `a ⊗ b` with `a` on the high bits.
pub fn naive_kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `ops[n-1] ⊗ … ⊗ ops[0]`.
pub fn register_operator(ops: &[Mat2]) -> ComplexMatrix {
    let mut m = ops[ops.len() - 1].to_matrix();
    for op in ops[..ops.len() - 1].iter().rev() {
        m = naive_kron(&m, &op.to_matrix());
    }
    m
}

pub fn mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[(i, k)];
            for j in 0..n {
                out[(i, j)] += aik * b[(k, j)];
            }
        }
    }
    out
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(j, i)] = a[(i, j)].conj();
        }
    }
    out
}

/// `exp(−i g)` by scaling and squaring of a 30-term Taylor series.
pub fn taylor_expm(g: &ComplexMatrix) -> ComplexMatrix {
    let n = g.dim();
    let norm: f64 = g.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 2f64.powi(squarings as i32);
    let mut a = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = g[(i, j)] * c(0.0, -1.0 / scale);
        }
    }
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..30 {
        term = mul(&term, &a);
        for z in term.as_mut_slice() {
            *z /= k as f64;
        }
        for (s, t) in sum.as_mut_slice().iter_mut().zip(term.as_slice()) {
            *s += t;
        }
    }
    for _ in 0..squarings {
        sum = mul(&sum, &sum);
    }
    sum
}

/// Generator `Σ_l χ_l O_l` assembled from Kronecker products of Paulis.
pub fn naive_generator(noise: &NoiseModelConfig, values: &[f64]) -> ComplexMatrix {
    let n = noise.n_qubits();
    let mut g = ComplexMatrix::zeros(1 << n);
    for (term, &chi) in noise.terms().iter().zip(values) {
        let factors: Vec<Mat2> = term.op.axes().iter().map(|a| a.matrix()).collect();
        let m = register_operator(&factors);
        for (s, t) in g.as_mut_slice().iter_mut().zip(m.as_slice()) {
            *s += t * chi;
        }
    }
    g
}

/// Haar-random 2×2 unitary from the QR decomposition of a complex Ginibre
/// matrix (Gram–Schmidt on the columns).
pub fn ginibre_haar<R: Rng>(rng: &mut R) -> Mat2 {
    let mut g = || c(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let (a, b, cc, d) = (g(), g(), g(), g());
    // columns u = (a, b), v = (cc, d)
    let nu = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (u0, u1) = (a / nu, b / nu);
    let proj = u0.conj() * cc + u1.conj() * d;
    let (w0, w1) = (cc - proj * u0, d - proj * u1);
    let nw = (w0.norm_sqr() + w1.norm_sqr()).sqrt();
    Mat2::new(u0, w0 / nw, u1, w1 / nw)
}

/// Reduced matrix on `kept` (ascending), naive index loops.
pub fn naive_partial_trace(m: &ComplexMatrix, n: usize, kept: &[usize]) -> ComplexMatrix {
    let kd = 1 << kept.len();
    let mut out = ComplexMatrix::zeros(kd);
    let dim = 1 << n;
    for i in 0..dim {
        for j in 0..dim {
            // traced-out bits must agree
            let agree = (0..n).filter(|q| !kept.contains(q)).all(|q| (i >> q) & 1 == (j >> q) & 1);
            if !agree {
                continue;
            }
            let ki: usize = kept.iter().enumerate().map(|(k, &q)| ((i >> q) & 1) << k).sum();
            let kj: usize = kept.iter().enumerate().map(|(k, &q)| ((j >> q) & 1) << k).sum();
            out[(ki, kj)] += m[(i, j)];
        }
    }
    out
}

pub fn real_trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = c(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc.re
}

/// One-step motion-reversal fidelity `Tr_M[Tr_{M̄}(R†ER ρ0 R†E†R) ρ0^{(M)}]`.
pub fn one_step_fidelity(
    rotations: &[Mat2],
    e: &ComplexMatrix,
    rho0: &ComplexMatrix,
    rho0_m: &ComplexMatrix,
    n: usize,
    measured: &[usize],
) -> f64 {
    let r = register_operator(rotations);
    let u = mul(&dagger(&r), &mul(e, &r));
    let rho1 = mul(&mul(&u, rho0), &dagger(&u));
    real_trace_product(&naive_partial_trace(&rho1, n, measured), rho0_m)
}

/// Brute-force `γ = 1 − ⟨f(1)⟩/f0` with its standard error. Coefficients are
/// redrawn per sample unless the model is coherent.
pub fn brute_force_gamma(
    noise: &NoiseModelConfig,
    states: &[Mat2],
    measured: &[usize],
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let n = noise.n_qubits();
    let rho0 = register_operator(states);
    let m_states: Vec<Mat2> = measured.iter().map(|&q| states[q]).collect();
    let rho0_m = register_operator(&m_states);
    let f0 = real_trace_product(&rho0_m, &rho0_m);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha20Rng| -> Vec<f64> {
        noise
            .terms()
            .iter()
            .map(|t| match t.coeff {
                fidelity_decay::noise::CoefficientSpec::Constant(v) => v,
                fidelity_decay::noise::CoefficientSpec::Gaussian { mean, std } => {
                    mean + std * rng.sample::<f64, _>(StandardNormal)
                }
            })
            .collect()
    };
    let fixed = (noise.correlation() == CorrelationClass::Coherent).then(|| {
        let v = draw(&mut rng);
        taylor_expm(&naive_generator(noise, &v))
    });
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..samples {
        let e = match &fixed {
            Some(e) => e.clone(),
            None => {
                let v = draw(&mut rng);
                taylor_expm(&naive_generator(noise, &v))
            }
        };
        let rotations: Vec<Mat2> = (0..n).map(|_| ginibre_haar(&mut rng)).collect();
        let g = 1.0 - one_step_fidelity(&rotations, &e, &rho0, &rho0_m, n, measured) / f0;
        sum += g;
        sq += g * g;
    }
    let nf = samples as f64;
    let mean = sum / nf;
    let var = (sq - nf * mean * mean) / (nf - 1.0);
    (mean, (var.max(0.0) / nf).sqrt())
}

/// The 24 single-qubit Clifford unitaries (up to phase), generated from H and S.
pub fn clifford_group() -> Vec<Mat2> {
    let h = Mat2::new(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0))
        .scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.0));
    let s = Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    let same_up_to_phase = |a: &Mat2, b: &Mat2| {
        // |Tr(a†b)| = 2 iff equal up to phase
        ((a.adjoint() * *b).trace().norm() - 2.0).abs() < 1e-9
    };
    let mut group = vec![Mat2::IDENTITY];
    let mut frontier = vec![Mat2::IDENTITY];
    while let Some(g) = frontier.pop() {
        for gen in [h, s] {
            let next = gen * g;
            if !group.iter().any(|x| same_up_to_phase(x, &next)) {
                group.push(next);
                frontier.push(next);
            }
        }
    }
    assert_eq!(group.len(), 24);
    group
}

/// Exact Haar average of `γ` for constant coefficients, by averaging over
/// all Clifford tuples (a unitary 2-design per qubit).
pub fn exact_gamma_clifford(noise: &NoiseModelConfig, values: &[f64], states: &[Mat2], measured: &[usize]) -> f64 {
    let n = noise.n_qubits();
    let group = clifford_group();
    let e = taylor_expm(&naive_generator(noise, values));
    let rho0 = register_operator(states);
    let m_states: Vec<Mat2> = measured.iter().map(|&q| states[q]).collect();
    let rho0_m = register_operator(&m_states);
    let f0 = real_trace_product(&rho0_m, &rho0_m);
    let total = group.len().pow(n as u32);
    let mut acc = 0.0;
    for idx in 0..total {
        let mut k = idx;
        let rotations: Vec<Mat2> = (0..n)
            .map(|_| {
                let g = group[k % group.len()];
                k /= group.len();
                g
            })
            .collect();
        acc += one_step_fidelity(&rotations, &e, &rho0, &rho0_m, n, measured);
    }
    1.0 - acc / total as f64 / f0
}
