use num_complex::Complex64;

use super::{kron, ComplexMatrix, Mat2, MAX_QUBITS, UNITARY_TOL};
use crate::error::{Error, Result};

/// Multi-qubit density operator of dimension `2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-9;
    pub const EIGEN_TOL: f64 = 1e-9;

    /// Wraps a matrix, checking dimension, Hermiticity and unit trace.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(matrix)?;
        let herm = rho.matrix.hermitian_deviation();
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let tr = rho.matrix.trace();
        if (tr - 1.0).norm() > Self::TRACE_TOL {
            return Err(Error::invalid(format!("density matrix trace {tr} is not 1")));
        }
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if !dim.is_power_of_two() {
            return Err(Error::invalid(format!(
                "dimension {dim} is not a power of two"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        if n_qubits == 0 {
            return Err(Error::invalid("density matrix needs at least one qubit"));
        }
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitCap {
                requested: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        Ok(Self { n_qubits, matrix })
    }

    /// `|0…0⟩⟨0…0|`.
    pub fn ground(n_qubits: usize) -> Result<Self> {
        Self::product(&vec![Mat2::basis_projector(false); n_qubits])
    }

    /// Product state `ρ_{n-1} ⊗ … ⊗ ρ_0`; `factors[q]` is qubit `q`.
    pub fn product(factors: &[Mat2]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("product state needs at least one qubit"));
        }
        if factors.len() > MAX_QUBITS {
            return Err(Error::QubitCap {
                requested: factors.len(),
                cap: MAX_QUBITS,
            });
        }
        let mut m = factors[factors.len() - 1].to_matrix();
        for f in factors.iter().rev().skip(1) {
            m = kron(&m, &f.to_matrix())?;
        }
        Self::new(m)
    }

    /// Pure state `|ψ⟩⟨ψ|` from an amplitude vector (normalised here).
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::invalid("zero state vector"));
        }
        let dim = amplitudes.len();
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = amplitudes[i] * amplitudes[j].conj() / (norm * norm);
            }
        }
        Self::new(m)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Re Tr[self · other]`, both Hermitian.
    pub fn overlap(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let n = self.dim();
        let a = self.matrix.as_slice();
        let b = other.matrix.as_slice();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (a[i * n + j] * b[j * n + i]).re;
            }
        }
        Ok(acc)
    }

    /// Conjugates by a full-register unitary, `U ρ U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: self.matrix.conjugate_by(u)?,
        })
    }

    /// Full validation including positivity (eigenvalues ≥ -1e-9).
    pub fn validate(&self) -> Result<()> {
        let herm = self.matrix.hermitian_deviation();
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let tr = self.matrix.trace();
        if (tr - 1.0).norm() > Self::TRACE_TOL {
            return Err(Error::invalid(format!("density matrix trace {tr} is not 1")));
        }
        let eig = super::hermitian_eigen(&self.matrix)?;
        if let Some(&min) = eig
            .values
            .iter()
            .min_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"))
        {
            if min < -Self::EIGEN_TOL {
                return Err(Error::invalid(format!(
                    "density matrix has negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(())
    }

    /// In-place `U_q ρ U_q†` for a gate on qubit `q`, without building the
    /// full-register operator. No unitarity check.
    pub(crate) fn apply_gate_in_place(&mut self, q: usize, u: &Mat2) {
        let dim = self.matrix.dim();
        let mask = 1usize << q;
        let [u00, u01, u10, u11] = u.0;
        let data = self.matrix.as_mut_slice();
        // rows: ρ ← U ρ
        for r0 in 0..dim {
            if r0 & mask != 0 {
                continue;
            }
            let r1 = r0 | mask;
            for c in 0..dim {
                let a = data[r0 * dim + c];
                let b = data[r1 * dim + c];
                data[r0 * dim + c] = u00 * a + u01 * b;
                data[r1 * dim + c] = u10 * a + u11 * b;
            }
        }
        // columns: ρ ← ρ U†
        let (c00, c01, c10, c11) = (u00.conj(), u01.conj(), u10.conj(), u11.conj());
        for r in 0..dim {
            let row = &mut data[r * dim..(r + 1) * dim];
            for j0 in 0..dim {
                if j0 & mask != 0 {
                    continue;
                }
                let j1 = j0 | mask;
                let a = row[j0];
                let b = row[j1];
                row[j0] = a * c00 + b * c01;
                row[j1] = a * c10 + b * c11;
            }
        }
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut ComplexMatrix {
        &mut self.matrix
    }
}

/// Applies a single-qubit unitary `u` to qubit `q`: `(I⊗…⊗u⊗…⊗I) ρ (…)†`.
pub fn apply_single_qubit_gate(rho: &DensityMatrix, q: usize, u: &Mat2) -> Result<DensityMatrix> {
    if q >= rho.n_qubits {
        return Err(Error::QubitIndex {
            index: q,
            n_qubits: rho.n_qubits,
        });
    }
    let deviation = u.unitary_deviation();
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let mut out = rho.clone();
    out.apply_gate_in_place(q, u);
    Ok(out)
}

/// Reduced state on `keep`. Kept qubits are renumbered in ascending order, so
/// the smallest kept index becomes qubit 0 of the result.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() {
        return Err(Error::invalid("partial trace needs a nonempty keep set"));
    }
    if let Some(&bad) = kept.iter().find(|&&q| q >= rho.n_qubits) {
        return Err(Error::QubitIndex {
            index: bad,
            n_qubits: rho.n_qubits,
        });
    }
    Ok(DensityMatrix {
        n_qubits: kept.len(),
        matrix: reduce(&rho.matrix, rho.n_qubits, &kept),
    })
}

/// Partial trace on raw storage; `kept` must be sorted, unique and in range.
pub(crate) fn reduce(matrix: &ComplexMatrix, n_qubits: usize, kept: &[usize]) -> ComplexMatrix {
    let dim = matrix.dim();
    let traced: Vec<usize> = (0..n_qubits).filter(|q| !kept.contains(q)).collect();
    let kdim = 1usize << kept.len();
    let tdim = 1usize << traced.len();
    let spread = |bits: usize, positions: &[usize]| -> usize {
        positions
            .iter()
            .enumerate()
            .filter(|(k, _)| bits >> k & 1 == 1)
            .fold(0usize, |acc, (_, &q)| acc | (1 << q))
    };
    let kept_index: Vec<usize> = (0..kdim).map(|i| spread(i, kept)).collect();
    let traced_index: Vec<usize> = (0..tdim).map(|i| spread(i, &traced)).collect();
    let src = matrix.as_slice();
    let mut out = ComplexMatrix::zeros(kdim);
    for i in 0..kdim {
        for j in 0..kdim {
            let mut acc = Complex64::new(0.0, 0.0);
            for &t in &traced_index {
                acc += src[(kept_index[i] | t) * dim + (kept_index[j] | t)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// `Tr_{rest}|ψ⟩⟨ψ|` on `kept`, with the same index convention as [`reduce`].
pub(crate) fn reduce_pure(psi: &[Complex64], n_qubits: usize, kept: &[usize]) -> ComplexMatrix {
    let traced: Vec<usize> = (0..n_qubits).filter(|q| !kept.contains(q)).collect();
    let kdim = 1usize << kept.len();
    let tdim = 1usize << traced.len();
    let spread = |bits: usize, positions: &[usize]| -> usize {
        positions
            .iter()
            .enumerate()
            .filter(|(k, _)| bits >> k & 1 == 1)
            .fold(0usize, |acc, (_, &q)| acc | (1 << q))
    };
    let kept_index: Vec<usize> = (0..kdim).map(|i| spread(i, kept)).collect();
    let mut out = ComplexMatrix::zeros(kdim);
    for t in (0..tdim).map(|i| spread(i, &traced)) {
        for i in 0..kdim {
            let a = psi[kept_index[i] | t];
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..kdim {
                out[(i, j)] += a * psi[kept_index[j] | t].conj();
            }
        }
    }
    out
}

/// `ψ ← U_q ψ` for a gate on qubit `q`.
pub(crate) fn apply_gate_to_vector(psi: &mut [Complex64], q: usize, u: &Mat2) {
    let bit = 1usize << q;
    let [u00, u01, u10, u11] = u.0;
    for i in 0..psi.len() {
        if i & bit == 0 {
            let (a, b) = (psi[i], psi[i | bit]);
            psi[i] = u00 * a + u01 * b;
            psi[i | bit] = u10 * a + u11 * b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sample_haar_su2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pure_reduction_matches_density_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut psi = vec![Complex64::new(0.0, 0.0); 8];
        psi[0] = Complex64::new(1.0, 0.0);
        for q in 0..3 {
            apply_gate_to_vector(&mut psi, q, &sample_haar_su2(&mut rng));
        }
        apply_gate_to_vector(&mut psi, 1, &Mat2::PAULI_X);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        for kept in [vec![0], vec![1, 2], vec![0, 2], vec![0, 1, 2]] {
            let a = reduce_pure(&psi, 3, &kept);
            let b = reduce(rho.matrix(), 3, &kept);
            assert!(a.max_abs_diff(&b) < 1e-14, "{kept:?}");
        }
    }

    fn random_state(n: usize, seed: u64) -> DensityMatrix {
        // mixture of random pure states
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 1 << n;
        let mut m = ComplexMatrix::zeros(dim);
        for _ in 0..3 {
            let v: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let p = DensityMatrix::from_pure(&v).unwrap();
            m.add_scaled(p.matrix(), Complex64::new(1.0 / 3.0, 0.0)).unwrap();
        }
        DensityMatrix::new(m).unwrap()
    }

    fn naive_gate(rho: &DensityMatrix, q: usize, u: &Mat2) -> DensityMatrix {
        let n = rho.n_qubits();
        let mut full = if n - 1 == q { u.to_matrix() } else { ComplexMatrix::identity(2) };
        for k in (0..n - 1).rev() {
            let f = if k == q { u.to_matrix() } else { ComplexMatrix::identity(2) };
            full = kron(&full, &f).unwrap();
        }
        rho.conjugate_by(&full).unwrap()
    }

    #[test]
    fn identity_gate_leaves_state_unchanged() {
        let rho = random_state(2, 9);
        let out = apply_single_qubit_gate(&rho, 1, &Mat2::IDENTITY).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn bit_flip_on_single_qubit() {
        let rho = DensityMatrix::ground(1).unwrap();
        let out = apply_single_qubit_gate(&rho, 0, &Mat2::PAULI_X).unwrap();
        let one = DensityMatrix::product(&[Mat2::basis_projector(true)]).unwrap();
        assert!(out.matrix().max_abs_diff(one.matrix()) < 1e-15);
    }

    #[test]
    fn gate_matches_naive_kronecker_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=3 {
            for q in 0..n {
                let rho = random_state(n, 100 + (n * 7 + q) as u64);
                let u = sample_haar_su2(&mut rng);
                let fast = apply_single_qubit_gate(&rho, q, &u).unwrap();
                let slow = naive_gate(&rho, q, &u);
                assert!(fast.matrix().max_abs_diff(slow.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn gate_errors() {
        let rho = DensityMatrix::ground(2).unwrap();
        assert!(matches!(
            apply_single_qubit_gate(&rho, 2, &Mat2::IDENTITY),
            Err(Error::QubitIndex { .. })
        ));
        let not_unitary = Mat2::IDENTITY.scale(Complex64::new(2.0, 0.0));
        assert!(matches!(
            apply_single_qubit_gate(&rho, 0, &not_unitary),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let a = Mat2::from_bloch([0.2, -0.3, 0.5]);
        let b = Mat2::from_bloch([0.0, 0.6, -0.1]);
        let rho = DensityMatrix::product(&[a, b]).unwrap();
        let ra = partial_trace(&rho, &[0]).unwrap();
        let rb = partial_trace(&rho, &[1]).unwrap();
        assert!(ra.matrix().max_abs_diff(&a.to_matrix()) < 1e-12);
        assert!(rb.matrix().max_abs_diff(&b.to_matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let bell = DensityMatrix::from_pure(&[Complex64::new(s, 0.0), z, z, Complex64::new(s, 0.0)])
            .unwrap();
        let r = partial_trace(&bell, &[0]).unwrap();
        let half = ComplexMatrix::identity(2).scale(Complex64::new(0.5, 0.0));
        assert!(r.matrix().max_abs_diff(&half) < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let rho = random_state(3, 5);
        let r = partial_trace(&rho, &[0, 1]).unwrap();
        assert!((r.trace() - 1.0).norm() < 1e-9);
        assert!(r.matrix().is_hermitian(1e-12));
    }

    #[test]
    fn partial_trace_keeps_ascending_order() {
        let a = Mat2::from_bloch([0.0, 0.0, 1.0]);
        let b = Mat2::from_bloch([1.0, 0.0, 0.0]);
        let c = Mat2::from_bloch([0.0, 1.0, 0.0]);
        let rho = DensityMatrix::product(&[a, b, c]).unwrap();
        let r = partial_trace(&rho, &[2, 0]).unwrap();
        let expected = DensityMatrix::product(&[a, c]).unwrap();
        assert!(r.matrix().max_abs_diff(expected.matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = DensityMatrix::ground(2).unwrap();
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[3]).is_err());
    }

    #[test]
    fn validate_accepts_physical_states() {
        random_state(2, 3).validate().unwrap();
    }
}
