use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::noise::NoiseModelConfig;

/// Initial state of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QubitInit {
    Zero,
    One,
    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    PureBloch { theta: f64, phi: f64 },
    MaximallyMixed,
}

impl QubitInit {
    pub fn state(&self) -> Mat2 {
        match *self {
            QubitInit::Zero => Mat2::basis_projector(false),
            QubitInit::One => Mat2::basis_projector(true),
            QubitInit::PureBloch { theta, phi } => Mat2::from_bloch([
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ]),
            QubitInit::MaximallyMixed => Mat2::from_bloch([0.0, 0.0, 0.0]),
        }
    }

    /// State-vector amplitudes `(⟨0|ψ⟩, ⟨1|ψ⟩)` of a pure state.
    pub fn amplitudes(&self) -> Option<[Complex64; 2]> {
        match *self {
            QubitInit::Zero => Some([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]),
            QubitInit::One => Some([Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]),
            QubitInit::PureBloch { theta, phi } => Some([
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), phi),
            ]),
            QubitInit::MaximallyMixed => None,
        }
    }

    /// `Tr[ρ²]` of the single-qubit state.
    pub fn purity(&self) -> f64 {
        match self {
            QubitInit::MaximallyMixed => 0.5,
            _ => 1.0,
        }
    }

    /// The bit of a computational-basis state, if it is one.
    pub fn basis_bit(&self) -> Option<bool> {
        match self {
            QubitInit::Zero => Some(false),
            QubitInit::One => Some(true),
            _ => None,
        }
    }
}

/// Which equivalent circuit is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CircuitForm {
    /// Forward noisy evolution followed by the ideal inverse of all rotations.
    MotionReversal,
    /// Each step applies `R† E R`.
    StepwiseTwirl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasurementMode {
    /// `f(t)` evaluated as an exact trace overlap.
    ExactTrace,
    /// One projective shot per realization and step; `X = 1` when the
    /// outcome reproduces the initial bitstring.
    Bernoulli,
}

/// State representation used by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    /// `Separable` for one-body noise, `Dense` otherwise.
    Auto,
    /// Full `2^n × 2^n` density matrix.
    Dense,
    /// One 2×2 state per qubit; valid only for one-body noise.
    Separable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub noise: NoiseModelConfig,
    /// `initial_state[q]` is qubit `q`; the register starts in their product.
    pub initial_state: Vec<QubitInit>,
    /// Measured subset `M`, ascending.
    pub measured: Vec<usize>,
    pub steps: usize,
    pub realizations: usize,
    pub circuit_form: CircuitForm,
    pub measurement_mode: MeasurementMode,
    pub backend: Backend,
    pub seed: u64,
}

impl ExperimentConfig {
    /// All qubits start in `|0⟩` and are measured; one step, 100 realizations.
    pub fn new(noise: NoiseModelConfig) -> Self {
        let n = noise.n_qubits();
        Self {
            noise,
            initial_state: vec![QubitInit::Zero; n],
            measured: (0..n).collect(),
            steps: 1,
            realizations: 100,
            circuit_form: CircuitForm::MotionReversal,
            measurement_mode: MeasurementMode::ExactTrace,
            backend: Backend::Auto,
            seed: 0,
        }
    }

    /// Measured qubits in `|0⟩`, all others maximally mixed.
    pub fn for_subset(noise: NoiseModelConfig, measured: &[usize]) -> Self {
        let n = noise.n_qubits();
        let mut cfg = Self::new(noise);
        cfg.initial_state = (0..n)
            .map(|q| {
                if measured.contains(&q) {
                    QubitInit::Zero
                } else {
                    QubitInit::MaximallyMixed
                }
            })
            .collect();
        cfg.measured = normalized(measured);
        cfg
    }

    pub fn with_measured(mut self, measured: &[usize]) -> Self {
        self.measured = normalized(measured);
        self
    }

    pub fn with_initial_state(mut self, states: Vec<QubitInit>) -> Self {
        self.initial_state = states;
        self
    }

    pub fn with_qubit_state(mut self, qubit: usize, state: QubitInit) -> Self {
        if let Some(slot) = self.initial_state.get_mut(qubit) {
            *slot = state;
        }
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_realizations(mut self, realizations: usize) -> Self {
        self.realizations = realizations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_circuit_form(mut self, form: CircuitForm) -> Self {
        self.circuit_form = form;
        self
    }

    pub fn with_measurement_mode(mut self, mode: MeasurementMode) -> Self {
        self.measurement_mode = mode;
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.noise.n_qubits()
    }

    /// `f0 = Tr[(ρ_0^{(M)})²]`.
    pub fn f0(&self) -> f64 {
        self.measured
            .iter()
            .map(|&q| self.initial_state[q].purity())
            .product()
    }

    pub(crate) fn resolved_backend(&self) -> Backend {
        match self.backend {
            Backend::Auto if self.noise.is_one_body() => Backend::Separable,
            Backend::Auto => Backend::Dense,
            other => other,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits();
        if n > crate::linalg::MAX_QUBITS {
            return Err(Error::QubitCap {
                requested: n,
                cap: crate::linalg::MAX_QUBITS,
            });
        }
        if self.initial_state.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.initial_state.len(),
            });
        }
        if self.measured.is_empty() {
            return Err(Error::invalid("measured set must be nonempty"));
        }
        if let Some(&q) = self.measured.iter().find(|&&q| q >= n) {
            return Err(Error::QubitIndex { index: q, n_qubits: n });
        }
        if self.measured.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("measured set must be ascending and unique"));
        }
        if self.steps == 0 {
            return Err(Error::invalid("steps must be at least 1"));
        }
        if self.realizations == 0 {
            return Err(Error::invalid("realization count must be at least 1"));
        }
        if self.backend == Backend::Separable && !self.noise.is_one_body() {
            return Err(Error::invalid(
                "separable backend requires one-body noise",
            ));
        }
        if self.measurement_mode == MeasurementMode::Bernoulli {
            self.ensure_basis_measured()?;
        }
        Ok(())
    }

    pub(crate) fn ensure_basis_measured(&self) -> Result<()> {
        for &q in &self.measured {
            if self.initial_state[q].basis_bit().is_none() {
                return Err(Error::invalid(format!(
                    "sampled measurement needs qubit {q} to start in |0> or |1>"
                )));
            }
        }
        Ok(())
    }
}

fn normalized(qubits: &[usize]) -> Vec<usize> {
    let mut v = qubits.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitudes_reproduce_pure_states() {
        for init in [
            QubitInit::Zero,
            QubitInit::One,
            QubitInit::PureBloch { theta: 0.7, phi: 2.3 },
        ] {
            let [a, b] = init.amplitudes().unwrap();
            let outer = Mat2::new(a * a.conj(), a * b.conj(), b * a.conj(), b * b.conj());
            assert!(outer.max_abs_diff(&init.state()) < 1e-15, "{init:?}");
        }
        assert!(QubitInit::MaximallyMixed.amplitudes().is_none());
    }

    fn noiseless(n: usize) -> NoiseModelConfig {
        NoiseModelConfig::noiseless(n).unwrap()
    }

    #[test]
    fn subset_defaults() {
        let cfg = ExperimentConfig::for_subset(noiseless(4), &[2, 0]);
        assert_eq!(cfg.measured, vec![0, 2]);
        assert_eq!(cfg.initial_state[1], QubitInit::MaximallyMixed);
        assert_eq!(cfg.initial_state[2], QubitInit::Zero);
        assert_eq!(cfg.f0(), 1.0);
        cfg.validate().unwrap();
    }

    #[test]
    fn f0_counts_mixed_measured_qubits() {
        let cfg = ExperimentConfig::new(noiseless(3)).with_qubit_state(1, QubitInit::MaximallyMixed);
        assert_eq!(cfg.f0(), 0.5);
    }

    #[test]
    fn validation_errors() {
        assert!(ExperimentConfig::new(noiseless(2)).with_measured(&[]).validate().is_err());
        assert!(ExperimentConfig::new(noiseless(2)).with_measured(&[2]).validate().is_err());
        assert!(ExperimentConfig::new(noiseless(2)).with_realizations(0).validate().is_err());
        assert!(ExperimentConfig::new(noiseless(2)).with_steps(0).validate().is_err());
        let mixed = ExperimentConfig::new(noiseless(2))
            .with_qubit_state(0, QubitInit::MaximallyMixed)
            .with_measurement_mode(MeasurementMode::Bernoulli);
        assert!(mixed.validate().is_err());
        // unmeasured mixed qubits are fine in sampled mode
        let ok = mixed.with_measured(&[1]);
        ok.validate().unwrap();
    }

    #[test]
    fn pure_bloch_state_is_pure() {
        let s = QubitInit::PureBloch { theta: 1.1, phi: -0.4 }.state();
        assert!((s.real_overlap(&s) - 1.0).abs() < 1e-15);
    }
}
