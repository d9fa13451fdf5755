use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::config::{Backend, CircuitForm, ExperimentConfig, MeasurementMode};
use super::curve::FidelityCurve;
use crate::error::Result;
use crate::linalg::state::{apply_gate_to_vector, reduce, reduce_pure};
use crate::linalg::{sample_haar_su2, ComplexMatrix, DensityMatrix, Mat2};
use crate::noise::{
    build_error_unitary, draw_unchecked, per_qubit_unchecked, DrawScope, NoiseRealization, SparseGenerator,
};
use crate::rng::{experiment_stream, measurement_stream, realization_stream};

/// Runs the experiment in the measurement mode it is configured with.
pub fn run_experiment(config: &ExperimentConfig) -> Result<FidelityCurve> {
    let traces = realization_traces(config)?;
    FidelityCurve::from_traces(&traces, config.f0(), config.measurement_mode)
}

/// Same circuits as [`run_experiment`], read out with one projective shot per
/// realization and step.
pub fn run_experiment_bernoulli(config: &ExperimentConfig) -> Result<FidelityCurve> {
    let cfg = config
        .clone()
        .with_measurement_mode(MeasurementMode::Bernoulli);
    run_experiment(&cfg)
}

/// Per-realization traces `f_r(t)` for `t = 0..=steps` (or the 0/1 outcomes
/// in sampled mode), in realization order.
pub fn realization_traces(config: &ExperimentConfig) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    let plan = Plan::new(config)?;
    (0..config.realizations as u64)
        .into_par_iter()
        .map(|r| plan.realization(r))
        .collect()
}

/// Error operator in whichever representation the backend uses.
enum ErrorOp {
    Dense(ComplexMatrix),
    /// Redrawn generators are applied as an action instead of diagonalised.
    Sparse(SparseGenerator),
    Factors(Vec<Mat2>),
}

struct Plan<'a> {
    cfg: &'a ExperimentConfig,
    backend: Backend,
    initial: Vec<Mat2>,
    /// Product state vector when the dense backend starts from pure qubits.
    initial_pure: Option<Vec<Complex64>>,
    reference: Reference,
    /// Basis index of the initial measured bitstring (sampled mode only).
    target: usize,
    coherent: Option<ErrorOp>,
    sparse_action: bool,
}

impl<'a> Plan<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        let backend = cfg.resolved_backend();
        let initial: Vec<Mat2> = cfg.initial_state.iter().map(|s| s.state()).collect();
        let factors: Vec<Mat2> = cfg.measured.iter().map(|&q| initial[q]).collect();
        let dense = match backend {
            Backend::Separable => None,
            _ => Some(DensityMatrix::product(&factors)?.into_matrix()),
        };
        let reference = Reference { factors, dense };
        let target = cfg
            .measured
            .iter()
            .enumerate()
            .map(|(k, &q)| match cfg.initial_state[q].basis_bit() {
                Some(true) => 1 << k,
                _ => 0,
            })
            .sum();
        let initial_pure = match backend {
            Backend::Separable => None,
            _ => product_vector(cfg),
        };
        let mut plan = Self {
            cfg,
            backend,
            initial,
            initial_pure,
            reference,
            target,
            coherent: None,
            sparse_action: true,
        };
        if cfg.noise.correlation().draw_scope() == DrawScope::Experiment {
            let values = draw_unchecked(&cfg.noise, &mut experiment_stream(cfg.seed));
            plan.coherent = Some(plan.error_op(&values)?);
        }
        Ok(plan)
    }

    fn error_op(&self, values: &NoiseRealization) -> Result<ErrorOp> {
        Ok(match self.backend {
            Backend::Separable => ErrorOp::Factors(per_qubit_unchecked(&self.cfg.noise, &values.values)),
            _ if !self.sparse_action || self.cfg.noise.correlation().draw_scope() == DrawScope::Experiment => {
                ErrorOp::Dense(build_error_unitary(&self.cfg.noise, values)?)
            }
            _ => ErrorOp::Sparse(SparseGenerator::new(&self.cfg.noise, values)?),
        })
    }

    fn realization(&self, index: u64) -> Result<Vec<f64>> {
        let cfg = self.cfg;
        let n = cfg.n_qubits();
        let mut rng = realization_stream(cfg.seed, index);
        let mut shots = measurement_stream(cfg.seed, index);
        let scope = cfg.noise.correlation().draw_scope();

        let mut realization_op = None;
        if scope == DrawScope::Realization {
            realization_op = Some(self.error_op(&draw_unchecked(&cfg.noise, &mut rng))?);
        }

        let mut state = match (self.backend, &self.initial_pure) {
            (Backend::Separable, _) => State::Separable(self.initial.clone()),
            (_, Some(psi)) => State::Pure(psi.clone()),
            _ => State::Dense(DensityMatrix::product(&self.initial)?),
        };
        let mut accumulated = vec![Mat2::IDENTITY; n];
        let mut rotations = vec![Mat2::IDENTITY; n];
        let mut trace = Vec::with_capacity(cfg.steps + 1);
        trace.push(match cfg.measurement_mode {
            MeasurementMode::ExactTrace => cfg.f0(),
            MeasurementMode::Bernoulli => 1.0,
        });

        for _ in 0..cfg.steps {
            for r in rotations.iter_mut() {
                *r = sample_haar_su2(&mut rng);
            }
            let step_op;
            let op = match scope {
                DrawScope::Experiment => self.coherent.as_ref(),
                DrawScope::Realization => realization_op.as_ref(),
                DrawScope::Step => {
                    step_op = self.error_op(&draw_unchecked(&cfg.noise, &mut rng))?;
                    Some(&step_op)
                }
            }
            .expect("error operator prepared for the draw scope");

            state.rotate(&rotations);
            state.apply(op)?;
            match cfg.circuit_form {
                CircuitForm::MotionReversal => {
                    for (w, r) in accumulated.iter_mut().zip(&rotations) {
                        *w = *r * *w;
                    }
                }
                CircuitForm::StepwiseTwirl => {
                    let inverse: Vec<Mat2> = rotations.iter().map(Mat2::adjoint).collect();
                    state.rotate(&inverse);
                }
            }

            let reversed = self.reversed_measured(&state, &accumulated)?;
            trace.push(match cfg.measurement_mode {
                MeasurementMode::ExactTrace => reversed.overlap(&self.reference),
                MeasurementMode::Bernoulli => {
                    let u: f64 = shots.gen();
                    f64::from(u8::from(reversed.sample(u) == self.target))
                }
            });
        }
        Ok(trace)
    }

    /// `ρ_mr^{(M)}`: the measured-qubit state after undoing the accumulated
    /// rotations (identity for the stepwise form).
    fn reversed_measured(&self, state: &State, accumulated: &[Mat2]) -> Result<Reduced> {
        let measured = &self.cfg.measured;
        let undo = |q: usize| match self.cfg.circuit_form {
            CircuitForm::MotionReversal => Some(accumulated[q].adjoint()),
            CircuitForm::StepwiseTwirl => None,
        };
        Ok(match state {
            State::Separable(qubits) => Reduced::Product(
                measured
                    .iter()
                    .map(|&q| match undo(q) {
                        Some(w) => w.conjugate(&qubits[q]),
                        None => qubits[q],
                    })
                    .collect(),
            ),
            State::Pure(psi) => {
                let mut reversed = psi.clone();
                for &q in measured {
                    if let Some(w) = undo(q) {
                        apply_gate_to_vector(&mut reversed, q, &w);
                    }
                }
                Reduced::Dense(reduce_pure(&reversed, self.cfg.n_qubits(), measured))
            }
            State::Dense(rho) => {
                let mut reduced = DensityMatrix::from_matrix_unchecked(reduce(rho.matrix(), rho.n_qubits(), measured))?;
                for (k, &q) in measured.iter().enumerate() {
                    if let Some(w) = undo(q) {
                        reduced.apply_gate_in_place(k, &w);
                    }
                }
                Reduced::Dense(reduced.into_matrix())
            }
        })
    }
}

/// `ρ_0^{(M)}`, per qubit and (for the dense backend) as a matrix.
struct Reference {
    factors: Vec<Mat2>,
    dense: Option<ComplexMatrix>,
}

/// `|ψ⟩ = ⊗_q |ψ_q⟩` if every qubit starts pure.
fn product_vector(cfg: &ExperimentConfig) -> Option<Vec<Complex64>> {
    let amps: Vec<[Complex64; 2]> = cfg.initial_state.iter().map(|s| s.amplitudes()).collect::<Option<_>>()?;
    let dim = 1usize << amps.len();
    Some(
        (0..dim)
            .map(|i| amps.iter().enumerate().map(|(q, a)| a[i >> q & 1]).product())
            .collect(),
    )
}

enum State {
    Separable(Vec<Mat2>),
    Dense(DensityMatrix),
    Pure(Vec<Complex64>),
}

impl State {
    fn rotate(&mut self, gates: &[Mat2]) {
        match self {
            State::Separable(qubits) => {
                for (rho, g) in qubits.iter_mut().zip(gates) {
                    *rho = g.conjugate(rho);
                }
            }
            State::Dense(rho) => {
                for (q, g) in gates.iter().enumerate() {
                    rho.apply_gate_in_place(q, g);
                }
            }
            State::Pure(psi) => {
                for (q, g) in gates.iter().enumerate() {
                    apply_gate_to_vector(psi, q, g);
                }
            }
        }
    }

    fn apply(&mut self, op: &ErrorOp) -> Result<()> {
        match (self, op) {
            (State::Separable(qubits), ErrorOp::Factors(factors)) => {
                for (rho, e) in qubits.iter_mut().zip(factors) {
                    *rho = e.conjugate(rho);
                }
            }
            (State::Dense(rho), ErrorOp::Dense(e)) => {
                let next = e.matmul(rho.matrix())?.matmul_adjoint(e)?;
                *rho.matrix_mut() = next;
            }
            (State::Pure(psi), ErrorOp::Dense(e)) => {
                let dim = psi.len();
                let m = e.as_slice();
                let next: Vec<Complex64> = (0..dim)
                    .map(|i| m[i * dim..(i + 1) * dim].iter().zip(psi.iter()).map(|(a, b)| a * b).sum())
                    .collect();
                *psi = next;
            }
            (State::Dense(rho), ErrorOp::Sparse(g)) => {
                let next = g.conjugate_density(rho.matrix())?;
                *rho.matrix_mut() = next;
            }
            (State::Pure(psi), ErrorOp::Sparse(g)) => g.apply_exp(psi)?,
            _ => unreachable!("state and error operator share a backend"),
        }
        Ok(())
    }
}

/// State of the measured qubits, indexed in ascending qubit order.
enum Reduced {
    Product(Vec<Mat2>),
    Dense(ComplexMatrix),
}

impl Reduced {
    fn overlap(&self, reference: &Reference) -> f64 {
        match self {
            Reduced::Product(factors) => factors
                .iter()
                .zip(&reference.factors)
                .map(|(rho, r0)| rho.real_overlap(r0))
                .product(),
            Reduced::Dense(m) => {
                let reference = reference.dense.as_ref().expect("dense reference for dense backend");
                let dim = m.dim();
                let (a, b) = (m.as_slice(), reference.as_slice());
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..dim {
                    for j in 0..dim {
                        acc += a[i * dim + j] * b[j * dim + i];
                    }
                }
                acc.re
            }
        }
    }

    /// Index of the basis outcome selected by the uniform `u` from the
    /// diagonal distribution.
    fn sample(&self, u: f64) -> usize {
        let probabilities: Vec<f64> = match self {
            Reduced::Product(factors) => {
                let dim = 1usize << factors.len();
                (0..dim)
                    .map(|i| {
                        factors
                            .iter()
                            .enumerate()
                            .map(|(k, rho)| if i >> k & 1 == 1 { rho.0[3].re } else { rho.0[0].re })
                            .product()
                    })
                    .collect()
            }
            Reduced::Dense(m) => (0..m.dim()).map(|i| m[(i, i)].re).collect(),
        };
        let mut cumulative = 0.0;
        for (i, p) in probabilities.iter().enumerate() {
            cumulative += p.max(0.0);
            if u < cumulative {
                return i;
            }
        }
        probabilities.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{expand_shorthand, CoefficientSpec, CorrelationClass, PairSelection, Shorthand};
    use crate::sim::QubitInit;

    fn two_body_config(class: CorrelationClass) -> ExperimentConfig {
        let spec = match class {
            CorrelationClass::Coherent => CoefficientSpec::Constant(0.07),
            _ => CoefficientSpec::gaussian(0.02, 0.06).unwrap(),
        };
        let noise = expand_shorthand(
            3,
            &Shorthand::one_body(spec).with_two_body(PairSelection::FirstNeighbor, spec),
            class,
        )
        .unwrap();
        ExperimentConfig::new(noise)
            .with_qubit_state(1, QubitInit::PureBloch { theta: 1.1, phi: 0.4 })
            .with_qubit_state(2, QubitInit::One)
            .with_measured(&[0, 2])
            .with_steps(6)
            .with_realizations(8)
            .with_seed(21)
    }

    #[test]
    fn state_vector_path_matches_density_path() {
        for class in CorrelationClass::ALL {
            for form in [CircuitForm::MotionReversal, CircuitForm::StepwiseTwirl] {
                let cfg = two_body_config(class).with_circuit_form(form);
                let fast = Plan::new(&cfg).unwrap();
                assert!(fast.initial_pure.is_some());
                let mut slow = Plan::new(&cfg).unwrap();
                slow.initial_pure = None;
                for r in 0..cfg.realizations as u64 {
                    let a = fast.realization(r).unwrap();
                    let b = slow.realization(r).unwrap();
                    for (x, y) in a.iter().zip(&b) {
                        assert!((x - y).abs() < 1e-12, "{class:?} {form:?}: {x} vs {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn sparse_action_matches_dense_unitaries() {
        for class in [CorrelationClass::IncoherentLong, CorrelationClass::IncoherentShort] {
            for mixed in [false, true] {
                let mut cfg = two_body_config(class);
                if mixed {
                    cfg = cfg.with_qubit_state(2, QubitInit::MaximallyMixed);
                }
                let fast = Plan::new(&cfg).unwrap();
                let mut slow = Plan::new(&cfg).unwrap();
                slow.sparse_action = false;
                for r in 0..cfg.realizations as u64 {
                    let a = fast.realization(r).unwrap();
                    let b = slow.realization(r).unwrap();
                    for (x, y) in a.iter().zip(&b) {
                        assert!((x - y).abs() < 1e-12, "{class:?} mixed={mixed}: {x} vs {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn mixed_qubits_use_the_density_path() {
        let cfg = two_body_config(CorrelationClass::Coherent).with_qubit_state(1, QubitInit::MaximallyMixed);
        assert!(Plan::new(&cfg).unwrap().initial_pure.is_none());
    }

    #[test]
    fn sampled_outcomes_are_bits() {
        let cfg = two_body_config(CorrelationClass::IncoherentShort).with_measurement_mode(MeasurementMode::Bernoulli);
        for trace in realization_traces(&cfg).unwrap() {
            assert_eq!(trace[0], 1.0);
            assert!(trace.iter().all(|&x| x == 0.0 || x == 1.0));
        }
    }
}
