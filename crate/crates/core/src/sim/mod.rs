//! Monte Carlo estimation of the averaged fidelity `⟨f(t)⟩` under random
//! single-qubit rotations and noisy identity steps.

mod config;
mod curve;
mod dephasing;
mod engine;
mod gamma;

pub use config::{Backend, CircuitForm, ExperimentConfig, MeasurementMode, QubitInit};
pub use curve::FidelityCurve;
pub use dephasing::{simulate_free_dephasing, BlochTrajectory};
pub use engine::{realization_traces, run_experiment, run_experiment_bernoulli};
pub use gamma::{estimate_gamma, gamma_from_curve, DecayRateEstimate, GammaMethod, DEFAULT_F_LIM};
