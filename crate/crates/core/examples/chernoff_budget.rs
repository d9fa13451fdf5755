//! Realization budget from the Hoeffding bound, checked with single-shot
//! readout on a qubit whose mean fidelity is known exactly.

use fidelity_decay::linalg::PauliAxis;
use fidelity_decay::noise::{expand_shorthand, CoefficientSpec, CorrelationClass, Shorthand};
use fidelity_decay::protocol::chernoff_budget;
use fidelity_decay::sim::{run_experiment_bernoulli, ExperimentConfig};

fn main() -> fidelity_decay::Result<()> {
    let (delta, epsilon) = (0.01, 0.05);
    let budget = chernoff_budget(delta, epsilon)?;
    println!("delta = {delta}, epsilon = {epsilon}: N_R = {}", budget.n_realizations);

    let alpha: f64 = 0.3;
    let truth = 0.5 + 0.5 * (4.0 * alpha.cos().powi(2) - 1.0) / 3.0;
    let noise = expand_shorthand(
        1,
        &Shorthand::one_body(CoefficientSpec::Constant(alpha)).with_axes(&[PauliAxis::Y]),
        CorrelationClass::Coherent,
    )?;
    let repeats = 50;
    let mut misses = 0;
    for seed in 0..repeats {
        let cfg = ExperimentConfig::new(noise.clone())
            .with_realizations(budget.n_realizations)
            .with_seed(seed);
        let estimate = run_experiment_bernoulli(&cfg)?.mean_f[1];
        misses += usize::from((estimate - truth).abs() > delta);
    }
    println!("<f(1)> = {truth:.5}; {misses}/{repeats} estimates missed by more than delta");
    Ok(())
}
