//! Fidelity decay of eight qubits under one- and two-body coherent noise.

use fidelity_decay::noise::{expand_shorthand, CoefficientSpec, CorrelationClass, PairSelection, Shorthand};
use fidelity_decay::sim::{run_experiment, ExperimentConfig};

fn main() -> fidelity_decay::Result<()> {
    let chi = CoefficientSpec::Constant(0.05);
    let shorthand = Shorthand::one_body(chi).with_two_body(PairSelection::FirstNeighbor, chi);
    let noise = expand_shorthand(8, &shorthand, CorrelationClass::Coherent)?;
    let cfg = ExperimentConfig::new(noise).with_steps(40).with_realizations(200).with_seed(1);
    let curve = run_experiment(&cfg)?;
    println!("t,mean_f,stderr");
    for t in (0..=cfg.steps).step_by(4) {
        println!("{t},{:.6},{:.6}", curve.mean_f[t], curve.stderr[t]);
    }
    Ok(())
}
