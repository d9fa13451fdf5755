//! Motion reversal against stepwise twirling on identical noise.

use fidelity_decay::noise::{expand_shorthand, CoefficientSpec, CorrelationClass, PairSelection, Shorthand};
use fidelity_decay::sim::{run_experiment, CircuitForm, ExperimentConfig};

fn main() -> fidelity_decay::Result<()> {
    let chi = CoefficientSpec::gaussian(0.0, 0.05)?;
    let noise = expand_shorthand(
        3,
        &Shorthand::one_body(chi).with_two_body(PairSelection::All, chi),
        CorrelationClass::IncoherentShort,
    )?;
    let base = ExperimentConfig::new(noise).with_steps(20).with_realizations(5_000).with_seed(6);
    let reversal = run_experiment(&base.clone().with_circuit_form(CircuitForm::MotionReversal))?;
    let twirl = run_experiment(&base.with_circuit_form(CircuitForm::StepwiseTwirl))?;
    println!("t,motion_reversal,stepwise_twirl");
    for t in (0..=20).step_by(2) {
        println!("{t},{:.5},{:.5}", reversal.mean_f[t], twirl.mean_f[t]);
    }
    Ok(())
}
