//! Simulated curves against the analytic decay laws for z-axis noise.

use fidelity_decay::analytics::closed_form_curve;
use fidelity_decay::linalg::PauliAxis;
use fidelity_decay::noise::{expand_shorthand, CoefficientSpec, CorrelationClass, Shorthand};
use fidelity_decay::sim::{run_experiment, ExperimentConfig};

fn main() -> fidelity_decay::Result<()> {
    let scenarios = [
        ("IL  a=0    s=0.08", CorrelationClass::IncoherentLong, CoefficientSpec::gaussian(0.0, 0.08)?),
        ("IS  a=0    s=0.08", CorrelationClass::IncoherentShort, CoefficientSpec::gaussian(0.0, 0.08)?),
        ("C   a=0.08       ", CorrelationClass::Coherent, CoefficientSpec::Constant(0.08)),
        ("IS  a=0.08 s=0.04", CorrelationClass::IncoherentShort, CoefficientSpec::gaussian(0.08, 0.04)?),
        ("IL  a=0.08 s=0.08", CorrelationClass::IncoherentLong, CoefficientSpec::gaussian(0.08, 0.08)?),
    ];
    for (name, class, spec) in scenarios {
        let noise = expand_shorthand(8, &Shorthand::one_body(spec).with_axes(&[PauliAxis::Z]), class)?;
        let cfg = ExperimentConfig::new(noise).with_steps(200).with_realizations(100).with_seed(3);
        let curve = run_experiment(&cfg)?;
        let theory = closed_form_curve(&cfg)?;
        print!("{name}:");
        for t in [0, 25, 50, 100, 200] {
            print!("  t={t} {:.3}/{:.3}", curve.mean_f[t], theory[t]);
        }
        println!();
    }
    Ok(())
}
