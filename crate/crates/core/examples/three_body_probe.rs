//! Detects a three-body term and shows the probe vanishing without one.

use fidelity_decay::linalg::ProductOperator;
use fidelity_decay::noise::{CoefficientSpec, CorrelationClass, NoiseModelConfig, NoiseTerm};
use fidelity_decay::protocol::{plan_protocol, run_protocol, SimulationSource, TripleSelection};

fn probe(terms: Vec<(&[usize], &str)>, chi: f64) -> fidelity_decay::Result<()> {
    let terms = terms
        .into_iter()
        .map(|(q, a)| Ok(NoiseTerm::new(ProductOperator::from_sparse(3, q, a)?, CoefficientSpec::Constant(chi))))
        .collect::<fidelity_decay::Result<Vec<_>>>()?;
    let noise = NoiseModelConfig::new(3, terms, CorrelationClass::Coherent)?;
    let plan = plan_protocol(3, 3, &TripleSelection::All)?;
    let report = run_protocol(&plan, &mut SimulationSource::new(noise, 10_000, 4))?;
    for est in &report.three_body {
        println!("  {:?}: {:+.3e} ± {:.1e}", est.subset, est.value, est.stderr);
    }
    Ok(())
}

fn main() -> fidelity_decay::Result<()> {
    println!("XYZ and ZZX terms, (chi*)^2 = 2 * 0.05^2 = 5e-3:");
    probe(vec![(&[0, 1, 2], "XYZ"), (&[0, 1, 2], "ZZX")], 0.05)?;
    println!("two-body terms only:");
    probe(vec![(&[0, 1], "XX"), (&[1, 2], "YZ"), (&[0, 2], "ZZ")], 0.05)?;
    Ok(())
}
