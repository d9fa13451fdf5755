//! Plants a coupling between two qubits and recovers every collective
//! one- and two-body coefficient from subset decay rates.

use fidelity_decay::linalg::ProductOperator;
use fidelity_decay::noise::{CoefficientSpec, CorrelationClass, NoiseModelConfig, NoiseTerm};
use fidelity_decay::protocol::{plan_protocol, run_protocol, SimulationSource, TripleSelection};

fn main() -> fidelity_decay::Result<()> {
    let n = 4;
    let term = |qubits: &[usize], axes: &str, chi: f64| -> fidelity_decay::Result<NoiseTerm> {
        Ok(NoiseTerm::new(ProductOperator::from_sparse(n, qubits, axes)?, CoefficientSpec::Constant(chi)))
    };
    let noise = NoiseModelConfig::new(
        n,
        vec![term(&[1, 2], "XX", 0.04)?, term(&[1, 2], "ZY", 0.03)?, term(&[3], "Z", 0.05)?],
        CorrelationClass::Coherent,
    )?;
    let planted = noise.collective_strengths();
    let plan = plan_protocol(n, 2, &TripleSelection::None)?;
    let report = run_protocol(&plan, &mut SimulationSource::new(noise, 10_000, 8))?;
    println!("subset  estimate        stderr     planted");
    for est in &report.two_body {
        let truth = planted.get(&est.subset).copied().unwrap_or(0.0);
        println!("{:<7} {:>+.4e}  {:.1e}  {:.4e}", format!("{:?}", est.subset), est.value, est.stderr, truth);
    }
    Ok(())
}
