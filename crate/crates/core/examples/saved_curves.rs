//! Saves subset curves from one run and re-runs the inversion from disk.

use fidelity_decay::noise::{expand_shorthand, CoefficientSpec, CorrelationClass, PairSelection, Shorthand};
use fidelity_decay::protocol::{plan_protocol, run_protocol, CurveSource, SimulationSource, TripleSelection};

fn main() -> fidelity_decay::Result<()> {
    let noise = expand_shorthand(
        3,
        &Shorthand::one_body(CoefficientSpec::gaussian(0.0, 0.02)?)
            .with_two_body(PairSelection::FirstNeighbor, CoefficientSpec::gaussian(0.0, 0.03)?),
        CorrelationClass::IncoherentShort,
    )?;
    let plan = plan_protocol(3, 2, &TripleSelection::None)?;
    let mut source = SimulationSource::new(noise, 5_000, 12);
    let live = run_protocol(&plan, &mut source)?;

    let dir = std::env::temp_dir().join("fdecay_saved_curves");
    std::fs::create_dir_all(&dir)?;
    for (subset, curve) in &source.curves {
        curve.save(&dir.join(CurveSource::file_name(subset)))?;
    }
    let replay = run_protocol(&plan, &mut CurveSource::from_dir(&dir)?)?;
    for (a, b) in live.two_body.iter().zip(&replay.two_body) {
        println!("{:?}: live {:+.4e}, from disk {:+.4e}", a.subset, a.value, b.value);
    }
    println!("curves in {}", dir.display());
    Ok(())
}
