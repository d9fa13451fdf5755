//! Free single-qubit evolution under random z rotations and the averaged
//! channel it converges to.

use fidelity_decay::analytics::{appendix_a_kraus, transverse_decay};
use fidelity_decay::linalg::{Mat2, PauliAxis};
use fidelity_decay::noise::{expand_shorthand, CoefficientSpec, CorrelationClass, Shorthand};
use fidelity_decay::sim::simulate_free_dephasing;

fn main() -> fidelity_decay::Result<()> {
    let (alpha, sigma) = (0.05, 0.08);
    for class in [CorrelationClass::IncoherentLong, CorrelationClass::IncoherentShort] {
        let noise = expand_shorthand(
            1,
            &Shorthand::one_body(CoefficientSpec::gaussian(alpha, sigma)?).with_axes(&[PauliAxis::Z]),
            class,
        )?;
        let traj = simulate_free_dephasing([1.0, 0.0, 0.0], &noise, 20, 10_000, 1)?;
        println!("{class}: t, |r_perp| simulated, exp(-delta)");
        for t in [0, 5, 10, 20] {
            println!("  {t:>2}  {:.4}  {:.4}", traj.transverse_norm(t), transverse_decay(sigma, t as f64, class)?);
        }
        let [m1, m2] = appendix_a_kraus(alpha, sigma, 20.0, class)?;
        let completeness = (m1.adjoint() * m1 + m2.adjoint() * m2).max_abs_diff(&Mat2::IDENTITY);
        println!("  Kraus completeness deviation at t=20: {completeness:.1e}");
    }
    Ok(())
}
