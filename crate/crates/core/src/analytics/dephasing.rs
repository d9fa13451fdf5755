use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, Mat2};
use crate::noise::CorrelationClass;

/// `e^{−δ}` with `δ = 2σ²t²` (incoherent long) or `δ = 2σ²t` (incoherent short).
pub fn transverse_decay(sigma: f64, t: f64, class: CorrelationClass) -> Result<f64> {
    let delta = match class {
        CorrelationClass::IncoherentLong => 2.0 * sigma * sigma * t * t,
        CorrelationClass::IncoherentShort => 2.0 * sigma * sigma * t,
        CorrelationClass::Coherent => {
            return Err(Error::invalid(
                "the dephasing model covers incoherent noise only",
            ))
        }
    };
    Ok((-delta).exp())
}

/// Averaged state after `t` steps of `exp(−i χ σ_z)` with `χ ~ N(α, σ²)`:
/// the transverse Bloch components rotate by `2αt` and shrink by `e^{−δ}`.
pub fn appendix_a_state(
    bloch0: [f64; 3],
    alpha: f64,
    sigma: f64,
    t: f64,
    class: CorrelationClass,
) -> Result<DensityMatrix> {
    let norm_sq: f64 = bloch0.iter().map(|c| c * c).sum();
    if !(norm_sq <= 1.0 + 1e-12) {
        return Err(Error::invalid(format!("{bloch0:?} lies outside the Bloch ball")));
    }
    let decay = transverse_decay(sigma, t, class)?;
    let [x, y, z] = bloch0;
    let (s, c) = (2.0 * alpha * t).sin_cos();
    let state = Mat2::from_bloch([(x * c - y * s) * decay, (x * s + y * c) * decay, z]);
    DensityMatrix::new(state.to_matrix())
}

/// Kraus pair `M₁ = √((1+e^{−δ})/2) e^{−iαtσ_z}`, `M₂ = √((1−e^{−δ})/2) σ_z e^{−iαtσ_z}`
/// reproducing [`appendix_a_state`].
pub fn appendix_a_kraus(alpha: f64, sigma: f64, t: f64, class: CorrelationClass) -> Result<[Mat2; 2]> {
    let decay = transverse_decay(sigma, t, class)?;
    let rotation = Mat2::exp_pauli([0.0, 0.0, alpha * t]);
    let k1 = rotation.scale(Complex64::new(((1.0 + decay) / 2.0).sqrt(), 0.0));
    let k2 = (Mat2::PAULI_Z * rotation).scale(Complex64::new(((1.0 - decay) / 2.0).sqrt(), 0.0));
    Ok([k1, k2])
}
