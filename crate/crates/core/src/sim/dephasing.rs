use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::noise::{draw_unchecked, per_qubit_unchecked, DrawScope, NoiseModelConfig};
use crate::rng::{experiment_stream, realization_stream};

/// Mean single-qubit Bloch vector over realizations of `ρ_t = E_t ρ_{t-1} E_t†`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochTrajectory {
    /// `mean[t]` for `t = 0..=steps`.
    pub mean: Vec<[f64; 3]>,
    pub stderr: Vec<[f64; 3]>,
    pub n_realizations: usize,
}

impl BlochTrajectory {
    /// `√(x² + y²)` of the mean vector at step `t`.
    pub fn transverse_norm(&self, t: usize) -> f64 {
        let [x, y, _] = self.mean[t];
        x.hypot(y)
    }
}

/// Free evolution of one qubit under its noise model, without rotations.
pub fn simulate_free_dephasing(
    bloch0: [f64; 3],
    noise: &NoiseModelConfig,
    steps: usize,
    realizations: usize,
    seed: u64,
) -> Result<BlochTrajectory> {
    if noise.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: noise.n_qubits(),
        });
    }
    if realizations == 0 {
        return Err(Error::invalid("realization count must be at least 1"));
    }
    if bloch0.iter().map(|c| c * c).sum::<f64>() > 1.0 + 1e-12 {
        return Err(Error::invalid(format!("{bloch0:?} lies outside the Bloch ball")));
    }
    let rho0 = Mat2::from_bloch(bloch0);
    let scope = noise.correlation().draw_scope();
    let coherent = (scope == DrawScope::Experiment)
        .then(|| per_qubit_unchecked(noise, &draw_unchecked(noise, &mut experiment_stream(seed)).values)[0]);

    let traces: Vec<Vec<[f64; 3]>> = (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = realization_stream(seed, r);
            let draw = |rng: &mut _| per_qubit_unchecked(noise, &draw_unchecked(noise, rng).values)[0];
            let fixed = match scope {
                DrawScope::Experiment => coherent,
                DrawScope::Realization => Some(draw(&mut rng)),
                DrawScope::Step => None,
            };
            let mut rho = rho0;
            let mut out = Vec::with_capacity(steps + 1);
            out.push(bloch0);
            for _ in 0..steps {
                let e = fixed.unwrap_or_else(|| draw(&mut rng));
                rho = e.conjugate(&rho);
                out.push(rho.bloch_vector());
            }
            out
        })
        .collect();

    let n = realizations as f64;
    let mut mean = vec![[0.0; 3]; steps + 1];
    for trace in &traces {
        for (m, v) in mean.iter_mut().zip(trace) {
            for k in 0..3 {
                m[k] += v[k];
            }
        }
    }
    mean.iter_mut().flatten().for_each(|m| *m /= n);
    let mut ss = vec![[0.0; 3]; steps + 1];
    for trace in &traces {
        for ((s, v), m) in ss.iter_mut().zip(trace).zip(&mean) {
            for k in 0..3 {
                s[k] += (v[k] - m[k]).powi(2);
            }
        }
    }
    let stderr = ss
        .iter()
        .map(|s| {
            if realizations > 1 {
                s.map(|x| (x / (n - 1.0) / n).sqrt())
            } else {
                [0.0; 3]
            }
        })
        .collect();
    Ok(BlochTrajectory {
        mean,
        stderr,
        n_realizations: realizations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ProductOperator;
    use crate::noise::{CoefficientSpec, CorrelationClass, NoiseTerm};

    fn z_noise(spec: CoefficientSpec, class: CorrelationClass) -> NoiseModelConfig {
        let op: ProductOperator = "Z".parse().unwrap();
        NoiseModelConfig::new(1, vec![NoiseTerm::new(op, spec)], class).unwrap()
    }

    #[test]
    fn coherent_z_rotation_precesses() {
        let alpha = 0.1;
        let noise = z_noise(CoefficientSpec::Constant(alpha), CorrelationClass::Coherent);
        let traj = simulate_free_dephasing([1.0, 0.0, 0.0], &noise, 5, 3, 1).unwrap();
        for t in 0..=5 {
            let angle = 2.0 * alpha * t as f64;
            assert!((traj.mean[t][0] - angle.cos()).abs() < 1e-12);
            assert!((traj.mean[t][1] - angle.sin()).abs() < 1e-12);
            assert!(traj.stderr[t][0] < 1e-12);
        }
    }

    #[test]
    fn rejects_multi_qubit_models() {
        let noise = NoiseModelConfig::noiseless(2).unwrap();
        assert!(simulate_free_dephasing([0.0, 0.0, 1.0], &noise, 1, 1, 0).is_err());
    }
}
