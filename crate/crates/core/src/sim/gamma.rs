use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::curve::FidelityCurve;
use super::engine::run_experiment;
use crate::analytics::fit::least_squares_line;
use crate::error::{Error, Result};

pub const DEFAULT_F_LIM: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum GammaMethod {
    /// `γ = 1 − ⟨f(1)⟩/f0`.
    #[default]
    FirstStep,
    /// Negated slope of the line through `(t, ⟨f(t)⟩/f0)` over points with
    /// `⟨f(t)⟩ > f_lim·f0`.
    LinearFit { f_lim: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRateEstimate {
    pub gamma: f64,
    pub stderr: f64,
    pub method: GammaMethod,
    /// Curve points used by the estimate.
    pub points: usize,
}

/// Runs the experiment and extracts `γ` from the resulting curve.
pub fn estimate_gamma(config: &ExperimentConfig, method: GammaMethod) -> Result<DecayRateEstimate> {
    gamma_from_curve(&run_experiment(config)?, method)
}

/// The line-fit error treats the per-point errors as independent, which
/// overstates precision slightly since all points share realizations.
pub fn gamma_from_curve(curve: &FidelityCurve, method: GammaMethod) -> Result<DecayRateEstimate> {
    if !(curve.f0 > 0.0) {
        return Err(Error::invalid(format!("f0 = {} must be positive", curve.f0)));
    }
    match method {
        GammaMethod::FirstStep => {
            if curve.mean_f.len() < 2 {
                return Err(Error::InsufficientPoints {
                    needed: 2,
                    found: curve.mean_f.len(),
                });
            }
            Ok(DecayRateEstimate {
                gamma: 1.0 - curve.mean_f[1] / curve.f0,
                stderr: curve.stderr[1] / curve.f0,
                method,
                points: 2,
            })
        }
        GammaMethod::LinearFit { f_lim } => {
            let threshold = f_lim * curve.f0;
            let (mut t, mut y, mut s) = (Vec::new(), Vec::new(), Vec::new());
            for (i, (&m, &e)) in curve.mean_f.iter().zip(&curve.stderr).enumerate() {
                if m > threshold {
                    t.push(i as f64);
                    y.push(m / curve.f0);
                    s.push(e / curve.f0);
                }
            }
            let line = least_squares_line(&t, &y)?;
            let var: f64 = line
                .slope_weights
                .iter()
                .zip(&s)
                .map(|(w, e)| w * w * e * e)
                .sum();
            Ok(DecayRateEstimate {
                gamma: -line.slope,
                stderr: var.sqrt(),
                method,
                points: t.len(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(mean_f: Vec<f64>, f0: f64) -> FidelityCurve {
        let n = mean_f.len();
        FidelityCurve {
            mean_f,
            stderr: vec![0.01; n],
            n_realizations: 10,
            f0,
        }
    }

    #[test]
    fn first_step_normalises_by_f0() {
        let e = gamma_from_curve(&curve(vec![0.5, 0.45], 0.5), GammaMethod::FirstStep).unwrap();
        assert!((e.gamma - 0.1).abs() < 1e-15);
        assert!((e.stderr - 0.02).abs() < 1e-15);
    }

    #[test]
    fn linear_fit_on_exact_line() {
        let f: Vec<f64> = (0..20).map(|t| 1.0 - 0.02 * t as f64).collect();
        let e = gamma_from_curve(&curve(f, 1.0), GammaMethod::LinearFit { f_lim: DEFAULT_F_LIM }).unwrap();
        assert!((e.gamma - 0.02).abs() < 1e-14);
        // 1 - 0.02 t > 0.9 for t < 5
        assert_eq!(e.points, 5);
    }

    #[test]
    fn linear_fit_needs_two_points() {
        let c = curve(vec![1.0, 0.5, 0.4], 1.0);
        assert!(matches!(
            gamma_from_curve(&c, GammaMethod::LinearFit { f_lim: 0.9 }),
            Err(Error::InsufficientPoints { .. })
        ));
    }
}
