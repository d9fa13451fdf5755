use std::f64::consts::FRAC_PI_6;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::PauliAxis;
use crate::noise::{draw_unchecked, CoefficientSpec, CorrelationClass};
use crate::rng::experiment_stream;
use crate::sim::ExperimentConfig;

/// Single-qubit decay law for one-body noise `exp(−i χ σ_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DecayLaw {
    /// Fixed rotation angle `α`: `exp(−λt)`, `λ = −ln((4cos²α − 1)/3)`.
    Coherent { alpha: f64 },
    /// `χ ~ N(α, σ²)` per realization:
    /// `exp(−a(t)) / √(1 + (8/3)σ²t)`, `a(t) = (4/3)α²t / (1 + (8/3)σ²t)`.
    /// Leading order in `α, σ`.
    IncoherentLong { alpha: f64, sigma: f64 },
    /// `χ ~ N(α, σ²)` per step: `exp(−ηt)`,
    /// `η = −ln((1 + 2cos2α e^{−2σ²})/3)`.
    IncoherentShort { alpha: f64, sigma: f64 },
}

impl DecayLaw {
    pub fn coherent_lambda(alpha: f64) -> Result<f64> {
        if alpha.abs() >= FRAC_PI_6 {
            return Err(Error::OutOfModel(format!(
                "coherent angle {alpha} is at or beyond π/6, where the fidelity oscillates"
            )));
        }
        let c = alpha.cos();
        Ok(-((4.0 * c * c - 1.0) / 3.0).ln())
    }

    pub fn short_eta(alpha: f64, sigma: f64) -> f64 {
        -((1.0 + 2.0 * (2.0 * alpha).cos() * (-2.0 * sigma * sigma).exp()) / 3.0).ln()
    }

    /// Factor multiplying `f0_j − 1/2` after `t` steps.
    pub fn decay(&self, t: f64) -> Result<f64> {
        Ok(match *self {
            DecayLaw::Coherent { alpha } => (-Self::coherent_lambda(alpha)? * t).exp(),
            DecayLaw::IncoherentLong { alpha, sigma } => {
                let d = 1.0 + 8.0 / 3.0 * sigma * sigma * t;
                let a = 4.0 / 3.0 * alpha * alpha * t / d;
                (-a).exp() / d.sqrt()
            }
            DecayLaw::IncoherentShort { alpha, sigma } => (-Self::short_eta(alpha, sigma) * t).exp(),
        })
    }
}

/// Decay law of one qubit together with its initial purity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayLawParams {
    /// `None` for a noiseless qubit.
    pub law: Option<DecayLaw>,
    pub f0_j: f64,
}

/// `⟨f^{(j)}(t)⟩ = 1/2 + (f0_j − 1/2)·decay(t)`.
pub fn fidelity_closed_form(law: &DecayLaw, f0_j: f64, t: usize) -> Result<f64> {
    if !(0.5 - 1e-12..=1.0 + 1e-12).contains(&f0_j) {
        return Err(Error::invalid(format!("single-qubit f0 {f0_j} outside [1/2, 1]")));
    }
    Ok(0.5 + (f0_j - 0.5) * law.decay(t as f64)?)
}

/// Product of single-qubit closed forms.
pub fn product_closed_form(params: &[DecayLawParams], t: usize) -> Result<f64> {
    params
        .iter()
        .map(|p| match &p.law {
            Some(law) => fidelity_closed_form(law, p.f0_j, t),
            None => Ok(p.f0_j),
        })
        .product()
}

/// Per measured qubit decay laws of a one-body experiment.
///
/// Coherent noise uses the coefficients the experiment actually draws, so any
/// axes and distributions are covered. Incoherent noise needs either constant
/// coefficients or a single Gaussian axis per qubit.
pub fn closed_form_params(cfg: &ExperimentConfig) -> Result<Vec<DecayLawParams>> {
    let noise = &cfg.noise;
    if !noise.is_one_body() {
        return Err(Error::OutOfModel(
            "closed forms exist only for one-body noise".into(),
        ));
    }
    let coherent_values = (noise.correlation() == CorrelationClass::Coherent)
        .then(|| draw_unchecked(noise, &mut experiment_stream(cfg.seed)).values);

    cfg.measured
        .iter()
        .map(|&q| {
            let f0_j = cfg.initial_state[q].purity();
            let on_qubit: Vec<(usize, PauliAxis, CoefficientSpec)> = noise
                .terms()
                .iter()
                .enumerate()
                .filter(|(_, t)| t.op.support() == [q])
                .map(|(i, t)| (i, t.op.axis(q), t.coeff))
                .collect();
            if on_qubit.is_empty() {
                return Ok(DecayLawParams { law: None, f0_j });
            }
            let norm_of = |values: Vec<(PauliAxis, f64)>| {
                let mut v = [0.0f64; 3];
                for (axis, x) in values {
                    let k = PauliAxis::NON_IDENTITY.iter().position(|&a| a == axis).unwrap();
                    v[k] += x;
                }
                v.iter().map(|x| x * x).sum::<f64>().sqrt()
            };
            let law = if let Some(values) = &coherent_values {
                DecayLaw::Coherent {
                    alpha: norm_of(on_qubit.iter().map(|&(i, a, _)| (a, values[i])).collect()),
                }
            } else if on_qubit.iter().all(|(_, _, s)| s.is_constant()) {
                let alpha = norm_of(
                    on_qubit
                        .iter()
                        .map(|&(_, a, s)| match s {
                            CoefficientSpec::Constant(v) => (a, v),
                            CoefficientSpec::Gaussian { .. } => unreachable!(),
                        })
                        .collect(),
                );
                DecayLaw::Coherent { alpha }
            } else if let [(_, _, CoefficientSpec::Gaussian { mean, std })] = on_qubit[..] {
                match noise.correlation() {
                    CorrelationClass::IncoherentLong => DecayLaw::IncoherentLong { alpha: mean, sigma: std },
                    _ => DecayLaw::IncoherentShort { alpha: mean, sigma: std },
                }
            } else {
                return Err(Error::OutOfModel(format!(
                    "qubit {q} has several random axes; no closed form"
                )));
            };
            Ok(DecayLawParams { law: Some(law), f0_j })
        })
        .collect()
}

/// Closed-form `⟨f(t)⟩` for `t = 0..=steps` of the experiment.
pub fn closed_form_curve(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    let params = closed_form_params(cfg)?;
    (0..=cfg.steps).map(|t| product_closed_form(&params, t)).collect()
}
