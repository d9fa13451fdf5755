use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ProductOperator;
use crate::noise::NoiseModelConfig;
use crate::sim::ExperimentConfig;

/// A generator term with the averaged squares of its coefficient's real and
/// imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaTerm {
    pub op: ProductOperator,
    pub re_sq: f64,
    /// Only meaningful analytically; the simulator keeps `E` unitary.
    pub im_sq: f64,
}

impl GammaTerm {
    pub fn real(op: ProductOperator, second_moment: f64) -> Self {
        Self {
            op,
            re_sq: second_moment,
            im_sq: 0.0,
        }
    }
}

/// Terms of a noise model with `⟨χ_l²⟩` taken from their distributions.
pub fn gamma_terms(noise: &NoiseModelConfig) -> Vec<GammaTerm> {
    noise
        .terms()
        .iter()
        .map(|t| GammaTerm::real(t.op.clone(), t.coeff.second_moment()))
        .collect()
}

/// Initial-state purities of the measured qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityVector {
    purities: BTreeMap<usize, f64>,
}

impl PurityVector {
    pub fn new(entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut purities = BTreeMap::new();
        for (q, p) in entries {
            if !(0.5 - 1e-12..=1.0 + 1e-12).contains(&p) {
                return Err(Error::invalid(format!(
                    "purity {p} of qubit {q} outside [1/2, 1]"
                )));
            }
            if purities.insert(q, p).is_some() {
                return Err(Error::invalid(format!("purity of qubit {q} given twice")));
            }
        }
        Ok(Self { purities })
    }

    pub fn all_pure(measured: &[usize]) -> Self {
        Self {
            purities: measured.iter().map(|&q| (q, 1.0)).collect(),
        }
    }

    pub fn get(&self, qubit: usize) -> Option<f64> {
        self.purities.get(&qubit).copied()
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.purities.keys().copied()
    }

    /// `f0 = Π_j 𝒫_j`.
    pub fn f0(&self) -> f64 {
        self.purities.values().product()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaPrediction {
    pub gamma: f64,
    /// One entry per input term, in input order.
    pub contributions: Vec<(ProductOperator, f64)>,
}

/// Second-order initial decay rate `γ^{(M)}` for arbitrary measured-qubit
/// purities. `M` is the key set of `purities`.
///
/// Each term contributes
/// `[⟨Re χ⟩² (Π𝒫_j − ΠC_j) − ⟨Im χ⟩² (Π𝒫_j + ΠC_j)] / f0`, where
/// `C_j = (2/3)(1 − 𝒫_j/2)` if the term acts on `j` and `𝒫_j` otherwise. The
/// division by `f0 = Π𝒫_j` makes the result the rate of `⟨f⟩/f0`, matching
/// `γ = 1 − ⟨f(1)⟩/f0`.
pub fn gamma_general(terms: &[GammaTerm], purities: &PurityVector) -> Result<GammaPrediction> {
    if purities.purities.is_empty() {
        return Err(Error::invalid("measured set must be nonempty"));
    }
    let f0 = purities.f0();
    let mut gamma = 0.0;
    let mut contributions = Vec::with_capacity(terms.len());
    for term in terms {
        if let Some(&q) = purities.purities.keys().find(|&&q| q >= term.op.n_qubits()) {
            return Err(Error::QubitIndex {
                index: q,
                n_qubits: term.op.n_qubits(),
            });
        }
        let c: f64 = purities
            .purities
            .iter()
            .map(|(&q, &p)| {
                if term.op.axis(q).is_identity() {
                    p
                } else {
                    2.0 / 3.0 * (1.0 - p / 2.0)
                }
            })
            .product();
        let value = (term.re_sq * (f0 - c) - term.im_sq * (f0 + c)) / f0;
        gamma += value;
        contributions.push((term.op.clone(), value));
    }
    Ok(GammaPrediction {
        gamma,
        contributions,
    })
}

/// [`gamma_general`] for the measured set and initial state of an experiment.
pub fn gamma_for_config(cfg: &ExperimentConfig) -> Result<GammaPrediction> {
    let purities = PurityVector::new(
        cfg.measured
            .iter()
            .map(|&q| (q, cfg.initial_state[q].purity())),
    )?;
    gamma_general(&gamma_terms(&cfg.noise), &purities)
}

/// Weight `1 − 3^{-k}` of a collective coefficient whose support shares `k`
/// qubits with a pure measured set.
pub fn overlap_weight(k: usize) -> f64 {
    1.0 - 3f64.powi(-(k as i32))
}

/// `γ^{(M)}` for one, two or three pure measured qubits from collective
/// strengths `(χ*_S)²` keyed by sorted support `S`.
pub fn gamma_subset_formulas(strengths: &BTreeMap<Vec<usize>, f64>, measured: &[usize]) -> Result<f64> {
    let mut m = measured.to_vec();
    m.sort_unstable();
    m.dedup();
    if m.is_empty() || m.len() > 3 {
        return Err(Error::invalid(format!(
            "subset formulas cover 1 to 3 measured qubits, got {}",
            m.len()
        )));
    }
    let mut gamma = 0.0;
    for (support, &s) in strengths {
        if s < 0.0 {
            return Err(Error::invalid(format!(
                "collective strength of {support:?} is negative"
            )));
        }
        let k = support.iter().filter(|q| m.contains(q)).count();
        gamma += overlap_weight(k) * s;
    }
    Ok(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(n: usize, qubits: &[usize], axes: &str, sq: f64) -> GammaTerm {
        GammaTerm::real(ProductOperator::from_sparse(n, qubits, axes).unwrap(), sq)
    }

    #[test]
    fn pure_weights_follow_one_minus_three_to_minus_nu() {
        let p = PurityVector::all_pure(&[0, 1, 2]);
        for (nu, qubits, axes) in [(1, &[0][..], "X"), (2, &[0, 1][..], "XY"), (3, &[0, 1, 2][..], "XYZ")] {
            let g = gamma_general(&[term(3, qubits, axes, 1.0)], &p).unwrap().gamma;
            assert!((g - overlap_weight(nu)).abs() < 1e-15);
        }
        assert!((overlap_weight(1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((overlap_weight(2) - 8.0 / 9.0).abs() < 1e-15);
        assert!((overlap_weight(3) - 26.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_qubit_is_blind() {
        let p = PurityVector::new([(0, 0.5)]).unwrap();
        let g = gamma_general(&[term(1, &[0], "Z", 0.3)], &p).unwrap();
        assert!(g.gamma.abs() < 1e-16);
    }

    #[test]
    fn term_leaving_measured_set() {
        let p = PurityVector::all_pure(&[0]);
        let g = gamma_general(&[term(2, &[0, 1], "XZ", 0.01), term(2, &[1], "Y", 0.5)], &p).unwrap();
        assert!((g.contributions[0].1 - 2.0 / 3.0 * 0.01).abs() < 1e-16);
        assert_eq!(g.contributions[1].1, 0.0);
    }

    #[test]
    fn normalised_by_f0() {
        // measuring a mixed qubit alongside a pure one leaves γ of the pure one
        let p = PurityVector::new([(0, 1.0), (1, 0.5)]).unwrap();
        let g = gamma_general(&[term(2, &[0], "X", 0.01)], &p).unwrap();
        assert!((g.gamma - 2.0 / 3.0 * 0.01).abs() < 1e-16);
    }

    #[test]
    fn matches_subset_formulas_when_pure() {
        let n = 4;
        let terms = vec![
            term(n, &[0], "X", 0.01),
            term(n, &[0, 1], "ZZ", 0.02),
            term(n, &[1, 3], "XY", 0.03),
            term(n, &[0, 2, 3], "XYZ", 0.04),
        ];
        let mut strengths = BTreeMap::new();
        for t in &terms {
            *strengths.entry(t.op.support()).or_insert(0.0) += t.re_sq;
        }
        for m in [vec![0], vec![1, 3], vec![0, 2, 3], vec![1, 2]] {
            let g = gamma_general(&terms, &PurityVector::all_pure(&m)).unwrap().gamma;
            let s = gamma_subset_formulas(&strengths, &m).unwrap();
            assert!((g - s).abs() < 1e-15, "{m:?}");
        }
    }

    #[test]
    fn pair_and_triple_combinations() {
        let s = 0.0036;
        let pair = BTreeMap::from([(vec![0, 1], s)]);
        let g = |m: &[usize], st: &BTreeMap<Vec<usize>, f64>| gamma_subset_formulas(st, m).unwrap();
        let combo = g(&[0], &pair) + g(&[1], &pair) - g(&[0, 1], &pair);
        assert!((combo - 4.0 / 9.0 * s).abs() < 1e-15);

        let triple = BTreeMap::from([(vec![0, 1, 2], s)]);
        let ie = g(&[0], &triple) + g(&[1], &triple) + g(&[2], &triple)
            - g(&[0, 1], &triple)
            - g(&[0, 2], &triple)
            - g(&[1, 2], &triple)
            + g(&[0, 1, 2], &triple);
        assert!((ie - 8.0 / 27.0 * s).abs() < 1e-15);
    }

    #[test]
    fn subset_formula_errors() {
        let st = BTreeMap::from([(vec![0], 0.1)]);
        assert!(gamma_subset_formulas(&st, &[0, 1, 2, 3]).is_err());
        assert!(gamma_subset_formulas(&BTreeMap::from([(vec![0], -0.1)]), &[0]).is_err());
        assert_eq!(gamma_subset_formulas(&BTreeMap::new(), &[0]).unwrap(), 0.0);
    }

    #[test]
    fn purity_range_checked() {
        assert!(PurityVector::new([(0, 0.4)]).is_err());
        assert!(PurityVector::new([(0, 1.1)]).is_err());
    }
}
