//! Characterization protocol: measure `γ^{(M)}` on singletons, pairs and
//! chosen triples, then invert the subset rates into collective coefficients
//! `(χ*_S)²`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseModelConfig;
use crate::rng::derive_seed;
use crate::sim::{
    estimate_gamma, gamma_from_curve, Backend, ExperimentConfig, FidelityCurve, GammaMethod,
    MeasurementMode,
};

/// Measured subsets to schedule, in execution order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolPlan {
    pub n_qubits: usize,
    pub max_body: usize,
    pub tasks: Vec<Vec<usize>>,
    pub triples: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub enum TripleSelection {
    #[default]
    None,
    All,
    Chosen(Vec<[usize; 3]>),
}

/// All singletons and pairs, followed by the selected triples when
/// `max_body == 3`.
pub fn plan_protocol(n_qubits: usize, max_body: usize, triples: &TripleSelection) -> Result<ProtocolPlan> {
    if !(2..=3).contains(&max_body) {
        return Err(Error::invalid(format!("max_body must be 2 or 3, got {max_body}")));
    }
    if n_qubits < max_body {
        return Err(Error::invalid(format!(
            "{max_body}-body probing needs at least {max_body} qubits, got {n_qubits}"
        )));
    }
    if n_qubits > crate::linalg::MAX_QUBITS {
        return Err(Error::QubitCap {
            requested: n_qubits,
            cap: crate::linalg::MAX_QUBITS,
        });
    }
    let mut tasks: Vec<Vec<usize>> = (0..n_qubits).map(|q| vec![q]).collect();
    for a in 0..n_qubits {
        for b in a + 1..n_qubits {
            tasks.push(vec![a, b]);
        }
    }
    let chosen: Vec<[usize; 3]> = match (max_body, triples) {
        (2, TripleSelection::None) => Vec::new(),
        (2, _) => return Err(Error::invalid("triples requested with max_body = 2")),
        (_, TripleSelection::None) => {
            return Err(Error::invalid("max_body = 3 needs a triple selection"))
        }
        (_, TripleSelection::All) => {
            let mut all = Vec::new();
            for a in 0..n_qubits {
                for b in a + 1..n_qubits {
                    for c in b + 1..n_qubits {
                        all.push([a, b, c]);
                    }
                }
            }
            all
        }
        (_, TripleSelection::Chosen(list)) => {
            let mut out: Vec<[usize; 3]> = Vec::new();
            for t in list {
                let mut s = *t;
                s.sort_unstable();
                if s[0] == s[1] || s[1] == s[2] {
                    return Err(Error::invalid(format!("triple {t:?} repeats a qubit")));
                }
                if s[2] >= n_qubits {
                    return Err(Error::QubitIndex {
                        index: s[2],
                        n_qubits,
                    });
                }
                if !out.contains(&s) {
                    out.push(s);
                }
            }
            if out.is_empty() {
                return Err(Error::invalid("triple selection is empty"));
            }
            out
        }
    };
    tasks.extend(chosen.iter().map(|t| t.to_vec()));
    Ok(ProtocolPlan {
        n_qubits,
        max_body,
        tasks,
        triples: chosen,
    })
}

/// Measured `γ` of one subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaEntry {
    pub gamma: f64,
    pub stderr: f64,
}

pub type GammaTable = BTreeMap<Vec<usize>, GammaEntry>;

/// Estimated `(χ*_S)²` for one support `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEstimate {
    pub subset: Vec<usize>,
    /// Raw estimate; may be negative through statistical fluctuation.
    pub value: f64,
    pub stderr: f64,
    /// Whether the reported convenience value was clamped to zero.
    pub clamped: bool,
}

impl CoefficientEstimate {
    fn from_combination(subset: Vec<usize>, gammas: &GammaTable, combo: &[(Vec<usize>, f64)]) -> Result<Self> {
        let mut value = 0.0;
        let mut var = 0.0;
        for (s, w) in combo {
            let entry = gammas.get(s).ok_or_else(|| Error::MissingSubset(s.clone()))?;
            value += w * entry.gamma;
            var += w * w * entry.stderr * entry.stderr;
        }
        Ok(Self {
            subset,
            value,
            stderr: var.sqrt(),
            clamped: value < 0.0,
        })
    }

    /// `max(value, 0)`.
    pub fn clamped_value(&self) -> f64 {
        self.value.max(0.0)
    }
}

/// Merges repeated subsets in a linear combination.
fn collect_combination(parts: impl IntoIterator<Item = (Vec<usize>, f64)>) -> Vec<(Vec<usize>, f64)> {
    let mut map: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (s, w) in parts {
        *map.entry(s).or_insert(0.0) += w;
    }
    map.into_iter().collect()
}

/// Pair coefficients `(9/4)(γ_a + γ_b − γ_ab)` and one-body coefficients
/// `(3/2)γ_a − Σ_j (χ*_{a,j})²`, over the qubits that have singleton entries.
/// Errors are propagated in quadrature over the independent `γ` inputs.
pub fn invert_two_body(gammas: &GammaTable) -> Result<Vec<CoefficientEstimate>> {
    let qubits: Vec<usize> = gammas
        .keys()
        .filter(|s| s.len() == 1)
        .map(|s| s[0])
        .collect();
    if qubits.len() < 2 {
        return Err(Error::invalid("two-body inversion needs at least two singleton rates"));
    }
    let pair_combo = |a: usize, b: usize| {
        vec![(vec![a], 2.25), (vec![b], 2.25), (vec![a.min(b), a.max(b)], -2.25)]
    };
    let mut out = Vec::new();
    for &a in &qubits {
        let mut parts = vec![(vec![a], 1.5)];
        for &j in qubits.iter().filter(|&&j| j != a) {
            parts.extend(pair_combo(a, j).into_iter().map(|(s, w)| (s, -w)));
        }
        out.push(CoefficientEstimate::from_combination(
            vec![a],
            gammas,
            &collect_combination(parts),
        )?);
    }
    for (i, &a) in qubits.iter().enumerate() {
        for &b in &qubits[i + 1..] {
            out.push(CoefficientEstimate::from_combination(
                vec![a, b],
                gammas,
                &pair_combo(a, b),
            )?);
        }
    }
    Ok(out)
}

/// `(27/8)(γ_a + γ_b + γ_c − γ_ab − γ_ac − γ_bc + γ_abc)`.
pub fn probe_three_body(gammas: &GammaTable, triple: [usize; 3]) -> Result<CoefficientEstimate> {
    let mut t = triple;
    t.sort_unstable();
    let [a, b, c] = t;
    if a == b || b == c {
        return Err(Error::invalid(format!("triple {triple:?} repeats a qubit")));
    }
    let w = 27.0 / 8.0;
    let combo = vec![
        (vec![a], w),
        (vec![b], w),
        (vec![c], w),
        (vec![a, b], -w),
        (vec![a, c], -w),
        (vec![b, c], -w),
        (vec![a, b, c], w),
    ];
    CoefficientEstimate::from_combination(t.to_vec(), gammas, &combo)
}

/// Realization count from the Hoeffding bound `2 exp(−2 N δ²) ≤ ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleBudget {
    pub delta: f64,
    pub epsilon: f64,
    pub n_realizations: usize,
}

/// `N_R = ⌈−ln(ε/2) / (2δ²)⌉`.
pub fn chernoff_budget(delta: f64, epsilon: f64) -> Result<SampleBudget> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!("precision δ = {delta} must be positive")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("error probability ε = {epsilon} must lie in (0, 1)")));
    }
    let n = (-(epsilon / 2.0).ln() / (2.0 * delta * delta)).ceil();
    if n > usize::MAX as f64 {
        return Err(Error::invalid("budget overflows"));
    }
    Ok(SampleBudget {
        delta,
        epsilon,
        n_realizations: n as usize,
    })
}

/// Supplier of first-step decay rates for measured subsets.
pub trait GammaSource {
    fn gamma(&mut self, subset: &[usize]) -> Result<GammaEntry>;
}

/// Runs one single-step experiment per subset. Measured qubits start in
/// `|0⟩`, the rest maximally mixed; each subset gets its own seed derived
/// from the base seed and the subset, so tasks are independent and
/// order-insensitive.
#[derive(Debug, Clone)]
pub struct SimulationSource {
    pub noise: NoiseModelConfig,
    pub realizations: usize,
    pub seed: u64,
    pub measurement_mode: MeasurementMode,
    pub backend: Backend,
    /// Curves produced so far, keyed by subset.
    pub curves: BTreeMap<Vec<usize>, FidelityCurve>,
}

impl SimulationSource {
    pub fn new(noise: NoiseModelConfig, realizations: usize, seed: u64) -> Self {
        Self {
            noise,
            realizations,
            seed,
            measurement_mode: MeasurementMode::ExactTrace,
            backend: Backend::Auto,
            curves: BTreeMap::new(),
        }
    }

    pub fn task_config(&self, subset: &[usize]) -> ExperimentConfig {
        let mask: u64 = subset.iter().map(|&q| 1u64 << q).sum();
        ExperimentConfig::for_subset(self.noise.clone(), subset)
            .with_steps(1)
            .with_realizations(self.realizations)
            .with_seed(derive_seed(self.seed, mask))
            .with_measurement_mode(self.measurement_mode)
            .with_backend(self.backend)
    }
}

impl GammaSource for SimulationSource {
    fn gamma(&mut self, subset: &[usize]) -> Result<GammaEntry> {
        let cfg = self.task_config(subset);
        let curve = crate::sim::run_experiment(&cfg)?;
        let est = gamma_from_curve(&curve, GammaMethod::FirstStep)?;
        self.curves.insert(cfg.measured.clone(), curve);
        Ok(GammaEntry {
            gamma: est.gamma,
            stderr: est.stderr,
        })
    }
}

/// Previously saved curves keyed by subset.
#[derive(Debug, Clone, Default)]
pub struct CurveSource {
    pub curves: BTreeMap<Vec<usize>, FidelityCurve>,
}

impl CurveSource {
    /// File name used for a subset's curve, e.g. `subset_0_2.csv`.
    pub fn file_name(subset: &[usize]) -> String {
        let parts: Vec<String> = subset.iter().map(|q| q.to_string()).collect();
        format!("subset_{}.csv", parts.join("_"))
    }

    /// Loads every `subset_*.csv` in `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let mut curves = BTreeMap::new();
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
                continue;
            };
            let Some(stem) = name.strip_prefix("subset_").and_then(|s| s.strip_suffix(".csv")) else {
                continue;
            };
            let subset = stem
                .split('_')
                .map(|p| p.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::invalid(format!("cannot read a subset from {name}")))?;
            curves.insert(subset, FidelityCurve::load(&path)?);
        }
        Ok(Self { curves })
    }
}

impl GammaSource for CurveSource {
    fn gamma(&mut self, subset: &[usize]) -> Result<GammaEntry> {
        let curve = self
            .curves
            .get(subset)
            .ok_or_else(|| Error::MissingSubset(subset.to_vec()))?;
        let est = gamma_from_curve(curve, GammaMethod::FirstStep)?;
        Ok(GammaEntry {
            gamma: est.gamma,
            stderr: est.stderr,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub n_qubits: usize,
    pub gammas: Vec<(Vec<usize>, GammaEntry)>,
    /// Singletons first, then pairs.
    pub two_body: Vec<CoefficientEstimate>,
    pub three_body: Vec<CoefficientEstimate>,
    pub budget: Option<SampleBudget>,
}

/// Executes every task of the plan against `source` and inverts the rates.
pub fn run_protocol<S: GammaSource + ?Sized>(plan: &ProtocolPlan, source: &mut S) -> Result<ProtocolReport> {
    let mut table = GammaTable::new();
    for subset in &plan.tasks {
        table.insert(subset.clone(), source.gamma(subset)?);
    }
    let two_body = invert_two_body(&table)?;
    let three_body = plan
        .triples
        .iter()
        .map(|&t| probe_three_body(&table, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProtocolReport {
        n_qubits: plan.n_qubits,
        gammas: plan
            .tasks
            .iter()
            .map(|s| (s.clone(), table[s]))
            .collect(),
        two_body,
        three_body,
        budget: None,
    })
}

/// [`estimate_gamma`] wrapper used by callers building tables by hand.
pub fn measure_subset(cfg: &ExperimentConfig) -> Result<GammaEntry> {
    let est = estimate_gamma(cfg, GammaMethod::FirstStep)?;
    Ok(GammaEntry {
        gamma: est.gamma,
        stderr: est.stderr,
    })
}

fn subset_label(subset: &[usize]) -> String {
    subset
        .iter()
        .map(|q| q.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

impl ProtocolReport {
    pub fn coefficient(&self, subset: &[usize]) -> Option<&CoefficientEstimate> {
        self.two_body
            .iter()
            .chain(&self.three_body)
            .find(|c| c.subset == subset)
    }

    pub fn gamma(&self, subset: &[usize]) -> Option<GammaEntry> {
        self.gammas.iter().find(|(s, _)| s == subset).map(|(_, g)| *g)
    }

    /// Plain-text report with `[gamma]`, `[coefficients]` and `[budget]`
    /// sections; subsets are written as dash-joined qubit lists.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "[gamma]")?;
        writeln!(w, "subset,gamma,stderr")?;
        for (s, g) in &self.gammas {
            writeln!(w, "{},{:.16e},{:.16e}", subset_label(s), g.gamma, g.stderr)?;
        }
        writeln!(w)?;
        writeln!(w, "[coefficients]")?;
        writeln!(w, "subset,value,stderr,clamped")?;
        for c in self.two_body.iter().chain(&self.three_body) {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{}",
                subset_label(&c.subset),
                c.value,
                c.stderr,
                c.clamped
            )?;
        }
        if let Some(b) = &self.budget {
            writeln!(w)?;
            writeln!(w, "[budget]")?;
            writeln!(w, "delta = {}", b.delta)?;
            writeln!(w, "epsilon = {}", b.epsilon)?;
            writeln!(w, "n_realizations = {}", b.n_realizations)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::gamma_subset_formulas;

    fn exact_table(strengths: &BTreeMap<Vec<usize>, f64>, tasks: &[Vec<usize>]) -> GammaTable {
        tasks
            .iter()
            .map(|s| {
                (
                    s.clone(),
                    GammaEntry {
                        gamma: gamma_subset_formulas(strengths, s).unwrap(),
                        stderr: 0.0,
                    },
                )
            })
            .collect()
    }

    #[test]
    fn task_counts() {
        assert_eq!(plan_protocol(3, 2, &TripleSelection::None).unwrap().tasks.len(), 6);
        assert_eq!(plan_protocol(8, 2, &TripleSelection::None).unwrap().tasks.len(), 36);
        assert_eq!(plan_protocol(4, 3, &TripleSelection::All).unwrap().tasks.len(), 14);
        assert!(plan_protocol(1, 2, &TripleSelection::None).is_err());
        assert!(plan_protocol(3, 3, &TripleSelection::None).is_err());
        assert!(plan_protocol(3, 3, &TripleSelection::Chosen(vec![[0, 0, 1]])).is_err());
    }

    #[test]
    fn inversion_is_exact_on_analytic_rates() {
        let strengths = BTreeMap::from([
            (vec![0], 0.004),
            (vec![2], 0.001),
            (vec![0, 1], 0.0036),
            (vec![1, 3], 0.002),
        ]);
        let plan = plan_protocol(4, 2, &TripleSelection::None).unwrap();
        let table = exact_table(&strengths, &plan.tasks);
        for est in invert_two_body(&table).unwrap() {
            let planted = strengths.get(&est.subset).copied().unwrap_or(0.0);
            assert!((est.value - planted).abs() < 1e-15, "{:?}", est.subset);
        }
    }

    #[test]
    fn three_body_probe_cancels_lower_weights() {
        let strengths = BTreeMap::from([(vec![0], 0.01), (vec![0, 2], 0.02), (vec![1, 2], 0.005)]);
        let plan = plan_protocol(3, 3, &TripleSelection::All).unwrap();
        let table = exact_table(&strengths, &plan.tasks);
        assert!(probe_three_body(&table, [0, 1, 2]).unwrap().value.abs() < 1e-15);

        let planted = BTreeMap::from([(vec![0, 1, 2], 0.0036)]);
        let table = exact_table(&planted, &plan.tasks);
        assert!((probe_three_body(&table, [2, 0, 1]).unwrap().value - 0.0036).abs() < 1e-15);
    }

    #[test]
    fn stderr_propagation() {
        let mut table = GammaTable::new();
        for s in [vec![0], vec![1], vec![0, 1]] {
            table.insert(s, GammaEntry { gamma: 0.0, stderr: 0.01 });
        }
        let est = invert_two_body(&table).unwrap();
        let pair = est.iter().find(|e| e.subset == [0, 1]).unwrap();
        assert!((pair.stderr - 2.25 * 0.01 * 3f64.sqrt()).abs() < 1e-15);
        // singleton: 1.5γ0 − 2.25(γ0 + γ1 − γ01) → weights (−0.75, −2.25, 2.25)
        let single = est.iter().find(|e| e.subset == [0]).unwrap();
        let expected = 0.01 * (0.75f64.powi(2) + 2.0 * 2.25f64.powi(2)).sqrt();
        assert!((single.stderr - expected).abs() < 1e-15);
    }

    #[test]
    fn missing_subset_reported() {
        let mut table = GammaTable::new();
        table.insert(vec![0], GammaEntry { gamma: 0.0, stderr: 0.0 });
        table.insert(vec![1], GammaEntry { gamma: 0.0, stderr: 0.0 });
        assert!(matches!(invert_two_body(&table), Err(Error::MissingSubset(s)) if s == vec![0, 1]));
        let mut source = CurveSource::default();
        assert!(matches!(source.gamma(&[0, 1]), Err(Error::MissingSubset(_))));
    }

    #[test]
    fn negative_estimates_flagged() {
        let mut table = GammaTable::new();
        table.insert(vec![0], GammaEntry { gamma: 0.0, stderr: 0.0 });
        table.insert(vec![1], GammaEntry { gamma: 0.0, stderr: 0.0 });
        table.insert(vec![0, 1], GammaEntry { gamma: 0.001, stderr: 0.0 });
        let pair = invert_two_body(&table).unwrap().pop().unwrap();
        assert!(pair.clamped && pair.value < 0.0 && pair.clamped_value() == 0.0);
    }

    #[test]
    fn budget_values() {
        assert_eq!(chernoff_budget(0.01, 0.05).unwrap().n_realizations, 18445);
        assert!(chernoff_budget(0.5, 2.0 * (-0.5f64).exp()).is_err());
        assert!(chernoff_budget(0.0, 0.05).is_err());
        let a = chernoff_budget(0.02, 0.1).unwrap().n_realizations as f64;
        let b = chernoff_budget(0.01, 0.1).unwrap().n_realizations as f64;
        assert!((b / a - 4.0).abs() < 4.0 / a + 1e-12);
    }

    #[test]
    fn curve_file_names() {
        assert_eq!(CurveSource::file_name(&[0, 2]), "subset_0_2.csv");
    }
}
