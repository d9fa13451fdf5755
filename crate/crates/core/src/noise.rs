//! Noise generator `G = Σ_l χ_l O_l` as a list of Pauli-product terms with
//! coefficient distributions, and synthesis of the per-step error unitary
//! `E = exp(-i G)`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{unitary_from_hermitian_generator, ComplexMatrix, Mat2, PauliAxis, ProductOperator};

/// Distribution of one coefficient `χ_l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CoefficientSpec {
    Constant(f64),
    /// Unbounded normal distribution.
    Gaussian { mean: f64, std: f64 },
}

impl CoefficientSpec {
    pub fn gaussian(mean: f64, std: f64) -> Result<Self> {
        let spec = CoefficientSpec::Gaussian { mean, std };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CoefficientSpec::Constant(v) if !v.is_finite() => {
                Err(Error::invalid(format!("coefficient {v} is not finite")))
            }
            CoefficientSpec::Gaussian { mean, std } if !(mean.is_finite() && std.is_finite()) => {
                Err(Error::invalid("gaussian parameters must be finite"))
            }
            CoefficientSpec::Gaussian { std, .. } if std < 0.0 => Err(Error::invalid(format!(
                "gaussian standard deviation {std} is negative"
            ))),
            _ => Ok(()),
        }
    }

    /// `⟨χ²⟩` under the distribution.
    pub fn second_moment(&self) -> f64 {
        match *self {
            CoefficientSpec::Constant(v) => v * v,
            CoefficientSpec::Gaussian { mean, std } => mean * mean + std * std,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CoefficientSpec::Constant(_))
    }

    /// Draws one value. Constant specs consume no randomness.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            CoefficientSpec::Constant(v) => v,
            CoefficientSpec::Gaussian { mean, std } => Normal::new(mean, std)
                .expect("validated gaussian parameters")
                .sample(rng),
        }
    }
}

impl fmt::Display for CoefficientSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientSpec::Constant(v) => write!(f, "constant({v})"),
            CoefficientSpec::Gaussian { mean, std } => write!(f, "gaussian({mean},{std})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseTerm {
    pub op: ProductOperator,
    pub coeff: CoefficientSpec,
}

impl NoiseTerm {
    pub fn new(op: ProductOperator, coeff: CoefficientSpec) -> Self {
        Self { op, coeff }
    }
}

/// How the coefficients vary in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CorrelationClass {
    /// Drawn once per experiment.
    Coherent,
    /// Redrawn once per realization.
    IncoherentLong,
    /// Redrawn at every step.
    IncoherentShort,
}

impl CorrelationClass {
    pub const ALL: [CorrelationClass; 3] = [
        CorrelationClass::Coherent,
        CorrelationClass::IncoherentLong,
        CorrelationClass::IncoherentShort,
    ];

    pub fn draw_scope(self) -> DrawScope {
        match self {
            CorrelationClass::Coherent => DrawScope::Experiment,
            CorrelationClass::IncoherentLong => DrawScope::Realization,
            CorrelationClass::IncoherentShort => DrawScope::Step,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CorrelationClass::Coherent => "coherent",
            CorrelationClass::IncoherentLong => "incoherent_long",
            CorrelationClass::IncoherentShort => "incoherent_short",
        }
    }
}

impl fmt::Display for CorrelationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrawScope {
    Experiment,
    Realization,
    Step,
}

impl DrawScope {
    fn name(self) -> &'static str {
        match self {
            DrawScope::Experiment => "experiment",
            DrawScope::Realization => "realization",
            DrawScope::Step => "step",
        }
    }
}

/// Which qubit pairs carry two-body terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairSelection {
    All,
    /// `(j, j+1)` on an open chain.
    FirstNeighbor,
    Pairs(Vec<(usize, usize)>),
}

impl PairSelection {
    pub fn pairs(&self, n_qubits: usize) -> Result<Vec<(usize, usize)>> {
        let pairs: Vec<(usize, usize)> = match self {
            PairSelection::All => (0..n_qubits)
                .flat_map(|j| (j + 1..n_qubits).map(move |k| (j, k)))
                .collect(),
            PairSelection::FirstNeighbor => (1..n_qubits).map(|k| (k - 1, k)).collect(),
            PairSelection::Pairs(list) => {
                let mut out = Vec::with_capacity(list.len());
                for &(a, b) in list {
                    let (j, k) = (a.min(b), a.max(b));
                    if j == k || k >= n_qubits {
                        return Err(Error::invalid(format!(
                            "invalid qubit pair ({a}, {b}) for {n_qubits} qubits"
                        )));
                    }
                    out.push((j, k));
                }
                out
            }
        };
        if pairs.is_empty() {
            return Err(Error::invalid(format!(
                "no qubit pairs exist for two-body terms on {n_qubits} qubit(s)"
            )));
        }
        Ok(pairs)
    }
}

/// Uniform-strength model description: one spec for every one-body term and
/// one for every two-body term on the selected pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Shorthand {
    pub one_body: Option<CoefficientSpec>,
    /// Axes that receive a one-body term on every qubit; defaults to X, Y, Z.
    pub one_body_axes: Vec<PauliAxis>,
    pub two_body: Option<(PairSelection, CoefficientSpec)>,
}

impl Default for Shorthand {
    fn default() -> Self {
        Self {
            one_body: None,
            one_body_axes: PauliAxis::NON_IDENTITY.to_vec(),
            two_body: None,
        }
    }
}

impl Shorthand {
    pub fn one_body(spec: CoefficientSpec) -> Self {
        Self {
            one_body: Some(spec),
            ..Self::default()
        }
    }

    pub fn with_axes(mut self, axes: &[PauliAxis]) -> Self {
        self.one_body_axes = axes.to_vec();
        self
    }

    pub fn with_two_body(mut self, pairs: PairSelection, spec: CoefficientSpec) -> Self {
        self.two_body = Some((pairs, spec));
        self
    }
}

/// Full noise-generator description.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModelConfig {
    n_qubits: usize,
    terms: Vec<NoiseTerm>,
    correlation: CorrelationClass,
}

impl NoiseModelConfig {
    pub fn new(
        n_qubits: usize,
        terms: Vec<NoiseTerm>,
        correlation: CorrelationClass,
    ) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::invalid("noise model needs at least one qubit"));
        }
        let mut seen = HashSet::with_capacity(terms.len());
        for term in &terms {
            if term.op.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: n_qubits,
                    found: term.op.n_qubits(),
                });
            }
            term.coeff.validate()?;
            if !seen.insert(term.op.clone()) {
                return Err(Error::DuplicateTerm(term.op.label()));
            }
        }
        Ok(Self {
            n_qubits,
            terms,
            correlation,
        })
    }

    /// Noise-free model on `n_qubits`.
    pub fn noiseless(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, Vec::new(), CorrelationClass::Coherent)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[NoiseTerm] {
        &self.terms
    }

    pub fn correlation(&self) -> CorrelationClass {
        self.correlation
    }

    pub fn with_correlation(mut self, correlation: CorrelationClass) -> Self {
        self.correlation = correlation;
        self
    }

    /// Replaces the coefficient of an existing term or appends a new one.
    pub fn set_term(&mut self, term: NoiseTerm) -> Result<()> {
        if term.op.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: term.op.n_qubits(),
            });
        }
        term.coeff.validate()?;
        match self.terms.iter_mut().find(|t| t.op == term.op) {
            Some(existing) => existing.coeff = term.coeff,
            None => self.terms.push(term),
        }
        Ok(())
    }

    /// True when every term has Hamming weight 1, so `E` factorises over qubits.
    pub fn is_one_body(&self) -> bool {
        self.terms.iter().all(|t| t.op.hamming_weight() == 1)
    }

    pub fn max_weight(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.op.hamming_weight())
            .max()
            .unwrap_or(0)
    }

    /// Collective strengths `(χ*_S)² = Σ_{l: supp O_l = S} ⟨χ_l²⟩` keyed by
    /// the qubit subset `S`.
    pub fn collective_strengths(&self) -> BTreeMap<Vec<usize>, f64> {
        let mut out = BTreeMap::new();
        for t in &self.terms {
            *out.entry(t.op.support()).or_insert(0.0) += t.coeff.second_moment();
        }
        out
    }

    /// Same model with qubit `q` relabelled `perm[q]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: perm.len(),
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut axes = vec![PauliAxis::I; self.n_qubits];
                for (q, &a) in t.op.axes().iter().enumerate() {
                    axes[perm[q]] = a;
                }
                Ok(NoiseTerm::new(ProductOperator::new(axes)?, t.coeff))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.n_qubits, terms, self.correlation)
    }
}

/// Builds a uniform-strength model: `one_body` on each listed axis of every
/// qubit (3n terms by default) and `two_body` on all nine axis pairs of each
/// selected qubit pair.
pub fn expand_shorthand(
    n_qubits: usize,
    shorthand: &Shorthand,
    correlation: CorrelationClass,
) -> Result<NoiseModelConfig> {
    if n_qubits == 0 {
        return Err(Error::invalid("noise model needs at least one qubit"));
    }
    let mut terms = Vec::new();
    if let Some(spec) = shorthand.one_body {
        for q in 0..n_qubits {
            for &axis in &shorthand.one_body_axes {
                if axis.is_identity() {
                    return Err(Error::invalid("one-body axis list contains I"));
                }
                let mut axes = vec![PauliAxis::I; n_qubits];
                axes[q] = axis;
                terms.push(NoiseTerm::new(ProductOperator::new(axes)?, spec));
            }
        }
    }
    if let Some((selection, spec)) = &shorthand.two_body {
        for (j, k) in selection.pairs(n_qubits)? {
            for p in PauliAxis::NON_IDENTITY {
                for q in PauliAxis::NON_IDENTITY {
                    let mut axes = vec![PauliAxis::I; n_qubits];
                    axes[j] = p;
                    axes[k] = q;
                    terms.push(NoiseTerm::new(ProductOperator::new(axes)?, *spec));
                }
            }
        }
    }
    NoiseModelConfig::new(n_qubits, terms, correlation)
}

/// Drawn coefficient values, one per term in config order.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization {
    pub values: Vec<f64>,
}

impl NoiseRealization {
    pub fn zeros(n_terms: usize) -> Self {
        Self {
            values: vec![0.0; n_terms],
        }
    }
}

/// Draws every coefficient independently. The scope must match the model's
/// correlation class.
pub fn draw_coefficients<R: Rng + ?Sized>(
    config: &NoiseModelConfig,
    scope: DrawScope,
    rng: &mut R,
) -> Result<NoiseRealization> {
    if scope != config.correlation.draw_scope() {
        return Err(Error::ScopeMismatch {
            requested: scope.name(),
            class: config.correlation.name(),
        });
    }
    Ok(draw_unchecked(config, rng))
}

pub(crate) fn draw_unchecked<R: Rng + ?Sized>(config: &NoiseModelConfig, rng: &mut R) -> NoiseRealization {
    NoiseRealization {
        values: config.terms.iter().map(|t| t.coeff.draw(rng)).collect(),
    }
}

fn check_values(config: &NoiseModelConfig, values: &NoiseRealization) -> Result<()> {
    if values.values.len() != config.terms.len() {
        return Err(Error::DimensionMismatch {
            expected: config.terms.len(),
            found: values.values.len(),
        });
    }
    if let Some(v) = values.values.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("coefficient {v} is not finite")));
    }
    Ok(())
}

/// Hermitian generator `Σ_l χ_l O_l` as a dense matrix.
pub fn generator_matrix(config: &NoiseModelConfig, values: &NoiseRealization) -> Result<ComplexMatrix> {
    check_values(config, values)?;
    let mut g = ComplexMatrix::zeros(1 << config.n_qubits);
    for (term, &chi) in config.terms.iter().zip(&values.values) {
        if chi != 0.0 {
            term.op.accumulate_into(&mut g, chi);
        }
    }
    Ok(g)
}

/// `E = exp(-i Σ_l χ_l O_l)`.
pub fn build_error_unitary(config: &NoiseModelConfig, values: &NoiseRealization) -> Result<ComplexMatrix> {
    let g = generator_matrix(config, values)?;
    if values.values.iter().all(|&v| v == 0.0) {
        return Ok(ComplexMatrix::identity(g.dim()));
    }
    unitary_from_hermitian_generator(&g)
}

/// Per-qubit factors `E^{(j)} = exp(-i Σ_p χ^p_j σ_p)` of a one-body model.
/// Returns `None` if the model has multi-body terms.
pub fn per_qubit_unitaries(config: &NoiseModelConfig, values: &NoiseRealization) -> Result<Option<Vec<Mat2>>> {
    check_values(config, values)?;
    if !config.is_one_body() {
        return Ok(None);
    }
    Ok(Some(per_qubit_unchecked(config, &values.values)))
}

pub(crate) fn per_qubit_unchecked(config: &NoiseModelConfig, values: &[f64]) -> Vec<Mat2> {
    let mut vectors = vec![[0.0f64; 3]; config.n_qubits];
    for (term, &chi) in config.terms.iter().zip(values) {
        let q = term.op.support()[0];
        let slot = match term.op.axis(q) {
            PauliAxis::X => 0,
            PauliAxis::Y => 1,
            PauliAxis::Z => 2,
            PauliAxis::I => unreachable!("support excludes identity factors"),
        };
        vectors[q][slot] += chi;
    }
    vectors.into_iter().map(Mat2::exp_pauli).collect()
}

/// `G = Σ_l χ_l O_l` stored as signed permutations, `G[i, i ^ f] = d_f[i]`,
/// for applying `exp(-i G)` to vectors without forming the matrix.
#[derive(Debug, Clone)]
pub struct SparseGenerator {
    dim: usize,
    blocks: Vec<(usize, Vec<Complex64>)>,
    /// `Σ_l |χ_l|`, an upper bound on `‖G‖`.
    norm_bound: f64,
}

const SPARSE_MAX_TERMS: usize = 60;

impl SparseGenerator {
    pub fn new(config: &NoiseModelConfig, values: &NoiseRealization) -> Result<Self> {
        check_values(config, values)?;
        let dim = 1usize << config.n_qubits;
        let mut blocks: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
        let mut norm_bound = 0.0;
        for (term, &chi) in config.terms.iter().zip(&values.values) {
            if chi == 0.0 {
                continue;
            }
            norm_bound += chi.abs();
            let d = blocks
                .entry(term.op.flip_mask())
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); dim]);
            for (row, slot) in d.iter_mut().enumerate() {
                *slot += term.op.row_phase(row) * chi;
            }
        }
        Ok(Self {
            dim,
            blocks: blocks.into_iter().collect(),
            norm_bound,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `out = G v`.
    fn multiply(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        for (flip, d) in &self.blocks {
            for (i, o) in out.iter_mut().enumerate() {
                *o += d[i] * v[i ^ flip];
            }
        }
    }

    /// `ψ ← exp(-i G) ψ` by a Taylor series over substeps of norm at most one.
    pub fn apply_exp(&self, psi: &mut [Complex64]) -> Result<()> {
        if psi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: psi.len(),
            });
        }
        if self.blocks.is_empty() {
            return Ok(());
        }
        let norm_in: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let substeps = self.norm_bound.ceil().max(1.0) as usize;
        let h = 1.0 / substeps as f64;
        let mut term = vec![Complex64::new(0.0, 0.0); self.dim];
        let mut next = term.clone();
        for _ in 0..substeps {
            term.copy_from_slice(psi);
            let mut converged = false;
            for k in 1..=SPARSE_MAX_TERMS {
                self.multiply(&term, &mut next);
                let factor = Complex64::new(0.0, -h / k as f64);
                let mut size = 0.0f64;
                for ((t, n), p) in term.iter_mut().zip(&next).zip(psi.iter_mut()) {
                    *t = n * factor;
                    *p += *t;
                    size = size.max(t.norm());
                }
                if size <= f64::EPSILON * 1e-2 * norm_in {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NoConvergence { sweeps: SPARSE_MAX_TERMS });
            }
        }
        let norm_out: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let deviation = (norm_out - norm_in).abs();
        if deviation > 1e-10 * norm_in.max(1.0) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(())
    }

    /// `E ρ E†` for Hermitian `ρ`.
    pub fn conjugate_density(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let e_rho = self.apply_to_columns(rho)?;
        self.apply_to_columns(&e_rho.adjoint())
    }

    fn apply_to_columns(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut t = m.transpose();
        let dim = t.dim();
        for column in t.as_mut_slice().chunks_mut(dim) {
            self.apply_exp(column)?;
        }
        Ok(t.transpose())
    }
}
