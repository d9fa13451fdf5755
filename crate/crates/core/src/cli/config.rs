//! Sectioned key/value experiment files.
//!
//! ```text
//! [system]
//! n_qubits = 8
//!
//! [initial_state]
//! default = zero            # zero | one | mixed | bloch(theta,phi)
//! 2 = mixed
//!
//! [noise]                   # or [noise.label]; several sections allowed
//! class = coherent, incoherent_short
//! one_body = constant(chi)
//! one_body_axes = Z
//! two_body = first_neighbor # all | first_neighbor | pairs([0,1],[2,3])
//! two_body_coeff = gaussian(0,0.03)
//! term qubits=[0,2] axes="XZ" coeff=gaussian(0,0.05)
//!
//! [run]
//! steps = 200
//! realizations = 100
//! seed = 1
//! measured = all            # or [0,1]
//! circuit = motion_reversal # | stepwise_twirl
//! measurement = exact       # | bernoulli
//! backend = auto            # | dense | separable
//!
//! [sweep]
//! chi = [0.02, 0.04]
//! method = first_step       # | linear(0.9)
//!
//! [protocol]
//! max_body = 2
//! triples = all             # or [[0,1,2]]
//! curves = path/to/curves
//! delta = 0.01
//! epsilon = 0.05
//! ```
//!
//! `chi` may stand in for any coefficient parameter; it is substituted by
//! each sweep value (and must not appear outside sweeps).

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::linalg::{PauliAxis, ProductOperator};
use crate::noise::{
    expand_shorthand, CoefficientSpec, CorrelationClass, NoiseModelConfig, NoiseTerm, PairSelection,
    Shorthand,
};
use crate::protocol::TripleSelection;
use crate::sim::{Backend, CircuitForm, ExperimentConfig, GammaMethod, MeasurementMode, QubitInit};

/// A number or the sweep placeholder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Value(f64),
    Chi,
}

impl Param {
    fn resolve(self, chi: Option<f64>) -> Result<f64> {
        match (self, chi) {
            (Param::Value(v), _) => Ok(v),
            (Param::Chi, Some(c)) => Ok(c),
            (Param::Chi, None) => Err(Error::invalid("`chi` used outside a sweep")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoeffTemplate {
    Constant(Param),
    Gaussian(Param, Param),
}

impl CoeffTemplate {
    pub fn resolve(&self, chi: Option<f64>) -> Result<CoefficientSpec> {
        let spec = match *self {
            CoeffTemplate::Constant(v) => CoefficientSpec::Constant(v.resolve(chi)?),
            CoeffTemplate::Gaussian(m, s) => CoefficientSpec::Gaussian {
                mean: m.resolve(chi)?,
                std: s.resolve(chi)?,
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    fn uses_chi(&self) -> bool {
        match self {
            CoeffTemplate::Constant(v) => *v == Param::Chi,
            CoeffTemplate::Gaussian(m, s) => *m == Param::Chi || *s == Param::Chi,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermTemplate {
    pub op: ProductOperator,
    pub coeff: CoeffTemplate,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSection {
    pub label: String,
    pub line: usize,
    pub classes: Vec<CorrelationClass>,
    pub one_body: Option<CoeffTemplate>,
    pub one_body_axes: Vec<PauliAxis>,
    pub two_body: Option<PairSelection>,
    pub two_body_coeff: Option<CoeffTemplate>,
    pub terms: Vec<TermTemplate>,
}

impl NoiseSection {
    fn new(label: String, line: usize) -> Self {
        Self {
            label,
            line,
            classes: Vec::new(),
            one_body: None,
            one_body_axes: PauliAxis::NON_IDENTITY.to_vec(),
            two_body: None,
            two_body_coeff: None,
            terms: Vec::new(),
        }
    }

    pub fn uses_chi(&self) -> bool {
        self.one_body.is_some_and(|c| c.uses_chi())
            || self.two_body_coeff.is_some_and(|c| c.uses_chi())
            || self.terms.iter().any(|t| t.coeff.uses_chi())
    }

    /// One model per listed class; explicit terms override shorthand terms
    /// with the same operator.
    pub fn build(&self, n_qubits: usize, chi: Option<f64>) -> Result<Vec<(String, NoiseModelConfig)>> {
        let shorthand = Shorthand {
            one_body: self.one_body.map(|c| c.resolve(chi)).transpose()?,
            one_body_axes: self.one_body_axes.clone(),
            two_body: match (&self.two_body, &self.two_body_coeff) {
                (Some(sel), Some(c)) => Some((sel.clone(), c.resolve(chi)?)),
                (None, None) => None,
                _ => {
                    return Err(Error::invalid(
                        "two_body and two_body_coeff must be given together",
                    ))
                }
            },
        };
        let classes = if self.classes.is_empty() {
            vec![CorrelationClass::Coherent]
        } else {
            self.classes.clone()
        };
        classes
            .iter()
            .map(|&class| {
                let mut model = expand_shorthand(n_qubits, &shorthand, class)?;
                for t in &self.terms {
                    model.set_term(NoiseTerm::new(t.op.clone(), t.coeff.resolve(chi)?))?;
                }
                let name = if classes.len() == 1 {
                    self.label.clone()
                } else {
                    format!("{}_{}", self.label, class.name())
                };
                Ok((name, model))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub steps: usize,
    pub realizations: usize,
    pub seed: u64,
    pub measured: Option<Vec<usize>>,
    pub circuit_form: CircuitForm,
    pub measurement_mode: MeasurementMode,
    pub backend: Backend,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            steps: 1,
            realizations: 100,
            seed: 0,
            measured: None,
            circuit_form: CircuitForm::MotionReversal,
            measurement_mode: MeasurementMode::ExactTrace,
            backend: Backend::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub chi: Vec<f64>,
    pub method: GammaMethod,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSection {
    pub max_body: usize,
    pub triples: TripleSelection,
    pub curves: Option<PathBuf>,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self {
            max_body: 2,
            triples: TripleSelection::None,
            curves: None,
            delta: None,
            epsilon: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub path: PathBuf,
    pub n_qubits: usize,
    pub initial_state: Vec<QubitInit>,
    pub noise: Vec<NoiseSection>,
    pub run: RunSection,
    pub sweep: Option<SweepSection>,
    pub protocol: Option<ProtocolSection>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        Parser::new(path).parse(text)
    }

    /// Every noise model of the file with `chi` substituted.
    pub fn noise_models(&self, chi: Option<f64>) -> Result<Vec<(String, NoiseModelConfig)>> {
        let mut out = Vec::new();
        for section in &self.noise {
            out.extend(
                section
                    .build(self.n_qubits, chi)
                    .map_err(|e| self.at(section.line, e))?,
            );
        }
        Ok(out)
    }

    /// Experiment over `noise` with the file's initial state and run settings.
    pub fn experiment(&self, noise: NoiseModelConfig) -> ExperimentConfig {
        let measured = self
            .run
            .measured
            .clone()
            .unwrap_or_else(|| (0..self.n_qubits).collect());
        ExperimentConfig::new(noise)
            .with_initial_state(self.initial_state.clone())
            .with_measured(&measured)
            .with_steps(self.run.steps)
            .with_realizations(self.run.realizations)
            .with_seed(self.run.seed)
            .with_circuit_form(self.run.circuit_form)
            .with_measurement_mode(self.run.measurement_mode)
            .with_backend(self.run.backend)
    }

    fn at(&self, line: usize, e: Error) -> Error {
        config_error(&self.path, line, e)
    }
}

fn config_error(path: &Path, line: usize, e: Error) -> Error {
    match e {
        Error::Config { .. } => e,
        other => Error::Config {
            path: path.to_path_buf(),
            line,
            message: other.to_string(),
        },
    }
}

struct Parser {
    path: PathBuf,
    n_qubits: Option<usize>,
    initial_default: QubitInit,
    initial_overrides: Vec<(usize, QubitInit, usize)>,
    noise: Vec<NoiseSection>,
    run: RunSection,
    measured_line: usize,
    sweep: Option<SweepSection>,
    protocol: Option<ProtocolSection>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    System,
    InitialState,
    Noise,
    Run,
    Sweep,
    Protocol,
}

impl Parser {
    fn new(path: &Path) -> Self {
        Self {
            path: path.to_path_buf(),
            n_qubits: None,
            initial_default: QubitInit::Zero,
            initial_overrides: Vec::new(),
            noise: Vec::new(),
            run: RunSection::default(),
            measured_line: 0,
            sweep: None,
            protocol: None,
        }
    }

    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Config {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    fn parse(mut self, text: &str) -> Result<RunConfig> {
        let mut section = Section::None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = self.open_section(header.trim(), line_no)?;
                continue;
            }
            self.entry(section, line, line_no)
                .map_err(|e| config_error(&self.path, line_no, e))?;
        }
        self.finish()
    }

    fn open_section(&mut self, header: &str, line: usize) -> Result<Section> {
        Ok(match header {
            "system" => Section::System,
            "initial_state" => Section::InitialState,
            "run" => Section::Run,
            "sweep" => {
                self.sweep.get_or_insert(SweepSection {
                    chi: Vec::new(),
                    method: GammaMethod::FirstStep,
                });
                Section::Sweep
            }
            "protocol" => {
                self.protocol.get_or_insert_with(ProtocolSection::default);
                Section::Protocol
            }
            h if h == "noise" || h.starts_with("noise.") => {
                let label = h.strip_prefix("noise.").unwrap_or("noise").trim();
                if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                    return Err(self.err(line, format!("invalid noise label '{label}'")));
                }
                if self.noise.iter().any(|s| s.label == label) {
                    return Err(self.err(line, format!("noise section '{label}' defined twice")));
                }
                self.noise.push(NoiseSection::new(label.to_string(), line));
                Section::Noise
            }
            other => return Err(self.err(line, format!("unknown section [{other}]"))),
        })
    }

    fn entry(&mut self, section: Section, line: &str, line_no: usize) -> Result<()> {
        if section == Section::Noise {
            if let Some(rest) = line.strip_prefix("term") {
                if rest.starts_with(char::is_whitespace) {
                    let term = self.parse_term(rest, line_no)?;
                    let noise = self.noise.last_mut().expect("noise section open");
                    if noise.terms.iter().any(|t| t.op == term.op) {
                        return Err(Error::DuplicateTerm(term.op.label()));
                    }
                    noise.terms.push(term);
                    return Ok(());
                }
            }
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| Error::invalid(format!("expected `key = value`, found `{line}`")))?;
        match section {
            Section::None => Err(Error::invalid("entry outside any section")),
            Section::System => match key {
                "n_qubits" => {
                    let n: usize = parse_num(value)?;
                    if n == 0 || n > crate::linalg::MAX_QUBITS {
                        return Err(Error::QubitCap {
                            requested: n,
                            cap: crate::linalg::MAX_QUBITS,
                        });
                    }
                    self.n_qubits = Some(n);
                    Ok(())
                }
                _ => Err(unknown_key(key)),
            },
            Section::InitialState => {
                let state = parse_init(value)?;
                if key == "default" {
                    self.initial_default = state;
                } else {
                    let q: usize = parse_num(key)
                        .map_err(|_| Error::invalid(format!("expected `default` or a qubit index, found `{key}`")))?;
                    self.initial_overrides.push((q, state, line_no));
                }
                Ok(())
            }
            Section::Noise => {
                let noise = self.noise.last_mut().expect("noise section open");
                match key {
                    "class" => {
                        noise.classes = split_list(value)
                            .iter()
                            .map(|c| parse_class(c))
                            .collect::<Result<_>>()?;
                        Ok(())
                    }
                    "one_body" => {
                        noise.one_body = Some(parse_coeff(value)?);
                        Ok(())
                    }
                    "one_body_axes" => {
                        let axes = value
                            .chars()
                            .filter(|c| !c.is_whitespace() && *c != ',')
                            .map(PauliAxis::try_from)
                            .collect::<Result<Vec<_>>>()?;
                        if axes.is_empty() || axes.iter().any(|a| a.is_identity()) {
                            return Err(Error::invalid("one_body_axes takes letters from X, Y, Z"));
                        }
                        noise.one_body_axes = axes;
                        Ok(())
                    }
                    "two_body" => {
                        noise.two_body = Some(parse_pairs(value)?);
                        Ok(())
                    }
                    "two_body_coeff" => {
                        noise.two_body_coeff = Some(parse_coeff(value)?);
                        Ok(())
                    }
                    _ => Err(unknown_key(key)),
                }
            }
            Section::Run => {
                let run = &mut self.run;
                match key {
                    "steps" => run.steps = parse_num(value)?,
                    "realizations" => run.realizations = parse_num(value)?,
                    "seed" => run.seed = parse_num(value)?,
                    "measured" => {
                        run.measured = if value == "all" {
                            None
                        } else {
                            Some(parse_usize_list(value)?)
                        };
                        self.measured_line = line_no;
                    }
                    "circuit" => {
                        run.circuit_form = match value {
                            "motion_reversal" => CircuitForm::MotionReversal,
                            "stepwise_twirl" => CircuitForm::StepwiseTwirl,
                            _ => return Err(bad_value(key, value)),
                        }
                    }
                    "measurement" => {
                        run.measurement_mode = match value {
                            "exact" => MeasurementMode::ExactTrace,
                            "bernoulli" => MeasurementMode::Bernoulli,
                            _ => return Err(bad_value(key, value)),
                        }
                    }
                    "backend" => {
                        run.backend = match value {
                            "auto" => Backend::Auto,
                            "dense" => Backend::Dense,
                            "separable" => Backend::Separable,
                            _ => return Err(bad_value(key, value)),
                        }
                    }
                    _ => return Err(unknown_key(key)),
                }
                Ok(())
            }
            Section::Sweep => {
                let sweep = self.sweep.as_mut().expect("sweep section open");
                match key {
                    "chi" => {
                        sweep.chi = parse_f64_list(value)?;
                        if sweep.chi.is_empty() {
                            return Err(Error::invalid("strength grid is empty"));
                        }
                    }
                    "method" => {
                        sweep.method = if value == "first_step" {
                            GammaMethod::FirstStep
                        } else if let Some(args) = call_args(value, "linear") {
                            GammaMethod::LinearFit {
                                f_lim: parse_num(args.first().copied().unwrap_or(""))?,
                            }
                        } else {
                            return Err(bad_value(key, value));
                        }
                    }
                    _ => return Err(unknown_key(key)),
                }
                Ok(())
            }
            Section::Protocol => {
                let p = self.protocol.as_mut().expect("protocol section open");
                match key {
                    "max_body" => p.max_body = parse_num(value)?,
                    "triples" => {
                        p.triples = match value {
                            "none" => TripleSelection::None,
                            "all" => TripleSelection::All,
                            _ => TripleSelection::Chosen(
                                parse_nested_list(value)?
                                    .into_iter()
                                    .map(|t| {
                                        <[usize; 3]>::try_from(t.as_slice())
                                            .map_err(|_| Error::invalid(format!("triple {t:?} must have three qubits")))
                                    })
                                    .collect::<Result<_>>()?,
                            ),
                        }
                    }
                    "curves" => p.curves = Some(PathBuf::from(unquote(value))),
                    "delta" => p.delta = Some(parse_num(value)?),
                    "epsilon" => p.epsilon = Some(parse_num(value)?),
                    _ => return Err(unknown_key(key)),
                }
                Ok(())
            }
        }
    }

    fn parse_term(&self, rest: &str, line: usize) -> Result<TermTemplate> {
        let n = self
            .n_qubits
            .ok_or_else(|| Error::invalid("[system] n_qubits must precede noise terms"))?;
        let mut qubits = None;
        let mut axes = None;
        let mut coeff = None;
        for token in tokenize(rest)? {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value in term, found `{token}`")))?;
            match k {
                "qubits" => qubits = Some(parse_usize_list(v)?),
                "axes" => axes = Some(unquote(v).to_string()),
                "coeff" => coeff = Some(parse_coeff(v)?),
                _ => return Err(Error::invalid(format!("unknown term field `{k}`"))),
            }
        }
        let qubits = qubits.ok_or_else(|| Error::invalid("term is missing qubits=[...]"))?;
        let axes = axes.ok_or_else(|| Error::invalid("term is missing axes=\"...\""))?;
        let coeff = coeff.ok_or_else(|| Error::invalid("term is missing coeff=..."))?;
        Ok(TermTemplate {
            op: ProductOperator::from_sparse(n, &qubits, &axes)?,
            coeff,
            line,
        })
    }

    fn finish(self) -> Result<RunConfig> {
        let n = self
            .n_qubits
            .ok_or_else(|| self.err(0, "[system] n_qubits is required"))?;
        let mut initial_state = vec![self.initial_default; n];
        for &(q, state, line) in &self.initial_overrides {
            if q >= n {
                return Err(self.err(line, format!("qubit {q} out of range for {n} qubits")));
            }
            initial_state[q] = state;
        }
        if let Some(m) = &self.run.measured {
            if m.is_empty() {
                return Err(self.err(self.measured_line, "measured set must be nonempty"));
            }
            if let Some(&q) = m.iter().find(|&&q| q >= n) {
                return Err(self.err(
                    self.measured_line,
                    format!("measured qubit {q} out of range for {n} qubits"),
                ));
            }
        }
        let cfg = RunConfig {
            path: self.path.clone(),
            n_qubits: n,
            initial_state,
            noise: self.noise,
            run: self.run,
            sweep: self.sweep,
            protocol: self.protocol,
        };
        // validate models now so errors point at the section
        let probe = cfg.sweep.as_ref().and_then(|s| s.chi.first().copied());
        for section in &cfg.noise {
            if section.uses_chi() && probe.is_none() {
                return Err(cfg.at(section.line, Error::invalid("`chi` used outside a sweep")));
            }
            section
                .build(n, probe.or(Some(0.0)))
                .map_err(|e| cfg.at(section.line, e))?;
        }
        Ok(cfg)
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_quote = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quote = !in_quote,
            '#' if !in_quote => return &line[..i],
            _ => {}
        }
    }
    line
}

fn unknown_key(key: &str) -> Error {
    Error::invalid(format!("unknown key `{key}`"))
}

fn bad_value(key: &str, value: &str) -> Error {
    Error::invalid(format!("invalid value `{value}` for `{key}`"))
}

fn unquote(s: &str) -> &str {
    s.trim().trim_matches('"')
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::invalid(format!("cannot parse number `{}`", s.trim())))
}

fn parse_param(s: &str) -> Result<Param> {
    let s = s.trim();
    if s == "chi" {
        Ok(Param::Chi)
    } else {
        parse_num(s).map(Param::Value)
    }
}

/// Arguments of `name(a, b, ...)`, or `None` if `s` is not such a call.
fn call_args<'a>(s: &'a str, name: &str) -> Option<Vec<&'a str>> {
    let inner = s.trim().strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(str::trim).collect())
}

fn parse_coeff(s: &str) -> Result<CoeffTemplate> {
    if let Some(args) = call_args(s, "constant") {
        if let [v] = args[..] {
            return Ok(CoeffTemplate::Constant(parse_param(v)?));
        }
    } else if let Some(args) = call_args(s, "gaussian") {
        if let [m, sd] = args[..] {
            let template = CoeffTemplate::Gaussian(parse_param(m)?, parse_param(sd)?);
            if let CoeffTemplate::Gaussian(_, Param::Value(sd)) = template {
                if sd < 0.0 {
                    return Err(Error::invalid(format!("negative standard deviation {sd}")));
                }
            }
            return Ok(template);
        }
    }
    Err(Error::invalid(format!(
        "expected constant(v) or gaussian(mean,std), found `{s}`"
    )))
}

fn parse_class(s: &str) -> Result<CorrelationClass> {
    match s.trim().to_ascii_lowercase().as_str() {
        "coherent" | "c" => Ok(CorrelationClass::Coherent),
        "incoherent_long" | "il" => Ok(CorrelationClass::IncoherentLong),
        "incoherent_short" | "is" => Ok(CorrelationClass::IncoherentShort),
        other => Err(Error::invalid(format!("unknown correlation class `{other}`"))),
    }
}

fn parse_init(s: &str) -> Result<QubitInit> {
    match s.trim() {
        "zero" | "0" => Ok(QubitInit::Zero),
        "one" | "1" => Ok(QubitInit::One),
        "mixed" => Ok(QubitInit::MaximallyMixed),
        other => match call_args(other, "bloch").as_deref() {
            Some([theta, phi]) => Ok(QubitInit::PureBloch {
                theta: parse_num(theta)?,
                phi: parse_num(phi)?,
            }),
            _ => Err(Error::invalid(format!("unknown initial state `{other}`"))),
        },
    }
}

fn parse_pairs(s: &str) -> Result<PairSelection> {
    match s.trim() {
        "all" => Ok(PairSelection::All),
        "first_neighbor" => Ok(PairSelection::FirstNeighbor),
        other => {
            let inner = other
                .strip_prefix("pairs(")
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::invalid(format!("unknown pair selection `{other}`")))?;
            let pairs = parse_nested_list(&format!("[{inner}]"))?
                .into_iter()
                .map(|p| match p[..] {
                    [a, b] => Ok((a, b)),
                    _ => Err(Error::invalid(format!("pair {p:?} must have two qubits"))),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(PairSelection::Pairs(pairs))
        }
    }
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect()
}

fn bracket_inner(s: &str) -> Result<&str> {
    s.trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::invalid(format!("expected a bracketed list, found `{s}`")))
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    split_list(bracket_inner(s)?).into_iter().map(parse_num).collect()
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    split_list(bracket_inner(s)?).into_iter().map(parse_num).collect()
}

fn parse_nested_list(s: &str) -> Result<Vec<Vec<usize>>> {
    let inner = bracket_inner(s)?;
    let mut out = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let end = rest
            .find(']')
            .ok_or_else(|| Error::invalid(format!("unbalanced list `{s}`")))?;
        out.push(parse_usize_list(&rest[..=end])?);
        rest = rest[end + 1..].trim_start().trim_start_matches(',').trim_start();
    }
    Ok(out)
}

/// Splits on whitespace outside brackets, parentheses and quotes.
fn tokenize(s: &str) -> Result<Vec<String>> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut depth = 0i32;
    let mut in_quote = false;
    for c in s.chars() {
        match c {
            '"' => in_quote = !in_quote,
            '[' | '(' if !in_quote => depth += 1,
            ']' | ')' if !in_quote => depth -= 1,
            _ => {}
        }
        if c.is_whitespace() && depth == 0 && !in_quote {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        } else {
            current.push(c);
        }
    }
    if depth != 0 || in_quote {
        return Err(Error::invalid("unbalanced brackets or quotes in term"));
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    Ok(tokens)
}
