//! Batch front end behind the `fdecay` binary.

pub mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analytics::{closed_form_curve, fit_quadratic_law, gamma_for_config, QuadraticLawFit};
use crate::error::{Error, Result};
use crate::protocol::{chernoff_budget, plan_protocol, run_protocol, CurveSource, GammaSource, SimulationSource};
use crate::sim::{estimate_gamma, run_experiment};
use config::RunConfig;

pub use config::{CoeffTemplate, NoiseSection, Param, ProtocolSection, RunSection, SweepSection};

#[derive(Debug, Parser)]
#[command(name = "fdecay", version, about = "Fidelity-decay noise characterization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate ⟨f(t)⟩ for every noise model in the file.
    Decay(RunArgs),
    /// Estimate γ over the [sweep] strength grid and fit the quadratic law.
    GammaSweep(RunArgs),
    /// Run the subset-rate protocol and invert it into collective coefficients.
    Protocol(RunArgs),
    /// Print the realization count for precision δ and error probability ε.
    Budget {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        epsilon: f64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Experiment file.
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, env = "FDECAY_THREADS", default_value_t = 0)]
    pub threads: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

/// Record written next to the outputs of each command.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: PathBuf,
    pub seed: u64,
    pub realizations: usize,
    pub steps: usize,
    pub threads: usize,
    pub tool_version: String,
    pub started: DateTime<Utc>,
    pub finished: DateTime<Utc>,
    pub outputs: Vec<PathBuf>,
}

/// Parses the process arguments, runs the command and returns the exit code:
/// 0 on success, 1 for invalid input, 2 for numerical failures.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Budget { delta, epsilon } => {
            let b = chernoff_budget(delta, epsilon)?;
            println!("{}", b.n_realizations);
            Ok(())
        }
        Command::Decay(args) => with_threads(&args, || cmd_decay(&args)),
        Command::GammaSweep(args) => with_threads(&args, || cmd_gamma_sweep(&args)),
        Command::Protocol(args) => with_threads(&args, || cmd_protocol(&args)),
    }
}

fn with_threads<T: Send>(args: &RunArgs, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(f)
}

fn load(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    if let Some(r) = args.realizations {
        cfg.run.realizations = r;
    }
    if let Some(s) = args.steps {
        cfg.run.steps = s;
    }
    fs::create_dir_all(&args.out)?;
    Ok(cfg)
}

fn write_manifest(
    name: &str,
    args: &RunArgs,
    cfg: &RunConfig,
    started: DateTime<Utc>,
    mut outputs: Vec<PathBuf>,
) -> Result<PathBuf> {
    let path = args.out.join(format!("{name}_manifest.json"));
    outputs.sort();
    let manifest = RunManifest {
        command: name.to_string(),
        config: args.config.clone(),
        seed: cfg.run.seed,
        realizations: cfg.run.realizations,
        steps: cfg.run.steps,
        threads: rayon::current_num_threads(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started,
        finished: Utc::now(),
        outputs,
    };
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}

fn require_noise(cfg: &RunConfig) -> Result<()> {
    if cfg.noise.is_empty() {
        return Err(Error::Config {
            path: cfg.path.clone(),
            line: 0,
            message: "no [noise] section".into(),
        });
    }
    Ok(())
}

/// Writes `decay_<label>.csv` per model, plus `decay_<label>_closed_form.csv`
/// when the model has a closed form.
pub fn cmd_decay(args: &RunArgs) -> Result<()> {
    let started = Utc::now();
    let cfg = load(args)?;
    require_noise(&cfg)?;
    let mut outputs = Vec::new();
    for (label, noise) in cfg.noise_models(None)? {
        let exp = cfg.experiment(noise);
        let curve = run_experiment(&exp)?;
        let path = args.out.join(format!("decay_{label}.csv"));
        curve.save(&path)?;
        outputs.push(path);
        match closed_form_curve(&exp) {
            Ok(values) => {
                let path = args.out.join(format!("decay_{label}_closed_form.csv"));
                write_pairs(&path, ("t", "f_closed_form"), values.iter().enumerate().map(|(t, v)| (t as f64, *v)))?;
                outputs.push(path);
            }
            Err(Error::OutOfModel(_)) => {}
            Err(e) => return Err(e),
        }
    }
    write_manifest("decay", args, &cfg, started, outputs)?;
    Ok(())
}

fn write_pairs(path: &Path, header: (&str, &str), rows: impl Iterator<Item = (f64, f64)>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([header.0, header.1])?;
    for (a, b) in rows {
        if header.0 == "t" {
            w.write_record([format!("{a}"), format!("{b:.16e}")])?;
        } else {
            w.write_record([format!("{a:.16e}"), format!("{b:.16e}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct SweepReport<'a> {
    label: &'a str,
    fit: &'a QuadraticLawFit,
}

/// Writes `gamma_sweep_<label>.csv` with `chi,gamma,stderr,gamma_second_order`
/// and `gamma_sweep_<label>_fit.json`.
pub fn cmd_gamma_sweep(args: &RunArgs) -> Result<()> {
    let started = Utc::now();
    let cfg = load(args)?;
    require_noise(&cfg)?;
    let sweep = cfg.sweep.clone().ok_or_else(|| Error::Config {
        path: cfg.path.clone(),
        line: 0,
        message: "gamma-sweep needs a [sweep] section".into(),
    })?;
    if sweep.chi.is_empty() {
        return Err(Error::invalid("strength grid is empty"));
    }
    let labels: Vec<String> = cfg.noise_models(Some(sweep.chi[0]))?.into_iter().map(|(l, _)| l).collect();
    let mut outputs = Vec::new();
    for (index, label) in labels.iter().enumerate() {
        let mut rows = Vec::with_capacity(sweep.chi.len());
        for &chi in &sweep.chi {
            let (_, noise) = cfg.noise_models(Some(chi))?.swap_remove(index);
            let exp = cfg.experiment(noise);
            let est = estimate_gamma(&exp, sweep.method)?;
            let predicted = gamma_for_config(&exp)?.gamma;
            rows.push((chi, est.gamma, est.stderr, predicted));
        }
        let path = args.out.join(format!("gamma_sweep_{label}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["chi", "gamma", "stderr", "gamma_second_order"])?;
        for (chi, g, s, p) in &rows {
            w.write_record([
                format!("{chi:.16e}"),
                format!("{g:.16e}"),
                format!("{s:.16e}"),
                format!("{p:.16e}"),
            ])?;
        }
        w.flush()?;
        outputs.push(path);

        let chi: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let gamma: Vec<f64> = rows.iter().map(|r| r.1).collect();
        match fit_quadratic_law(&chi, &gamma) {
            Ok(fit) => {
                let path = args.out.join(format!("gamma_sweep_{label}_fit.json"));
                fs::write(&path, serde_json::to_string_pretty(&SweepReport { label, fit: &fit })?)?;
                println!(
                    "{label}: c = {:.6} (with χ⁴ term, R² = {:.6}); c = {:.6} (χ² only, R² = {:.6})",
                    fit.c, fit.r_squared, fit.pure_c, fit.pure_r_squared
                );
                outputs.push(path);
            }
            Err(Error::InsufficientPoints { .. }) | Err(Error::InvalidArgument(_)) => {
                eprintln!("{label}: grid too small for a quadratic fit");
            }
            Err(e) => return Err(e),
        }
    }
    write_manifest("gamma_sweep", args, &cfg, started, outputs)?;
    Ok(())
}

/// Writes `protocol_report.txt` and `protocol_report.json`; simulated runs
/// also save each subset curve under `curves/` for later reuse.
pub fn cmd_protocol(args: &RunArgs) -> Result<()> {
    let started = Utc::now();
    let cfg = load(args)?;
    let section = cfg.protocol.clone().unwrap_or_default();
    let plan = plan_protocol(cfg.n_qubits, section.max_body, &section.triples)?;
    let mut outputs = Vec::new();

    let mut report = if let Some(dir) = &section.curves {
        let dir = if dir.is_relative() {
            cfg.path.parent().unwrap_or(Path::new(".")).join(dir)
        } else {
            dir.clone()
        };
        let mut source = CurveSource::from_dir(&dir)?;
        run_protocol(&plan, &mut source)?
    } else {
        require_noise(&cfg)?;
        let mut models = cfg.noise_models(None)?;
        if models.len() != 1 {
            return Err(Error::invalid(format!(
                "protocol simulation needs exactly one noise model, found {}",
                models.len()
            )));
        }
        let (_, noise) = models.remove(0);
        let mut source = SimulationSource::new(noise, cfg.run.realizations, cfg.run.seed);
        source.measurement_mode = cfg.run.measurement_mode;
        source.backend = cfg.run.backend;
        let report = run_protocol(&plan, &mut source as &mut dyn GammaSource)?;
        let curves_dir = args.out.join("curves");
        fs::create_dir_all(&curves_dir)?;
        for (subset, curve) in &source.curves {
            let path = curves_dir.join(CurveSource::file_name(subset));
            curve.save(&path)?;
            outputs.push(path);
        }
        report
    };
    if let (Some(delta), Some(epsilon)) = (section.delta, section.epsilon) {
        report.budget = Some(chernoff_budget(delta, epsilon)?);
    }

    let text_path = args.out.join("protocol_report.txt");
    let mut file = fs::File::create(&text_path)?;
    report.write_text(&mut file)?;
    file.flush()?;
    let json_path = args.out.join("protocol_report.json");
    fs::write(&json_path, serde_json::to_string_pretty(&report)?)?;
    outputs.push(text_path);
    outputs.push(json_path);
    write_manifest("protocol", args, &cfg, started, outputs)?;
    Ok(())
}
