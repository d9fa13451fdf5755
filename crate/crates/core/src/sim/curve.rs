use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::MeasurementMode;
use crate::error::{Error, Result};

/// Averaged fidelity `⟨f(t)⟩` for `t = 0..=T` with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub mean_f: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_realizations: usize,
    pub f0: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    t: usize,
    mean_f: f64,
    stderr: f64,
    n_realizations: usize,
    f0: f64,
}

impl FidelityCurve {
    /// Averages per-realization traces in index order. Exact-trace errors use
    /// the Bessel-corrected sample deviation; sampled errors use the binomial
    /// `√(p(1−p)/N)`. A single realization has zero reported error.
    pub fn from_traces(traces: &[Vec<f64>], f0: f64, mode: MeasurementMode) -> Result<Self> {
        let n = traces.len();
        if n == 0 {
            return Err(Error::InsufficientPoints { needed: 1, found: 0 });
        }
        let len = traces[0].len();
        if let Some(bad) = traces.iter().find(|t| t.len() != len) {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: bad.len(),
            });
        }
        let nf = n as f64;
        let mut mean_f = vec![0.0; len];
        for trace in traces {
            for (m, v) in mean_f.iter_mut().zip(trace) {
                *m += v;
            }
        }
        mean_f.iter_mut().for_each(|m| *m /= nf);

        let stderr = match mode {
            MeasurementMode::Bernoulli => mean_f
                .iter()
                .map(|&p| (p * (1.0 - p) / nf).max(0.0).sqrt())
                .collect(),
            MeasurementMode::ExactTrace if n == 1 => vec![0.0; len],
            MeasurementMode::ExactTrace => {
                let mut ss = vec![0.0; len];
                for trace in traces {
                    for ((s, v), m) in ss.iter_mut().zip(trace).zip(&mean_f) {
                        *s += (v - m) * (v - m);
                    }
                }
                ss.iter().map(|s| (s / (nf - 1.0) / nf).sqrt()).collect()
            }
        };
        Ok(Self {
            mean_f,
            stderr,
            n_realizations: n,
            f0,
        })
    }

    /// Number of noisy steps `T`.
    pub fn steps(&self) -> usize {
        self.mean_f.len().saturating_sub(1)
    }

    /// CSV with header `t,mean_f,stderr,n_realizations,f0`; floats carry 17
    /// significant digits so a read-back is bit-exact.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "mean_f", "stderr", "n_realizations", "f0"])?;
        for (t, (m, s)) in self.mean_f.iter().zip(&self.stderr).enumerate() {
            w.write_record([
                t.to_string(),
                format!("{m:.16e}"),
                format!("{s:.16e}"),
                self.n_realizations.to_string(),
                format!("{:.16e}", self.f0),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut curve = Self {
            mean_f: Vec::new(),
            stderr: Vec::new(),
            n_realizations: 0,
            f0: 1.0,
        };
        for (i, row) in rdr.deserialize::<CsvRow>().enumerate() {
            let row = row?;
            if row.t != i {
                return Err(Error::invalid(format!("row {i} has t = {}", row.t)));
            }
            curve.mean_f.push(row.mean_f);
            curve.stderr.push(row.stderr);
            curve.n_realizations = row.n_realizations;
            curve.f0 = row.f0;
        }
        if curve.mean_f.is_empty() {
            return Err(Error::InsufficientPoints { needed: 1, found: 0 });
        }
        Ok(curve)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}
