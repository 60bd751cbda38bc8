//! Detector scan traces: deterministic synthetic generation and the
//! `detuning_ghz,voltage_v` CSV format.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::analysis::GaussianModel;
use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "detuning_ghz,voltage_v";
const META_PREFIX: &str = "# meta: ";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub detuning: f64,
    pub voltage: f64,
}

/// Detector voltage sampled against laser detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanTrace {
    samples: Vec<Sample>,
    meta: Option<String>,
}

impl ScanTrace {
    pub fn new(samples: Vec<Sample>, meta: Option<String>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidTrace(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.detuning.is_finite() && s.voltage.is_finite()) {
                return Err(Error::InvalidTrace(format!("sample {i} is not finite")));
            }
            if i > 0 && s.detuning <= samples[i - 1].detuning {
                return Err(Error::InvalidTrace(format!(
                    "detuning not strictly increasing at sample {i}"
                )));
            }
        }
        if meta.as_deref().is_some_and(|m| m.contains('\n')) {
            return Err(Error::InvalidTrace(
                "meta label must be a single line".into(),
            ));
        }
        Ok(Self { samples, meta })
    }

    pub fn from_columns(detuning: &[f64], voltage: &[f64]) -> Result<Self> {
        if detuning.len() != voltage.len() {
            return Err(Error::InvalidTrace("column lengths differ".into()));
        }
        let samples = detuning
            .iter()
            .zip(voltage)
            .map(|(&d, &v)| Sample {
                detuning: d,
                voltage: v,
            })
            .collect();
        Self::new(samples, None)
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn meta(&self) -> Option<&str> {
        self.meta.as_deref()
    }

    pub fn with_meta(mut self, meta: impl Into<String>) -> Result<Self> {
        let meta = meta.into();
        if meta.contains('\n') {
            return Err(Error::InvalidTrace(
                "meta label must be a single line".into(),
            ));
        }
        self.meta = Some(meta);
        Ok(self)
    }

    pub fn detunings(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.detuning)
    }

    pub fn voltages(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.voltage)
    }

    pub fn span(&self) -> f64 {
        self.samples[self.samples.len() - 1].detuning - self.samples[0].detuning
    }

    /// Same detunings, voltages multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let samples = self
            .samples
            .iter()
            .map(|s| Sample {
                detuning: s.detuning,
                voltage: s.voltage * factor,
            })
            .collect();
        Self::new(samples, self.meta.clone())
    }
}

/// Sign of the Gaussian feature in a synthetic trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    /// Scattered-light peak.
    Emission,
    /// Transmission dip.
    Absorption,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Emission => 1.0,
            Polarity::Absorption => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSpec {
    pub model: GaussianModel,
    pub polarity: Polarity,
    pub noise_sigma: f64,
    pub n_samples: usize,
    /// Total scan range in GHz, centred on zero detuning.
    pub span: f64,
    pub seed: u64,
}

impl TraceSpec {
    pub const DEFAULT_SPAN: f64 = 5.0;

    pub fn new(model: GaussianModel, noise_sigma: f64, n_samples: usize, seed: u64) -> Self {
        Self {
            model,
            polarity: Polarity::Emission,
            noise_sigma,
            n_samples,
            span: Self::DEFAULT_SPAN,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.n_samples < 2 {
            return Err(Error::InvalidTrace("n_samples must be >= 2".into()));
        }
        if !(self.span.is_finite() && self.span > 0.0) {
            return Err(Error::InvalidTrace("span must be > 0".into()));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::InvalidTrace("noise_sigma must be >= 0".into()));
        }
        Ok(())
    }

    pub fn detuning(&self, i: usize) -> f64 {
        -0.5 * self.span + self.span * i as f64 / (self.n_samples - 1) as f64
    }
}

/// Standard normal deviate `i` of the stream keyed by `seed`.
///
/// ChaCha20 is a counter-mode generator: each sample owns a fixed window
/// of the keystream, so the value depends only on `(seed, i)`.
pub fn normal_deviate(seed: u64, i: usize) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    // two u64 draws = four 32-bit words per sample
    rng.set_word_pos(4 * i as u128);
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn generate_trace(spec: &TraceSpec) -> Result<ScanTrace> {
    spec.validate()?;
    let m = &spec.model;
    let sign = spec.polarity.sign();
    let samples = (0..spec.n_samples)
        .map(|i| {
            let d = spec.detuning(i);
            let mut v = sign * m.peak * m.shape(d) + m.baseline;
            if spec.noise_sigma > 0.0 {
                v += spec.noise_sigma * normal_deviate(spec.seed, i);
            }
            Sample {
                detuning: d,
                voltage: v,
            }
        })
        .collect();
    ScanTrace::new(samples, None)
}

pub fn write_trace<W: Write>(trace: &ScanTrace, mut out: W) -> Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    if let Some(meta) = trace.meta() {
        writeln!(out, "{META_PREFIX}{meta}")?;
    }
    for s in trace.samples() {
        // `{:e}` prints the shortest representation that round-trips exactly
        writeln!(out, "{:e},{:e}", s.detuning, s.voltage)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trace<R: BufRead>(input: R) -> Result<ScanTrace> {
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, line)) => {
            let line = line?;
            if line.trim_end_matches('\r') != TRACE_HEADER {
                return Err(Error::TraceParse {
                    line: 1,
                    message: format!("expected header `{TRACE_HEADER}`"),
                });
            }
        }
        None => {
            return Err(Error::TraceParse {
                line: 1,
                message: "empty file".into(),
            })
        }
    }

    let mut meta = None;
    let mut samples: Vec<Sample> = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if let Some(rest) = line.strip_prefix(META_PREFIX) {
            meta = Some(rest.to_string());
            continue;
        }
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::TraceParse {
            line: lineno,
            message,
        };
        let mut fields = line.split(',');
        let (d, v) = match (fields.next(), fields.next(), fields.next()) {
            (Some(d), Some(v), None) => (d.trim(), v.trim()),
            _ => return Err(err(format!("expected 2 fields in `{line}`"))),
        };
        let parse = |s: &str| -> Result<f64> {
            let x: f64 = s
                .parse()
                .map_err(|_| err(format!("non-numeric field `{s}`")))?;
            if !x.is_finite() {
                return Err(err(format!("non-finite value `{s}`")));
            }
            Ok(x)
        };
        let sample = Sample {
            detuning: parse(d)?,
            voltage: parse(v)?,
        };
        if let Some(prev) = samples.last() {
            if sample.detuning <= prev.detuning {
                return Err(err(format!(
                    "detuning {} does not increase past {}",
                    sample.detuning, prev.detuning
                )));
            }
        }
        samples.push(sample);
    }
    ScanTrace::new(samples, meta).map_err(|e| Error::TraceParse {
        line: 0,
        message: e.to_string(),
    })
}

pub fn save_trace(trace: &ScanTrace, path: impl AsRef<Path>) -> Result<()> {
    write_trace(trace, BufWriter::new(File::create(path)?))
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<ScanTrace> {
    read_trace(BufReader::new(File::open(path)?))
}
