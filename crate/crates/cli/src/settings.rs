//! Run settings shared by the numeric subcommands: flags first, then the
//! `--config` file, then built-in defaults.

use std::path::{Path, PathBuf};

use clap::Args;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const DEFAULT_P: f64 = 2.0;
pub const DEFAULT_MEASURE: &str = "alpha:0";
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_POINTS: usize = 50;
pub const DEFAULT_TERMS: usize = 10_000;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Space name.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    /// Exponent p >= 1.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Measure, e.g. `alpha:0`, `dirac0`, `gamma:2,3`, `half-normal:1`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    /// Polynomial as JSON: `{"N": 3, "coeffs": [[n, re, im], ...]}`.
    #[arg(long, value_parser = parse_json)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly: Option<Value>,
    /// File holding the polynomial JSON.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly_file: Option<PathBuf>,
    /// Monte Carlo sample count (accepts `1e6`).
    #[arg(long, value_parser = parse_count)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of prime coordinates sampled.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Real part of s.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Imaginary part of s.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Disk point `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
    /// Second kernel point `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    /// Disk weight `(β+1)(1−r)^β`; uniform when absent.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disk_beta: Option<f64>,
    /// Truncation length N.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

fn parse_json(s: &str) -> Result<Value, String> {
    serde_json::from_str(s).map_err(|e| e.to_string())
}

fn parse_count(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s}"))?;
    if !(v >= 0.0) || v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err(format!("expected a non-negative integer, got {s}"));
    }
    Ok(v)
}

pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| {
        x.parse::<f64>()
            .map_err(|_| CliError::Config(format!("bad complex number {s:?}")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(CliError::Config(format!(
            "complex number must be `re` or `re,im`, got {s:?}"
        ))),
    }
}

macro_rules! overlay_fields {
    ($top:expr, $base:expr, $($f:ident),*) => {
        Settings { $($f: $top.$f.or($base.$f)),* }
    };
}

impl Settings {
    /// `self` over the file at `path` (if any).
    pub fn with_file(self, path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(self) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let file: Settings = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        if let Some(c) = file.samples {
            parse_count(&c.to_string()).map_err(CliError::Config)?;
        }
        Ok(overlay_fields!(
            self, file, space, p, measure, poly, poly_file, samples, seed, k, sigma, t, z, w,
            disk_beta, n, sigma_min, sigma_max, points
        ))
    }

    pub fn space(&self) -> Result<&str, CliError> {
        self.space
            .as_deref()
            .ok_or_else(|| CliError::Config("--space is required".into()))
    }

    pub fn p(&self) -> f64 {
        self.p.unwrap_or(DEFAULT_P)
    }

    pub fn measure(&self) -> &str {
        self.measure.as_deref().unwrap_or(DEFAULT_MEASURE)
    }

    pub fn samples(&self) -> u64 {
        self.samples.map_or(DEFAULT_SAMPLES, |s| s as u64)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn points(&self) -> usize {
        self.points.unwrap_or(DEFAULT_POINTS)
    }

    pub fn terms(&self) -> usize {
        self.n.unwrap_or(DEFAULT_TERMS)
    }

    pub fn s(&self) -> Result<Complex64, CliError> {
        let sigma = self
            .sigma
            .ok_or_else(|| CliError::Config("--sigma is required".into()))?;
        Ok(Complex64::new(sigma, self.t.unwrap_or(0.0)))
    }

    /// Fills defaults for the fields a command reads, so the echo shows what ran.
    pub fn effective(mut self, fields: &[&str]) -> Self {
        for f in fields {
            match *f {
                "p" => self.p = Some(self.p()),
                "measure" => self.measure = Some(self.measure().to_string()),
                "samples" => self.samples = Some(self.samples() as f64),
                "seed" => self.seed = Some(self.seed()),
                "points" => self.points = Some(self.points()),
                "n" => self.n = Some(self.terms()),
                "t" => self.t = Some(self.t.unwrap_or(0.0)),
                _ => {}
            }
        }
        self
    }

    pub fn to_value(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("settings serialize");
        if let Some(s) = v.get_mut("samples") {
            // counts print as integers
            if let Some(x) = s.as_f64() {
                *s = Value::from(x as u64);
            }
        }
        v
    }
}
