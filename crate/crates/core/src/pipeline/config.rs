//! Pipeline configuration.
//!
//! The config file is plain text, one `key = value` per line. Blank lines
//! and lines starting with `#` are ignored; everything after a `#` on a line
//! is a comment. Unknown keys are rejected. Recognised keys:
//!
//! ```text
//! seed = 42
//! window = 5
//! validation_windows = 50
//! test_days = 6
//! alpha.qorc = 100
//! alpha.classical = 1
//! alpha.simple_pml = 100
//! classical_alpha_search = false
//! reservoirs = R1:12:3, R2:10:4, R3:16:2
//! ae.sparsity = 0.0001
//! ae.keep_prob = 0.85
//! ae.learning_rate = 0.001
//! ae.beta1 = 0.9
//! ae.beta2 = 0.999
//! ae.epsilon = 1e-8
//! ae.batch_size = 32
//! ae.max_epochs = 1000
//! ae.patience = 30
//! ae.validation_days = 50
//! synthetic.days = 500
//! synthetic.autocorrelation = 0.98
//! synthetic.jump_probability = 0.02
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::autoencoder::AeTrainConfig;
use crate::error::{Error, Result};
use crate::reservoir::ReservoirSpec;
use crate::stochastic::DEFAULT_SEED;

use super::synthetic::SyntheticConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Ensemble sandwich reservoirs plus classical context, 1,335 features.
    Qorc,
    /// Classical context only, 120 features.
    Classical,
    /// One single-unitary reservoir plus classical context, 484 features.
    SimplePml,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Qorc, Variant::Classical, Variant::SimplePml];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Qorc => "qorc",
            Variant::Classical => "classical",
            Variant::SimplePml => "simple-pml",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qorc" => Ok(Variant::Qorc),
            "classical" => Ok(Variant::Classical),
            "simple-pml" => Ok(Variant::SimplePml),
            other => Err(Error::invalid(format!(
                "unknown variant '{other}' (expected qorc, classical or simple-pml)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub seed: u64,
    pub window: usize,
    pub validation_windows: usize,
    pub test_days: usize,
    pub alpha_qorc: f64,
    pub alpha_classical: f64,
    pub alpha_simple_pml: f64,
    /// Choose the classical alpha on validation MSE from [`ALPHA_GRID`].
    pub classical_alpha_search: bool,
    pub reservoirs: Vec<ReservoirSpec>,
    pub autoencoder: AeTrainConfig,
    pub synthetic: SyntheticConfig,
}

/// Grid searched for the classical baseline's alpha.
pub const ALPHA_GRID: [f64; 5] = [1e-2, 1e-1, 1.0, 1e1, 1e2];

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            window: 5,
            validation_windows: 50,
            test_days: 6,
            alpha_qorc: 100.0,
            alpha_classical: 1.0,
            alpha_simple_pml: 100.0,
            classical_alpha_search: false,
            reservoirs: ReservoirSpec::default_ensemble(),
            autoencoder: AeTrainConfig::default(),
            synthetic: SyntheticConfig::default(),
        }
    }
}

fn parse_value<T: FromStr>(path: &str, line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config {
        path: path.to_string(),
        line,
        message: format!("invalid value '{value}' for {key}"),
    })
}

fn parse_reservoirs(path: &str, line: usize, value: &str) -> Result<Vec<ReservoirSpec>> {
    let bad = |msg: String| Error::Config {
        path: path.to_string(),
        line,
        message: msg,
    };
    let specs = value
        .split(',')
        .map(|item| {
            let parts: Vec<&str> = item.trim().split(':').collect();
            match parts.as_slice() {
                [label, m, n] => Ok(ReservoirSpec::new(
                    label.trim(),
                    m.trim()
                        .parse()
                        .map_err(|_| bad(format!("bad mode count in '{item}'")))?,
                    n.trim()
                        .parse()
                        .map_err(|_| bad(format!("bad photon count in '{item}'")))?,
                )),
                _ => Err(bad(format!("reservoir '{item}' is not label:modes:photons"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    if specs.is_empty() {
        return Err(bad("no reservoirs listed".into()));
    }
    Ok(specs)
}

impl PipelineConfig {
    pub fn alpha(&self, variant: Variant) -> f64 {
        match variant {
            Variant::Qorc => self.alpha_qorc,
            Variant::Classical => self.alpha_classical,
            Variant::SimplePml => self.alpha_simple_pml,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses config text on top of the defaults.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                path: origin.to_string(),
                line,
                message: format!("expected 'key = value', got '{content}'"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let p = origin;
            match key {
                "seed" => cfg.seed = parse_value(p, line, key, value)?,
                "window" => cfg.window = parse_value(p, line, key, value)?,
                "validation_windows" => cfg.validation_windows = parse_value(p, line, key, value)?,
                "test_days" => cfg.test_days = parse_value(p, line, key, value)?,
                "alpha.qorc" => cfg.alpha_qorc = parse_value(p, line, key, value)?,
                "alpha.classical" => cfg.alpha_classical = parse_value(p, line, key, value)?,
                "alpha.simple_pml" => cfg.alpha_simple_pml = parse_value(p, line, key, value)?,
                "classical_alpha_search" => cfg.classical_alpha_search = parse_value(p, line, key, value)?,
                "reservoirs" => cfg.reservoirs = parse_reservoirs(p, line, value)?,
                "ae.sparsity" => cfg.autoencoder.sparsity = parse_value(p, line, key, value)?,
                "ae.keep_prob" => cfg.autoencoder.keep_prob = parse_value(p, line, key, value)?,
                "ae.learning_rate" => cfg.autoencoder.learning_rate = parse_value(p, line, key, value)?,
                "ae.beta1" => cfg.autoencoder.beta1 = parse_value(p, line, key, value)?,
                "ae.beta2" => cfg.autoencoder.beta2 = parse_value(p, line, key, value)?,
                "ae.epsilon" => cfg.autoencoder.epsilon = parse_value(p, line, key, value)?,
                "ae.batch_size" => cfg.autoencoder.batch_size = parse_value(p, line, key, value)?,
                "ae.max_epochs" => cfg.autoencoder.max_epochs = parse_value(p, line, key, value)?,
                "ae.patience" => cfg.autoencoder.patience = parse_value(p, line, key, value)?,
                "ae.validation_days" => cfg.autoencoder.validation_rows = parse_value(p, line, key, value)?,
                "synthetic.days" => cfg.synthetic.days = parse_value(p, line, key, value)?,
                "synthetic.autocorrelation" => cfg.synthetic.autocorrelation = parse_value(p, line, key, value)?,
                "synthetic.jump_probability" => cfg.synthetic.jump_probability = parse_value(p, line, key, value)?,
                other => {
                    return Err(Error::Config {
                        path: origin.to_string(),
                        line,
                        message: format!("unknown key '{other}'"),
                    })
                }
            }
        }
        Ok(cfg)
    }

    /// Renders the config in the file format accepted by [`PipelineConfig::parse`].
    pub fn to_text(&self) -> String {
        let ae = &self.autoencoder;
        let reservoirs = self
            .reservoirs
            .iter()
            .map(|r| format!("{}:{}:{}", r.label, r.modes, r.photons))
            .collect::<Vec<_>>()
            .join(", ");
        format!(
            "seed = {}\nwindow = {}\nvalidation_windows = {}\ntest_days = {}\n\
             alpha.qorc = {:?}\nalpha.classical = {:?}\nalpha.simple_pml = {:?}\n\
             classical_alpha_search = {}\nreservoirs = {reservoirs}\n\
             ae.sparsity = {:?}\nae.keep_prob = {:?}\nae.learning_rate = {:?}\n\
             ae.beta1 = {:?}\nae.beta2 = {:?}\nae.epsilon = {:?}\nae.batch_size = {}\n\
             ae.max_epochs = {}\nae.patience = {}\nae.validation_days = {}\n\
             synthetic.days = {}\nsynthetic.autocorrelation = {:?}\nsynthetic.jump_probability = {:?}\n",
            self.seed,
            self.window,
            self.validation_windows,
            self.test_days,
            self.alpha_qorc,
            self.alpha_classical,
            self.alpha_simple_pml,
            self.classical_alpha_search,
            ae.sparsity,
            ae.keep_prob,
            ae.learning_rate,
            ae.beta1,
            ae.beta2,
            ae.epsilon,
            ae.batch_size,
            ae.max_epochs,
            ae.patience,
            ae.validation_rows,
            self.synthetic.days,
            self.synthetic.autocorrelation,
            self.synthetic.jump_probability,
        )
    }
}
