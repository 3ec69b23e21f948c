//! Flag and TOML parameter handling.
//!
//! Every command reads an optional `--config` TOML file with flat keys named
//! after the long flags (`k-max` becomes `k_max`). Flags override the file.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use serde::{Deserialize, Serialize};
use stochairy::noise::{self, NoisePath};
use stochairy::operator::coupling_for_beta;
use stochairy::{OperatorSpec, Potential};

use crate::error::{CliError, Result};

/// Potential written as `power:s,a`, `linear:F`, `zero` or `airy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialArg(pub Potential);

impl FromStr for PotentialArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> std::result::Result<Vec<f64>, String> {
            rest.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?} in potential {s:?}: {e}")))
                .collect()
        };
        let potential = match (kind.trim(), rest.is_empty()) {
            ("zero", true) => Potential::Zero,
            ("airy", true) => Potential::AIRY,
            ("power", false) => match nums()?[..] {
                [scale, exponent] => Potential::Power { scale, exponent },
                _ => return Err(format!("power potential needs `power:scale,exponent`, got {s:?}")),
            },
            ("linear", false) => match nums()?[..] {
                [field] => Potential::LinearField { field },
                _ => return Err(format!("linear potential needs `linear:F`, got {s:?}")),
            },
            _ => return Err(format!("unknown potential {s:?} (power:s,a | linear:F | zero | airy)")),
        };
        potential.validate().map_err(|e| e.to_string())?;
        Ok(PotentialArg(potential))
    }
}

/// Seeds as an inclusive range `a..b`, a comma list, or a single value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedList(pub Vec<u64>);

impl FromStr for SeedList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad seed {t:?}: {e}"));
        if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
            if b < a {
                return Err(format!("empty seed range {s:?}"));
            }
            return Ok(SeedList((a..=b).collect()));
        }
        let seeds = s.split(',').map(parse).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(SeedList(seeds))
    }
}

impl<'de> Deserialize<'de> for SeedList {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            One(u64),
            List(Vec<u64>),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::One(s) => Ok(SeedList(vec![s])),
            Raw::List(v) => Ok(SeedList(v)),
        }
    }
}

/// Real values as a comma list or an inclusive `start:stop:step` range.
#[derive(Debug, Clone, PartialEq)]
pub struct Values(pub Vec<f64>);

impl FromStr for Values {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Values(Vec::new()));
        }
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts[..] {
            [a, b, h] => {
                let (a, b, h) = (parse(a)?, parse(b)?, parse(h)?);
                if !(h > 0.0) || b < a {
                    return Err(format!("range {s:?} needs start ≤ stop and a positive step"));
                }
                let n = ((b - a) / h + 1e-9).floor() as usize;
                Ok(Values((0..=n).map(|i| a + i as f64 * h).collect()))
            }
            [_] => Ok(Values(s.split(',').map(parse).collect::<std::result::Result<_, _>>()?)),
            _ => Err(format!("expected a list or start:stop:step, got {s:?}")),
        }
    }
}

impl<'de> Deserialize<'de> for Values {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            List(Vec<f64>),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::List(v) => Ok(Values(v)),
        }
    }
}

impl<'de> Deserialize<'de> for PotentialArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Prufer,
    Form,
    Both,
}

impl MethodChoice {
    pub fn prufer(self) -> bool {
        matches!(self, MethodChoice::Prufer | MethodChoice::Both)
    }

    pub fn form(self) -> bool {
        matches!(self, MethodChoice::Form | MethodChoice::Both)
    }
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodChoice::Prufer => "prufer",
            MethodChoice::Form => "form",
            MethodChoice::Both => "both",
        })
    }
}

/// Every key any command accepts in a config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub beta: Option<f64>,
    pub c: Option<f64>,
    pub potential: Option<PotentialArg>,
    pub hurst: Option<f64>,
    pub step: Option<f64>,
    pub truncation: Option<f64>,
    pub seeds: Option<SeedList>,
    pub seed: Option<u64>,
    pub seed_base: Option<u64>,
    pub k_max: Option<usize>,
    pub method: Option<MethodChoice>,
    pub tol: Option<f64>,
    pub n: Option<usize>,
    pub samples: Option<usize>,
    pub k: Option<usize>,
    pub bins: Option<usize>,
    pub lambdas: Option<Values>,
    pub horizons: Option<Values>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }
}

/// Flags shared by every command.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with default values for this command's flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    pub fn load(&self) -> Result<FileConfig> {
        FileConfig::load(self.config.as_deref())
    }

    pub fn out_dir(&self, file: &FileConfig, default: &str) -> PathBuf {
        self.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from(default))
    }
}

/// Flags that describe an operator `H = -d²/dt² + p + c X'`.
#[derive(Debug, Clone, Default, Args)]
pub struct OperatorArgs {
    /// β of the stochastic Airy operator; implies p(t) = t and c = 2/√β.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Noise coupling c (use with --potential).
    #[arg(long = "c", allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// power:s,a | linear:F | zero | airy (default airy).
    #[arg(long)]
    pub potential: Option<PotentialArg>,
    /// Hurst index of the noise path.
    #[arg(long)]
    pub hurst: Option<f64>,
    /// Grid step; must divide 1 when the noise is on.
    #[arg(long)]
    pub step: Option<f64>,
    /// Interval length L.
    #[arg(long)]
    pub truncation: Option<f64>,
}

/// A validated operator family; one member per seed.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorSetup {
    pub potential: Potential,
    pub coupling: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub hurst: f64,
    pub step: f64,
    pub truncation: Option<f64>,
}

pub const DEFAULT_STEP: f64 = 1e-3;

impl OperatorArgs {
    pub fn resolve(&self, file: &FileConfig) -> Result<OperatorSetup> {
        let beta = self.beta.or(file.beta);
        let c = self.c.or(file.c);
        let potential = self.potential.or(file.potential).map(|p| p.0);
        let (potential, coupling) = match (beta, c) {
            (Some(_), Some(_)) => return Err(CliError::config("give exactly one of beta and c, not both")),
            (None, None) => return Err(CliError::config("give exactly one of beta and c")),
            (Some(b), None) => {
                if !(b > 0.0 && b.is_finite()) {
                    return Err(CliError::config(format!("beta must be positive, got {b}")));
                }
                if potential.is_some_and(|p| p != Potential::AIRY) {
                    return Err(CliError::config("beta fixes p(t) = t; use c with a custom potential"));
                }
                (Potential::AIRY, coupling_for_beta(b))
            }
            (None, Some(c)) => {
                if !c.is_finite() {
                    return Err(CliError::config(format!("c must be finite, got {c}")));
                }
                (potential.unwrap_or(Potential::AIRY), c)
            }
        };
        let hurst = self.hurst.or(file.hurst).unwrap_or(0.5);
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(CliError::config(format!("hurst must lie in (0, 1), got {hurst}")));
        }
        let step = self.step.or(file.step).unwrap_or(DEFAULT_STEP);
        if !(step > 0.0 && step.is_finite()) {
            return Err(CliError::config(format!("step must be positive, got {step}")));
        }
        let truncation = self.truncation.or(file.truncation);
        if let Some(l) = truncation {
            if !(l > 0.0 && l.is_finite()) {
                return Err(CliError::config(format!("truncation must be positive, got {l}")));
            }
        }
        Ok(OperatorSetup { potential, coupling, beta, hurst, step, truncation })
    }
}

impl OperatorSetup {
    /// The realization for `seed` on `[0, truncation]`. The noise is sampled
    /// one unit further so the averaged path covers the whole interval.
    pub fn build(&self, seed: u64, truncation: f64) -> stochairy::Result<OperatorSpec> {
        if self.coupling == 0.0 {
            return OperatorSpec::deterministic(self.potential, self.step, truncation);
        }
        let path: NoisePath = noise::sample_path(self.hurst, self.step, truncation + 1.0, seed)?;
        OperatorSpec::new(self.potential, self.coupling, path, truncation)
    }
}
