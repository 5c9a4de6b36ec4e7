use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::attractor::DEFAULT_DEPTH_CAP;
use crate::error::{Error, Result};
use crate::numerics::{Interval, Scalar, DEFAULT_PRECISION, MIN_PRECISION};
use crate::systems::{IfsSpec, MapKind, SystemTable};
use crate::words::{Label, WordSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDecl {
    pub domain: Interval,
    pub maps: Vec<MapKind>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_k_max() -> u32 {
    8
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Command {
    /// Validation report for the named systems, or all of them.
    Validate {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        systems: Vec<String>,
    },
    Stages {
        word: String,
        depth: usize,
    },
    Gaps {
        word: String,
        depth: usize,
    },
    Positions {
        word: String,
        depth: usize,
        delta: Scalar,
        m_cap: Scalar,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<Scalar>,
    },
    Dimension {
        word: String,
        depth_min: usize,
        depth_max: usize,
    },
    Bounds {
        f: String,
        g: String,
        #[serde(default = "default_k_max")]
        k_max: u32,
    },
    Discriminate {
        f: String,
        g: String,
        word: String,
        depth: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        deltas: Option<Vec<Scalar>>,
        m_cap: Scalar,
        eta: Scalar,
    },
    Orbit {
        system: String,
        map: usize,
        gap: usize,
        ell_max: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Stages { .. } => "stages",
            Command::Gaps { .. } => "gaps",
            Command::Positions { .. } => "positions",
            Command::Dimension { .. } => "dimension",
            Command::Bounds { .. } => "bounds",
            Command::Discriminate { .. } => "discriminate",
            Command::Orbit { .. } => "orbit",
        }
    }
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

fn default_depth_cap() -> usize {
    DEFAULT_DEPTH_CAP
}

/// A complete run: declarations, one command and where its output goes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub systems: BTreeMap<String, SystemDecl>,
    #[serde(default)]
    pub words: BTreeMap<String, WordSpec>,
    pub command: Command,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default = "default_depth_cap")]
    pub depth_cap: usize,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Every system label a word can emit.
pub(crate) fn symbols(w: &WordSpec) -> Vec<Label> {
    let mut out: Vec<Label> = match w {
        WordSpec::EventuallyPeriodic { preperiod, period } => preperiod.iter().chain(period).cloned().collect(),
        WordSpec::Sturmian { one, zero, .. } => vec![one.clone(), zero.clone()],
        WordSpec::Explicit { prefix, tail } => prefix.iter().chain(std::iter::once(tail)).cloned().collect(),
    };
    out.sort();
    out.dedup();
    out
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Name resolution and parameter ranges.
    pub fn check(&self) -> Result<()> {
        if self.precision < MIN_PRECISION {
            return Err(config_err(format!(
                "precision {} is below the minimum {MIN_PRECISION}",
                self.precision
            )));
        }
        if self.depth_cap == 0 {
            return Err(config_err("depth_cap must be positive"));
        }
        for (name, w) in &self.words {
            w.validate()?;
            let symbols = symbols(w);
            for l in symbols {
                if !self.systems.contains_key(l.as_str()) {
                    return Err(config_err(format!("word {name} uses undeclared system {l}")));
                }
            }
        }
        let system = |n: &String| {
            if self.systems.contains_key(n) {
                Ok(())
            } else {
                Err(config_err(format!("unknown system {n}")))
            }
        };
        let word = |n: &String| {
            if self.words.contains_key(n) {
                Ok(())
            } else {
                Err(config_err(format!("unknown word {n}")))
            }
        };
        let positive = |what: &str, x: &Scalar| {
            if x.is_positive() {
                Ok(())
            } else {
                Err(config_err(format!("{what} must be positive")))
            }
        };
        let depth_ok = |d: usize, min: usize| {
            if d < min {
                Err(config_err(format!("depth must be at least {min}")))
            } else {
                Ok(())
            }
        };
        match &self.command {
            Command::Validate { systems } => systems.iter().try_for_each(system),
            Command::Stages { word: w, .. } => word(w),
            Command::Gaps { word: w, depth } => {
                word(w)?;
                depth_ok(*depth, 1)
            }
            Command::Positions {
                word: w,
                depth,
                delta,
                m_cap,
                eta,
            } => {
                word(w)?;
                depth_ok(*depth, 1)?;
                positive("delta", delta)?;
                positive("m_cap", m_cap)?;
                eta.as_ref().map_or(Ok(()), |e| positive("eta", e))
            }
            Command::Dimension {
                word: w,
                depth_min,
                depth_max,
            } => {
                word(w)?;
                if depth_min > depth_max {
                    return Err(config_err("depth_min exceeds depth_max"));
                }
                Ok(())
            }
            Command::Bounds { f, g, k_max } => {
                system(f)?;
                system(g)?;
                if *k_max == 0 {
                    return Err(config_err("k_max must be positive"));
                }
                Ok(())
            }
            Command::Discriminate {
                f,
                g,
                word: w,
                depth,
                deltas,
                m_cap,
                eta,
            } => {
                system(f)?;
                system(g)?;
                word(w)?;
                depth_ok(*depth, 1)?;
                positive("m_cap", m_cap)?;
                positive("eta", eta)?;
                deltas
                    .iter()
                    .flatten()
                    .try_for_each(|d| positive("every delta", d))
            }
            Command::Orbit { system: s, .. } => system(s),
        }
    }

    /// Build every declared system at the configured precision.
    pub fn system_table(&self) -> Result<SystemTable> {
        let mut table = SystemTable::new();
        for (name, decl) in &self.systems {
            let sys = IfsSpec::new(name.as_str(), decl.domain.clone(), decl.maps.clone())
                .map_err(|e| config_err(format!("system {name}: {e}")))?
                .with_precision(self.precision);
            table.insert(sys);
        }
        Ok(table)
    }

    pub fn word(&self, name: &str) -> Result<&WordSpec> {
        self.words
            .get(name)
            .ok_or_else(|| config_err(format!("unknown word {name}")))
    }
}
