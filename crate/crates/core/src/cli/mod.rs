//! Config-driven experiment runner behind the `ifs-lab` binary.

mod config;
mod output;

use std::fs;

use serde::Serialize;

pub use config::{Command, Format, OutputSpec, RunConfig, SystemDecl};
pub use output::CSV_COLUMNS;

use crate::analysis::{
    box_dimension_with, cluster, compatibility_bounds, discriminate_periodicity_with, position_spectrum_with, Cluster,
    CompatibilityBounds, DimensionReport, DiscriminationReport, PositionSpectrum,
};
use crate::attractor::{
    gaps_with, self_similar_gap_orbit, stage_with, BasicInterval, GapOrbit, GapRecord, StageOptions,
    DEFAULT_MAX_INTERVALS,
};
use crate::error::{Error, Hypothesis, Result};
use crate::numerics::{Arithmetic, Scalar};
use crate::systems::{validate, SystemTable, ValidationReport};
use crate::words::WordSpec;

/// Process exit status of a completed run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    HypothesisViolation,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::HypothesisViolation => 1,
        }
    }
}

/// Exit code for errors that stop a run before any output is produced.
pub const CONFIG_ERROR_CODE: i32 = 2;

#[derive(Clone, Debug, Serialize)]
pub struct BoundsRow {
    pub k: u32,
    pub beta: Scalar,
    pub gamma: Scalar,
    pub raw_window: (Scalar, Scalar),
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub bounds: CompatibilityBounds,
    pub schedule: Vec<BoundsRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PositionsReport {
    pub spectrum: PositionSpectrum,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clusters: Option<Vec<Cluster>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StagesReport {
    pub depth: usize,
    pub intervals: Vec<BasicInterval>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolationReport {
    pub hypothesis: Hypothesis,
    pub detail: String,
}

/// Result of one command.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Report {
    Validate(Vec<ValidationReport>),
    Stages(StagesReport),
    Gaps(Vec<GapRecord>),
    Positions(PositionsReport),
    Dimension(DimensionReport),
    Bounds(BoundsReport),
    Discriminate(DiscriminationReport),
    Orbit(GapOrbit),
    Violation(ViolationReport),
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub command: &'static str,
    pub arithmetic: Arithmetic,
    pub report: Report,
    pub status: Status,
}

impl Outcome {
    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => output::csv(self),
            Format::Json => output::json(self),
        }
    }
}

fn arithmetic_of<'a>(table: &SystemTable, names: impl IntoIterator<Item = &'a str>) -> Result<Arithmetic> {
    names.into_iter().try_fold(Arithmetic::Exact, |acc, n| {
        Ok(acc.combine(table.get(&n.into())?.arithmetic()))
    })
}

fn word_arithmetic(table: &SystemTable, word: &WordSpec) -> Result<Arithmetic> {
    let symbols = config::symbols(word);
    arithmetic_of(table, symbols.iter().map(|l| l.as_str()))
}

/// Execute the configured command. Hypothesis failures become a
/// [`Report::Violation`]; every other error is returned.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    config.check()?;
    let table = config.system_table()?;
    let options = StageOptions {
        depth_cap: config.depth_cap,
        max_intervals: DEFAULT_MAX_INTERVALS,
    };
    let command = config.command.name();
    let (arithmetic, result) = match &config.command {
        Command::Validate { systems } => {
            let names: Vec<&str> = if systems.is_empty() {
                config.systems.keys().map(String::as_str).collect()
            } else {
                systems.iter().map(String::as_str).collect()
            };
            let reports: Vec<ValidationReport> = names
                .iter()
                .map(|n| table.get(&(*n).into()).map(validate))
                .collect::<Result<_>>()?;
            let status = if reports.iter().all(ValidationReport::is_valid) {
                Status::Ok
            } else {
                Status::HypothesisViolation
            };
            return Ok(Outcome {
                command,
                arithmetic: arithmetic_of(&table, names)?,
                report: Report::Validate(reports),
                status,
            });
        }
        Command::Stages { word, depth } => {
            let w = config.word(word)?;
            let intervals = stage_with(w, &table, *depth, &options)?;
            (
                word_arithmetic(&table, w)?,
                Ok(Report::Stages(StagesReport { depth: *depth, intervals })),
            )
        }
        Command::Gaps { word, depth } => {
            let w = config.word(word)?;
            (word_arithmetic(&table, w)?, gaps_with(w, &table, *depth, &options).map(Report::Gaps))
        }
        Command::Positions {
            word,
            depth,
            delta,
            m_cap,
            eta,
        } => {
            let w = config.word(word)?;
            let spectrum = position_spectrum_with(w, &table, *depth, delta, m_cap, &options)?;
            let clusters = eta.as_ref().map(|e| cluster(&spectrum, e));
            (
                word_arithmetic(&table, w)?,
                Ok(Report::Positions(PositionsReport {
                    spectrum,
                    eta: eta.clone(),
                    clusters,
                })),
            )
        }
        Command::Dimension {
            word,
            depth_min,
            depth_max,
        } => {
            let w = config.word(word)?;
            (
                word_arithmetic(&table, w)?,
                box_dimension_with(w, &table, *depth_min..=*depth_max, &options).map(Report::Dimension),
            )
        }
        Command::Bounds { f, g, k_max } => {
            let result = compatibility_bounds(table.get(&f.as_str().into())?, table.get(&g.as_str().into())?).map(
                |bounds| {
                    let schedule = (0..=*k_max)
                        .map(|k| BoundsRow {
                            k,
                            beta: bounds.beta(k),
                            gamma: bounds.gamma(k),
                            raw_window: bounds.raw_window(k),
                        })
                        .collect();
                    Report::Bounds(BoundsReport { bounds, schedule })
                },
            );
            (arithmetic_of(&table, [f.as_str(), g.as_str()])?, result)
        }
        Command::Discriminate {
            f,
            g,
            word,
            depth,
            deltas,
            m_cap,
            eta,
        } => {
            let w = config.word(word)?;
            let result = discriminate_periodicity_with(
                table.get(&f.as_str().into())?,
                table.get(&g.as_str().into())?,
                w,
                *depth,
                deltas.clone(),
                m_cap,
                eta,
                &options,
            )
            .map(Report::Discriminate);
            (
                arithmetic_of(&table, [f.as_str(), g.as_str()])?.combine(word_arithmetic(&table, w)?),
                result,
            )
        }
        Command::Orbit {
            system,
            map,
            gap,
            ell_max,
        } => {
            let sys = table.get(&system.as_str().into())?;
            if *ell_max + 1 > options.depth_cap {
                return Err(Error::DepthCapExceeded {
                    depth: *ell_max + 1,
                    cap: options.depth_cap,
                });
            }
            (
                sys.arithmetic(),
                self_similar_gap_orbit(sys, *map, *gap, *ell_max).map(Report::Orbit),
            )
        }
    };
    let (report, status) = match result {
        Ok(r) => (r, Status::Ok),
        Err(Error::HypothesisViolation { hypothesis, detail }) => (
            Report::Violation(ViolationReport { hypothesis, detail }),
            Status::HypothesisViolation,
        ),
        Err(e) => return Err(e),
    };
    Ok(Outcome {
        command,
        arithmetic,
        report,
        status,
    })
}

/// Run, render and write to the configured path or return the text for
/// standard output. Returns the exit status and, when no path is set, the
/// rendered output.
pub fn execute(config: &RunConfig) -> Result<(Status, Option<String>)> {
    let outcome = run(config)?;
    let text = outcome.render(config.output.format)?;
    match &config.output.path {
        Some(path) => {
            fs::write(path, text)?;
            Ok((outcome.status, None))
        }
        None => Ok((outcome.status, Some(text))),
    }
}
