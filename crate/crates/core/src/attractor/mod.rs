//! Stage sets `C_n(W)`, their gaps, limit-set extremes and renormalization.

mod extreme;
mod hausdorff;
mod renorm;
mod stage;

use std::fmt;

use serde::{Serialize, Serializer};

pub use extreme::{extreme_point, self_similar_gap_orbit, GapOrbit, OrbitGap, Side, EXTREME_ITERATION_CAP};
pub use hausdorff::hausdorff_distance;
pub use renorm::{
    distortion_decay, renormalize, renormalized_map, DecayRow, DistortionDecay, Normalizer,
    RenormalizationProbe, RenormalizedMap, Sample, DEFAULT_GRID,
};
pub use stage::{gaps, gaps_with, stage, stage_with, StageOptions, DEFAULT_DEPTH_CAP, DEFAULT_MAX_INTERVALS};
pub(crate) use stage::{gaps_of_stage, stage_systems};

use crate::numerics::Interval;
use crate::words::Label;

/// Map indices `a_1 ... a_k`, one per stage; `a_j` indexes the maps of the
/// system named by `W_j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address(Vec<usize>);

impl Address {
    pub fn new(maps: Vec<usize>) -> Self {
        Address(maps)
    }

    pub fn root() -> Self {
        Address(Vec::new())
    }

    pub fn maps(&self) -> &[usize] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// `(stage, map)` pairs with 1-based stages.
    pub fn entries(&self) -> Vec<(usize, usize)> {
        self.0.iter().enumerate().map(|(j, &m)| (j + 1, m)).collect()
    }

    pub fn prefix(&self, k: usize) -> Address {
        Address(self.0[..k].to_vec())
    }

    pub fn common_prefix_len(&self, other: &Address) -> usize {
        self.0.iter().zip(&other.0).take_while(|(a, b)| a == b).count()
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("."))
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.entries().serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasicInterval {
    pub address: Address,
    pub interval: Interval,
}

/// A bounded gap `(a, b)` of a stage set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapRecord {
    pub interval: Interval,
    /// First stage at which the gap separates basic intervals.
    pub birth_stage: usize,
    /// Depth `birth_stage - 1` address whose basic interval contains the gap.
    pub parent_address: Address,
    /// System applied at the birth stage.
    pub system: Label,
    /// Index of the stage-1 gap of that system, numbered left to right.
    pub label: usize,
}

impl GapRecord {
    /// Identity across stages: exact equality in exact mode, agreement
    /// within ten times the error bounds otherwise.
    pub fn same_gap(&self, other: &Interval) -> bool {
        self.interval.approx_eq(other, 10.0)
    }
}
