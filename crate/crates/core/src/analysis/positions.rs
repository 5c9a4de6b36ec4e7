use serde::Serialize;

use crate::attractor::{gaps_of_stage, stage_systems, stage_with, GapRecord, StageOptions};
use crate::error::Result;
use crate::numerics::Scalar;
use crate::systems::SystemTable;
use crate::words::WordSpec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositionEntry {
    pub position: Scalar,
    pub gap: GapRecord,
}

/// Relative positions `(a - min C_n) / (b - a)` of the short gaps of `C_n(W)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositionSpectrum {
    pub delta: Scalar,
    pub m_cap: Scalar,
    pub stage: usize,
    /// `min C_n(W)`, the base point of every position.
    pub base_point: Scalar,
    pub entries: Vec<PositionEntry>,
}

impl PositionSpectrum {
    pub fn positions(&self) -> Vec<Scalar> {
        self.entries.iter().map(|e| e.position.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Stage-`n` gaps together with the stage minimum.
#[derive(Clone, Debug)]
pub(crate) struct StageGaps {
    pub stage: usize,
    pub base_point: Scalar,
    pub gaps: Vec<GapRecord>,
}

pub(crate) fn stage_gaps(
    word: &WordSpec,
    systems: &SystemTable,
    n: usize,
    options: &StageOptions,
) -> Result<StageGaps> {
    let basics = stage_with(word, systems, n, options)?;
    let base_point = basics
        .iter()
        .map(|b| b.interval.lo().clone())
        .min()
        .expect("a stage has at least one interval");
    let (used, _) = stage_systems(word, systems, n)?;
    Ok(StageGaps {
        stage: n,
        base_point,
        gaps: gaps_of_stage(basics, &used)?,
    })
}

impl StageGaps {
    pub fn spectrum(&self, delta: &Scalar, m_cap: &Scalar) -> PositionSpectrum {
        let zero = Scalar::zero();
        let entries = self
            .gaps
            .iter()
            .filter_map(|g| {
                let len = g.interval.length();
                if &len >= delta {
                    return None;
                }
                let position = (g.interval.lo() - &self.base_point) / len;
                (position > zero && &position < m_cap).then(|| PositionEntry {
                    position,
                    gap: g.clone(),
                })
            })
            .collect();
        PositionSpectrum {
            delta: delta.clone(),
            m_cap: m_cap.clone(),
            stage: self.stage,
            base_point: self.base_point.clone(),
            entries,
        }
    }
}

pub fn position_spectrum(
    word: &WordSpec,
    systems: &SystemTable,
    n: usize,
    delta: &Scalar,
    m_cap: &Scalar,
) -> Result<PositionSpectrum> {
    position_spectrum_with(word, systems, n, delta, m_cap, &StageOptions::default())
}

pub fn position_spectrum_with(
    word: &WordSpec,
    systems: &SystemTable,
    n: usize,
    delta: &Scalar,
    m_cap: &Scalar,
    options: &StageOptions,
) -> Result<PositionSpectrum> {
    Ok(stage_gaps(word, systems, n, options)?.spectrum(delta, m_cap))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cluster {
    /// Midrange of the members.
    pub center: Scalar,
    pub count: usize,
    /// `max - min` of the members.
    pub width: Scalar,
}

pub fn cluster(spectrum: &PositionSpectrum, eta: &Scalar) -> Vec<Cluster> {
    cluster_positions(&spectrum.positions(), eta)
}

/// Greedy left-to-right grouping: a point opens a new cluster when it lies
/// more than `2 eta` right of the current cluster's leftmost member.
pub fn cluster_positions(positions: &[Scalar], eta: &Scalar) -> Vec<Cluster> {
    let mut sorted = positions.to_vec();
    sorted.sort();
    let reach = Scalar::from_integer(2) * eta;
    let two = Scalar::from_integer(2);
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        let close = i < sorted.len() && &sorted[i] - &sorted[start] <= reach;
        if !close {
            let (lo, hi) = (&sorted[start], &sorted[i - 1]);
            out.push(Cluster {
                center: &(lo + hi) / &two,
                count: i - start,
                width: hi - lo,
            });
            start = i;
        }
    }
    out
}
