use std::ops::RangeInclusive;

use serde::Serialize;

use crate::attractor::{stage_systems, stage_with, StageOptions};
use crate::error::{Error, Result};
use crate::numerics::Scalar;
use crate::systems::{IfsSpec, MapKind, SystemTable};
use crate::words::WordSpec;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleRow {
    pub depth: usize,
    /// Longest basic interval at this depth.
    pub scale: Scalar,
    /// Number of basic intervals.
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionReport {
    pub per_scale: Vec<ScaleRow>,
    /// Least-squares slope of `log count` against `log(1/scale)`.
    #[serde(serialize_with = "crate::numerics::f64_string")]
    pub box_estimate: f64,
    /// Common `(k, rho)` when every system along the word is affine with
    /// `k` maps of contraction ratio `rho`.
    pub homogeneous: Option<(usize, Scalar)>,
    /// Shortest stage-1 gap, relative to the domain length.
    pub epsilon_sep: Option<Scalar>,
    #[serde(serialize_with = "crate::numerics::opt_f64_string")]
    pub mass_lower_bound: Option<f64>,
    /// `-log k / log rho`.
    #[serde(serialize_with = "crate::numerics::opt_f64_string")]
    pub exact_value: Option<f64>,
}

fn homogeneity(used: &[&IfsSpec]) -> Option<(usize, Scalar)> {
    let mut common: Option<(usize, Scalar)> = None;
    for sys in used {
        let mut rho: Option<Scalar> = None;
        for m in sys.maps() {
            let MapKind::Affine { slope, .. } = m.kind() else {
                return None;
            };
            let r = slope.abs();
            match &rho {
                Some(x) if *x != r => return None,
                Some(_) => {}
                None => rho = Some(r),
            }
        }
        let this = (sys.len(), rho?);
        match &common {
            Some(c) if *c != this => return None,
            Some(_) => {}
            None => common = Some(this),
        }
    }
    common
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn box_dimension(word: &WordSpec, systems: &SystemTable, depths: RangeInclusive<usize>) -> Result<DimensionReport> {
    box_dimension_with(word, systems, depths, &StageOptions::default())
}

pub fn box_dimension_with(
    word: &WordSpec,
    systems: &SystemTable,
    depths: RangeInclusive<usize>,
    options: &StageOptions,
) -> Result<DimensionReport> {
    let mut per_scale = Vec::new();
    for depth in depths.clone() {
        let basics = stage_with(word, systems, depth, options)?;
        let scale = basics
            .iter()
            .map(|b| b.interval.length())
            .max()
            .expect("a stage has at least one interval");
        per_scale.push(ScaleRow {
            depth,
            scale,
            count: basics.len(),
        });
    }
    let points: Vec<(f64, f64)> = per_scale
        .iter()
        .map(|r| (-r.scale.to_f64().ln(), (r.count as f64).ln()))
        .collect();
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::DegenerateRegression);
    }
    let box_estimate = slope(&points);

    let (used, domain) = stage_systems(word, systems, *depths.end())?;
    let homogeneous = homogeneity(&used);
    let epsilon_sep = used
        .iter()
        .flat_map(|s| s.stage1_gaps())
        .map(|g| g.interval.length())
        .min()
        .map(|g| g / domain.length());

    let (mass_lower_bound, exact_value) = match (&homogeneous, &epsilon_sep) {
        (Some((k, rho)), Some(eps)) => {
            let (kf, rf, ef) = (*k as f64, rho.to_f64(), eps.to_f64());
            let mass = depths
                .clone()
                .map(|j| {
                    let j = j as f64;
                    ((j - 1.0) * kf.ln()) / -(kf.ln() + (j - 1.0) * rf.ln() + ef.ln())
                })
                .fold(f64::INFINITY, f64::min);
            (Some(mass), Some(-kf.ln() / rf.ln()))
        }
        _ => (None, None),
    };

    Ok(DimensionReport {
        per_scale,
        box_estimate,
        homogeneous,
        epsilon_sep,
        mass_lower_bound,
        exact_value,
    })
}
