use serde::Serialize;

use super::bounds::check_pair;
use super::positions::{cluster, stage_gaps, Cluster};
use crate::attractor::StageOptions;
use crate::error::Result;
use crate::numerics::Scalar;
use crate::systems::{IfsSpec, SystemTable};
use crate::words::WordSpec;

/// Number of cutoffs in the default schedule.
const DEFAULT_SCHEDULE_LEN: u32 = 7;
/// Trailing cluster counts that must agree for the trajectory to count as
/// stabilized.
const STABLE_TAIL: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaRow {
    pub delta: Scalar,
    pub spectrum_size: usize,
    pub cluster_count: usize,
    /// Smallest distance between consecutive cluster centers.
    pub min_center_spacing: Option<Scalar>,
    pub clusters: Vec<Cluster>,
}

/// Two cluster centers closer than `gamma_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub delta_index: usize,
    pub delta: Scalar,
    pub spacing: Scalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscriminationReport {
    pub stage: usize,
    pub base_point: Scalar,
    pub m_cap: Scalar,
    pub eta: Scalar,
    pub rows: Vec<DeltaRow>,
    /// The last three cluster counts agree.
    pub stabilized: bool,
    /// `2 / (lambda (b_0 - a_0)^2)` in unit-domain coordinates.
    pub gamma0: Scalar,
    /// Smallest `k` with `2 gamma_k` below the first row's center spacing.
    pub k: Option<u32>,
    pub gamma_k: Option<Scalar>,
    pub witness: Option<Witness>,
    pub consistent_with_single_ifs: bool,
}

impl DiscriminationReport {
    pub fn cluster_counts(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.cluster_count).collect()
    }
}

/// Shortest stage-1 gap of F and G times `(sup |f'|)^j`, `j = 0..=6`.
pub fn default_delta_schedule(f_sys: &IfsSpec, g_sys: &IfsSpec) -> Vec<Scalar> {
    let min_gap = f_sys
        .stage1_gaps()
        .into_iter()
        .chain(g_sys.stage1_gaps())
        .map(|g| g.interval.length())
        .min()
        .unwrap_or_else(|| f_sys.domain().length());
    let rho = f_sys.derivative_bounds().1.max(g_sys.derivative_bounds().1);
    (0..DEFAULT_SCHEDULE_LEN).map(|j| &min_gap * &rho.powi(j)).collect()
}

fn min_spacing(clusters: &[Cluster]) -> Option<Scalar> {
    clusters
        .windows(2)
        .map(|w| &w[1].center - &w[0].center)
        .min()
}

pub fn discriminate_periodicity(
    f_sys: &IfsSpec,
    g_sys: &IfsSpec,
    word: &WordSpec,
    depth: usize,
    delta_schedule: Option<Vec<Scalar>>,
    m_cap: &Scalar,
    eta: &Scalar,
) -> Result<DiscriminationReport> {
    discriminate_periodicity_with(f_sys, g_sys, word, depth, delta_schedule, m_cap, eta, &StageOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn discriminate_periodicity_with(
    f_sys: &IfsSpec,
    g_sys: &IfsSpec,
    word: &WordSpec,
    depth: usize,
    delta_schedule: Option<Vec<Scalar>>,
    m_cap: &Scalar,
    eta: &Scalar,
    options: &StageOptions,
) -> Result<DiscriminationReport> {
    check_pair(f_sys, g_sys)?;
    let schedule = delta_schedule.unwrap_or_else(|| default_delta_schedule(f_sys, g_sys));
    let table = SystemTable::from_systems([f_sys.clone(), g_sys.clone()]);
    let stage = stage_gaps(word, &table, depth, options)?;

    let rows: Vec<DeltaRow> = schedule
        .iter()
        .map(|delta| {
            let spectrum = stage.spectrum(delta, m_cap);
            let clusters = cluster(&spectrum, eta);
            DeltaRow {
                delta: delta.clone(),
                spectrum_size: spectrum.len(),
                cluster_count: clusters.len(),
                min_center_spacing: min_spacing(&clusters),
                clusters,
            }
        })
        .collect();

    let counts: Vec<usize> = rows.iter().map(|r| r.cluster_count).collect();
    let stabilized = counts.len() >= STABLE_TAIL
        && counts[counts.len() - STABLE_TAIL..].windows(2).all(|w| w[0] == w[1]);

    let lambda = f_sys.derivative_bounds().0.min(g_sys.derivative_bounds().0);
    let len = f_sys.domain().length();
    let gap = f_sys
        .stage1_gaps()
        .into_iter()
        .chain(g_sys.stage1_gaps())
        .map(|g| g.interval.length() / &len)
        .min()
        .unwrap_or_else(Scalar::one);
    let gamma0 = Scalar::from_integer(2) / (&lambda * &(&gap * &gap));

    let two = Scalar::from_integer(2);
    let first_spacing = rows.first().and_then(|r| r.min_center_spacing.clone());
    let (k, gamma_k) = match &first_spacing {
        Some(sp) if sp.is_positive() => {
            let mut k = 0u32;
            let mut g = gamma0.clone();
            while &two * &g >= *sp {
                k += 1;
                g = &g / &two;
            }
            (Some(k), Some(g))
        }
        _ => (None, None),
    };
    let witness = gamma_k.as_ref().and_then(|g| {
        rows.iter().enumerate().find_map(|(i, r)| {
            r.min_center_spacing
                .as_ref()
                .filter(|sp| *sp < g)
                .map(|sp| Witness {
                    delta_index: i,
                    delta: r.delta.clone(),
                    spacing: sp.clone(),
                })
        })
    });

    Ok(DiscriminationReport {
        stage: depth,
        base_point: stage.base_point.clone(),
        m_cap: m_cap.clone(),
        eta: eta.clone(),
        consistent_with_single_ifs: stabilized && witness.is_none(),
        rows,
        stabilized,
        gamma0,
        k,
        gamma_k,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        Scalar::parse(x).unwrap()
    }

    fn pair() -> (IfsSpec, IfsSpec) {
        (
            IfsSpec::affine_unit("F", &[(s("1/3"), s("0")), (s("1/3"), s("2/3"))]).unwrap(),
            IfsSpec::affine_unit("G", &[(s("1/4"), s("0")), (s("1/4"), s("3/4"))]).unwrap(),
        )
    }

    #[test]
    fn default_schedule() {
        let (f, g) = pair();
        let sched = default_delta_schedule(&f, &g);
        assert_eq!(sched.len(), 7);
        assert_eq!(sched[0], s("1/3"));
        assert_eq!(sched[1], s("1/9"));
    }

    #[test]
    fn constant_word_stabilizes() {
        let (f, g) = pair();
        let r = discriminate_periodicity(&f, &g, &WordSpec::constant("F"), 10, None, &s("10"), &s("0.01")).unwrap();
        assert!(r.stabilized, "{:?}", r.cluster_counts());
    }
}
