use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use super::{Label, WordSpec};
use crate::error::{Error, Result};

/// Factor counts `P(k)` for `k = 1..=K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexityProfile {
    pub counts: Vec<(usize, usize)>,
}

impl ComplexityProfile {
    pub fn values(&self) -> Vec<usize> {
        self.counts.iter().map(|&(_, p)| p).collect()
    }

    /// First `k` with `P(k+1) == P(k)`, if any.
    pub fn first_plateau(&self) -> Option<usize> {
        self.counts.windows(2).find(|w| w[0].1 == w[1].1).map(|w| w[0].0)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ComplexityOptions {
    /// The examined prefix must be at least `prefix_factor * k_max` long.
    pub prefix_factor: usize,
}

impl Default for ComplexityOptions {
    fn default() -> Self {
        ComplexityOptions { prefix_factor: 3 }
    }
}

/// Distinct length-`k` factors of an explicit finite word.
pub fn complexity_of(word: &[Label], k_max: usize) -> ComplexityProfile {
    let counts = (1..=k_max)
        .map(|k| {
            let distinct: HashSet<&[Label]> = word.windows(k).collect();
            (k, distinct.len())
        })
        .collect();
    ComplexityProfile { counts }
}

pub fn complexity(
    w: &WordSpec,
    k_max: usize,
    n_examined: usize,
    options: ComplexityOptions,
) -> Result<ComplexityProfile> {
    if k_max == 0 {
        return Err(Error::InsufficientPrefix("k_max must be positive".into()));
    }
    let required = options.prefix_factor.max(1) * k_max;
    if n_examined < required {
        return Err(Error::InsufficientPrefix(format!(
            "complexity up to k = {k_max} needs a prefix of at least {required}, got {n_examined}"
        )));
    }
    Ok(complexity_of(&w.prefix(n_examined)?, k_max))
}

/// Smallest `(preperiod, period)` consistent with the prefix.
///
/// Periods up to `ceil(len/3)` and preperiods up to `floor(len/3)` are
/// searched, so the periodic part always spans at least two full periods.
/// Ties prefer the shorter period, then the shorter preperiod.
pub fn detect_period(w: &[Label]) -> Option<(usize, usize)> {
    let len = w.len();
    if len == 0 {
        return None;
    }
    let max_period = len.div_ceil(3);
    let max_pre = len / 3;
    for p in 1..=max_period {
        if p >= len {
            break;
        }
        // smallest pre with w[i] == w[i+p] for all i >= pre
        let mut pre = len - p;
        while pre > 0 && w[pre - 1] == w[pre - 1 + p] {
            pre -= 1;
        }
        if pre <= max_pre && len - pre >= 2 * p {
            return Some((pre, p));
        }
    }
    None
}

/// Length-`k` strings followed, somewhere in positions `[n, horizon]`, by at
/// least two different symbols.
pub fn ambiguous_strings(
    w: &WordSpec,
    k: usize,
    n: usize,
    horizon: usize,
) -> Result<Vec<Vec<Label>>> {
    if k == 0 || n == 0 {
        return Err(Error::InsufficientPrefix("k and N must be positive".into()));
    }
    if horizon <= n + k {
        return Err(Error::InsufficientPrefix(format!(
            "horizon {horizon} must exceed N + k = {}",
            n + k
        )));
    }
    let prefix = w.prefix(horizon)?;
    // factor W_l .. W_{l+k} with l >= n and l + k <= horizon (1-based)
    let window = &prefix[n - 1..];
    let mut followers: BTreeMap<&[Label], BTreeSet<&Label>> = BTreeMap::new();
    for f in window.windows(k + 1) {
        followers.entry(&f[..k]).or_default().insert(&f[k]);
    }
    Ok(followers
        .into_iter()
        .filter(|(_, next)| next.len() >= 2)
        .map(|(s, _)| s.to_vec())
        .collect())
}
