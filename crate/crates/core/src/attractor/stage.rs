use rayon::prelude::*;

use super::{Address, BasicInterval, GapRecord};
use crate::error::{Error, Result};
use crate::numerics::{image_unchecked, Interval};
use crate::systems::{IfsSpec, SystemTable};
use crate::words::WordSpec;

pub const DEFAULT_DEPTH_CAP: usize = 24;
pub const DEFAULT_MAX_INTERVALS: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StageOptions {
    pub depth_cap: usize,
    pub max_intervals: u128,
}

impl Default for StageOptions {
    fn default() -> Self {
        StageOptions {
            depth_cap: DEFAULT_DEPTH_CAP,
            max_intervals: DEFAULT_MAX_INTERVALS,
        }
    }
}

/// Systems `W_1 .. W_n`, checked to share one domain.
pub(crate) fn stage_systems<'a>(
    word: &WordSpec,
    systems: &'a SystemTable,
    n: usize,
) -> Result<(Vec<&'a IfsSpec>, Interval)> {
    let labels = word.prefix(n.max(1))?;
    let all: Vec<&IfsSpec> = labels.iter().map(|l| systems.get(l)).collect::<Result<_>>()?;
    let domain = all[0].domain().clone();
    if all.iter().any(|s| s.domain() != &domain) {
        return Err(Error::DomainMismatch);
    }
    Ok((all.into_iter().take(n).collect(), domain))
}

pub fn stage(word: &WordSpec, systems: &SystemTable, n: usize) -> Result<Vec<BasicInterval>> {
    stage_with(word, systems, n, &StageOptions::default())
}

/// All depth-`n` basic intervals in product order (`a_1` most significant).
pub fn stage_with(
    word: &WordSpec,
    systems: &SystemTable,
    n: usize,
    options: &StageOptions,
) -> Result<Vec<BasicInterval>> {
    if n > options.depth_cap {
        return Err(Error::DepthCapExceeded {
            depth: n,
            cap: options.depth_cap,
        });
    }
    let (used, domain) = stage_systems(word, systems, n)?;
    let radices: Vec<usize> = used.iter().map(|s| s.len()).collect();
    let mut projected: u128 = 1;
    for &r in &radices {
        projected = projected.saturating_mul(r as u128);
        if projected > options.max_intervals {
            return Err(Error::TooManyIntervals {
                projected,
                limit: options.max_intervals,
            });
        }
    }
    let arith = used
        .iter()
        .fold(crate::numerics::Arithmetic::Exact, |a, s| a.combine(s.arithmetic()));
    let seed = Interval::new(arith.lift(domain.lo()), arith.lift(domain.hi()))?;

    // E_{n+1} = {I}; E_j = {w(J) : w in W_j, J in E_{j+1}}
    let mut current = vec![seed];
    for sys in used.iter().rev() {
        let maps = sys.maps();
        let inner = &current;
        let width = inner.len();
        current = (0..maps.len() * width)
            .into_par_iter()
            .map(|idx| image_unchecked(&maps[idx / width], &inner[idx % width]))
            .collect();
    }

    Ok(current
        .into_iter()
        .enumerate()
        .map(|(idx, interval)| BasicInterval {
            address: decode(idx, &radices),
            interval,
        })
        .collect())
}

fn decode(mut idx: usize, radices: &[usize]) -> Address {
    let mut digits = vec![0; radices.len()];
    for (d, &r) in digits.iter_mut().zip(radices).rev() {
        *d = idx % r;
        idx /= r;
    }
    Address::new(digits)
}

pub fn gaps(word: &WordSpec, systems: &SystemTable, n: usize) -> Result<Vec<GapRecord>> {
    gaps_with(word, systems, n, &StageOptions::default())
}

/// Gaps of `C_n(W)` inside its hull, sorted by left endpoint.
pub fn gaps_with(
    word: &WordSpec,
    systems: &SystemTable,
    n: usize,
    options: &StageOptions,
) -> Result<Vec<GapRecord>> {
    let basics = stage_with(word, systems, n, options)?;
    let (used, _) = stage_systems(word, systems, n)?;
    gaps_of_stage(basics, &used)
}

/// Gaps between consecutive basic intervals of an already computed stage.
pub(crate) fn gaps_of_stage(mut basics: Vec<BasicInterval>, used: &[&IfsSpec]) -> Result<Vec<GapRecord>> {
    basics.sort_by(|a, b| a.interval.lo().cmp(b.interval.lo()));
    let ranks: Vec<Vec<usize>> = used
        .iter()
        .map(|s| {
            let mut rank = vec![0; s.len()];
            for (r, &m) in s.image_order().iter().enumerate() {
                rank[m] = r;
            }
            rank
        })
        .collect();

    basics
        .windows(2)
        .map(|w| {
            let (left, right) = (&w[0], &w[1]);
            let common = left.address.common_prefix_len(&right.address);
            let rank = &ranks[common];
            let label = rank[left.address.maps()[common]].min(rank[right.address.maps()[common]]);
            Ok(GapRecord {
                interval: Interval::new(left.interval.hi().clone(), right.interval.lo().clone())?,
                birth_stage: common + 1,
                parent_address: left.address.prefix(common),
                system: used[common].name().clone(),
                label,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Scalar;
    use crate::words::labels;

    fn s(x: &str) -> Scalar {
        Scalar::parse(x).unwrap()
    }

    fn iv(a: &str, b: &str) -> Interval {
        Interval::new(s(a), s(b)).unwrap()
    }

    fn table() -> SystemTable {
        SystemTable::from_systems([
            IfsSpec::affine_unit("F", &[(s("1/3"), s("0")), (s("1/3"), s("2/3"))]).unwrap(),
            IfsSpec::affine_unit("G", &[(s("1/4"), s("0")), (s("1/4"), s("3/4"))]).unwrap(),
        ])
    }

    #[test]
    fn middle_thirds_depth_two() {
        let got: Vec<Interval> = stage(&WordSpec::constant("F"), &table(), 2)
            .unwrap()
            .into_iter()
            .map(|b| b.interval)
            .collect();
        assert_eq!(
            got,
            vec![iv("0", "1/9"), iv("2/9", "1/3"), iv("2/3", "7/9"), iv("8/9", "1")]
        );
    }

    #[test]
    fn mixed_word_depth_two() {
        let word = WordSpec::periodic(vec![], labels("FG")).unwrap();
        let st = stage(&word, &table(), 2).unwrap();
        let got: Vec<Interval> = st.iter().map(|b| b.interval.clone()).collect();
        assert_eq!(
            got,
            vec![iv("0", "1/12"), iv("1/4", "1/3"), iv("2/3", "3/4"), iv("11/12", "1")]
        );
        assert_eq!(st[2].address.maps(), &[1, 0]);
        let g: Vec<(Interval, usize)> = gaps(&word, &table(), 2)
            .unwrap()
            .into_iter()
            .map(|g| (g.interval, g.birth_stage))
            .collect();
        assert_eq!(
            g,
            vec![(iv("1/12", "1/4"), 2), (iv("1/3", "2/3"), 1), (iv("3/4", "11/12"), 2)]
        );
    }

    #[test]
    fn depth_zero_is_domain() {
        let st = stage(&WordSpec::constant("G"), &table(), 0).unwrap();
        assert_eq!(st.len(), 1);
        assert_eq!(st[0].interval, Interval::unit());
        assert_eq!(st[0].address.depth(), 0);
    }

    #[test]
    fn middle_thirds_gaps() {
        let word = WordSpec::constant("F");
        let g1 = gaps(&word, &table(), 1).unwrap();
        assert_eq!(g1.len(), 1);
        assert_eq!(g1[0].interval, iv("1/3", "2/3"));
        assert_eq!((g1[0].birth_stage, g1[0].label), (1, 0));
        let g2 = gaps(&word, &table(), 2).unwrap();
        let births: Vec<usize> = g2.iter().map(|g| g.birth_stage).collect();
        assert_eq!(births, vec![2, 1, 2]);
        assert_eq!(g2[0].interval, iv("1/9", "2/9"));
        assert_eq!(g2[2].interval, iv("7/9", "8/9"));
        assert_eq!(g2[2].parent_address.maps(), &[1]);
    }

    #[test]
    fn caps_are_enforced() {
        let word = WordSpec::constant("F");
        assert!(matches!(
            stage(&word, &table(), 25),
            Err(Error::DepthCapExceeded { depth: 25, cap: 24 })
        ));
        let tight = StageOptions {
            depth_cap: 24,
            max_intervals: 100,
        };
        assert!(matches!(
            stage_with(&word, &table(), 7, &tight),
            Err(Error::TooManyIntervals { .. })
        ));
    }

    #[test]
    fn domain_mismatch() {
        let mut t = table();
        t.insert(
            IfsSpec::new(
                "H",
                iv("0", "2"),
                vec![crate::systems::MapKind::affine(s("1/3"), s("0"))],
            )
            .unwrap(),
        );
        let word = WordSpec::periodic(vec![], labels("FH")).unwrap();
        assert!(matches!(stage(&word, &t, 2), Err(Error::DomainMismatch)));
    }
}
