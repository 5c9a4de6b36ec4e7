#![allow(dead_code)]

use ifs_core::numerics::{Interval, Scalar};
use ifs_core::systems::{IfsSpec, MapKind};
use ifs_core::words::{Label, WordSpec};
use rand::Rng;

pub fn s(x: &str) -> Scalar {
    Scalar::parse(x).unwrap()
}

pub fn affine(name: &str, maps: &[(&str, &str)]) -> IfsSpec {
    let maps: Vec<(Scalar, Scalar)> = maps.iter().map(|(a, b)| (s(a), s(b))).collect();
    IfsSpec::affine_unit(name, &maps).unwrap()
}

/// Random affine system on `[0, 1]` whose outermost images touch both ends.
/// Image lengths and gaps are small integers over a common denominator;
/// each map's orientation is random.
pub fn random_endpoint_preserving<R: Rng>(rng: &mut R, name: &str, k: usize) -> IfsSpec {
    let lens: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=6)).collect();
    let gaps: Vec<i64> = (0..k - 1).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = lens.iter().sum::<i64>() + gaps.iter().sum::<i64>();
    let mut left = 0;
    let mut kinds = Vec::with_capacity(k);
    for (i, &len) in lens.iter().enumerate() {
        let r = Scalar::ratio(len, total);
        let lo = Scalar::ratio(left, total);
        let kind = if rng.gen_bool(0.5) {
            MapKind::affine(r, lo)
        } else {
            let hi = &lo + &r;
            MapKind::affine(-r, hi)
        };
        kinds.push(kind);
        left += len + gaps.get(i).copied().unwrap_or(0);
    }
    IfsSpec::new(name, Interval::unit(), kinds).unwrap()
}

pub fn random_labels<R: Rng>(rng: &mut R, alphabet: &[&str], n: usize) -> Vec<Label> {
    (0..n)
        .map(|_| Label::new(alphabet[rng.gen_range(0..alphabet.len())]))
        .collect()
}

pub fn random_periodic_word<R: Rng>(rng: &mut R, alphabet: &[&str], max_pre: usize, max_period: usize) -> WordSpec {
    let pre = rng.gen_range(0..=max_pre);
    let per = rng.gen_range(1..=max_period);
    WordSpec::periodic(random_labels(rng, alphabet, pre), random_labels(rng, alphabet, per)).unwrap()
}

/// `common`, then `head`, then a short random preperiod and period.
pub fn word_after<R: Rng>(rng: &mut R, common: &[Label], head: &str, alphabet: &[&str]) -> WordSpec {
    let mut pre = common.to_vec();
    pre.push(Label::new(head));
    let extra = rng.gen_range(0..3);
    pre.extend(random_labels(rng, alphabet, extra));
    let per = rng.gen_range(1..=3);
    let period = random_labels(rng, alphabet, per);
    WordSpec::periodic(pre, period).unwrap()
}
