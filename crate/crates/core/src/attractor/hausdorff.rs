use crate::numerics::{Interval, Scalar};

/// Hausdorff distance between two finite unions of closed intervals.
pub fn hausdorff_distance(a: &[Interval], b: &[Interval]) -> Scalar {
    let a = merged(a);
    let b = merged(b);
    directed(&a, &b).max(directed(&b, &a))
}

fn merged(list: &[Interval]) -> Vec<(Scalar, Scalar)> {
    let mut sorted: Vec<&Interval> = list.iter().collect();
    sorted.sort_by(|x, y| x.lo().cmp(y.lo()));
    let mut out: Vec<(Scalar, Scalar)> = Vec::new();
    for iv in sorted {
        match out.last_mut() {
            Some(last) if iv.lo() <= &last.1 => {
                if iv.hi() > &last.1 {
                    last.1 = iv.hi().clone();
                }
            }
            _ => out.push((iv.lo().clone(), iv.hi().clone())),
        }
    }
    out
}

fn dist_to(x: &Scalar, set: &[(Scalar, Scalar)]) -> Scalar {
    // first component with hi >= x
    let i = set.partition_point(|(_, hi)| hi < x);
    let mut best: Option<Scalar> = None;
    if let Some((lo, _)) = set.get(i) {
        best = Some(if lo <= x { Scalar::zero() } else { lo - x });
    }
    if i > 0 {
        let d = x - &set[i - 1].1;
        best = Some(match best {
            Some(b) => b.min(d),
            None => d,
        });
    }
    best.expect("nonempty set")
}

/// `sup_{x in a} dist(x, b)`; the supremum sits at an endpoint of `a` or at
/// the midpoint of a gap of `b` lying inside `a`.
fn directed(a: &[(Scalar, Scalar)], b: &[(Scalar, Scalar)]) -> Scalar {
    if a.is_empty() || b.is_empty() {
        return Scalar::zero();
    }
    let two = Scalar::from_integer(2);
    let mut candidates: Vec<Scalar> = a.iter().flat_map(|(lo, hi)| [lo.clone(), hi.clone()]).collect();
    for w in b.windows(2) {
        let mid = &(&w[0].1 + &w[1].0) / &two;
        let j = a.partition_point(|(_, hi)| hi < &mid);
        if a.get(j).is_some_and(|(lo, _)| lo <= &mid) {
            candidates.push(mid);
        }
    }
    candidates
        .iter()
        .map(|x| dist_to(x, b))
        .max()
        .unwrap_or_else(Scalar::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: i64, b: i64, d: i64) -> Interval {
        Interval::new(Scalar::ratio(a, d), Scalar::ratio(b, d)).unwrap()
    }

    #[test]
    fn identical_sets() {
        let a = vec![iv(0, 1, 3), iv(2, 3, 3)];
        assert!(hausdorff_distance(&a, &a).is_zero());
    }

    #[test]
    fn gap_midpoint_dominates() {
        // [0,1] against [0,1/3] ∪ [2/3,1]: the point 1/2 is 1/6 away
        let a = vec![iv(0, 1, 1)];
        let b = vec![iv(0, 1, 3), iv(2, 3, 3)];
        assert_eq!(hausdorff_distance(&a, &b), Scalar::ratio(1, 6));
        assert_eq!(hausdorff_distance(&b, &a), Scalar::ratio(1, 6));
    }

    #[test]
    fn disjoint_hulls() {
        let a = vec![iv(0, 1, 10)];
        let b = vec![iv(5, 6, 10)];
        assert_eq!(hausdorff_distance(&a, &b), Scalar::ratio(1, 2));
    }
}
