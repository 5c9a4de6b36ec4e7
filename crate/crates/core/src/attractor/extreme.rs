use std::collections::HashMap;

use serde::Serialize;

use super::{gaps, GapRecord};
use crate::error::{Error, Result};
use crate::numerics::{image_unchecked, Arithmetic, Interval, IntervalMap, Scalar};
use crate::systems::{IfsSpec, MapKind, MapSpec, SystemTable};
use crate::words::{Label, WordSpec};

/// Maximum number of branch steps `extreme_point` takes before giving up.
/// Only one branch is followed, so the cost is linear in the step count.
pub const EXTREME_ITERATION_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Min,
    Max,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Min => Side::Max,
            Side::Max => Side::Min,
        }
    }
}

fn extremal_map(sys: &IfsSpec, side: Side) -> &MapSpec {
    let i = match side {
        Side::Min => sys.leftmost_map(),
        Side::Max => sys.rightmost_map(),
    };
    &sys.maps()[i]
}

/// `min C(W)` or `max C(W)`.
///
/// At each stage the outermost image on the requested side is followed; a
/// decreasing map swaps the side for the remaining tail. Eventually periodic
/// words whose followed maps are all affine get the exact fixed point of the
/// repeating block. Otherwise the branch is followed until the enclosing
/// basic interval is shorter than `tol`.
pub fn extreme_point(word: &WordSpec, systems: &SystemTable, side: Side, tol: &Scalar) -> Result<Scalar> {
    if let Some((pre, period)) = word.periodic_structure() {
        if let Some(x) = periodic_extreme(&pre, &period, systems, side)? {
            return Ok(x);
        }
    }

    let first = systems.get(&word.label_at(1)?)?;
    let domain = first.domain().clone();
    let target = tol.to_f64().ln();
    let mut log_len = domain.length().to_f64().ln();
    let mut chain: Vec<&MapSpec> = Vec::new();
    let mut arith = Arithmetic::Exact;
    let mut current = side;
    while log_len.partial_cmp(&target) != Some(std::cmp::Ordering::Less) {
        if chain.len() >= EXTREME_ITERATION_CAP {
            return Err(Error::NonConvergence(EXTREME_ITERATION_CAP));
        }
        let sys = systems.get(&word.label_at(chain.len() + 1)?)?;
        if sys.domain() != &domain {
            return Err(Error::DomainMismatch);
        }
        arith = arith.combine(sys.arithmetic());
        let m = extremal_map(sys, current);
        log_len += m.derivative_range().1.to_f64().ln();
        if !m.is_increasing() {
            current = current.flip();
        }
        chain.push(m);
    }
    let seed = match current {
        Side::Min => domain.lo(),
        Side::Max => domain.hi(),
    };
    let mut x = arith.lift(seed);
    for m in chain.iter().rev() {
        x = m.eval(&x);
    }
    Ok(x)
}

fn periodic_extreme(
    pre: &[Label],
    period: &[Label],
    systems: &SystemTable,
    side: Side,
) -> Result<Option<Scalar>> {
    let mut seen: HashMap<(usize, Side), usize> = HashMap::new();
    let mut coeffs: Vec<(Scalar, Scalar)> = Vec::new();
    let mut current = side;
    let mut j = 0;
    let cycle_start = loop {
        let label = if j < pre.len() {
            &pre[j]
        } else {
            let phase = (j - pre.len()) % period.len();
            if let Some(&start) = seen.get(&(phase, current)) {
                break start;
            }
            seen.insert((phase, current), j);
            &period[phase]
        };
        let m = extremal_map(systems.get(label)?, current);
        match m.kind() {
            MapKind::Affine { slope, offset } => coeffs.push((slope.clone(), offset.clone())),
            MapKind::Quadratic { .. } => return Ok(None),
        }
        if !m.is_increasing() {
            current = current.flip();
        }
        j += 1;
    };
    // repeating block x -> a x + b, innermost map applied first
    let (mut a, mut b) = (Scalar::one(), Scalar::zero());
    for (s, o) in coeffs[cycle_start..].iter().rev() {
        a = s * &a;
        b = s * &b + o;
    }
    let mut x = b / (Scalar::one() - a);
    for (s, o) in coeffs[..cycle_start].iter().rev() {
        x = s * &x + o;
    }
    Ok(Some(x))
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitGap {
    pub ell: usize,
    pub interval: Interval,
    /// The matching gap of `C_{ell+1}`, if found.
    pub record: Option<GapRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapOrbit {
    /// `h_1'` at the fixed left endpoint.
    pub gamma: Scalar,
    pub gaps: Vec<OrbitGap>,
}

impl GapOrbit {
    pub fn all_verified(&self) -> bool {
        self.gaps.iter().all(|g| g.record.is_some())
    }
}

/// `h^l(A)` for `l = 0..=ell_max`, where `h` fixes the left endpoint and `A`
/// is a stage-1 gap; each element is matched against the gaps of
/// `C_{l+1}(sys)`.
pub fn self_similar_gap_orbit(
    sys: &IfsSpec,
    fixed_map_index: usize,
    gap_label: usize,
    ell_max: usize,
) -> Result<GapOrbit> {
    let h = sys
        .maps()
        .get(fixed_map_index)
        .ok_or_else(|| Error::InvalidAddress(format!("map {fixed_map_index} of {}", sys.name())))?;
    let lo = sys.domain().lo();
    if &h.eval(lo) != lo {
        return Err(Error::NotFixing(fixed_map_index));
    }
    let stage1 = sys.stage1_gaps();
    let a = stage1
        .get(gap_label)
        .ok_or(Error::InvalidGapLabel(gap_label))?;
    let arith = sys.arithmetic();
    let table = sys.as_table();
    let word = WordSpec::constant(sys.name().clone());

    let mut current = Interval::new(arith.lift(a.interval.lo()), arith.lift(a.interval.hi()))?;
    let mut out = Vec::with_capacity(ell_max + 1);
    for ell in 0..=ell_max {
        let record = gaps(&word, &table, ell + 1)?
            .into_iter()
            .find(|g| g.same_gap(&current));
        out.push(OrbitGap {
            ell,
            interval: current.clone(),
            record,
        });
        current = image_unchecked(h, &current);
    }
    Ok(GapOrbit {
        gamma: h.derivative(lo),
        gaps: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::labels;

    fn s(x: &str) -> Scalar {
        Scalar::parse(x).unwrap()
    }

    fn sys(name: &str, maps: &[(&str, &str)]) -> IfsSpec {
        let maps: Vec<(Scalar, Scalar)> = maps.iter().map(|(a, b)| (s(a), s(b))).collect();
        IfsSpec::affine_unit(name, &maps).unwrap()
    }

    fn tol() -> Scalar {
        s("1e-12")
    }

    #[test]
    fn pointwise_pair_extremes() {
        let f = sys("F", &[("0.3", "0.1"), ("-0.3", "0.9")]);
        let w = WordSpec::constant("F");
        assert_eq!(extreme_point(&w, &f.as_table(), Side::Min, &tol()).unwrap(), s("1/7"));
        assert_eq!(extreme_point(&w, &f.as_table(), Side::Max, &tol()).unwrap(), s("6/7"));
    }

    #[test]
    fn fixed_endpoints() {
        let f = sys("F", &[("1/3", "0"), ("1/3", "2/3")]);
        let w = WordSpec::constant("F");
        assert_eq!(extreme_point(&w, &f.as_table(), Side::Min, &tol()).unwrap(), s("0"));
        assert_eq!(extreme_point(&w, &f.as_table(), Side::Max, &tol()).unwrap(), s("1"));
        let g = sys("G", &[("0.25", "0"), ("-0.25", "1")]);
        let w = WordSpec::constant("G");
        assert_eq!(extreme_point(&w, &g.as_table(), Side::Min, &tol()).unwrap(), s("0"));
    }

    #[test]
    fn periodic_route_matches_iteration() {
        let t = SystemTable::from_systems([
            sys("F", &[("0.3", "0.1"), ("0.3", "0.6")]),
            sys("G", &[("-0.25", "0.3"), ("0.25", "0.75")]),
        ]);
        let w = WordSpec::periodic(labels("G"), labels("FGG")).unwrap();
        for side in [Side::Min, Side::Max] {
            let exact = extreme_point(&w, &t, side, &tol()).unwrap();
            // same word, but not recognizable as periodic
            let prefix = w.prefix(60).unwrap();
            let explicit = WordSpec::explicit(prefix, "F");
            let explicit_val = extreme_point(&explicit, &t, side, &tol()).unwrap();
            assert!((exact.to_f64() - explicit_val.to_f64()).abs() < 1e-12);
            let brute = stage_extreme(&w, &t, 14, side);
            assert!((exact.to_f64() - brute).abs() < 1e-7);
        }
    }

    fn stage_extreme(w: &WordSpec, t: &SystemTable, n: usize, side: Side) -> f64 {
        let st = crate::attractor::stage(w, t, n).unwrap();
        let it = st.iter();
        match side {
            Side::Min => it.map(|b| b.interval.lo().to_f64()).fold(f64::INFINITY, f64::min),
            Side::Max => it.map(|b| b.interval.hi().to_f64()).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    #[test]
    fn quadratic_uses_iteration() {
        let q = IfsSpec::new(
            "Q",
            Interval::unit(),
            vec![
                MapKind::quadratic(s("0.1"), s("0.32"), s("-0.02")),
                MapKind::affine(s("0.3"), s("0.6")),
            ],
        )
        .unwrap();
        let w = WordSpec::constant("Q");
        let x = extreme_point(&w, &q.as_table(), Side::Min, &tol()).unwrap();
        // fixed point of 0.1 + 0.32x - 0.02x^2
        let fx = 0.1 + 0.32 * x.to_f64() - 0.02 * x.to_f64().powi(2);
        assert!((fx - x.to_f64()).abs() < 1e-11);
        assert!(!x.is_exact());
    }

    #[test]
    fn zero_tolerance_does_not_converge() {
        let q = IfsSpec::new(
            "Q",
            Interval::unit(),
            vec![MapKind::quadratic(s("0"), s("0.32"), s("-0.02"))],
        )
        .unwrap();
        let w = WordSpec::constant("Q");
        assert!(matches!(
            extreme_point(&w, &q.as_table(), Side::Min, &s("0")),
            Err(Error::NonConvergence(_))
        ));
    }

    #[test]
    fn middle_thirds_orbit() {
        let f = sys("F", &[("1/3", "0"), ("1/3", "2/3")]);
        let orbit = self_similar_gap_orbit(&f, 0, 0, 3).unwrap();
        assert_eq!(orbit.gamma, s("1/3"));
        let got: Vec<Interval> = orbit.gaps.iter().map(|g| g.interval.clone()).collect();
        let want: Vec<Interval> = [("1/3", "2/3"), ("1/9", "2/9"), ("1/27", "2/27"), ("1/81", "2/81")]
            .iter()
            .map(|(a, b)| Interval::new(s(a), s(b)).unwrap())
            .collect();
        assert_eq!(got, want);
        assert!(orbit.all_verified());
    }

    #[test]
    fn quarter_orbit() {
        let g = sys("G", &[("0.25", "0"), ("-0.25", "1")]);
        let orbit = self_similar_gap_orbit(&g, 0, 0, 2).unwrap();
        assert_eq!(orbit.gamma, s("0.25"));
        assert_eq!(
            orbit.gaps[2].interval,
            Interval::new(s("0.015625"), s("0.046875")).unwrap()
        );
        assert!(orbit.all_verified());
    }

    #[test]
    fn quadratic_orbit_gamma() {
        let h = MapKind::quadratic(s("0"), s("0.32"), s("-0.02"));
        let q = IfsSpec::new("Q", Interval::unit(), vec![h.clone()]).unwrap();
        let mirror = q.maps()[0].conjugate_mirror(&s("1/2")).unwrap();
        let q = IfsSpec::new("Q", Interval::unit(), vec![h, mirror]).unwrap();
        let orbit = self_similar_gap_orbit(&q, 0, 0, 3).unwrap();
        assert_eq!(orbit.gamma, s("0.32"));
        assert!(orbit.all_verified());
    }

    #[test]
    fn orbit_errors() {
        let f = sys("F", &[("0.3", "0.1"), ("0.3", "0.6")]);
        assert!(matches!(self_similar_gap_orbit(&f, 0, 0, 2), Err(Error::NotFixing(0))));
        let g = sys("G", &[("0.25", "0"), ("0.25", "0.75")]);
        assert!(matches!(self_similar_gap_orbit(&g, 0, 3, 2), Err(Error::InvalidGapLabel(3))));
    }
}
