use std::fmt;

use serde::{Deserialize, Serialize};

use super::Scalar;
use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with `lo < hi`. Gaps reuse the same type for
/// the open interval `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    lo: Scalar,
    hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self> {
        if lo < hi {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::DegenerateInterval {
                lo: lo.to_string(),
                hi: hi.to_string(),
            })
        }
    }

    /// Interval from two endpoints in either order.
    pub fn spanning(a: Scalar, b: Scalar) -> Result<Self> {
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    pub fn unit() -> Self {
        Interval {
            lo: Scalar::zero(),
            hi: Scalar::one(),
        }
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    pub fn length(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn center(&self) -> Scalar {
        (&self.lo + &self.hi) / Scalar::from_integer(2)
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Closed-interval intersection test: shared endpoints intersect.
    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Distance between two intervals (zero when they intersect).
    pub fn distance(&self, other: &Interval) -> Scalar {
        if self.hi < other.lo {
            &other.lo - &self.hi
        } else if other.hi < self.lo {
            &self.lo - &other.hi
        } else {
            Scalar::zero()
        }
    }

    pub fn approx_eq(&self, other: &Interval, slack: f64) -> bool {
        self.lo.approx_eq(&other.lo, slack) && self.hi.approx_eq(&other.hi, slack)
    }

    pub fn error_bound(&self) -> f64 {
        self.lo.error_bound().max(self.hi.error_bound())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lo: Scalar,
            hi: Scalar,
        }
        let raw = Raw::deserialize(d)?;
        Interval::new(raw.lo, raw.hi).map_err(serde::de::Error::custom)
    }
}

/// `[min lo, max hi]` over a nonempty list.
pub fn hull(intervals: &[Interval]) -> Result<Interval> {
    let first = intervals.first().ok_or(Error::EmptyInput("hull of no intervals"))?;
    let mut lo = first.lo.clone();
    let mut hi = first.hi.clone();
    for iv in &intervals[1..] {
        if iv.lo < lo {
            lo = iv.lo.clone();
        }
        if iv.hi > hi {
            hi = iv.hi.clone();
        }
    }
    Ok(Interval { lo, hi })
}

/// True iff no two intervals intersect as closed sets.
pub fn pairwise_disjoint(intervals: &[Interval]) -> bool {
    let mut sorted: Vec<&Interval> = intervals.iter().collect();
    sorted.sort_by(|a, b| a.lo.cmp(&b.lo));
    sorted.windows(2).all(|w| w[0].hi < w[1].lo)
}
