//! Scalar arithmetic policy and interval primitives.

mod interval;
mod scalar;

pub use interval::{hull, pairwise_disjoint, Interval};
pub use scalar::{Arithmetic, Scalar, DEFAULT_PRECISION, MIN_PRECISION};

use crate::error::{Error, Result};

/// A strictly monotone self-map of an interval that can be evaluated on
/// scalars.
pub trait IntervalMap {
    fn domain(&self) -> &Interval;
    fn eval(&self, x: &Scalar) -> Scalar;
    fn is_increasing(&self) -> bool;
}

/// Image hull `[min(m(lo), m(hi)), max(m(lo), m(hi))]` of `iv` under `m`.
pub fn interval_image<M: IntervalMap + ?Sized>(m: &M, iv: &Interval) -> Result<Interval> {
    if !m.domain().contains_interval(iv) {
        return Err(Error::DomainViolation(format!(
            "{iv} is not inside the map domain {}",
            m.domain()
        )));
    }
    Ok(image_unchecked(m, iv))
}

/// Image of a monotone map without the domain check. Callers guarantee the
/// interval lies in the domain.
pub(crate) fn image_unchecked<M: IntervalMap + ?Sized>(m: &M, iv: &Interval) -> Interval {
    let a = m.eval(iv.lo());
    let b = m.eval(iv.hi());
    let (lo, hi) = if m.is_increasing() { (a, b) } else { (b, a) };
    Interval::new(lo, hi).expect("strictly monotone map preserves positive length")
}

/// Serialize an `f64` as its shortest round-trip decimal string.
pub(crate) fn f64_string<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

pub(crate) fn opt_f64_string<S: serde::Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}
