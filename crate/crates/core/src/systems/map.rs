use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Interval, IntervalMap, Scalar};

/// Coefficient form of a supported map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// `x -> slope * x + offset`
    Affine { slope: Scalar, offset: Scalar },
    /// `x -> c0 + c1 * x + c2 * x^2`
    Quadratic { c0: Scalar, c1: Scalar, c2: Scalar },
}

impl MapKind {
    pub fn affine(slope: Scalar, offset: Scalar) -> Self {
        MapKind::Affine { slope, offset }
    }

    pub fn quadratic(c0: Scalar, c1: Scalar, c2: Scalar) -> Self {
        MapKind::Quadratic { c0, c1, c2 }
    }

    fn from_coeffs(mut c: Vec<Scalar>) -> Result<MapKind> {
        while c.len() > 1 && c.last().is_some_and(Scalar::is_zero) {
            c.pop();
        }
        c.resize(c.len().max(2), Scalar::zero());
        match c.len() {
            2 => Ok(MapKind::Affine {
                offset: c[0].clone(),
                slope: c[1].clone(),
            }),
            3 => Ok(MapKind::Quadratic {
                c0: c[0].clone(),
                c1: c[1].clone(),
                c2: c[2].clone(),
            }),
            _ => Err(Error::UnsupportedComposition),
        }
    }

    /// Polynomial coefficients, lowest degree first.
    pub fn coeffs(&self) -> Vec<Scalar> {
        match self {
            MapKind::Affine { slope, offset } => vec![offset.clone(), slope.clone()],
            MapKind::Quadratic { c0, c1, c2 } => vec![c0.clone(), c1.clone(), c2.clone()],
        }
    }
}

fn poly_add(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        })
        .collect()
}

fn poly_mul(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// `p(q(x))`.
fn poly_compose(p: &[Scalar], q: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero()];
    for c in p.iter().rev() {
        out = poly_add(&poly_mul(&out, q), std::slice::from_ref(c));
    }
    out
}

/// A strictly monotone contracting candidate map on an interval domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapSpec {
    kind: MapKind,
    domain: Interval,
    #[serde(skip)]
    increasing: bool,
}

impl MapSpec {
    /// Checks strict monotonicity and that the domain maps into itself.
    /// Contraction is reported by validation, not enforced here.
    pub fn new(kind: MapKind, domain: Interval) -> Result<Self> {
        let m = MapSpec::unchecked(kind, domain)?;
        let image = crate::numerics::interval_image(&m, &m.domain)?;
        if !m.domain.contains_interval(&image) {
            return Err(Error::DomainViolation(format!(
                "image {image} escapes domain {}",
                m.domain
            )));
        }
        Ok(m)
    }

    /// Monotonicity checked, image containment not checked.
    fn unchecked(kind: MapKind, domain: Interval) -> Result<Self> {
        if let MapKind::Affine { slope, .. } = &kind {
            if slope.is_zero() {
                return Err(Error::ZeroSlope);
            }
        }
        let mut m = MapSpec {
            kind,
            domain,
            increasing: true,
        };
        // The derivative is affine in x, so its sign is constant on the
        // domain iff it has the same strict sign at both endpoints.
        let s_lo = m.derivative(m.domain.lo()).signum();
        let s_hi = m.derivative(m.domain.hi()).signum();
        if s_lo == 0 || s_lo != s_hi {
            return Err(Error::NotMonotone);
        }
        m.increasing = s_lo > 0;
        Ok(m)
    }

    pub fn affine(slope: Scalar, offset: Scalar, domain: Interval) -> Result<Self> {
        MapSpec::new(MapKind::Affine { slope, offset }, domain)
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn is_affine(&self) -> bool {
        matches!(self.kind, MapKind::Affine { .. })
    }

    pub fn derivative(&self, x: &Scalar) -> Scalar {
        match &self.kind {
            MapKind::Affine { slope, .. } => slope.clone(),
            MapKind::Quadratic { c1, c2, .. } => c1 + &(Scalar::from_integer(2) * c2 * x),
        }
    }

    /// `(inf |f'|, sup |f'|)` over the domain, in closed form.
    pub fn derivative_range(&self) -> (Scalar, Scalar) {
        let a = self.derivative(self.domain.lo()).abs();
        let b = self.derivative(self.domain.hi()).abs();
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn image(&self) -> Interval {
        crate::numerics::image_unchecked(self, &self.domain)
    }

    /// Same coefficients on a different domain.
    pub fn restrict(&self, domain: Interval) -> Result<MapSpec> {
        let m = MapSpec::unchecked(self.kind.clone(), domain)?;
        let image = m.image();
        if !m.domain.contains_interval(&image) {
            return Err(Error::RestrictionEscapesDomain {
                lo: m.domain.lo().to_string(),
                hi: m.domain.hi().to_string(),
            });
        }
        Ok(m)
    }

    /// `restrict` that tolerates the image overshooting by `slack`; used
    /// when the new domain endpoints are themselves approximations.
    pub(crate) fn restrict_with_slack(&self, domain: Interval, slack: &Scalar) -> Result<MapSpec> {
        let m = MapSpec::unchecked(self.kind.clone(), domain)?;
        let image = m.image();
        let lo_ok = image.lo() >= &(m.domain.lo() - slack);
        let hi_ok = image.hi() <= &(m.domain.hi() + slack);
        if !(lo_ok && hi_ok) {
            return Err(Error::RestrictionEscapesDomain {
                lo: m.domain.lo().to_string(),
                hi: m.domain.hi().to_string(),
            });
        }
        Ok(m)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MapSpec) -> Result<MapSpec> {
        let kind = MapKind::from_coeffs(poly_compose(&self.kind.coeffs(), &inner.kind.coeffs()))?;
        MapSpec::new(kind, inner.domain.clone())
    }

    /// `x -> 2c - f(x)`.
    pub fn pointwise_mirror(&self, center: &Scalar) -> Result<MapKind> {
        let two_c = Scalar::from_integer(2) * center;
        let mut c: Vec<Scalar> = self.kind.coeffs().iter().map(|x| -x).collect();
        c[0] = &c[0] + &two_c;
        MapKind::from_coeffs(c)
    }

    /// `x -> 2c - f(2c - x)`.
    pub fn conjugate_mirror(&self, center: &Scalar) -> Result<MapKind> {
        let two_c = Scalar::from_integer(2) * center;
        let reflect = vec![two_c.clone(), Scalar::from_integer(-1)];
        let mut c: Vec<Scalar> = poly_compose(&self.kind.coeffs(), &reflect)
            .iter()
            .map(|x| -x)
            .collect();
        c[0] = &c[0] + &two_c;
        MapKind::from_coeffs(c)
    }

    /// Conjugate by the affine change of variables `x -> a x + b`:
    /// returns `phi ∘ f ∘ phi^{-1}` on `phi(domain)`.
    pub(crate) fn conjugate_affine(&self, a: &Scalar, b: &Scalar, domain: Interval) -> Result<MapSpec> {
        // phi^{-1}(y) = (y - b) / a
        let inv = vec![-(b / a), Scalar::one() / a];
        let inner = poly_compose(&self.kind.coeffs(), &inv);
        let phi = vec![b.clone(), a.clone()];
        let kind = MapKind::from_coeffs(poly_compose(&phi, &inner))?;
        MapSpec::new(kind, domain)
    }
}

impl IntervalMap for MapSpec {
    fn domain(&self) -> &Interval {
        &self.domain
    }

    fn eval(&self, x: &Scalar) -> Scalar {
        match &self.kind {
            MapKind::Affine { slope, offset } => slope * x + offset,
            MapKind::Quadratic { c0, c1, c2 } => c0 + &(x * &(c1 + &(c2 * x))),
        }
    }

    fn is_increasing(&self) -> bool {
        self.increasing
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::interval_image;

    fn s(x: &str) -> Scalar {
        Scalar::parse(x).unwrap()
    }

    fn aff(slope: &str, offset: &str) -> MapSpec {
        MapSpec::affine(s(slope), s(offset), Interval::unit()).unwrap()
    }

    #[test]
    fn image_examples() {
        let unit = Interval::unit();
        assert_eq!(
            interval_image(&aff("1/3", "0"), &unit).unwrap(),
            Interval::new(s("0"), s("1/3")).unwrap()
        );
        assert_eq!(
            interval_image(&aff("1/3", "2/3"), &unit).unwrap(),
            Interval::new(s("2/3"), s("1")).unwrap()
        );
        let dec = aff("-0.25", "1");
        assert!(!dec.is_increasing());
        assert_eq!(
            interval_image(&dec, &unit).unwrap(),
            Interval::new(s("0.75"), s("1")).unwrap()
        );
    }

    #[test]
    fn image_outside_domain_is_rejected() {
        let m = aff("1/3", "0");
        let wide = Interval::new(s("-1"), s("1")).unwrap();
        assert!(matches!(interval_image(&m, &wide), Err(Error::DomainViolation(_))));
    }

    #[test]
    fn construction_checks() {
        assert!(matches!(
            MapSpec::affine(s("0"), s("0.5"), Interval::unit()),
            Err(Error::ZeroSlope)
        ));
        assert!(MapSpec::affine(s("1/2"), s("3/4"), Interval::unit()).is_err());
        // derivative 1 - 2x changes sign on [0, 1]
        let q = MapKind::quadratic(s("0"), s("1"), s("-1"));
        assert!(matches!(MapSpec::new(q, Interval::unit()), Err(Error::NotMonotone)));
    }

    #[test]
    fn quadratic_derivative_range() {
        // 0.3x + 0.02x(1-x) = 0.32x - 0.02x^2
        let q = MapSpec::new(MapKind::quadratic(s("0"), s("0.32"), s("-0.02")), Interval::unit()).unwrap();
        let (lo, hi) = q.derivative_range();
        assert_eq!(lo, s("0.28"));
        assert_eq!(hi, s("0.32"));
        assert_eq!(q.derivative(&s("0")), s("0.32"));
    }

    #[test]
    fn mirrors() {
        let half = s("1/2");
        let f = aff("0.3", "0.1");
        assert_eq!(f.pointwise_mirror(&half).unwrap(), MapKind::affine(s("-0.3"), s("0.9")));
        assert_eq!(f.conjugate_mirror(&half).unwrap(), MapKind::affine(s("0.3"), s("0.6")));
        let q = MapSpec::new(MapKind::quadratic(s("0"), s("0.32"), s("-0.02")), Interval::unit()).unwrap();
        let qbar = MapSpec::new(q.conjugate_mirror(&half).unwrap(), Interval::unit()).unwrap();
        for x in ["0", "0.2", "0.5", "1"] {
            let x = s(x);
            let lhs = qbar.eval(&x);
            let rhs = Scalar::one() - q.eval(&(Scalar::one() - &x));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn composition_of_decreasing_maps() {
        let f = aff("-0.25", "1");
        let ff = f.compose(&f).unwrap();
        assert_eq!(ff.kind(), &MapKind::affine(s("0.0625"), s("0.75")));
        assert!(ff.is_increasing());
    }

    #[test]
    fn quadratic_squared_is_unsupported() {
        let q = MapSpec::new(MapKind::quadratic(s("0"), s("0.32"), s("-0.02")), Interval::unit()).unwrap();
        assert!(matches!(q.compose(&q), Err(Error::UnsupportedComposition)));
        // quadratic after affine stays quadratic
        assert!(q.compose(&aff("1/2", "0")).is_ok());
    }
}
