use rayon::prelude::*;
use serde::Serialize;

use super::stage::stage_systems;
use super::Address;
use crate::error::{Error, Result};
use crate::numerics::{Arithmetic, Interval, IntervalMap, Scalar};
use crate::systems::{IfsSpec, MapSpec, SystemTable};
use crate::words::WordSpec;

pub const DEFAULT_GRID: usize = 257;

/// `T(y) = scale * y + shift`, carrying a basic interval onto the domain
/// with positive orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Normalizer {
    pub scale: Scalar,
    pub shift: Scalar,
    /// Sign of `scale`: -1 when the composed maps reverse orientation.
    pub orientation: i32,
}

impl Normalizer {
    pub fn apply(&self, y: &Scalar) -> Scalar {
        &self.scale * y + &self.shift
    }
}

/// `Phi_w = T_w ∘ w_1 ∘ ... ∘ w_k`.
#[derive(Clone, Debug)]
pub struct RenormalizedMap {
    address: Address,
    chain: Vec<MapSpec>,
    normalizer: Normalizer,
    basic: Interval,
    domain: Interval,
    arithmetic: Arithmetic,
}

impl RenormalizedMap {
    pub fn address(&self) -> &Address {
        &self.address
    }

    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    /// `B_w = w_1 ∘ ... ∘ w_k(I)`.
    pub fn basic_interval(&self) -> &Interval {
        &self.basic
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn arithmetic(&self) -> Arithmetic {
        self.arithmetic
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut y = self.arithmetic.lift(x);
        for m in self.chain.iter().rev() {
            y = m.eval(&y);
        }
        self.normalizer.apply(&y)
    }

    /// `Phi'(x)` by the chain rule.
    pub fn derivative(&self, x: &Scalar) -> Scalar {
        let mut y = self.arithmetic.lift(x);
        let mut d = self.normalizer.scale.clone();
        for m in self.chain.iter().rev() {
            d = d * m.derivative(&y);
            y = m.eval(&y);
        }
        d
    }
}

pub fn renormalized_map(word: &WordSpec, systems: &SystemTable, address: &Address) -> Result<RenormalizedMap> {
    let k = address.depth();
    let (used, domain) = stage_systems(word, systems, k)?;
    let mut chain = Vec::with_capacity(k);
    let mut arithmetic = Arithmetic::Exact;
    for (j, (sys, &i)) in used.iter().zip(address.maps()).enumerate() {
        let m = sys.maps().get(i).ok_or_else(|| {
            Error::InvalidAddress(format!(
                "stage {} uses {} with {} maps, index {i}",
                j + 1,
                sys.name(),
                sys.len()
            ))
        })?;
        arithmetic = arithmetic.combine(sys.arithmetic());
        chain.push(m.clone());
    }

    let through = |x: &Scalar| {
        let mut y = arithmetic.lift(x);
        for m in chain.iter().rev() {
            y = m.eval(&y);
        }
        y
    };
    let at_lo = through(domain.lo());
    let at_hi = through(domain.hi());
    let increasing = at_lo < at_hi;
    let basic = Interval::spanning(at_lo, at_hi)?;
    let ratio = domain.length() / basic.length();
    let normalizer = if increasing {
        Normalizer {
            shift: domain.lo() - &(basic.lo() * &ratio),
            scale: ratio,
            orientation: 1,
        }
    } else {
        Normalizer {
            shift: domain.lo() + &(basic.hi() * &ratio),
            scale: -ratio,
            orientation: -1,
        }
    };
    Ok(RenormalizedMap {
        address: address.clone(),
        chain,
        normalizer,
        basic,
        domain,
        arithmetic,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sample {
    pub x: Scalar,
    pub phi: Scalar,
    pub dphi: Scalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct RenormalizationProbe {
    pub address: Address,
    pub normalizer: Normalizer,
    pub arithmetic: Arithmetic,
    pub samples: Vec<Sample>,
    /// `sup log Phi' - inf log Phi'` over the samples.
    #[serde(serialize_with = "crate::numerics::f64_string")]
    pub distortion: f64,
}

impl RenormalizationProbe {
    pub fn is_identity(&self) -> bool {
        self.samples.iter().all(|s| s.phi == s.x)
    }
}

/// `sup log v - inf log v` for positive `v`, computed as `ln(1 + (max-min)/min)`.
pub(crate) fn log_oscillation(values: &[Scalar]) -> f64 {
    let (Some(min), Some(max)) = (values.iter().min(), values.iter().max()) else {
        return 0.0;
    };
    if min == max {
        return 0.0;
    }
    ((max - min) / min).to_f64().ln_1p()
}

/// Uniform grid of `n >= 2` points including both endpoints.
pub(crate) fn uniform_grid(domain: &Interval, n: usize) -> Vec<Scalar> {
    let step = domain.length() / Scalar::from_integer(n as i64 - 1);
    (0..n)
        .map(|i| domain.lo() + &(&step * &Scalar::from_integer(i as i64)))
        .collect()
}

pub fn renormalize(
    word: &WordSpec,
    systems: &SystemTable,
    address: &Address,
    grid: usize,
) -> Result<RenormalizationProbe> {
    if grid < 2 {
        return Err(Error::EmptyInput("renormalization grid needs at least two points"));
    }
    let map = renormalized_map(word, systems, address)?;
    let samples: Vec<Sample> = uniform_grid(map.domain(), grid)
        .into_par_iter()
        .map(|x| Sample {
            phi: map.eval(&x),
            dphi: map.derivative(&x),
            x,
        })
        .collect();
    let derivs: Vec<Scalar> = samples.iter().map(|s| s.dphi.clone()).collect();
    Ok(RenormalizationProbe {
        address: address.clone(),
        normalizer: map.normalizer.clone(),
        arithmetic: map.arithmetic,
        distortion: log_oscillation(&derivs),
        samples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub depth: usize,
    /// Distortion of `Phi_n` itself.
    #[serde(serialize_with = "crate::numerics::f64_string")]
    pub distortion: f64,
    /// Distortion of `Phi_n ∘ Phi_{n-1}^{-1}`, the renormalized map added at
    /// depth `n`; equals `distortion` at depth 1.
    #[serde(serialize_with = "crate::numerics::f64_string")]
    pub step_distortion: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistortionDecay {
    pub system: crate::words::Label,
    pub branches: Vec<usize>,
    pub rows: Vec<DecayRow>,
}

/// Distortion along `Phi_n = T_n ∘ h_{b_n} ∘ ... ∘ h_{b_1}`, each new map
/// composed on the outside.
pub fn distortion_decay(sys: &IfsSpec, branches: &[usize], grid: usize) -> Result<DistortionDecay> {
    let table = sys.as_table();
    let word = WordSpec::constant(sys.name().clone());
    let mut rows = Vec::with_capacity(branches.len());
    let mut previous: Option<Vec<Scalar>> = None;
    for n in 1..=branches.len() {
        let address = Address::new(branches[..n].iter().rev().copied().collect());
        let probe = renormalize(&word, &table, &address, grid)?;
        let derivs: Vec<Scalar> = probe.samples.iter().map(|s| s.dphi.clone()).collect();
        let step = match &previous {
            None => probe.distortion,
            Some(prev) => {
                let ratios: Vec<Scalar> = derivs.iter().zip(prev).map(|(d, p)| d / p).collect();
                log_oscillation(&ratios)
            }
        };
        rows.push(DecayRow {
            depth: n,
            distortion: probe.distortion,
            step_distortion: step,
        });
        previous = Some(derivs);
    }
    Ok(DistortionDecay {
        system: sys.name().clone(),
        branches: branches.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::MapKind;

    fn s(x: &str) -> Scalar {
        Scalar::parse(x).unwrap()
    }

    fn quadratic_system() -> IfsSpec {
        let h = MapKind::quadratic(s("0"), s("0.32"), s("-0.02"));
        let q = IfsSpec::new("Q", Interval::unit(), vec![h.clone()]).unwrap();
        let mirror = q.maps()[0].conjugate_mirror(&s("1/2")).unwrap();
        IfsSpec::new("Q", Interval::unit(), vec![h, mirror]).unwrap()
    }

    #[test]
    fn affine_probe_is_identity() {
        let g = IfsSpec::affine_unit("G", &[(s("1/4"), s("0")), (s("-1/4"), s("1"))]).unwrap();
        let probe = renormalize(
            &WordSpec::constant("G"),
            &g.as_table(),
            &Address::new(vec![1, 0, 1]),
            DEFAULT_GRID,
        )
        .unwrap();
        assert_eq!(probe.samples.len(), 257);
        assert!(probe.is_identity());
        assert_eq!(probe.distortion, 0.0);
        assert_eq!(probe.normalizer.orientation, 1);
    }

    #[test]
    fn reversed_orientation_is_normalized() {
        let g = IfsSpec::affine_unit("G", &[(s("1/4"), s("0")), (s("-1/4"), s("1"))]).unwrap();
        let map = renormalized_map(&WordSpec::constant("G"), &g.as_table(), &Address::new(vec![1])).unwrap();
        assert_eq!(map.normalizer().orientation, -1);
        assert_eq!(map.eval(&s("0")), s("0"));
        assert_eq!(map.eval(&s("1")), s("1"));
    }

    #[test]
    fn invalid_address() {
        let g = IfsSpec::affine_unit("G", &[(s("1/4"), s("0")), (s("1/4"), s("3/4"))]).unwrap();
        let r = renormalize(&WordSpec::constant("G"), &g.as_table(), &Address::new(vec![0, 2]), 5);
        assert!(matches!(r, Err(Error::InvalidAddress(_))));
    }

    #[test]
    fn quadratic_probe_fixes_endpoints() {
        let q = quadratic_system();
        let probe = renormalize(&WordSpec::constant("Q"), &q.as_table(), &Address::new(vec![0, 1, 1]), 33).unwrap();
        let first = &probe.samples[0];
        let last = probe.samples.last().unwrap();
        assert!((first.phi.to_f64() - 0.0).abs() < 1e-30);
        assert!((last.phi.to_f64() - 1.0).abs() < 1e-30);
        assert!(probe.samples.iter().all(|s| s.dphi.is_positive()));
        assert!(probe.distortion > 0.0);
    }

    #[test]
    fn step_distortion_shrinks() {
        let q = quadratic_system();
        let decay = distortion_decay(&q, &[0; 8], 65).unwrap();
        for w in decay.rows[1..].windows(2) {
            assert!(w[1].step_distortion < w[0].step_distortion);
        }
    }
}
