use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numerics::Scalar;

/// A finite continued fraction `1/(a_1 + 1/(a_2 + ...))` with the
/// convergent error bound for any infinite extension.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    value: BigRational,
    denominator: BigInt,
}

impl ContinuedFraction {
    pub fn value(&self) -> Scalar {
        Scalar::exact(self.value.clone())
    }

    /// `1/q_n^2`, bounding `|alpha - p_n/q_n|` for every infinite
    /// continuation of the terms.
    pub fn error_bound(&self) -> Scalar {
        let q2 = &self.denominator * &self.denominator;
        Scalar::exact(BigRational::new(BigInt::one(), q2))
    }

    /// `chi_[0, 1-alpha)(alpha * m mod 1)`, refusing to answer when the
    /// point is within the truncation error of either breakpoint.
    pub(crate) fn chi(&self, m: usize) -> Result<bool> {
        let alpha = &self.value;
        let x = alpha * BigRational::from_integer(BigInt::from(m));
        let frac = &x - x.floor();
        let breakpoint = BigRational::one() - alpha;
        // alpha*m drifts by at most m/q^2, the breakpoint by 1/q^2.
        let q2 = &self.denominator * &self.denominator;
        let slack = BigRational::new(BigInt::from(m + 1), q2);
        let near_break = (&frac - &breakpoint).abs() <= slack;
        let near_wrap = frac <= slack || (BigRational::one() - &frac) <= slack;
        if near_break || near_wrap {
            return Err(Error::PrecisionInsufficient {
                index: m,
                bound: Scalar::exact(slack).to_decimal_string(6),
            });
        }
        Ok(frac < breakpoint)
    }
}

/// Evaluate the continued fraction `[a_1, a_2, ...]` exactly.
pub fn cf_to_alpha(terms: &[u32]) -> Result<ContinuedFraction> {
    if terms.is_empty() {
        return Err(Error::EmptyInput("continued fraction terms"));
    }
    if terms.contains(&0) {
        return Err(Error::InvalidWord("continued fraction terms must be >= 1".into()));
    }
    // p_{-1} = 1, p_0 = 0; q_{-1} = 0, q_0 = 1
    let (mut p_prev, mut p) = (BigInt::one(), BigInt::zero());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    for &a in terms {
        let a = BigInt::from(a);
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    Ok(ContinuedFraction {
        value: BigRational::new(p, q.clone()),
        denominator: q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term() {
        assert_eq!(cf_to_alpha(&[2]).unwrap().value(), Scalar::ratio(1, 2));
        assert_eq!(cf_to_alpha(&[1, 2]).unwrap().value(), Scalar::ratio(2, 3));
    }

    #[test]
    fn golden_and_silver_closed_forms() {
        // x = 1/(1+x) and x = 1/(2+x)
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let silver = 2f64.sqrt() - 1.0;
        let g = cf_to_alpha(&[1; 40]).unwrap();
        let s = cf_to_alpha(&[2; 40]).unwrap();
        assert!((g.value().to_f64() - golden).abs() < 1e-15);
        assert!((s.value().to_f64() - silver).abs() < 1e-15);
        assert!(g.error_bound().to_f64() < 1e-15);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(cf_to_alpha(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn short_expansion_is_refused() {
        // alpha = 1/2 exactly: every multiple sits on a breakpoint.
        let cf = cf_to_alpha(&[2]).unwrap();
        assert!(matches!(cf.chi(1), Err(Error::PrecisionInsufficient { .. })));
    }
}
