//! Symbolic sequences over IFS labels.
//!
//! A [`WordSpec`] describes an infinite word `W_1 W_2 ...` whose symbols name
//! the system applied at each stage. Indices are 1-based throughout.

mod combinatorics;
mod sturmian;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use combinatorics::{
    ambiguous_strings, complexity, complexity_of, detect_period, ComplexityOptions,
    ComplexityProfile,
};
pub use sturmian::{cf_to_alpha, ContinuedFraction};

use crate::error::{Error, Result};

/// Name of an iterated function system, used as a word symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Label(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_string())
    }
}

/// Parse a compact word like `"FGG"` where every symbol is one character.
pub fn labels(s: &str) -> Vec<Label> {
    s.chars().map(|c| Label(c.to_string())).collect()
}

/// Render labels back-to-back, comma separated when any label is longer
/// than one character.
pub fn render(word: &[Label]) -> String {
    if word.iter().all(|l| l.0.chars().count() == 1) {
        word.iter().map(|l| l.0.as_str()).collect()
    } else {
        word.iter().map(|l| l.0.as_str()).collect::<Vec<_>>().join(",")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordSpec {
    EventuallyPeriodic {
        #[serde(default)]
        preperiod: Vec<Label>,
        period: Vec<Label>,
    },
    /// `w_n = one` iff `alpha * (n + offset) mod 1` lies in `[0, 1 - alpha)`.
    Sturmian {
        cf_terms: Vec<u32>,
        #[serde(rename = "label_for_one")]
        one: Label,
        #[serde(rename = "label_for_zero")]
        zero: Label,
        /// Shift of the index; zero for the word as declared. Set by
        /// [`WordSpec::shifted`].
        #[serde(default, skip_serializing_if = "is_zero")]
        offset: usize,
    },
    Explicit {
        prefix: Vec<Label>,
        tail: Label,
    },
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl WordSpec {
    pub fn periodic(preperiod: Vec<Label>, period: Vec<Label>) -> Result<Self> {
        let w = WordSpec::EventuallyPeriodic { preperiod, period };
        w.validate()?;
        Ok(w)
    }

    pub fn constant(label: impl Into<Label>) -> Self {
        WordSpec::EventuallyPeriodic {
            preperiod: Vec::new(),
            period: vec![label.into()],
        }
    }

    pub fn sturmian(cf_terms: Vec<u32>, one: impl Into<Label>, zero: impl Into<Label>) -> Result<Self> {
        let w = WordSpec::Sturmian {
            cf_terms,
            one: one.into(),
            zero: zero.into(),
            offset: 0,
        };
        w.validate()?;
        Ok(w)
    }

    /// The Sturmian word of the golden mean `[1, 1, 1, ...]` (40 terms).
    pub fn golden(one: impl Into<Label>, zero: impl Into<Label>) -> Self {
        WordSpec::Sturmian {
            cf_terms: vec![1; 40],
            one: one.into(),
            zero: zero.into(),
            offset: 0,
        }
    }

    pub fn explicit(prefix: Vec<Label>, tail: impl Into<Label>) -> Self {
        WordSpec::Explicit {
            prefix,
            tail: tail.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WordSpec::EventuallyPeriodic { period, .. } if period.is_empty() => {
                Err(Error::InvalidWord("period must be nonempty".into()))
            }
            WordSpec::Sturmian { cf_terms, .. } if cf_terms.is_empty() => {
                Err(Error::InvalidWord("continued fraction needs at least one term".into()))
            }
            WordSpec::Sturmian { cf_terms, .. } if cf_terms.contains(&0) => {
                Err(Error::InvalidWord("continued fraction terms must be >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Symbol `W_index` (1-based).
    pub fn label_at(&self, index: usize) -> Result<Label> {
        assert!(index >= 1, "word indices start at 1");
        match self {
            WordSpec::EventuallyPeriodic { preperiod, period } => {
                if index <= preperiod.len() {
                    Ok(preperiod[index - 1].clone())
                } else {
                    let k = (index - preperiod.len() - 1) % period.len();
                    Ok(period[k].clone())
                }
            }
            WordSpec::Explicit { prefix, tail } => {
                Ok(prefix.get(index - 1).cloned().unwrap_or_else(|| tail.clone()))
            }
            WordSpec::Sturmian {
                cf_terms,
                one,
                zero,
                offset,
            } => {
                let cf = cf_to_alpha(cf_terms)?;
                Ok(if cf.chi(index + offset)? { one.clone() } else { zero.clone() })
            }
        }
    }

    /// `W_1 ... W_n`.
    pub fn prefix(&self, n: usize) -> Result<Vec<Label>> {
        if let WordSpec::Sturmian {
            cf_terms,
            one,
            zero,
            offset,
        } = self
        {
            let cf = cf_to_alpha(cf_terms)?;
            return (1..=n)
                .map(|m| Ok(if cf.chi(m + offset)? { one.clone() } else { zero.clone() }))
                .collect();
        }
        (1..=n).map(|m| self.label_at(m)).collect()
    }

    /// The word `W_{s+1} W_{s+2} ...`.
    pub fn shifted(&self, s: usize) -> WordSpec {
        match self {
            WordSpec::EventuallyPeriodic { preperiod, period } => {
                if s <= preperiod.len() {
                    WordSpec::EventuallyPeriodic {
                        preperiod: preperiod[s..].to_vec(),
                        period: period.clone(),
                    }
                } else {
                    let r = (s - preperiod.len()) % period.len();
                    let mut rotated = period[r..].to_vec();
                    rotated.extend_from_slice(&period[..r]);
                    WordSpec::EventuallyPeriodic {
                        preperiod: Vec::new(),
                        period: rotated,
                    }
                }
            }
            WordSpec::Explicit { prefix, tail } => WordSpec::Explicit {
                prefix: prefix.get(s..).map(<[Label]>::to_vec).unwrap_or_default(),
                tail: tail.clone(),
            },
            WordSpec::Sturmian {
                cf_terms,
                one,
                zero,
                offset,
            } => WordSpec::Sturmian {
                cf_terms: cf_terms.clone(),
                one: one.clone(),
                zero: zero.clone(),
                offset: offset + s,
            },
        }
    }

    /// `(preperiod, period)` as sequences when the word is eventually
    /// periodic by construction.
    pub fn periodic_structure(&self) -> Option<(Vec<Label>, Vec<Label>)> {
        match self {
            WordSpec::EventuallyPeriodic { preperiod, period } => {
                Some((preperiod.clone(), period.clone()))
            }
            WordSpec::Explicit { prefix, tail } => Some((prefix.clone(), vec![tail.clone()])),
            WordSpec::Sturmian { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_unrolling() {
        let w = WordSpec::periodic(vec![], labels("FGG")).unwrap();
        assert_eq!(render(&w.prefix(7).unwrap()), "FGGFGGF");
    }

    #[test]
    fn explicit_prefix_then_tail() {
        let w = WordSpec::explicit(labels("F"), "G");
        assert_eq!(render(&w.prefix(4).unwrap()), "FGGG");
    }

    #[test]
    fn empty_period_rejected() {
        assert!(WordSpec::periodic(labels("F"), vec![]).is_err());
        assert!(WordSpec::sturmian(vec![], "F", "G").is_err());
        assert!(WordSpec::sturmian(vec![1, 0], "F", "G").is_err());
    }

    #[test]
    fn shifting_matches_prefix_drop() {
        let words = [
            WordSpec::periodic(labels("GF"), labels("FGG")).unwrap(),
            WordSpec::explicit(labels("FFG"), "G"),
            WordSpec::golden("F", "G"),
        ];
        for w in &words {
            let long = w.prefix(30).unwrap();
            for s in 0..8 {
                assert_eq!(w.shifted(s).prefix(22).unwrap(), long[s..s + 22].to_vec());
            }
        }
    }

    #[test]
    fn serde_shape() {
        let w = WordSpec::golden("F", "G");
        let json = serde_json::to_string(&w).unwrap();
        assert!(json.contains("label_for_one"));
        assert!(!json.contains("offset"));
        let back: WordSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);
    }
}
