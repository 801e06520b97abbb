//! Closed rational intervals and measure helpers.
//!
//! Invariants: `lo <= hi` always (constructor-enforced). An interval with
//! `lo == hi` is *degenerate*: it is a valid value but covers zero length and
//! never covers any positive-length cell. Coverage throughout the crate is
//! closed-cover semantics — touching endpoints suffice, so [0,1/2] and
//! [1/2,1] together cover [0,1].

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum IntervalError {
    #[error("interval endpoints out of order: [{lo}, {hi}]")]
    OutOfOrder { lo: Rational, hi: Rational },
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, IntervalError> {
        if lo > hi {
            return Err(IntervalError::OutOfOrder { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// Degenerate interval [p, p].
    pub fn point(p: Rational) -> Self {
        Interval { lo: p.clone(), hi: p }
    }

    pub fn unit() -> Self {
        Interval {
            lo: Rational::zero(),
            hi: Rational::one(),
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_int(2)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_point(&self, p: &Rational) -> bool {
        &self.lo <= p && p <= &self.hi
    }

    /// Closed containment: every point of `other` lies in `self`.
    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        if lo <= hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    pub fn translate(&self, offset: &Rational) -> Interval {
        Interval {
            lo: &self.lo + offset,
            hi: &self.hi + offset,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (&self.lo, &self.hi).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (lo, hi) = <(Rational, Rational)>::deserialize(deserializer)?;
        Interval::new(lo, hi).map_err(D::Error::custom)
    }
}

/// Sorted, merged, positive-length runs of a set of intervals. Touching runs
/// merge (closed semantics); degenerate inputs contribute nothing.
pub fn merge_intervals(intervals: &[Interval]) -> Vec<Interval> {
    let mut live: Vec<&Interval> = intervals.iter().filter(|iv| !iv.is_degenerate()).collect();
    live.sort();
    let mut runs: Vec<Interval> = Vec::new();
    for iv in live {
        match runs.last_mut() {
            Some(run) if iv.lo <= run.hi => {
                if iv.hi > run.hi {
                    run.hi = iv.hi.clone();
                }
            }
            _ => runs.push(iv.clone()),
        }
    }
    runs
}

/// Total measure of the union of `intervals`.
pub fn union_length(intervals: &[Interval]) -> Rational {
    merge_intervals(intervals)
        .iter()
        .map(Interval::length)
        .fold(Rational::zero(), |acc, len| acc + len)
}

/// Convenience constructor used heavily in tests: `ival("1/4", "3/4")`.
pub fn ival(lo: &str, hi: &str) -> Interval {
    Interval::new(crate::rational::rat(lo), crate::rational::rat(hi)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn constructor_rejects_reversed_endpoints() {
        assert!(Interval::new(rat("1"), rat("0")).is_err());
        assert!(Interval::new(rat("1/2"), rat("1/2")).is_ok());
    }

    #[test]
    fn union_length_of_nothing_is_zero() {
        assert_eq!(union_length(&[]), rat("0"));
    }

    #[test]
    fn union_length_merges_overlap() {
        let ivs = [ival("0", "1/2"), ival("1/4", "3/4")];
        assert_eq!(union_length(&ivs), rat("3/4"));
    }

    #[test]
    fn union_length_disjoint_pieces() {
        let ivs = [ival("0", "1/3"), ival("2/3", "1")];
        assert_eq!(union_length(&ivs), rat("2/3"));
    }

    #[test]
    fn union_length_ignores_degenerate_and_merges_touching() {
        let ivs = [ival("0", "1/2"), ival("1/2", "1/2"), ival("1/2", "1")];
        assert_eq!(union_length(&ivs), rat("1"));
        let runs = merge_intervals(&ivs);
        assert_eq!(runs, vec![ival("0", "1")]);
    }

    #[test]
    fn intersect() {
        assert_eq!(
            ival("0", "1/2").intersect(&ival("1/4", "1")),
            Some(ival("1/4", "1/2"))
        );
        assert_eq!(
            ival("0", "1/2").intersect(&ival("1/2", "1")),
            Some(ival("1/2", "1/2"))
        );
        assert_eq!(ival("0", "1/3").intersect(&ival("2/3", "1")), None);
    }

    #[test]
    fn containment_is_closed() {
        assert!(ival("0", "1").contains(&ival("0", "1")));
        assert!(ival("0", "1").contains(&ival("1", "1")));
        assert!(!ival("0", "1/2").contains(&ival("1/4", "3/4")));
        assert!(ival("0", "1").contains_point(&rat("1")));
        assert!(!ival("0", "1").contains_point(&rat("9/8")));
    }

    #[test]
    fn serde_as_pair_of_fraction_strings() {
        let iv = ival("1/4", "3/4");
        assert_eq!(serde_json::to_string(&iv).unwrap(), "[\"1/4\",\"3/4\"]");
        let back: Interval = serde_json::from_str("[\"1/4\",\"3/4\"]").unwrap();
        assert_eq!(back, iv);
        assert!(serde_json::from_str::<Interval>("[\"1\",\"0\"]").is_err());
    }
}
