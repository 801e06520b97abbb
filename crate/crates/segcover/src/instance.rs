//! Uncertain-segment instances.
//!
//! An instance carries a target interval and a list of uncertain segments;
//! each segment is a pair of closed intervals inside the target, of which a
//! *choice* commits to exactly one (`Pick::First`/`Pick::Second`). The
//! decision problem asks whether some choice covers the whole target.
//!
//! Coverage is by measure: a choice covers the target iff no positive-length
//! sub-interval is left uncovered. For non-degenerate targets this coincides
//! with pointwise closed coverage; a degenerate target is trivially covered
//! (there is zero length to cover).

use serde::{Deserialize, Serialize};

use crate::interval::{merge_intervals, Interval};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pick {
    First,
    Second,
}

impl Pick {
    pub fn flipped(self) -> Pick {
        match self {
            Pick::First => Pick::Second,
            Pick::Second => Pick::First,
        }
    }
}

/// One committed alternative per segment, in segment order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Choice {
    picks: Vec<Pick>,
}

impl Choice {
    pub fn new(picks: Vec<Pick>) -> Self {
        Choice { picks }
    }

    pub fn all_first(n: usize) -> Self {
        Choice {
            picks: vec![Pick::First; n],
        }
    }

    pub fn all_second(n: usize) -> Self {
        Choice {
            picks: vec![Pick::Second; n],
        }
    }

    /// Choice number `bits` with segment 0 on the most significant bit, so
    /// counting up enumerates choices in lexicographic order
    /// (First < Second).
    pub fn from_index(n: usize, bits: u64) -> Self {
        assert!(n <= 63, "choice index enumeration capped at 63 segments");
        let picks = (0..n)
            .map(|i| {
                if bits >> (n - 1 - i) & 1 == 0 {
                    Pick::First
                } else {
                    Pick::Second
                }
            })
            .collect();
        Choice { picks }
    }

    pub fn len(&self) -> usize {
        self.picks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.picks.is_empty()
    }

    pub fn get(&self, i: usize) -> Pick {
        self.picks[i]
    }

    pub fn set(&mut self, i: usize, pick: Pick) {
        self.picks[i] = pick;
    }

    pub fn picks(&self) -> &[Pick] {
        &self.picks
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UncertainSegment {
    pub first: Interval,
    pub second: Interval,
    #[serde(default)]
    pub label: String,
}

impl UncertainSegment {
    pub fn new(first: Interval, second: Interval, label: impl Into<String>) -> Self {
        UncertainSegment {
            first,
            second,
            label: label.into(),
        }
    }

    /// Doubled segment: both alternatives identical (a pinned interval).
    pub fn doubled(interval: Interval, label: impl Into<String>) -> Self {
        UncertainSegment {
            first: interval.clone(),
            second: interval,
            label: label.into(),
        }
    }

    pub fn interval(&self, pick: Pick) -> &Interval {
        match pick {
            Pick::First => &self.first,
            Pick::Second => &self.second,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("segment {index} ({label:?}) has an interval outside the target {target}")]
    SegmentOutsideTarget {
        index: usize,
        label: String,
        target: Interval,
    },
    #[error("choice has {choice_len} picks but the instance has {segments} segments")]
    ChoiceLengthMismatch { choice_len: usize, segments: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScInstance {
    target: Interval,
    segments: Vec<UncertainSegment>,
}

impl ScInstance {
    pub fn new(target: Interval, segments: Vec<UncertainSegment>) -> Result<Self, InstanceError> {
        for (index, seg) in segments.iter().enumerate() {
            if !target.contains(&seg.first) || !target.contains(&seg.second) {
                return Err(InstanceError::SegmentOutsideTarget {
                    index,
                    label: seg.label.clone(),
                    target,
                });
            }
        }
        Ok(ScInstance { target, segments })
    }

    /// Instance over the unit target [0, 1].
    pub fn unit(segments: Vec<UncertainSegment>) -> Result<Self, InstanceError> {
        ScInstance::new(Interval::unit(), segments)
    }

    pub fn target(&self) -> &Interval {
        &self.target
    }

    pub fn segments(&self) -> &[UncertainSegment] {
        &self.segments
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn chosen_intervals(&self, choice: &Choice) -> Result<Vec<Interval>, InstanceError> {
        if choice.len() != self.segments.len() {
            return Err(InstanceError::ChoiceLengthMismatch {
                choice_len: choice.len(),
                segments: self.segments.len(),
            });
        }
        Ok(self
            .segments
            .iter()
            .zip(choice.picks())
            .map(|(seg, &pick)| seg.interval(pick).clone())
            .collect())
    }

    /// True iff the chosen intervals cover the target (no positive-length gap).
    pub fn is_cover(&self, choice: &Choice) -> Result<bool, InstanceError> {
        Ok(self.uncovered_gaps(choice)?.is_empty())
    }

    /// Maximal positive-length uncovered sub-intervals of the target, left to
    /// right, reported as closed intervals. Empty iff the choice covers.
    pub fn uncovered_gaps(&self, choice: &Choice) -> Result<Vec<Interval>, InstanceError> {
        let chosen = self.chosen_intervals(choice)?;
        Ok(gaps_in(&self.target, &chosen))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

impl<'de> Deserialize<'de> for ScInstance {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            target: Interval,
            segments: Vec<UncertainSegment>,
        }
        let raw = Raw::deserialize(deserializer)?;
        ScInstance::new(raw.target, raw.segments).map_err(serde::de::Error::custom)
    }
}

/// Positive-length parts of `target` not covered by the union of `intervals`.
pub fn gaps_in(target: &Interval, intervals: &[Interval]) -> Vec<Interval> {
    let runs = merge_intervals(intervals);
    let mut gaps = Vec::new();
    let mut cursor = target.lo().clone();
    for run in &runs {
        if run.lo() >= target.hi() {
            break;
        }
        if run.lo() > &cursor {
            let gap_hi = run.lo().clone().min(target.hi().clone());
            if gap_hi > cursor {
                gaps.push(Interval::new(cursor.clone(), gap_hi).unwrap());
            }
        }
        if run.hi() > &cursor {
            cursor = run.hi().clone();
        }
    }
    if &cursor < target.hi() {
        gaps.push(Interval::new(cursor, target.hi().clone()).unwrap());
    }
    gaps
}

/// Measure of the target left uncovered by `intervals`.
pub fn uncovered_length(target: &Interval, intervals: &[Interval]) -> Rational {
    gaps_in(target, intervals)
        .iter()
        .map(Interval::length)
        .fold(Rational::zero(), |acc, l| acc + l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::ival;
    use crate::rational::rat;

    fn seg(first: Interval, second: Interval) -> UncertainSegment {
        UncertainSegment::new(first, second, "")
    }

    #[test]
    fn is_cover_single_segment() {
        let inst =
            ScInstance::unit(vec![seg(ival("0", "1"), ival("0", "1/2"))]).unwrap();
        assert!(inst.is_cover(&Choice::new(vec![Pick::First])).unwrap());
        assert!(!inst.is_cover(&Choice::new(vec![Pick::Second])).unwrap());
    }

    #[test]
    fn is_cover_touching_halves() {
        let inst = ScInstance::unit(vec![
            seg(ival("0", "1/2"), ival("0", "1/4")),
            seg(ival("1/2", "1"), ival("3/4", "1")),
        ])
        .unwrap();
        // Closed-cover semantics: touching at 1/2 suffices.
        assert!(inst
            .is_cover(&Choice::new(vec![Pick::First, Pick::First]))
            .unwrap());
        assert!(!inst
            .is_cover(&Choice::new(vec![Pick::Second, Pick::First]))
            .unwrap());
    }

    #[test]
    fn uncovered_gaps_examples() {
        let inst = ScInstance::unit(vec![
            seg(ival("0", "1/4"), ival("0", "1/4")),
            seg(ival("3/4", "1"), ival("3/4", "1")),
        ])
        .unwrap();
        let gaps = inst
            .uncovered_gaps(&Choice::all_first(2))
            .unwrap();
        assert_eq!(gaps, vec![ival("1/4", "3/4")]);

        let inst2 = ScInstance::unit(vec![seg(ival("0", "1/2"), ival("0", "1/2"))]).unwrap();
        assert_eq!(
            inst2.uncovered_gaps(&Choice::all_first(1)).unwrap(),
            vec![ival("1/2", "1")]
        );

        let inst3 = ScInstance::unit(vec![seg(ival("0", "1"), ival("0", "1"))]).unwrap();
        assert_eq!(inst3.uncovered_gaps(&Choice::all_first(1)).unwrap(), vec![]);
    }

    #[test]
    fn empty_instance_has_one_full_gap() {
        let inst = ScInstance::unit(vec![]).unwrap();
        let empty = Choice::new(vec![]);
        assert!(!inst.is_cover(&empty).unwrap());
        assert_eq!(inst.uncovered_gaps(&empty).unwrap(), vec![ival("0", "1")]);
    }

    #[test]
    fn degenerate_target_is_trivially_covered() {
        let inst = ScInstance::new(Interval::point(rat("0")), vec![]).unwrap();
        assert!(inst.is_cover(&Choice::new(vec![])).unwrap());
    }

    #[test]
    fn degenerate_alternative_covers_nothing() {
        let inst = ScInstance::unit(vec![seg(ival("0", "1"), ival("0", "0"))]).unwrap();
        assert!(!inst.is_cover(&Choice::new(vec![Pick::Second])).unwrap());
    }

    #[test]
    fn choice_length_is_checked() {
        let inst = ScInstance::unit(vec![seg(ival("0", "1"), ival("0", "1"))]).unwrap();
        assert!(matches!(
            inst.is_cover(&Choice::new(vec![])),
            Err(InstanceError::ChoiceLengthMismatch { .. })
        ));
    }

    #[test]
    fn segments_must_lie_in_target() {
        let err = ScInstance::unit(vec![seg(ival("0", "1"), ival("1/2", "9/8"))]);
        assert!(matches!(
            err,
            Err(InstanceError::SegmentOutsideTarget { index: 0, .. })
        ));
    }

    #[test]
    fn json_round_trip_matches_format() {
        let inst = ScInstance::unit(vec![UncertainSegment::new(
            ival("0", "1/3"),
            ival("2/3", "1"),
            "s0",
        )])
        .unwrap();
        let json = inst.to_json_string();
        assert!(json.contains("\"target\""));
        assert!(json.contains("\"first\""));
        assert!(json.contains("\"1/3\""));
        let back = ScInstance::from_json_str(&json).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn json_rejects_segment_outside_target() {
        let bad = r#"{"target":["0","1"],"segments":[{"first":["0","2"],"second":["0","1"],"label":""}]}"#;
        assert!(ScInstance::from_json_str(bad).is_err());
    }

    #[test]
    fn choice_from_index_is_lexicographic() {
        assert_eq!(
            Choice::from_index(2, 0).picks(),
            &[Pick::First, Pick::First]
        );
        assert_eq!(
            Choice::from_index(2, 1).picks(),
            &[Pick::First, Pick::Second]
        );
        assert_eq!(
            Choice::from_index(2, 2).picks(),
            &[Pick::Second, Pick::First]
        );
    }
}
