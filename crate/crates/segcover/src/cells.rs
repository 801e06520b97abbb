//! Cell decomposition of an instance.
//!
//! Breakpoints are the target endpoints plus every alternative endpoint.
//! Consecutive breakpoints bound the *cells*: within a cell, every
//! alternative either covers all of it or none of it, so coverage questions
//! reduce to finitely many cell/coverer incidences.

use crate::instance::{Choice, Pick, ScInstance};
use crate::interval::Interval;
use crate::rational::Rational;

/// An alternative that covers a cell: segment index plus which pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coverer {
    pub segment: usize,
    pub pick: Pick,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub interval: Interval,
    /// Sorted by segment index, `First` before `Second` within a segment.
    pub coverers: Vec<Coverer>,
}

impl Cell {
    pub fn covered_by(&self, choice: &Choice) -> bool {
        self.coverers
            .iter()
            .any(|c| choice.get(c.segment) == c.pick)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellDecomposition {
    pub cells: Vec<Cell>,
}

impl CellDecomposition {
    pub fn total_length(&self) -> Rational {
        self.cells
            .iter()
            .map(|c| c.interval.length())
            .fold(Rational::zero(), |acc, l| acc + l)
    }

    /// A choice covers the target iff it covers every cell.
    pub fn covers(&self, choice: &Choice) -> bool {
        self.cells.iter().all(|c| c.covered_by(choice))
    }
}

/// Positive-length cells of the instance, left to right. Degenerate targets
/// have no cells.
pub fn decompose_cells(instance: &ScInstance) -> CellDecomposition {
    let target = instance.target();
    let mut points: Vec<Rational> = vec![target.lo().clone(), target.hi().clone()];
    for seg in instance.segments() {
        for iv in [&seg.first, &seg.second] {
            points.push(iv.lo().clone());
            points.push(iv.hi().clone());
        }
    }
    points.sort();
    points.dedup();

    let mut cells = Vec::new();
    for pair in points.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        if lo < target.lo() || hi > target.hi() {
            continue;
        }
        let interval = Interval::new(lo.clone(), hi.clone()).unwrap();
        let mut coverers = Vec::new();
        for (segment, seg) in instance.segments().iter().enumerate() {
            for pick in [Pick::First, Pick::Second] {
                if seg.interval(pick).contains(&interval) {
                    coverers.push(Coverer { segment, pick });
                }
            }
        }
        cells.push(Cell { interval, coverers });
    }
    CellDecomposition { cells }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::UncertainSegment;
    use crate::interval::ival;

    #[test]
    fn two_overlapping_segments() {
        let inst = ScInstance::unit(vec![
            UncertainSegment::new(ival("0", "1/2"), ival("1/4", "3/4"), "a"),
            UncertainSegment::new(ival("1/2", "1"), ival("0", "1/4"), "b"),
        ])
        .unwrap();
        let dec = decompose_cells(&inst);
        let bounds: Vec<_> = dec.cells.iter().map(|c| c.interval.clone()).collect();
        assert_eq!(
            bounds,
            vec![
                ival("0", "1/4"),
                ival("1/4", "1/2"),
                ival("1/2", "3/4"),
                ival("3/4", "1"),
            ]
        );
        // Cell [1/4, 1/2] is covered by segment 0 with either pick,
        // and by segment 1's second alternative not at all.
        assert_eq!(
            dec.cells[1].coverers,
            vec![
                Coverer { segment: 0, pick: Pick::First },
                Coverer { segment: 0, pick: Pick::Second },
            ]
        );
        // Rightmost cell only by segment 1 First.
        assert_eq!(
            dec.cells[3].coverers,
            vec![Coverer { segment: 1, pick: Pick::First }]
        );
        assert_eq!(dec.total_length(), crate::rational::rat("1"));
    }

    #[test]
    fn covers_agrees_with_is_cover() {
        let inst = ScInstance::unit(vec![
            UncertainSegment::new(ival("0", "1/2"), ival("0", "1/4"), ""),
            UncertainSegment::new(ival("1/2", "1"), ival("3/4", "1"), ""),
        ])
        .unwrap();
        let dec = decompose_cells(&inst);
        for bits in 0..4u64 {
            let choice = Choice::from_index(2, bits);
            assert_eq!(
                dec.covers(&choice),
                inst.is_cover(&choice).unwrap(),
                "bits {bits}"
            );
        }
    }

    #[test]
    fn degenerate_alternatives_cover_no_cell() {
        let inst = ScInstance::unit(vec![UncertainSegment::new(
            ival("1/2", "1/2"),
            ival("0", "1"),
            "",
        )])
        .unwrap();
        let dec = decompose_cells(&inst);
        assert_eq!(dec.cells.len(), 2);
        for cell in &dec.cells {
            assert_eq!(
                cell.coverers,
                vec![Coverer { segment: 0, pick: Pick::Second }]
            );
        }
    }

    #[test]
    fn degenerate_target_has_no_cells() {
        let inst = ScInstance::new(Interval::point(crate::rational::rat("1/2")), vec![]).unwrap();
        assert!(decompose_cells(&inst).cells.is_empty());
    }
}
