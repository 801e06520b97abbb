//! The linear-time reductions between segment covering and contiguous CNF,
//! in both directions, plus the contiguity check itself.
//!
//! Both encodings share one witness convention: variable k+1 corresponds to
//! segment k, and TRUE corresponds to picking the first interval.

use std::collections::BTreeMap;

use crate::cells::decompose_cells;
use crate::cnf::{Assignment, CnfFormula, Literal};
use crate::instance::{Choice, Pick, ScInstance, UncertainSegment};
use crate::interval::Interval;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContiguityReport {
    /// Sorted, deduplicated 1-based clause indices per occurring literal.
    pub occurrences: BTreeMap<Literal, Vec<usize>>,
    /// Literals whose clause set is not a contiguous integer range.
    pub violations: Vec<Literal>,
    pub verdict: bool,
}

pub fn check_contiguity(formula: &CnfFormula) -> ContiguityReport {
    let mut occurrences: BTreeMap<Literal, Vec<usize>> = BTreeMap::new();
    for (ci, clause) in formula.clauses().iter().enumerate() {
        let mut seen: Vec<Literal> = clause.to_vec();
        seen.sort();
        seen.dedup();
        for lit in seen {
            occurrences.entry(lit).or_default().push(ci + 1);
        }
    }
    let violations: Vec<Literal> = occurrences
        .iter()
        .filter(|(_, indices)| indices[indices.len() - 1] - indices[0] + 1 != indices.len())
        .map(|(&lit, _)| lit)
        .collect();
    ContiguityReport {
        verdict: violations.is_empty(),
        occurrences,
        violations,
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error("literals with non-contiguous clause blocks: {0:?}")]
    ContiguityViolation(Vec<Literal>),
}

/// Witness translation between a formula over n variables and an instance
/// with n segments: variable k+1 ⇔ segment k, TRUE ⇔ first interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentVarMap {
    segments: usize,
}

impl SegmentVarMap {
    pub fn new(segments: usize) -> Self {
        SegmentVarMap { segments }
    }

    pub fn num_segments(&self) -> usize {
        self.segments
    }

    pub fn choice_to_assignment(&self, choice: &Choice) -> Assignment {
        assert_eq!(choice.len(), self.segments);
        Assignment::new(
            choice
                .picks()
                .iter()
                .map(|&p| p == Pick::First)
                .collect(),
        )
    }

    pub fn assignment_to_choice(&self, assignment: &Assignment) -> Choice {
        assert_eq!(assignment.len(), self.segments);
        Choice::new(
            assignment
                .values()
                .iter()
                .map(|&v| if v { Pick::First } else { Pick::Second })
                .collect(),
        )
    }
}

/// Encode coverability as satisfiability: one clause per positive-length
/// cell, left to right. A cell nobody can cover becomes an empty clause, so
/// unsatisfiability stays representable. The output always satisfies the
/// contiguity restriction because interval coverage is connected.
pub fn sc_to_contiguous_sat(instance: &ScInstance) -> (CnfFormula, SegmentVarMap) {
    let cells = decompose_cells(instance);
    let clauses: Vec<Vec<Literal>> = cells
        .cells
        .iter()
        .map(|cell| {
            cell.coverers
                .iter()
                .map(|c| match c.pick {
                    Pick::First => Literal::pos(c.segment + 1),
                    Pick::Second => Literal::neg(c.segment + 1),
                })
                .collect()
        })
        .collect();
    let formula = CnfFormula::new(instance.num_segments(), clauses)
        .expect("segment indices are in range");
    debug_assert!(check_contiguity(&formula).verdict);
    (formula, SegmentVarMap::new(instance.num_segments()))
}

/// Decode a contiguous formula as a covering instance: clause j owns the
/// cell [(j-1)/s, j/s] and each variable becomes one segment whose first
/// (second) interval is the union of the cells of its positive (negative)
/// clauses; a missing polarity yields the degenerate interval [0,0].
///
/// A formula with no clauses maps to a degenerate target, which is trivially
/// covered, matching trivial satisfiability.
pub fn contiguous_sat_to_sc(
    formula: &CnfFormula,
) -> Result<(ScInstance, SegmentVarMap), EquivalenceError> {
    let report = check_contiguity(formula);
    if !report.verdict {
        return Err(EquivalenceError::ContiguityViolation(report.violations));
    }
    let map = SegmentVarMap::new(formula.num_vars());
    let s = formula.num_clauses();
    if s == 0 {
        let target = Interval::point(Rational::zero());
        let segments = (1..=formula.num_vars())
            .map(|var| {
                UncertainSegment::new(target.clone(), target.clone(), format!("x{var}"))
            })
            .collect();
        return Ok((
            ScInstance::new(target, segments).expect("degenerate segments fit"),
            map,
        ));
    }

    let cell_block = |indices: Option<&Vec<usize>>| -> Interval {
        match indices {
            None => Interval::point(Rational::zero()),
            Some(run) => {
                let lo = Rational::new((run[0] - 1) as i64, s as i64);
                let hi = Rational::new(run[run.len() - 1] as i64, s as i64);
                Interval::new(lo, hi).expect("clause indices are increasing")
            }
        }
    };
    let segments = (1..=formula.num_vars())
        .map(|var| {
            UncertainSegment::new(
                cell_block(report.occurrences.get(&Literal::pos(var))),
                cell_block(report.occurrences.get(&Literal::neg(var))),
                format!("x{var}"),
            )
        })
        .collect();
    Ok((
        ScInstance::unit(segments).expect("cells lie inside [0,1]"),
        map,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{clause, eval, satisfies_all};
    use crate::interval::ival;

    fn formula(num_vars: usize, cls: &[&[i64]]) -> CnfFormula {
        CnfFormula::new(num_vars, cls.iter().map(|c| clause(c)).collect()).unwrap()
    }

    #[test]
    fn contiguity_verdicts() {
        let good = formula(3, &[&[1, 2, 3], &[1, 2, -3], &[1, -3, -1]]);
        assert!(check_contiguity(&good).verdict);

        let bad = formula(3, &[&[1, 2, 3], &[-1, 2, -3], &[1, -3, -1]]);
        let report = check_contiguity(&bad);
        assert!(!report.verdict);
        assert_eq!(report.violations, vec![Literal::pos(1)]);
        assert_eq!(report.occurrences[&Literal::pos(1)], vec![1, 3]);

        assert!(check_contiguity(&CnfFormula::empty(0)).verdict);
    }

    #[test]
    fn sc_to_csat_split_segment() {
        let inst = ScInstance::unit(vec![UncertainSegment::new(
            ival("0", "1/2"),
            ival("1/2", "1"),
            "",
        )])
        .unwrap();
        let (f, _) = sc_to_contiguous_sat(&inst);
        assert_eq!(f.clauses(), &[clause(&[1]), clause(&[-1])]);
        assert!(crate::cnf::brute_force_satisfiable(&f).is_none());
    }

    #[test]
    fn sc_to_csat_nested_segment() {
        let inst = ScInstance::unit(vec![UncertainSegment::new(
            ival("0", "1"),
            ival("0", "1/2"),
            "",
        )])
        .unwrap();
        let (f, map) = sc_to_contiguous_sat(&inst);
        assert_eq!(f.clauses(), &[clause(&[1, -1]), clause(&[1])]);
        let witness = crate::cnf::brute_force_satisfiable(&f).unwrap();
        let choice = map.assignment_to_choice(&witness);
        assert!(inst.is_cover(&choice).unwrap());
    }

    #[test]
    fn sc_to_csat_empty_instance() {
        let inst = ScInstance::unit(vec![]).unwrap();
        let (f, _) = sc_to_contiguous_sat(&inst);
        assert_eq!(f.clauses(), &[clause(&[])]);
    }

    #[test]
    fn sc_to_csat_clause_count_is_linear() {
        // Each segment contributes at most 4 distinct endpoints, so at most
        // 4n+1 cells and as many clauses.
        let inst = ScInstance::unit(vec![
            UncertainSegment::new(ival("0", "1/4"), ival("1/2", "5/8"), ""),
            UncertainSegment::new(ival("1/8", "3/8"), ival("3/4", "7/8"), ""),
        ])
        .unwrap();
        let (f, _) = sc_to_contiguous_sat(&inst);
        assert!(f.num_clauses() <= 4 * inst.num_segments() + 1);
    }

    #[test]
    fn csat_to_sc_unsatisfiable_unit_pair() {
        let f = formula(1, &[&[1], &[-1]]);
        let (inst, _) = contiguous_sat_to_sc(&f).unwrap();
        assert_eq!(
            inst.segments(),
            &[UncertainSegment::new(ival("0", "1/2"), ival("1/2", "1"), "x1")]
        );
        for bits in 0..2 {
            assert!(!inst.is_cover(&Choice::from_index(1, bits)).unwrap());
        }
    }

    #[test]
    fn csat_to_sc_two_variable_example() {
        let f = formula(2, &[&[1, 2], &[1, -2]]);
        let (inst, map) = contiguous_sat_to_sc(&f).unwrap();
        assert_eq!(
            inst.segments(),
            &[
                UncertainSegment::new(ival("0", "1"), ival("0", "0"), "x1"),
                UncertainSegment::new(ival("0", "1/2"), ival("1/2", "1"), "x2"),
            ]
        );
        // Coverable exactly when satisfiable, over all four choices.
        let mut covering = 0;
        for bits in 0..4u64 {
            let choice = Choice::from_index(2, bits);
            let covered = inst.is_cover(&choice).unwrap();
            let sat = satisfies_all(&f, &map.choice_to_assignment(&choice));
            assert_eq!(covered, sat, "bits {bits}");
            covering += covered as u32;
        }
        assert_eq!(covering, 2);
    }

    #[test]
    fn csat_to_sc_single_positive_clause() {
        let f = formula(1, &[&[1]]);
        let (inst, _) = contiguous_sat_to_sc(&f).unwrap();
        assert_eq!(
            inst.segments(),
            &[UncertainSegment::new(ival("0", "1"), ival("0", "0"), "x1")]
        );
        assert!(inst.is_cover(&Choice::all_first(1)).unwrap());
    }

    #[test]
    fn csat_to_sc_empty_formula_is_trivially_coverable() {
        let f = CnfFormula::empty(2);
        let (inst, _) = contiguous_sat_to_sc(&f).unwrap();
        assert!(inst.target().is_degenerate());
        assert!(inst.is_cover(&Choice::all_second(2)).unwrap());
    }

    #[test]
    fn csat_to_sc_rejects_non_contiguous() {
        let f = formula(1, &[&[1], &[], &[1]]);
        assert_eq!(
            contiguous_sat_to_sc(&f),
            Err(EquivalenceError::ContiguityViolation(vec![Literal::pos(1)]))
        );
    }

    #[test]
    fn round_trip_witnesses_verify() {
        let f = formula(3, &[&[1, 2, 3], &[1, 2, -3], &[2, -3, -1]]);
        let (inst, map) = contiguous_sat_to_sc(&f).unwrap();
        for bits in 0..8u64 {
            let assignment = Assignment::from_bits(3, bits);
            let choice = map.assignment_to_choice(&assignment);
            assert_eq!(
                inst.is_cover(&choice).unwrap(),
                eval(&f, &assignment).len() == 3
            );
        }
    }
}
