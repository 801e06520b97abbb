//! 3-CNF to cover reduction. Each clause owns an s-th of the target split
//! into thirds, guarded by two adjacent-pair uncertain segments; each
//! variable contributes the edge set of a complete bipartite graph between
//! its positive and negative occurrences.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cnf::{eval, occurrence_profile, satisfies_all, Assignment, CnfFormula, Literal};
use crate::instance::{Choice, Pick, ScInstance, UncertainSegment};
use crate::interval::{merge_intervals, Interval};
use crate::rational::Rational;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum Reduce3SatError {
    #[error("clause {clause} has {len} literals, expected exactly 3")]
    ClauseArity { clause: usize, len: usize },
    #[error("clause {clause} is tautological")]
    TautologicalClause { clause: usize },
    #[error("variable {var} occurs with only one polarity")]
    PureLiteral { var: usize },
    #[error("formula has no clauses")]
    EmptyFormula,
    #[error("assignment leaves clause {clause} unsatisfied")]
    UnsatisfiedClause { clause: usize },
    #[error("choice does not cover the target")]
    NotACover,
    #[error("choice has {got} picks, instance has {expected} segments")]
    ChoiceLength { expected: usize, got: usize },
}

/// One clause's share of the target: B_j and its three thirds, plus the
/// instance indices of the two guarding segments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseGadget {
    /// 0-based clause index.
    pub clause: usize,
    pub interval: Interval,
    pub thirds: [Interval; 3],
    pub t_segments: [usize; 2],
}

/// An occurrence of a variable: the third it owns and that third's equal
/// partition, one part per incident edge (left to right in edge order).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetVertex {
    pub clause: usize,
    pub slot: usize,
    pub interval: Interval,
    pub parts: Vec<Interval>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GadgetEdge {
    pub segment: usize,
    pub p_index: usize,
    pub n_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariableGadget {
    pub var: usize,
    pub positive: Vec<GadgetVertex>,
    pub negative: Vec<GadgetVertex>,
    pub edges: Vec<GadgetEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SegmentProvenance {
    Clause { clause: usize, half: usize },
    Edge { var: usize, p_index: usize, n_index: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionCertificate {
    pub formula: CnfFormula,
    pub clause_gadgets: Vec<ClauseGadget>,
    pub variable_gadgets: Vec<VariableGadget>,
    /// Aligned with the instance's segment list.
    pub provenance: Vec<SegmentProvenance>,
}

impl ReductionCertificate {
    pub fn slot(&self, clause: usize, slot: usize) -> Literal {
        self.formula.clause(clause)[slot]
    }
}

fn is_tautological(clause: &[Literal]) -> bool {
    clause
        .iter()
        .any(|lit| clause.contains(&lit.negated()) && lit.positive)
}

fn validate(formula: &CnfFormula) -> Result<(), Reduce3SatError> {
    if formula.num_clauses() == 0 {
        return Err(Reduce3SatError::EmptyFormula);
    }
    for (j, clause) in formula.clauses().iter().enumerate() {
        if clause.len() != 3 {
            return Err(Reduce3SatError::ClauseArity {
                clause: j + 1,
                len: clause.len(),
            });
        }
        if is_tautological(clause) {
            return Err(Reduce3SatError::TautologicalClause { clause: j + 1 });
        }
    }
    let profile = occurrence_profile(formula);
    for var in 1..=formula.num_vars() {
        if profile.occurs(var) && (profile.p(var) == 0 || profile.n(var) == 0) {
            return Err(Reduce3SatError::PureLiteral { var });
        }
    }
    Ok(())
}

pub(crate) fn split_equal(interval: &Interval, parts: usize) -> Vec<Interval> {
    let len = interval.length();
    (0..parts)
        .map(|r| {
            let lo = interval.lo() + &(&len * &Rational::new(r as i64, parts as i64));
            let hi = interval.lo() + &(&len * &Rational::new(r as i64 + 1, parts as i64));
            Interval::new(lo, hi).unwrap()
        })
        .collect()
}

/// Build the cover instance over [0,1]. Segment order: the 2s clause
/// segments first, then variable edges grouped by variable, edges in
/// (positive index, negative index) order.
pub fn reduce_3sat_to_sc(
    formula: &CnfFormula,
) -> Result<(ScInstance, ReductionCertificate), Reduce3SatError> {
    validate(formula)?;
    let s = formula.num_clauses();
    let third = |j: usize, k: usize| {
        Interval::new(
            Rational::new((3 * j + k) as i64, 3 * s as i64),
            Rational::new((3 * j + k + 1) as i64, 3 * s as i64),
        )
        .unwrap()
    };

    let mut segments = Vec::new();
    let mut provenance = Vec::new();
    let mut clause_gadgets = Vec::new();
    for j in 0..s {
        let thirds = [third(j, 0), third(j, 1), third(j, 2)];
        let t_segments = [segments.len(), segments.len() + 1];
        segments.push(UncertainSegment::new(
            thirds[0].clone(),
            thirds[1].clone(),
            format!("C{}.t1", j + 1),
        ));
        segments.push(UncertainSegment::new(
            thirds[1].clone(),
            thirds[2].clone(),
            format!("C{}.t2", j + 1),
        ));
        provenance.push(SegmentProvenance::Clause { clause: j, half: 0 });
        provenance.push(SegmentProvenance::Clause { clause: j, half: 1 });
        clause_gadgets.push(ClauseGadget {
            clause: j,
            interval: Interval::new(
                Rational::new(j as i64, s as i64),
                Rational::new(j as i64 + 1, s as i64),
            )
            .unwrap(),
            thirds,
            t_segments,
        });
    }

    let mut variable_gadgets = Vec::new();
    for var in 1..=formula.num_vars() {
        let occurrences = |wanted: Literal| -> Vec<(usize, usize)> {
            let mut out = Vec::new();
            for (j, clause) in formula.clauses().iter().enumerate() {
                for (k, lit) in clause.iter().enumerate() {
                    if *lit == wanted {
                        out.push((j, k));
                    }
                }
            }
            out
        };
        let pos = occurrences(Literal::pos(var));
        let neg = occurrences(Literal::neg(var));
        if pos.is_empty() && neg.is_empty() {
            continue;
        }
        let vertex = |&(j, k): &(usize, usize), degree: usize| {
            let interval = third(j, k);
            let parts = split_equal(&interval, degree);
            GadgetVertex {
                clause: j,
                slot: k,
                interval,
                parts,
            }
        };
        let positive: Vec<_> = pos.iter().map(|v| vertex(v, neg.len())).collect();
        let negative: Vec<_> = neg.iter().map(|v| vertex(v, pos.len())).collect();
        let mut edges = Vec::new();
        for a in 0..positive.len() {
            for b in 0..negative.len() {
                edges.push(GadgetEdge {
                    segment: segments.len(),
                    p_index: a,
                    n_index: b,
                });
                segments.push(UncertainSegment::new(
                    positive[a].parts[b].clone(),
                    negative[b].parts[a].clone(),
                    format!("x{}.P{}N{}", var, a + 1, b + 1),
                ));
                provenance.push(SegmentProvenance::Edge {
                    var,
                    p_index: a,
                    n_index: b,
                });
            }
        }
        variable_gadgets.push(VariableGadget {
            var,
            positive,
            negative,
            edges,
        });
    }

    let instance = ScInstance::unit(segments).expect("gadgets stay inside the unit target");
    let certificate = ReductionCertificate {
        formula: formula.clone(),
        clause_gadgets,
        variable_gadgets,
        provenance,
    };
    debug_assert_eq!(instance.num_segments(), certificate.provenance.len());
    Ok((instance, certificate))
}

/// How many of the three thirds the two realized intervals fully cover.
pub fn clause_gadget_cover_count(gadget: &ClauseGadget, t1: Pick, t2: Pick) -> usize {
    let realized = [
        match t1 {
            Pick::First => gadget.thirds[0].clone(),
            Pick::Second => gadget.thirds[1].clone(),
        },
        match t2 {
            Pick::First => gadget.thirds[1].clone(),
            Pick::Second => gadget.thirds[2].clone(),
        },
    ];
    let union = merge_intervals(&realized);
    gadget
        .thirds
        .iter()
        .filter(|third| union.iter().any(|run| run.contains(third)))
        .count()
}

pub(crate) fn t_picks_for_uncovered_slot(slot: usize) -> (Pick, Pick) {
    match slot {
        0 => (Pick::Second, Pick::Second),
        1 => (Pick::First, Pick::Second),
        2 => (Pick::First, Pick::First),
        _ => unreachable!("slots are 0..3"),
    }
}

/// Lift a satisfying assignment to a covering choice: the clause segments
/// dodge the lowest satisfied slot, whose third the variable edges cover.
pub fn assignment_to_choice(
    cert: &ReductionCertificate,
    assignment: &Assignment,
) -> Result<Choice, Reduce3SatError> {
    let satisfied = eval(&cert.formula, assignment);
    if let Some(j) = (1..=cert.formula.num_clauses()).find(|j| !satisfied.contains(j)) {
        return Err(Reduce3SatError::UnsatisfiedClause { clause: j });
    }
    let mut picks = vec![Pick::First; cert.provenance.len()];
    for gadget in &cert.clause_gadgets {
        let k_star = cert
            .formula
            .clause(gadget.clause)
            .iter()
            .position(|lit| lit.satisfied_by(assignment.value(lit.var)))
            .expect("clause verified satisfied");
        let (p1, p2) = t_picks_for_uncovered_slot(k_star);
        picks[gadget.t_segments[0]] = p1;
        picks[gadget.t_segments[1]] = p2;
    }
    for gadget in &cert.variable_gadgets {
        let pick = if assignment.value(gadget.var) {
            Pick::First
        } else {
            Pick::Second
        };
        for edge in &gadget.edges {
            picks[edge.segment] = pick;
        }
    }
    Ok(Choice::new(picks))
}

/// Read an assignment back off a covering choice: every third the clause
/// segments leave open must be fully covered by its vertex's edges, which
/// pins that vertex's variable.
pub fn choice_to_assignment(
    cert: &ReductionCertificate,
    choice: &Choice,
) -> Result<Assignment, Reduce3SatError> {
    if choice.len() != cert.provenance.len() {
        return Err(Reduce3SatError::ChoiceLength {
            expected: cert.provenance.len(),
            got: choice.len(),
        });
    }
    // (clause, slot) -> (gadget index, positive side?, vertex index)
    let mut vertex_of = BTreeMap::new();
    for (g, gadget) in cert.variable_gadgets.iter().enumerate() {
        for (i, v) in gadget.positive.iter().enumerate() {
            vertex_of.insert((v.clause, v.slot), (g, true, i));
        }
        for (i, v) in gadget.negative.iter().enumerate() {
            vertex_of.insert((v.clause, v.slot), (g, false, i));
        }
    }
    let mut values: Vec<Option<bool>> = vec![None; cert.formula.num_vars()];
    for gadget in &cert.clause_gadgets {
        for k in 0..3 {
            let realized = [
                choice.get(gadget.t_segments[0]) == Pick::First && k == 0,
                choice.get(gadget.t_segments[0]) == Pick::Second && k == 1,
                choice.get(gadget.t_segments[1]) == Pick::First && k == 1,
                choice.get(gadget.t_segments[1]) == Pick::Second && k == 2,
            ];
            if realized.iter().any(|&r| r) {
                continue;
            }
            let &(g, positive, i) = vertex_of
                .get(&(gadget.clause, k))
                .expect("every slot carries an occurrence");
            let var_gadget = &cert.variable_gadgets[g];
            let fully_chosen = var_gadget.edges.iter().all(|e| {
                if positive {
                    e.p_index != i || choice.get(e.segment) == Pick::First
                } else {
                    e.n_index != i || choice.get(e.segment) == Pick::Second
                }
            });
            if !fully_chosen {
                return Err(Reduce3SatError::NotACover);
            }
            let var = var_gadget.var;
            assert!(
                values[var - 1] != Some(!positive),
                "a covering choice cannot drive a variable both ways"
            );
            values[var - 1] = Some(positive);
        }
    }
    let assignment = Assignment::new(values.iter().map(|v| v.unwrap_or(true)).collect());
    debug_assert!(satisfies_all(&cert.formula, &assignment));
    Ok(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::clause;
    use crate::interval::ival;
    use crate::solver::{solve_brute, CoverStatus};

    fn formula(num_vars: usize, clauses: &[&[i64]]) -> CnfFormula {
        CnfFormula::new(num_vars, clauses.iter().map(|c| clause(c)).collect()).unwrap()
    }

    fn two_clause() -> CnfFormula {
        formula(3, &[&[1, 2, 3], &[-1, -2, -3]])
    }

    #[test]
    fn seven_segment_example() {
        let (instance, cert) = reduce_3sat_to_sc(&two_clause()).unwrap();
        assert_eq!(instance.num_segments(), 7);
        assert_eq!(cert.clause_gadgets.len(), 2);
        assert_eq!(cert.variable_gadgets.len(), 3);
        assert_eq!(
            solve_brute(&instance).unwrap().status,
            CoverStatus::Coverable
        );
    }

    #[test]
    fn size_formula_matches_occurrences() {
        let f = formula(3, &[&[1, 2, 3], &[-1, -2, 3], &[1, -2, -3]]);
        let (instance, _) = reduce_3sat_to_sc(&f).unwrap();
        // 2s = 6 plus p·n per variable: x 2·1, y 1·2, z 2·1.
        assert_eq!(instance.num_segments(), 6 + 2 + 2 + 2);
        assert_eq!(instance.num_segments(), 2 * 3 + 2 * 3);
    }

    #[test]
    fn gadget_geometry() {
        let (instance, cert) = reduce_3sat_to_sc(&two_clause()).unwrap();
        let g = &cert.clause_gadgets[1];
        assert_eq!(g.interval, ival("1/2", "1"));
        assert_eq!(g.thirds[0], ival("1/2", "2/3"));
        assert_eq!(g.thirds[2], ival("5/6", "1"));
        // x's positive vertex is clause 1 slot 0 with a single part.
        let x = &cert.variable_gadgets[0];
        assert_eq!(x.var, 1);
        assert_eq!(x.positive[0].clause, 0);
        assert_eq!(x.positive[0].parts, vec![ival("0", "1/6")]);
        assert_eq!(x.negative[0].clause, 1);
        let edge = &x.edges[0];
        assert_eq!(
            instance.segments()[edge.segment].interval(Pick::First),
            &ival("0", "1/6")
        );
        assert_eq!(
            instance.segments()[edge.segment].interval(Pick::Second),
            &ival("1/2", "2/3")
        );
    }

    #[test]
    fn pick_pairs_cover_the_expected_thirds() {
        let (_, cert) = reduce_3sat_to_sc(&two_clause()).unwrap();
        for gadget in &cert.clause_gadgets {
            assert_eq!(clause_gadget_cover_count(gadget, Pick::First, Pick::Second), 2);
            assert_eq!(clause_gadget_cover_count(gadget, Pick::Second, Pick::First), 1);
            assert_eq!(clause_gadget_cover_count(gadget, Pick::First, Pick::First), 2);
            assert_eq!(clause_gadget_cover_count(gadget, Pick::Second, Pick::Second), 2);
        }
    }

    #[test]
    fn vertex_sides_match_literal_polarity() {
        let f = formula(3, &[&[1, 2, 3], &[-1, -2, 3], &[1, -2, -3]]);
        let (_, cert) = reduce_3sat_to_sc(&f).unwrap();
        for gadget in &cert.variable_gadgets {
            for v in &gadget.positive {
                assert_eq!(cert.slot(v.clause, v.slot), Literal::pos(gadget.var));
            }
            for v in &gadget.negative {
                assert_eq!(cert.slot(v.clause, v.slot), Literal::neg(gadget.var));
            }
        }
    }

    #[test]
    fn preconditions_rejected() {
        let arity = formula(2, &[&[1, -2]]);
        assert_eq!(
            reduce_3sat_to_sc(&arity).unwrap_err(),
            Reduce3SatError::ClauseArity { clause: 1, len: 2 }
        );
        let tautology = formula(2, &[&[1, -1, 2], &[-2, 1, -1]]);
        assert_eq!(
            reduce_3sat_to_sc(&tautology).unwrap_err(),
            Reduce3SatError::TautologicalClause { clause: 1 }
        );
        let pure = formula(3, &[&[1, 2, 3], &[1, -2, -3]]);
        assert_eq!(
            reduce_3sat_to_sc(&pure).unwrap_err(),
            Reduce3SatError::PureLiteral { var: 1 }
        );
        assert_eq!(
            reduce_3sat_to_sc(&CnfFormula::empty(2)).unwrap_err(),
            Reduce3SatError::EmptyFormula
        );
    }

    #[test]
    fn assignment_lifts_to_cover() {
        let (instance, cert) = reduce_3sat_to_sc(&two_clause()).unwrap();
        let a = Assignment::new(vec![true, false, false]);
        let choice = assignment_to_choice(&cert, &a).unwrap();
        assert!(instance.is_cover(&choice).unwrap());
    }

    #[test]
    fn unsatisfying_assignment_reports_clause() {
        let (_, cert) = reduce_3sat_to_sc(&two_clause()).unwrap();
        assert_eq!(
            assignment_to_choice(&cert, &Assignment::all_true(3)),
            Err(Reduce3SatError::UnsatisfiedClause { clause: 2 })
        );
    }

    #[test]
    fn cover_lifts_to_satisfying_assignment() {
        let (instance, cert) = reduce_3sat_to_sc(&two_clause()).unwrap();
        let witness = solve_brute(&instance).unwrap().witness.unwrap();
        let a = choice_to_assignment(&cert, &witness).unwrap();
        assert!(satisfies_all(&cert.formula, &a));
    }

    #[test]
    fn round_trip_satisfies() {
        let f = formula(3, &[&[1, 2, 3], &[-1, -2, 3], &[1, -2, -3]]);
        let (instance, cert) = reduce_3sat_to_sc(&f).unwrap();
        let a = Assignment::new(vec![true, false, false]);
        let choice = assignment_to_choice(&cert, &a).unwrap();
        assert!(instance.is_cover(&choice).unwrap());
        let back = choice_to_assignment(&cert, &choice).unwrap();
        assert!(satisfies_all(&f, &back));
    }

    #[test]
    fn non_cover_rejected() {
        let (instance, cert) = reduce_3sat_to_sc(&two_clause()).unwrap();
        let all_first = Choice::all_first(instance.num_segments());
        assert!(!instance.is_cover(&all_first).unwrap());
        assert_eq!(
            choice_to_assignment(&cert, &all_first),
            Err(Reduce3SatError::NotACover)
        );
        assert_eq!(
            choice_to_assignment(&cert, &Choice::all_first(3)),
            Err(Reduce3SatError::ChoiceLength {
                expected: 7,
                got: 3
            })
        );
    }
}
