//! Gap-producing reduction from exactly-3-CNF and its repair/extraction
//! procedure. Clause intervals of length 3 tile [0, 3s]; variables whose
//! polarity counts differ get dummy vertices, and every dummy edge's far
//! alternative is an exclusive sliver of the margin J' = [3s, 3s+ε]. A
//! repaired choice covers each clause interval fully or in exactly 2/3 of
//! its length, so its value is 2s plus the number of fully covered clauses.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::cnf::{Assignment, CnfFormula, Literal};
use crate::instance::{Choice, Pick, ScInstance, UncertainSegment};
use crate::interval::{union_length, Interval};
use crate::rational::Rational;
use crate::reduce3sat::{split_equal, t_picks_for_uncovered_slot};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GapError {
    #[error("clause {clause} has {len} literals; this construction expects exactly 3")]
    ClauseArity { clause: usize, len: usize },
    #[error("the margin length must be positive")]
    EpsilonNotPositive,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapClauseGadget {
    /// 0-based clause index.
    pub clause: usize,
    /// [3j, 3j+3].
    pub interval: Interval,
    pub thirds: [Interval; 3],
    pub t_segments: [usize; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct GapVertex {
    /// (clause, slot), both 0-based; None marks a dummy vertex.
    pub occurrence: Option<(usize, usize)>,
    /// One sub-interval per incident edge, indexed by the opposite vertex.
    pub parts: Vec<Interval>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapEdge {
    pub segment: usize,
    pub p_index: usize,
    pub n_index: usize,
    /// One endpoint is a dummy vertex, so one alternative is a margin sliver.
    pub dummy: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapVariableGadget {
    pub var: usize,
    /// How many leading vertices of each side are real occurrences; the rest
    /// are dummies padding the sides to equal size.
    pub real_positive: usize,
    pub real_negative: usize,
    pub positive: Vec<GapVertex>,
    pub negative: Vec<GapVertex>,
    pub edges: Vec<GapEdge>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapInstance {
    pub instance: ScInstance,
    pub formula: CnfFormula,
    pub s: usize,
    pub epsilon: Rational,
    /// Target length, 3s+ε.
    pub w: Rational,
    /// The margin [3s, 3s+ε] shared by all dummy edges.
    pub j_prime: Interval,
    pub clause_gadgets: Vec<GapClauseGadget>,
    pub variable_gadgets: Vec<GapVariableGadget>,
}

/// Clause intervals [3j, 3j+3] with unit thirds, T-segments as in the unit
/// reduction, and complete bipartite variable gadgets padded to equal sides
/// by dummy vertices whose edges fall back to exclusive slivers of J'.
/// Accepts any exactly-3-CNF: pure and tautological clauses need no special
/// handling here.
pub fn gap_instance_from_e3sat(
    formula: &CnfFormula,
    epsilon: &Rational,
) -> Result<GapInstance, GapError> {
    for (j, clause) in formula.clauses().iter().enumerate() {
        if clause.len() != 3 {
            return Err(GapError::ClauseArity {
                clause: j + 1,
                len: clause.len(),
            });
        }
    }
    if epsilon <= &Rational::zero() {
        return Err(GapError::EpsilonNotPositive);
    }
    let s = formula.num_clauses();
    let three_s = Rational::from_int(3 * s as i64);
    let target = Interval::new(Rational::zero(), &three_s + epsilon).unwrap();
    let j_prime = Interval::new(three_s.clone(), &three_s + epsilon).unwrap();
    let third = |j: usize, k: usize| {
        Interval::new(
            Rational::from_int((3 * j + k) as i64),
            Rational::from_int((3 * j + k + 1) as i64),
        )
        .unwrap()
    };

    let mut segments = Vec::new();
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
        clause_gadgets.push(GapClauseGadget {
            clause: j,
            interval: Interval::new(
                Rational::from_int(3 * j as i64),
                Rational::from_int(3 * (j + 1) as i64),
            )
            .unwrap(),
            thirds,
            t_segments,
        });
    }

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

    // Every dummy edge across all variables gets one exclusive sliver of J'.
    let mut dummy_edge_total = 0usize;
    for var in 1..=formula.num_vars() {
        let p = occurrences(Literal::pos(var)).len();
        let n = occurrences(Literal::neg(var)).len();
        if p + n > 0 {
            let m = p.max(n);
            dummy_edge_total += m * m - p * n;
        }
    }
    let mut next_sliver = 0usize;
    let sliver = |count: &mut usize| -> Interval {
        let width = epsilon / &Rational::from_int(dummy_edge_total as i64);
        let lo = j_prime.lo() + &(&width * &Rational::from_int(*count as i64));
        *count += 1;
        Interval::new(lo.clone(), lo + width).unwrap()
    };

    let mut variable_gadgets = Vec::new();
    for var in 1..=formula.num_vars() {
        let pos = occurrences(Literal::pos(var));
        let neg = occurrences(Literal::neg(var));
        if pos.is_empty() && neg.is_empty() {
            continue;
        }
        let m = pos.len().max(neg.len());
        let side = |occs: &[(usize, usize)]| -> Vec<GapVertex> {
            let mut vertices: Vec<GapVertex> = occs
                .iter()
                .map(|&(j, k)| GapVertex {
                    occurrence: Some((j, k)),
                    parts: split_equal(&third(j, k), m),
                })
                .collect();
            vertices.resize_with(m, || GapVertex {
                occurrence: None,
                parts: Vec::new(),
            });
            vertices
        };
        let mut positive = side(&pos);
        let mut negative = side(&neg);
        let mut edges = Vec::new();
        for a in 0..m {
            for b in 0..m {
                let p_dummy = a >= pos.len();
                let n_dummy = b >= neg.len();
                debug_assert!(!(p_dummy && n_dummy), "dummies pad only one side");
                let first = if p_dummy {
                    let part = sliver(&mut next_sliver);
                    positive[a].parts.push(part.clone());
                    part
                } else {
                    positive[a].parts[b].clone()
                };
                let second = if n_dummy {
                    let part = sliver(&mut next_sliver);
                    negative[b].parts.push(part.clone());
                    part
                } else {
                    negative[b].parts[a].clone()
                };
                edges.push(GapEdge {
                    segment: segments.len(),
                    p_index: a,
                    n_index: b,
                    dummy: p_dummy || n_dummy,
                });
                segments.push(UncertainSegment::new(
                    first,
                    second,
                    format!("x{}.P{}N{}", var, a + 1, b + 1),
                ));
            }
        }
        variable_gadgets.push(GapVariableGadget {
            var,
            real_positive: pos.len(),
            real_negative: neg.len(),
            positive,
            negative,
            edges,
        });
    }
    debug_assert_eq!(next_sliver, dummy_edge_total);

    let w = target.length();
    let instance = ScInstance::new(target, segments).expect("gadgets stay inside the target");
    Ok(GapInstance {
        instance,
        formula: formula.clone(),
        s,
        epsilon: epsilon.clone(),
        w,
        j_prime,
        clause_gadgets,
        variable_gadgets,
    })
}

/// Covered length inside a window of the target.
pub fn value_within(gap: &GapInstance, choice: &Choice, window: &Interval) -> Rational {
    let chosen = gap
        .instance
        .chosen_intervals(choice)
        .expect("choice matches the instance");
    let clipped: Vec<Interval> = chosen
        .iter()
        .filter_map(|iv| iv.intersect(window))
        .collect();
    union_length(&clipped)
}

/// Covered length of each clause interval; a repaired choice yields 3
/// (fully covered) or 2 for every entry.
pub fn clause_coverage(gap: &GapInstance, choice: &Choice) -> Vec<Rational> {
    gap.clause_gadgets
        .iter()
        .map(|cg| value_within(gap, choice, &cg.interval))
        .collect()
}

/// 1-based indices of clauses whose interval the choice covers completely.
pub fn fully_covered_clauses(gap: &GapInstance, choice: &Choice) -> Vec<usize> {
    let three = Rational::from_int(3);
    clause_coverage(gap, choice)
        .iter()
        .enumerate()
        .filter(|(_, len)| **len == three)
        .map(|(j, _)| j + 1)
        .collect()
}

fn vertex_index(
    gap: &GapInstance,
) -> BTreeMap<(usize, usize), (usize, bool, usize)> {
    let mut map = BTreeMap::new();
    for (g, gadget) in gap.variable_gadgets.iter().enumerate() {
        for (i, v) in gadget.positive.iter().enumerate() {
            if let Some(occ) = v.occurrence {
                map.insert(occ, (g, true, i));
            }
        }
        for (i, v) in gadget.negative.iter().enumerate() {
            if let Some(occ) = v.occurrence {
                map.insert(occ, (g, false, i));
            }
        }
    }
    map
}

fn vertex_fully_chosen(
    gadget: &GapVariableGadget,
    choice: &Choice,
    positive: bool,
    index: usize,
) -> bool {
    gadget.edges.iter().all(|e| {
        if positive && e.p_index == index {
            choice.picks()[e.segment] == Pick::First
        } else if !positive && e.n_index == index {
            choice.picks()[e.segment] == Pick::Second
        } else {
            true
        }
    })
}

/// 1-based indices of clauses every one of whose T-uncovered thirds has its
/// occurrence vertex chosen by all incident edges. On repaired choices this
/// coincides with `fully_covered_clauses`, and each certified clause is
/// satisfied by the extracted assignment.
pub fn certified_clauses(gap: &GapInstance, choice: &Choice) -> Vec<usize> {
    let index = vertex_index(gap);
    let mut out = Vec::new();
    for cg in &gap.clause_gadgets {
        let t1 = choice.picks()[cg.t_segments[0]];
        let t2 = choice.picks()[cg.t_segments[1]];
        let covered = [
            matches!(t1, Pick::First),
            matches!(t1, Pick::Second) || matches!(t2, Pick::First),
            matches!(t2, Pick::Second),
        ];
        let all_chosen = (0..3).filter(|&k| !covered[k]).all(|k| {
            let (g, positive, i) = index[&(cg.clause, k)];
            vertex_fully_chosen(&gap.variable_gadgets[g], choice, positive, i)
        });
        if all_chosen {
            out.push(cg.clause + 1);
        }
    }
    out
}

/// Repair a choice in three passes — (a) send margin picks back to their
/// real alternative, (b) re-pick any T-pair covering only the middle third
/// so the first two thirds are covered, (c) per variable, commit every
/// non-dummy edge to one side of the gadget — then read the assignment off
/// the committed sides. The side is the one holding vertices of T-uncovered
/// thirds if those sit on one side only; otherwise the dummy-free side, or
/// on balanced gadgets the side with more such vertices, ties to positive.
/// Afterwards every clause interval is covered fully or in exactly 2/3 of
/// its length, and the value is exactly 2s plus the number of fully covered
/// clauses.
pub fn repair_and_extract(gap: &GapInstance, choice: &Choice) -> (Choice, Assignment) {
    assert_eq!(
        choice.len(),
        gap.instance.num_segments(),
        "choice must match the instance"
    );
    let mut picks = choice.picks().to_vec();

    for gadget in &gap.variable_gadgets {
        for e in &gadget.edges {
            if e.dummy {
                picks[e.segment] = if e.p_index >= gadget.real_positive {
                    Pick::Second
                } else {
                    Pick::First
                };
            }
        }
    }

    for cg in &gap.clause_gadgets {
        if picks[cg.t_segments[0]] == Pick::Second && picks[cg.t_segments[1]] == Pick::First {
            picks[cg.t_segments[0]] = Pick::First;
        }
    }
    let uncovered_slot: Vec<usize> = gap
        .clause_gadgets
        .iter()
        .map(
            |cg| match (picks[cg.t_segments[0]], picks[cg.t_segments[1]]) {
                (Pick::First, Pick::First) => 2,
                (Pick::First, Pick::Second) => 1,
                (Pick::Second, Pick::Second) => 0,
                (Pick::Second, Pick::First) => unreachable!("normalized above"),
            },
        )
        .collect();

    let mut values = vec![true; gap.formula.num_vars()];
    for gadget in &gap.variable_gadgets {
        let needy = |vertices: &[GapVertex], real: usize| -> usize {
            vertices[..real]
                .iter()
                .filter(|v| {
                    let (j, k) = v.occurrence.expect("real vertices carry occurrences");
                    uncovered_slot[j] == k
                })
                .count()
        };
        let needy_pos = needy(&gadget.positive, gadget.real_positive);
        let needy_neg = needy(&gadget.negative, gadget.real_negative);
        let dummies_on_positive = gadget.real_positive < gadget.real_negative;
        let has_dummies = gadget.real_positive != gadget.real_negative;
        let side_positive = match (needy_pos > 0, needy_neg > 0) {
            (true, false) => true,
            (false, true) => false,
            _ if has_dummies => !dummies_on_positive,
            _ => needy_pos >= needy_neg,
        };
        for e in &gadget.edges {
            if !e.dummy {
                picks[e.segment] = if side_positive {
                    Pick::First
                } else {
                    Pick::Second
                };
            }
        }
        values[gadget.var - 1] = side_positive;
    }

    (Choice::new(picks), Assignment::new(values))
}

/// Total function from assignments to choices: T-pairs dodge the lowest
/// satisfied slot (or cover the first two thirds when the clause is
/// unsatisfied), non-dummy edges follow the variable's value, dummy edges
/// stay on their real side.
pub fn gap_assignment_to_choice(gap: &GapInstance, assignment: &Assignment) -> Choice {
    assert_eq!(assignment.len(), gap.formula.num_vars());
    let mut picks = vec![Pick::First; gap.instance.num_segments()];
    for cg in &gap.clause_gadgets {
        let k_star = gap
            .formula
            .clause(cg.clause)
            .iter()
            .position(|lit| lit.satisfied_by(assignment.value(lit.var)))
            .unwrap_or(2);
        let (p1, p2) = t_picks_for_uncovered_slot(k_star);
        picks[cg.t_segments[0]] = p1;
        picks[cg.t_segments[1]] = p2;
    }
    for gadget in &gap.variable_gadgets {
        for e in &gadget.edges {
            picks[e.segment] = if e.dummy {
                if e.p_index >= gadget.real_positive {
                    Pick::Second
                } else {
                    Pick::First
                }
            } else if assignment.value(gadget.var) {
                Pick::First
            } else {
                Pick::Second
            };
        }
    }
    Choice::new(picks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::max_sc_value;
    use crate::cnf::{clause, eval, satisfies_all};
    use crate::interval::ival;
    use crate::rational::rat;

    fn two_clause() -> CnfFormula {
        CnfFormula::new(3, vec![clause(&[1, 2, 3]), clause(&[-1, -2, -3])]).unwrap()
    }

    fn eps() -> Rational {
        rat("1/1000")
    }

    #[test]
    fn balanced_formula_needs_no_dummies() {
        let gap = gap_instance_from_e3sat(&two_clause(), &eps()).unwrap();
        assert_eq!(gap.instance.num_segments(), 7);
        assert_eq!(gap.w, rat("6001/1000"));
        assert_eq!(gap.instance.target(), &ival("0", "6001/1000"));
        assert_eq!(gap.j_prime, ival("6", "6001/1000"));
        for g in &gap.variable_gadgets {
            assert_eq!(g.edges.len(), 1);
            assert!(g.edges.iter().all(|e| !e.dummy));
        }

        let satisfying = Assignment::new(vec![true, false, false]);
        assert!(satisfies_all(&gap.formula, &satisfying));
        let choice = gap_assignment_to_choice(&gap, &satisfying);
        assert_eq!(max_sc_value(&gap.instance, &choice).unwrap(), rat("6"));
        assert_eq!(clause_coverage(&gap, &choice), vec![rat("3"), rat("3")]);
        assert_eq!(value_within(&gap, &choice, &gap.j_prime), rat("0"));
    }

    fn lopsided() -> CnfFormula {
        // x, y, z each appear twice positively and once negatively.
        CnfFormula::new(
            3,
            vec![clause(&[1, 2, 3]), clause(&[1, -2, -3]), clause(&[-1, 2, 3])],
        )
        .unwrap()
    }

    #[test]
    fn lopsided_variable_gets_a_dummy_vertex() {
        let gap = gap_instance_from_e3sat(&lopsided(), &eps()).unwrap();
        // 6 T-segments plus three K_{2,2} gadgets.
        assert_eq!(gap.instance.num_segments(), 18);
        let x = &gap.variable_gadgets[0];
        assert_eq!((x.real_positive, x.real_negative), (2, 1));
        assert_eq!((x.positive.len(), x.negative.len()), (2, 2));
        assert!(x.negative[1].occurrence.is_none());
        assert_eq!(x.edges.len(), 4);
        assert_eq!(x.edges.iter().filter(|e| e.dummy).count(), 2);
        assert_eq!(x.positive[0].parts, split_equal(&ival("0", "1"), 2));

        // Six dummy edges in all; their slivers tile the margin exactly.
        let mut slivers = Vec::new();
        for g in &gap.variable_gadgets {
            for e in &g.edges {
                if e.dummy {
                    let seg = &gap.instance.segments()[e.segment];
                    slivers.push(seg.interval(Pick::Second).clone());
                }
            }
        }
        assert_eq!(slivers.len(), 6);
        assert!(slivers.iter().all(|s| s.length() == &gap.epsilon / &rat("6")));
        assert!(slivers.iter().all(|s| gap.j_prime.contains(s)));
        assert_eq!(union_length(&slivers), gap.epsilon);
    }

    #[test]
    fn satisfying_assignment_survives_repair_unchanged() {
        let gap = gap_instance_from_e3sat(&lopsided(), &eps()).unwrap();
        let satisfying = Assignment::new(vec![true, true, true]);
        assert!(satisfies_all(&gap.formula, &satisfying));
        let choice = gap_assignment_to_choice(&gap, &satisfying);
        assert_eq!(max_sc_value(&gap.instance, &choice).unwrap(), rat("9"));

        let (repaired, extracted) = repair_and_extract(&gap, &choice);
        assert_eq!(repaired, choice);
        assert_eq!(extracted, satisfying);
        assert_eq!(fully_covered_clauses(&gap, &repaired), vec![1, 2, 3]);
        assert_eq!(certified_clauses(&gap, &repaired), vec![1, 2, 3]);
    }

    #[test]
    fn all_first_choice_repairs_without_loss_here() {
        let gap = gap_instance_from_e3sat(&two_clause(), &eps()).unwrap();
        let choice = Choice::all_first(7);
        let before = max_sc_value(&gap.instance, &choice).unwrap();
        let (repaired, extracted) = repair_and_extract(&gap, &choice);
        let after = max_sc_value(&gap.instance, &repaired).unwrap();
        assert_eq!(before, rat("5"));
        assert_eq!(after, rat("5"));
        assert_eq!(extracted, Assignment::new(vec![true, true, true]));
        assert_eq!(fully_covered_clauses(&gap, &repaired), vec![1]);
        assert_eq!(certified_clauses(&gap, &repaired), vec![1]);
        assert_eq!(eval(&gap.formula, &extracted), [1].into_iter().collect());
    }

    #[test]
    fn unsatisfied_clause_stays_at_two_thirds() {
        let gap = gap_instance_from_e3sat(&two_clause(), &eps()).unwrap();
        let all_false = Assignment::new(vec![false, false, false]);
        let choice = gap_assignment_to_choice(&gap, &all_false);
        assert_eq!(clause_coverage(&gap, &choice), vec![rat("2"), rat("3")]);
        assert_eq!(certified_clauses(&gap, &choice), vec![2]);
        assert_eq!(max_sc_value(&gap.instance, &choice).unwrap(), rat("5"));
    }

    /// A choice whose repair provably costs 1/2 regardless of the side each
    /// variable commits to; kept as a record of the procedure's real bound.
    #[test]
    fn repair_can_cost_half() {
        let formula = CnfFormula::new(
            3,
            vec![
                clause(&[1, 2, 3]),
                clause(&[1, -2, 3]),
                clause(&[-1, 2, -3]),
                clause(&[-1, -2, -3]),
            ],
        )
        .unwrap();
        let gap = gap_instance_from_e3sat(&formula, &eps()).unwrap();
        assert_eq!(gap.instance.num_segments(), 20);
        assert!(gap.variable_gadgets.iter().all(|g| g.edges.len() == 4));

        use Pick::{First as F, Second as S};
        let picks = vec![
            S, S, F, S, S, S, F, S, // T-pairs: dodge slots 0, 1, 0, 1
            F, F, S, F, // x edges
            S, S, S, S, // y edges
            F, F, F, F, // z edges
        ];
        let choice = Choice::new(picks);
        let before = max_sc_value(&gap.instance, &choice).unwrap();
        assert_eq!(before, rat("23/2"));

        let (repaired, extracted) = repair_and_extract(&gap, &choice);
        let after = max_sc_value(&gap.instance, &repaired).unwrap();
        assert_eq!(after, rat("11"));
        assert_eq!(before - &after, rat("1/2"));

        let coverage = clause_coverage(&gap, &repaired);
        assert_eq!(coverage, vec![rat("3"), rat("3"), rat("2"), rat("3")]);
        assert_eq!(extracted, Assignment::new(vec![true, false, true]));
        assert_eq!(fully_covered_clauses(&gap, &repaired), vec![1, 2, 4]);
        assert_eq!(certified_clauses(&gap, &repaired), vec![1, 2, 4]);
        assert_eq!(
            eval(&gap.formula, &extracted),
            [1, 2, 4].into_iter().collect()
        );
    }

    #[test]
    fn accounting_holds_for_every_choice_of_a_small_instance() {
        let gap = gap_instance_from_e3sat(&two_clause(), &eps()).unwrap();
        let n = gap.instance.num_segments();
        let two_s = rat("4");
        for bits in 0..1u64 << n {
            let choice = Choice::from_index(n, bits);
            let (repaired, extracted) = repair_and_extract(&gap, &choice);
            let value = max_sc_value(&gap.instance, &repaired).unwrap();
            let coverage = clause_coverage(&gap, &repaired);
            assert!(coverage.iter().all(|c| *c == rat("2") || *c == rat("3")));

            let full = fully_covered_clauses(&gap, &repaired);
            let certified = certified_clauses(&gap, &repaired);
            assert_eq!(certified, full);
            assert_eq!(value, &two_s + &rat(&full.len().to_string()));

            let satisfied = eval(&gap.formula, &extracted);
            assert!(certified.iter().all(|j| satisfied.contains(j)));
            let floor = &value - &two_s;
            assert!(rat(&satisfied.len().to_string()) >= floor);
        }
    }

    #[test]
    fn preconditions_are_checked() {
        let short = CnfFormula::new(2, vec![vec![Literal::pos(1), Literal::neg(2)]]).unwrap();
        assert!(matches!(
            gap_instance_from_e3sat(&short, &eps()),
            Err(GapError::ClauseArity { clause: 1, len: 2 })
        ));
        assert!(matches!(
            gap_instance_from_e3sat(&two_clause(), &rat("0")),
            Err(GapError::EpsilonNotPositive)
        ));
    }
}
