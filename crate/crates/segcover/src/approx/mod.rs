//! Maximization objectives over choices: total covered length, longest
//! contiguous covered run, the weighted-CNF view of the first, a
//! derandomized greedy for it, and the copy-concatenation amplifier for the
//! contiguous objective.

pub mod gap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cells::decompose_cells;
use crate::cnf::{Assignment, Literal};
use crate::equivalence::SegmentVarMap;
use crate::instance::{Choice, InstanceError, ScInstance, UncertainSegment};
use crate::interval::{merge_intervals, union_length, Interval};
use crate::rational::Rational;

/// Total covered length of the target under a choice.
pub fn max_sc_value(
    instance: &ScInstance,
    choice: &Choice,
) -> Result<Rational, InstanceError> {
    Ok(union_length(&instance.chosen_intervals(choice)?))
}

/// Length and location of the longest contiguous covered run; ties go to the
/// leftmost run, and a choice covering nothing reports a degenerate interval
/// at the target's left end.
pub fn contiguous_value(
    instance: &ScInstance,
    choice: &Choice,
) -> Result<(Rational, Interval), InstanceError> {
    let runs = merge_intervals(&instance.chosen_intervals(choice)?);
    let mut best = (
        Rational::zero(),
        Interval::point(instance.target().lo().clone()),
    );
    for run in runs {
        let len = run.length();
        if len > best.0 {
            best = (len, run);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedClause {
    pub literals: Vec<Literal>,
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedCnf {
    pub num_vars: usize,
    pub clauses: Vec<WeightedClause>,
}

impl WeightedCnf {
    pub fn total_weight(&self) -> Rational {
        self.clauses
            .iter()
            .fold(Rational::zero(), |acc, c| acc + &c.weight)
    }
}

/// One weighted clause per positive-length cell: the cell's length as the
/// weight, its coverers as the literals (FIRST positive, SECOND negated).
/// Satisfied weight under any assignment equals the covered length of the
/// corresponding choice.
pub fn sc_to_weighted_maxsat(instance: &ScInstance) -> (WeightedCnf, SegmentVarMap) {
    let cells = decompose_cells(instance);
    let clauses = cells
        .cells
        .iter()
        .map(|cell| WeightedClause {
            literals: cell
                .coverers
                .iter()
                .map(|c| Literal {
                    var: c.segment + 1,
                    positive: c.pick == crate::instance::Pick::First,
                })
                .collect(),
            weight: cell.interval.length(),
        })
        .collect();
    (
        WeightedCnf {
            num_vars: instance.num_segments(),
            clauses,
        },
        SegmentVarMap::new(instance.num_segments()),
    )
}

pub fn satisfied_weight(wcnf: &WeightedCnf, assignment: &Assignment) -> Rational {
    wcnf.clauses
        .iter()
        .filter(|c| {
            c.literals
                .iter()
                .any(|lit| lit.satisfied_by(assignment.value(lit.var)))
        })
        .fold(Rational::zero(), |acc, c| acc + &c.weight)
}

/// Σ w_c (1 − 2^(−|c|)): what a uniform random assignment satisfies in
/// expectation, hence a floor for the greedy below.
pub fn greedy_weight_bound(wcnf: &WeightedCnf) -> Rational {
    let half = Rational::new(1, 2);
    wcnf.clauses.iter().fold(Rational::zero(), |acc, c| {
        acc + &c.weight * (Rational::one() - half.pow(c.literals.len() as i32))
    })
}

fn expected_weight(wcnf: &WeightedCnf, values: &[Option<bool>]) -> Rational {
    let half = Rational::new(1, 2);
    let mut total = Rational::zero();
    for c in &wcnf.clauses {
        let mut satisfied = false;
        let mut unassigned = 0;
        for lit in &c.literals {
            match values[lit.var - 1] {
                Some(v) if lit.satisfied_by(v) => {
                    satisfied = true;
                    break;
                }
                Some(_) => {}
                None => unassigned += 1,
            }
        }
        if satisfied {
            total = total + &c.weight;
        } else if unassigned > 0 {
            total = total + &c.weight * (Rational::one() - half.pow(unassigned));
        }
    }
    total
}

/// Conditional-expectation derandomization: fix variables in index order to
/// whichever value keeps the expected satisfied weight higher, ties to TRUE.
/// The result's weight is at least `greedy_weight_bound`.
pub fn greedy_maxsat(wcnf: &WeightedCnf) -> Assignment {
    let mut values: Vec<Option<bool>> = vec![None; wcnf.num_vars];
    for var in 1..=wcnf.num_vars {
        values[var - 1] = Some(true);
        let e_true = expected_weight(wcnf, &values);
        values[var - 1] = Some(false);
        let e_false = expected_weight(wcnf, &values);
        values[var - 1] = Some(e_true >= e_false);
    }
    Assignment::new(values.into_iter().map(|v| v.unwrap()).collect())
}

/// Greedy MAX-SAT mapped back through the cell encoding; the reported value
/// is the covered length of the returned choice.
pub fn approx_max_sc(instance: &ScInstance) -> (Choice, Rational) {
    let (wcnf, map) = sc_to_weighted_maxsat(instance);
    let assignment = greedy_maxsat(&wcnf);
    let choice = map.assignment_to_choice(&assignment);
    let value = max_sc_value(instance, &choice).expect("choice built to length");
    (choice, value)
}

/// WDIMACS text with weights scaled to integers by the least common
/// denominator, recorded in a leading comment.
pub fn write_wdimacs(wcnf: &WeightedCnf) -> String {
    let scale = wcnf
        .clauses
        .iter()
        .map(|c| c.weight.denom().clone())
        .fold(BigInt::from(1), |acc, d| acc.lcm(&d));
    let mut out = String::new();
    out.push_str(&format!("c weight scale {scale}\n"));
    out.push_str(&format!(
        "p wcnf {} {}\n",
        wcnf.num_vars,
        wcnf.clauses.len()
    ));
    for c in &wcnf.clauses {
        let w = c.weight.numer() * (&scale / c.weight.denom());
        out.push_str(&w.to_string());
        for lit in &c.literals {
            out.push_str(&format!(" {}", lit.to_dimacs()));
        }
        out.push_str(" 0\n");
    }
    out
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AmplifyError {
    #[error("exponent ratio must be strictly between 0 and 1")]
    EpsilonOutOfRange,
    #[error("amplification needs a target of positive length")]
    DegenerateTarget,
    #[error("amplification would need {copies} copies, beyond the supported size")]
    TooManyCopies { copies: u64 },
}

const COPY_BUDGET: u64 = 1_000_000;

/// Concatenate f translated copies of the instance over [0, f·n], where f is
/// the least integer with f^ε strictly above 2·n^(1−ε), plus one. Any
/// contiguous covered run longer than 2n must then contain a whole copy.
pub fn amplify(instance: &ScInstance, ratio: &Rational) -> Result<ScInstance, AmplifyError> {
    if !(ratio > &Rational::zero() && ratio < &Rational::one()) {
        return Err(AmplifyError::EpsilonOutOfRange);
    }
    let n = instance.target().length();
    if n.is_zero() {
        return Err(AmplifyError::DegenerateTarget);
    }
    let (a, b) = match (ratio.numer().to_i32(), ratio.denom().to_i32()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(AmplifyError::EpsilonOutOfRange),
    };
    // Least k with k^a ≥ 2^b n^(b−a), found by bisection; f = k+1 makes the
    // inequality strict even when the root is an exact integer.
    let rhs = Rational::from_int(2).pow(b) * n.pow(b - a);
    let holds = |k: u64| Rational::from_int(k as i64).pow(a) >= rhs;
    if !holds(COPY_BUDGET) {
        return Err(AmplifyError::TooManyCopies { copies: COPY_BUDGET });
    }
    let (mut lo, mut hi) = (1u64, COPY_BUDGET);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let f = lo + 1;
    if f.saturating_mul(instance.num_segments().max(1) as u64) > COPY_BUDGET {
        return Err(AmplifyError::TooManyCopies { copies: f });
    }

    let target = Interval::new(Rational::zero(), Rational::from_int(f as i64) * &n).unwrap();
    let mut segments = Vec::with_capacity(instance.num_segments() * f as usize);
    for c in 0..f {
        let offset = Rational::from_int(c as i64) * &n - instance.target().lo();
        for seg in instance.segments() {
            segments.push(UncertainSegment::new(
                seg.interval(crate::instance::Pick::First).translate(&offset),
                seg.interval(crate::instance::Pick::Second).translate(&offset),
                format!("{}@{}", seg.label, c),
            ));
        }
    }
    Ok(ScInstance::new(target, segments).expect("translated copies stay inside"))
}

/// The copy count `amplify` would use.
pub fn amplification_factor(instance: &ScInstance, ratio: &Rational) -> Result<u64, AmplifyError> {
    let amplified = amplify(instance, ratio)?;
    let n = instance.num_segments().max(1);
    Ok((amplified.num_segments().max(1) / n) as u64)
}
