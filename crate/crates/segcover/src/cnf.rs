//! CNF formulas, truth assignments, occurrence counting, and the
//! preprocessing the interval reductions require.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    /// 1-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Literal {
        assert!(var >= 1, "variables are 1-based");
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Literal {
        assert!(var >= 1, "variables are 1-based");
        Literal { var, positive: false }
    }

    pub fn negated(self) -> Literal {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }

    /// DIMACS encoding: +var for positive, -var for negative.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64;
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(code: i64) -> Option<Literal> {
        match code {
            0 => None,
            c if c > 0 => Some(Literal::pos(c as usize)),
            c => Some(Literal::neg((-c) as usize)),
        }
    }

    pub fn satisfied_by(self, value: bool) -> bool {
        value == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("clause {clause} uses variable {var} but the formula declares only {num_vars}")]
    VariableOutOfRange {
        clause: usize,
        var: usize,
        num_vars: usize,
    },
}

/// Clause order is significant: it is the ordering contiguity talks about.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, CnfError> {
        for (ci, clause) in clauses.iter().enumerate() {
            for lit in clause {
                if lit.var > num_vars {
                    return Err(CnfError::VariableOutOfRange {
                        clause: ci + 1,
                        var: lit.var,
                        num_vars,
                    });
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn empty(num_vars: usize) -> Self {
        CnfFormula {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn clause(&self, index: usize) -> &[Literal] {
        &self.clauses[index]
    }
}

impl<'de> Deserialize<'de> for CnfFormula {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num_vars: usize,
            clauses: Vec<Vec<Literal>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        CnfFormula::new(raw.num_vars, raw.clauses).map_err(serde::de::Error::custom)
    }
}

/// Total assignment: value for every variable 1..=n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn all_true(num_vars: usize) -> Self {
        Assignment {
            values: vec![true; num_vars],
        }
    }

    /// Assignment number `bits`, variable 1 on bit 0. For exhaustive sweeps.
    pub fn from_bits(num_vars: usize, bits: u64) -> Self {
        assert!(num_vars <= 63);
        Assignment {
            values: (0..num_vars).map(|i| bits >> i & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, var: usize) -> bool {
        self.values[var - 1]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.values[var - 1] = value;
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

/// Indices (1-based) of the clauses the assignment satisfies.
pub fn eval(formula: &CnfFormula, assignment: &Assignment) -> BTreeSet<usize> {
    assert_eq!(
        assignment.len(),
        formula.num_vars(),
        "assignment must be total"
    );
    formula
        .clauses()
        .iter()
        .enumerate()
        .filter(|(_, clause)| {
            clause
                .iter()
                .any(|lit| lit.satisfied_by(assignment.value(lit.var)))
        })
        .map(|(i, _)| i + 1)
        .collect()
}

pub fn satisfies_all(formula: &CnfFormula, assignment: &Assignment) -> bool {
    eval(formula, assignment).len() == formula.num_clauses()
}

/// Is there any satisfying assignment? Exhaustive; for small formulas only.
pub fn brute_force_satisfiable(formula: &CnfFormula) -> Option<Assignment> {
    assert!(formula.num_vars() <= 24, "brute-force SAT is for desk scale");
    (0..1u64 << formula.num_vars())
        .map(|bits| Assignment::from_bits(formula.num_vars(), bits))
        .find(|a| satisfies_all(formula, a))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OccurrenceProfile {
    /// (positive count, negative count) per variable, index var-1.
    counts: Vec<(usize, usize)>,
}

impl OccurrenceProfile {
    pub fn p(&self, var: usize) -> usize {
        self.counts[var - 1].0
    }

    pub fn n(&self, var: usize) -> usize {
        self.counts[var - 1].1
    }

    pub fn occurs(&self, var: usize) -> bool {
        self.p(var) + self.n(var) > 0
    }

    pub fn total_occurrences(&self) -> usize {
        self.counts.iter().map(|(p, n)| p + n).sum()
    }

    pub fn counts(&self) -> &[(usize, usize)] {
        &self.counts
    }
}

/// Per-variable literal occurrence counts; duplicates in a clause count once
/// per occurrence.
pub fn occurrence_profile(formula: &CnfFormula) -> OccurrenceProfile {
    let mut counts = vec![(0, 0); formula.num_vars()];
    for clause in formula.clauses() {
        for lit in clause {
            let slot = &mut counts[lit.var - 1];
            if lit.positive {
                slot.0 += 1;
            } else {
                slot.1 += 1;
            }
        }
    }
    OccurrenceProfile { counts }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PreprocessError {
    #[error("clause {clause} has {len} literals; preprocessing expects exactly 3")]
    ClauseArity { clause: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preprocessed {
    /// Equisatisfiable 3-CNF in which every remaining variable occurs with
    /// both polarities and no clause is tautological.
    Reducible(CnfFormula),
    /// Preprocessing alone settled satisfiability.
    Decided { satisfiable: bool, witness: Assignment },
}

/// Delete tautological clauses, then eliminate pure literals to fixpoint.
///
/// A variable occurring with only one polarity is fixed to the satisfying
/// value and its clauses are dropped; variables never touched default to
/// TRUE in the witness. The result is equisatisfiable with the input.
pub fn preprocess_for_reduction(formula: &CnfFormula) -> Result<Preprocessed, PreprocessError> {
    for (ci, clause) in formula.clauses().iter().enumerate() {
        if clause.len() != 3 {
            return Err(PreprocessError::ClauseArity {
                clause: ci + 1,
                len: clause.len(),
            });
        }
    }

    let mut clauses: Vec<Vec<Literal>> = formula
        .clauses()
        .iter()
        .filter(|clause| {
            !clause
                .iter()
                .any(|lit| clause.contains(&lit.negated()))
        })
        .cloned()
        .collect();

    let mut fixed: Vec<Option<bool>> = vec![None; formula.num_vars()];
    loop {
        let profile = occurrence_profile(
            &CnfFormula::new(formula.num_vars(), clauses.clone()).expect("vars unchanged"),
        );
        let pure = (1..=formula.num_vars()).find_map(|var| {
            match (profile.p(var), profile.n(var)) {
                (p, 0) if p > 0 => Some((var, true)),
                (0, n) if n > 0 => Some((var, false)),
                _ => None,
            }
        });
        match pure {
            None => break,
            Some((var, value)) => {
                fixed[var - 1] = Some(value);
                clauses.retain(|clause| !clause.iter().any(|lit| lit.var == var));
            }
        }
    }

    let witness = Assignment::new(fixed.iter().map(|v| v.unwrap_or(true)).collect());
    if clauses.is_empty() {
        Ok(Preprocessed::Decided {
            satisfiable: true,
            witness,
        })
    } else {
        Ok(Preprocessed::Reducible(
            CnfFormula::new(formula.num_vars(), clauses).expect("vars unchanged"),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DjpsyReport {
    pub ok: bool,
    /// 1-based indices of clauses that are not 3-literal.
    pub bad_clauses: Vec<usize>,
    /// Occurring variables violating {p,n} ⊆ {1,2} or p+n ≤ 3.
    pub bad_variables: Vec<usize>,
}

/// Bounded-occurrence check: every clause has exactly 3 literals and every
/// occurring variable has each polarity once or twice, at most 3 occurrences
/// in total. Unused variable indices are not counted against the formula.
pub fn validate_djpsy_form(formula: &CnfFormula) -> DjpsyReport {
    let bad_clauses: Vec<usize> = formula
        .clauses()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() != 3)
        .map(|(i, _)| i + 1)
        .collect();
    let profile = occurrence_profile(formula);
    let bad_variables: Vec<usize> = (1..=formula.num_vars())
        .filter(|&var| {
            let (p, n) = (profile.p(var), profile.n(var));
            p + n > 0 && !((1..=2).contains(&p) && (1..=2).contains(&n) && p + n <= 3)
        })
        .collect();
    DjpsyReport {
        ok: bad_clauses.is_empty() && bad_variables.is_empty(),
        bad_clauses,
        bad_variables,
    }
}

/// Clause from DIMACS-style codes; test and builder convenience.
pub fn clause(codes: &[i64]) -> Vec<Literal> {
    codes
        .iter()
        .map(|&c| Literal::from_dimacs(c).expect("0 terminates clauses, not a literal"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn formula(num_vars: usize, cls: &[&[i64]]) -> CnfFormula {
        CnfFormula::new(num_vars, cls.iter().map(|c| clause(c)).collect()).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = formula(1, &[&[1]]);
        assert_eq!(
            eval(&f, &Assignment::new(vec![true])),
            BTreeSet::from([1])
        );
        let g = formula(3, &[&[1, 2, 3], &[-1, -2, -3]]);
        assert_eq!(
            eval(&g, &Assignment::all_true(3)),
            BTreeSet::from([1])
        );
        let empty = CnfFormula::empty(0);
        assert_eq!(eval(&empty, &Assignment::new(vec![])), BTreeSet::new());
    }

    #[test]
    fn occurrence_profile_examples() {
        let f = formula(3, &[&[1, 2, 3], &[-1, -2, -3]]);
        let prof = occurrence_profile(&f);
        for var in 1..=3 {
            assert_eq!((prof.p(var), prof.n(var)), (1, 1));
        }
        let dup = formula(2, &[&[1, 1, 2]]);
        assert_eq!(occurrence_profile(&dup).p(1), 2);
        assert_eq!(occurrence_profile(&CnfFormula::empty(2)).total_occurrences(), 0);
    }

    #[test]
    fn preprocess_all_pure() {
        let f = formula(3, &[&[1, 2, 3]]);
        match preprocess_for_reduction(&f).unwrap() {
            Preprocessed::Decided { satisfiable, witness } => {
                assert!(satisfiable);
                assert!(witness.value(1));
                assert!(satisfies_all(&f, &witness));
            }
            other => panic!("expected decided, got {other:?}"),
        }
    }

    #[test]
    fn preprocess_keeps_balanced_formula() {
        let f = formula(3, &[&[1, 2, 3], &[-1, -2, -3]]);
        match preprocess_for_reduction(&f).unwrap() {
            Preprocessed::Reducible(g) => assert_eq!(g, f),
            other => panic!("expected reducible, got {other:?}"),
        }
    }

    #[test]
    fn preprocess_deletes_tautology() {
        let f = formula(2, &[&[1, -1, 2]]);
        match preprocess_for_reduction(&f).unwrap() {
            Preprocessed::Decided { satisfiable, .. } => assert!(satisfiable),
            other => panic!("expected decided, got {other:?}"),
        }
    }

    #[test]
    fn preprocess_cascades() {
        // Fixing x3 (pure positive) removes clause 3, which leaves x2 pure
        // and empties the formula in a second round.
        let f = formula(
            3,
            &[&[1, 1, 2], &[-1, -1, 2], &[-2, -1, 3]],
        );
        match preprocess_for_reduction(&f).unwrap() {
            Preprocessed::Decided { satisfiable, witness } => {
                assert!(satisfiable);
                assert!(satisfies_all(&f, &witness));
            }
            other => panic!("expected decided, got {other:?}"),
        }
    }

    #[test]
    fn preprocess_rejects_wrong_arity() {
        let f = formula(2, &[&[1, 2]]);
        assert_eq!(
            preprocess_for_reduction(&f),
            Err(PreprocessError::ClauseArity { clause: 1, len: 2 })
        );
    }

    #[test]
    fn preprocess_preserves_satisfiability_small() {
        // Every 3-clause formula over exactly the variables {1,2,3}.
        let all_clauses: Vec<Vec<Literal>> = (0..8u8)
            .map(|signs| {
                (0..3)
                    .map(|i| {
                        let var = i + 1;
                        if signs >> i & 1 == 0 {
                            Literal::pos(var)
                        } else {
                            Literal::neg(var)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut checked = 0;
        for a in 0..8 {
            for b in a..8 {
                for c in b..8 {
                    let f = CnfFormula::new(
                        3,
                        vec![
                            all_clauses[a].clone(),
                            all_clauses[b].clone(),
                            all_clauses[c].clone(),
                        ],
                    )
                    .unwrap();
                    let before = brute_force_satisfiable(&f).is_some();
                    let after = match preprocess_for_reduction(&f).unwrap() {
                        Preprocessed::Decided { satisfiable, witness } => {
                            assert!(satisfies_all(&f, &witness) || !satisfiable);
                            satisfiable
                        }
                        Preprocessed::Reducible(g) => brute_force_satisfiable(&g).is_some(),
                    };
                    assert_eq!(before, after);
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 120);
    }

    #[test]
    fn djpsy_validation() {
        // +,+,- occurrence pattern is fine.
        let f = formula(3, &[&[1, 2, 3], &[1, -2, -3], &[-1, 2, 3]]);
        assert!(validate_djpsy_form(&f).ok);

        // x1 occurring four times fails.
        let g = formula(
            3,
            &[&[1, 2, 3], &[1, -2, -3], &[-1, 2, -3], &[-1, -2, 3]],
        );
        let report = validate_djpsy_form(&g);
        assert!(!report.ok);
        assert!(report.bad_variables.contains(&1));

        // A 2-literal clause fails.
        let h = formula(3, &[&[1, 2], &[-1, -2, 3], &[1, 2, -3]]);
        let report = validate_djpsy_form(&h);
        assert!(!report.ok);
        assert_eq!(report.bad_clauses, vec![1]);
    }

    #[test]
    fn djpsy_ignores_unused_variables() {
        let f = formula(9, &[&[1, 2, 3], &[-1, -2, -3]]);
        assert!(validate_djpsy_form(&f).ok);
    }

    #[test]
    fn formula_validates_variable_range() {
        assert_eq!(
            CnfFormula::new(1, vec![clause(&[2])]),
            Err(CnfError::VariableOutOfRange {
                clause: 1,
                var: 2,
                num_vars: 1
            })
        );
    }
}
