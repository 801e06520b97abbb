//! Exact decision procedures for covering: an exhaustive bitmask search, a
//! cover counter, and a backtracking solver that works on the contiguous
//! CNF encoding. All of them agree by construction-independent tests.

use std::io;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::cells::{decompose_cells, CellDecomposition};
use crate::cnf::{Assignment, CnfFormula, Literal};
use crate::dimacs::write_dimacs;
use crate::equivalence::sc_to_contiguous_sat;
use crate::instance::{Choice, Pick, ScInstance};

pub const DEFAULT_BRUTE_LIMIT: usize = 24;

/// Masks hold 4·64 = 256 cell bits; 63 segments induce at most 4·63+1 = 253
/// positive-length cells, so 63 is the hard cap regardless of the limit.
const HARD_SEGMENT_CAP: usize = 63;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("instance has {segments} segments, above the limit {limit}")]
    LimitExceeded { segments: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverStatus {
    Coverable,
    Uncoverable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub nodes: u64,
    pub cells: usize,
    /// Wall-clock time; excluded from serialized reports to keep them
    /// byte-reproducible.
    #[serde(skip)]
    pub duration: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveResult {
    pub status: CoverStatus,
    pub witness: Option<Choice>,
    pub stats: SolveStats,
}

impl SolveResult {
    fn new(witness: Option<Choice>, nodes: u64, cells: usize, started: Instant) -> Self {
        SolveResult {
            status: if witness.is_some() {
                CoverStatus::Coverable
            } else {
                CoverStatus::Uncoverable
            },
            witness,
            stats: SolveStats {
                nodes,
                cells,
                duration: started.elapsed(),
            },
        }
    }

    pub fn is_coverable(&self) -> bool {
        self.status == CoverStatus::Coverable
    }
}

type CellMask = [u64; 4];

fn mask_set(mask: &mut CellMask, bit: usize) {
    mask[bit / 64] |= 1 << (bit % 64);
}

fn mask_or(a: CellMask, b: CellMask) -> CellMask {
    [a[0] | b[0], a[1] | b[1], a[2] | b[2], a[3] | b[3]]
}

fn mask_covers(a: CellMask, required: CellMask) -> bool {
    (0..4).all(|i| a[i] & required[i] == required[i])
}

struct BruteSearch {
    /// Cell coverage per (segment, pick); index 2k for FIRST, 2k+1 for SECOND.
    pick_masks: Vec<CellMask>,
    /// suffix[d] = union of everything segments d.. could still cover.
    suffix: Vec<CellMask>,
    full: CellMask,
    n: usize,
    nodes: u64,
}

impl BruteSearch {
    fn new(instance: &ScInstance, cells: &CellDecomposition) -> Self {
        let n = instance.num_segments();
        assert!(cells.cells.len() <= 256, "cell mask capacity");
        let mut full = [0u64; 4];
        for bit in 0..cells.cells.len() {
            mask_set(&mut full, bit);
        }
        let mut pick_masks = vec![[0u64; 4]; 2 * n];
        for (bit, cell) in cells.cells.iter().enumerate() {
            for c in &cell.coverers {
                let slot = 2 * c.segment + (c.pick == Pick::Second) as usize;
                mask_set(&mut pick_masks[slot], bit);
            }
        }
        let mut suffix = vec![[0u64; 4]; n + 1];
        for k in (0..n).rev() {
            suffix[k] = mask_or(
                suffix[k + 1],
                mask_or(pick_masks[2 * k], pick_masks[2 * k + 1]),
            );
        }
        BruteSearch {
            pick_masks,
            suffix,
            full,
            n,
            nodes: 0,
        }
    }

    /// First covering completion of `prefix` in lexicographic pick order
    /// (FIRST < SECOND). Prunes subtrees that cannot reach full coverage;
    /// this never changes which choices cover, only skips hopeless ones.
    fn find(&mut self, depth: usize, acc: CellMask, prefix: &mut Vec<Pick>) -> bool {
        self.nodes += 1;
        if mask_covers(acc, self.full) {
            prefix.extend(std::iter::repeat(Pick::First).take(self.n - depth));
            return true;
        }
        if depth == self.n || !mask_covers(mask_or(acc, self.suffix[depth]), self.full) {
            return false;
        }
        for pick in [Pick::First, Pick::Second] {
            let slot = 2 * depth + (pick == Pick::Second) as usize;
            prefix.push(pick);
            if self.find(depth + 1, mask_or(acc, self.pick_masks[slot]), prefix) {
                return true;
            }
            prefix.pop();
        }
        false
    }

    fn count(&mut self, depth: usize, acc: CellMask) -> u128 {
        self.nodes += 1;
        if mask_covers(acc, self.full) {
            return 1u128 << (self.n - depth);
        }
        if depth == self.n || !mask_covers(mask_or(acc, self.suffix[depth]), self.full) {
            return 0;
        }
        let first = self.count(depth + 1, mask_or(acc, self.pick_masks[2 * depth]));
        first + self.count(depth + 1, mask_or(acc, self.pick_masks[2 * depth + 1]))
    }
}

fn check_limit(instance: &ScInstance, limit: usize) -> Result<(), SolverError> {
    let effective = limit.min(HARD_SEGMENT_CAP);
    if instance.num_segments() > effective {
        return Err(SolverError::LimitExceeded {
            segments: instance.num_segments(),
            limit: effective,
        });
    }
    Ok(())
}

pub fn solve_brute(instance: &ScInstance) -> Result<SolveResult, SolverError> {
    solve_brute_with_limit(instance, DEFAULT_BRUTE_LIMIT)
}

/// Exhaustive search over all 2^n choices; returns the lexicographically
/// first covering choice (FIRST < SECOND) if any.
pub fn solve_brute_with_limit(
    instance: &ScInstance,
    limit: usize,
) -> Result<SolveResult, SolverError> {
    check_limit(instance, limit)?;
    let started = Instant::now();
    let cells = decompose_cells(instance);
    let mut search = BruteSearch::new(instance, &cells);
    let mut prefix = Vec::with_capacity(instance.num_segments());
    let witness = search
        .find(0, [0u64; 4], &mut prefix)
        .then(|| Choice::new(prefix));
    if let Some(w) = &witness {
        debug_assert!(instance.is_cover(w).unwrap());
    }
    Ok(SolveResult::new(witness, search.nodes, cells.cells.len(), started))
}

pub fn count_covers(instance: &ScInstance) -> Result<u128, SolverError> {
    count_covers_with_limit(instance, DEFAULT_BRUTE_LIMIT)
}

/// Number of covering choices among all 2^n.
pub fn count_covers_with_limit(
    instance: &ScInstance,
    limit: usize,
) -> Result<u128, SolverError> {
    check_limit(instance, limit)?;
    let cells = decompose_cells(instance);
    let mut search = BruteSearch::new(instance, &cells);
    Ok(search.count(0, [0u64; 4]))
}

struct Dpll<'a> {
    clauses: &'a [Vec<Literal>],
    nodes: u64,
}

impl Dpll<'_> {
    /// None on conflict; Some(changed) otherwise.
    fn propagate(&self, values: &mut [Option<bool>]) -> Option<bool> {
        let mut changed_any = false;
        loop {
            let mut changed = false;
            for clause in self.clauses {
                let mut satisfied = false;
                let mut unassigned: Option<Literal> = None;
                let mut unassigned_count = 0;
                for lit in clause {
                    match values[lit.var - 1] {
                        Some(v) if lit.satisfied_by(v) => {
                            satisfied = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            if unassigned != Some(*lit) {
                                unassigned_count += 1;
                            }
                            unassigned = Some(*lit);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match unassigned_count {
                    0 => return None,
                    1 => {
                        let lit = unassigned.unwrap();
                        values[lit.var - 1] = Some(lit.positive);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
            changed_any = true;
        }
        Some(changed_any)
    }

    /// Assign variables that occur with a single polarity among clauses not
    /// yet satisfied. Returns whether anything was assigned.
    fn assign_pure(&self, values: &mut [Option<bool>]) -> bool {
        let mut seen_pos = vec![false; values.len()];
        let mut seen_neg = vec![false; values.len()];
        for clause in self.clauses {
            if clause
                .iter()
                .any(|lit| values[lit.var - 1].map_or(false, |v| lit.satisfied_by(v)))
            {
                continue;
            }
            for lit in clause {
                if values[lit.var - 1].is_none() {
                    if lit.positive {
                        seen_pos[lit.var - 1] = true;
                    } else {
                        seen_neg[lit.var - 1] = true;
                    }
                }
            }
        }
        let mut changed = false;
        for v in 0..values.len() {
            if values[v].is_none() && seen_pos[v] != seen_neg[v] {
                values[v] = Some(seen_pos[v]);
                changed = true;
            }
        }
        changed
    }

    fn solve(&mut self, values: &mut Vec<Option<bool>>) -> bool {
        loop {
            match self.propagate(values) {
                None => return false,
                Some(_) => {}
            }
            if !self.assign_pure(values) {
                break;
            }
        }
        // Branch on the leftmost clause not yet satisfied; contiguity makes
        // this a left-to-right sweep over the target.
        let branch_clause = self.clauses.iter().find(|clause| {
            !clause
                .iter()
                .any(|lit| values[lit.var - 1].map_or(false, |v| lit.satisfied_by(v)))
        });
        let clause = match branch_clause {
            None => return true,
            Some(c) => c,
        };
        let var = clause
            .iter()
            .filter(|lit| values[lit.var - 1].is_none())
            .map(|lit| lit.var)
            .min()
            .expect("an unsatisfied clause with no unassigned literal is a conflict");
        for value in [true, false] {
            self.nodes += 1;
            let mut next = values.clone();
            next[var - 1] = Some(value);
            if self.solve(&mut next) {
                *values = next;
                return true;
            }
        }
        false
    }
}

/// Backtracking search with unit propagation and pure-literal elimination on
/// a CNF; unassigned variables in the witness default to TRUE.
pub fn dpll_satisfiable(formula: &CnfFormula) -> (Option<Assignment>, u64) {
    let mut solver = Dpll {
        clauses: formula.clauses(),
        nodes: 0,
    };
    let mut values: Vec<Option<bool>> = vec![None; formula.num_vars()];
    let witness = solver
        .solve(&mut values)
        .then(|| Assignment::new(values.iter().map(|v| v.unwrap_or(true)).collect()));
    (witness, solver.nodes)
}

/// Decide coverability through the contiguous CNF encoding.
pub fn solve_dpll(instance: &ScInstance) -> SolveResult {
    let started = Instant::now();
    let (formula, map) = sc_to_contiguous_sat(instance);
    let cells = formula.num_clauses();
    let (assignment, nodes) = dpll_satisfiable(&formula);
    let witness = assignment.map(|a| map.assignment_to_choice(&a));
    if let Some(w) = &witness {
        debug_assert!(instance.is_cover(w).unwrap());
    }
    SolveResult::new(witness, nodes, cells, started)
}

/// DIMACS text of the contiguous encoding, with comments tying variables to
/// segment indices and labels.
pub fn encode_dimacs(instance: &ScInstance) -> String {
    let (formula, _) = sc_to_contiguous_sat(instance);
    let mut out = String::new();
    out.push_str("c contiguous CNF encoding of a segment cover instance\n");
    out.push_str("c positive literal k <=> segment k-1 picks its first interval\n");
    for (k, seg) in instance.segments().iter().enumerate() {
        out.push_str(&format!("c var {} = segment {} label {:?}\n", k + 1, k, seg.label));
    }
    out.push_str(&write_dimacs(&formula));
    out
}

pub fn export_dimacs(instance: &ScInstance, path: &Path) -> io::Result<()> {
    std::fs::write(path, encode_dimacs(instance))
}
