//! Equal-length variant of the reduction, plus the 1-D connected-ball-union
//! problem it lowers to. Every interval emitted here has the same length L;
//! literal cells are guarded by shifted copies so that a cell is covered
//! exactly when all of its incident edges choose it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::cnf::{occurrence_profile, validate_djpsy_form, CnfFormula, Literal};
use crate::instance::{Pick, ScInstance, UncertainSegment};
use crate::interval::Interval;
use crate::rational::Rational;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AllEqualError {
    #[error("not in bounded-occurrence form: bad clauses {bad_clauses:?}, bad variables {bad_variables:?}")]
    NotDjpsy {
        bad_clauses: Vec<usize>,
        bad_variables: Vec<usize>,
    },
    #[error("clause {clause} is tautological")]
    TautologicalClause { clause: usize },
    #[error("instance has no segments, so no common length exists")]
    Empty,
    #[error("intervals of segments {deviants:?} differ from length {expected}")]
    UnequalLengths {
        expected: Rational,
        deviants: Vec<usize>,
    },
    #[error("a radius needs at least one point")]
    NoPoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AeVertex {
    pub clause: usize,
    pub slot: usize,
    /// Global cell index of the literal cell this occurrence owns.
    pub cell: usize,
    pub degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AeEdge {
    pub segment: usize,
    pub p_index: usize,
    pub n_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AeVariableGadget {
    pub var: usize,
    pub positive: Vec<AeVertex>,
    pub negative: Vec<AeVertex>,
    pub edges: Vec<AeEdge>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AllEqualCertificate {
    pub formula: CnfFormula,
    pub l: Rational,
    pub delta: Rational,
    /// The 6s+1 cells tiling the target, left to right.
    pub cells: Vec<Interval>,
    /// Per clause: instance indices of the two guarding segments.
    pub clause_segments: Vec<[usize; 2]>,
    /// Per clause: global cell indices of the three literal cells.
    pub literal_cells: Vec<[usize; 3]>,
    pub padding_segments: Vec<usize>,
    pub variable_gadgets: Vec<AeVariableGadget>,
}

fn is_tautological(clause: &[Literal]) -> bool {
    clause
        .iter()
        .any(|lit| clause.contains(&lit.negated()) && lit.positive)
}

/// Shifted copy of a literal cell for one incident edge: degree-1 vertices
/// keep the cell, degree-2 vertices get copies nudged left and right so a
/// single pick always leaves a sliver of the cell uncovered.
fn edge_copy(cell: &Interval, degree: usize, rank: usize, delta: &Rational) -> Interval {
    match (degree, rank) {
        (1, 0) => cell.clone(),
        (2, 0) => cell.translate(&-delta),
        (2, 1) => cell.translate(delta),
        _ => unreachable!("bounded-occurrence vertices have degree 1 or 2"),
    }
}

/// Rebuild the clause and variable gadgets with every interval of length
/// L = 1/(6s+1): odd cells carry literals, even cells and the terminal cell
/// are pinned by doubled padding segments.
pub fn reduce_djpsy_to_allequal(
    formula: &CnfFormula,
) -> Result<(ScInstance, AllEqualCertificate), AllEqualError> {
    let report = validate_djpsy_form(formula);
    if !report.ok {
        return Err(AllEqualError::NotDjpsy {
            bad_clauses: report.bad_clauses,
            bad_variables: report.bad_variables,
        });
    }
    if let Some(j) = formula.clauses().iter().position(|c| is_tautological(c)) {
        return Err(AllEqualError::TautologicalClause { clause: j + 1 });
    }

    let s = formula.num_clauses();
    let grid = (6 * s + 1) as i64;
    let l = Rational::new(1, grid);
    let delta = Rational::new(1, 10 * grid);
    let cell = |c: usize| {
        Interval::new(
            Rational::new(c as i64, grid),
            Rational::new(c as i64 + 1, grid),
        )
        .unwrap()
    };
    let cells: Vec<Interval> = (0..=6 * s).map(cell).collect();

    let mut segments = Vec::new();
    let mut clause_segments = Vec::new();
    let mut literal_cells = Vec::new();
    for j in 0..s {
        clause_segments.push([segments.len(), segments.len() + 1]);
        literal_cells.push([6 * j + 1, 6 * j + 3, 6 * j + 5]);
        segments.push(UncertainSegment::new(
            cells[6 * j + 1].clone(),
            cells[6 * j + 3].clone(),
            format!("C{}.s5", j + 1),
        ));
        segments.push(UncertainSegment::new(
            cells[6 * j + 3].clone(),
            cells[6 * j + 5].clone(),
            format!("C{}.s6", j + 1),
        ));
    }
    let mut padding_segments = Vec::new();
    for j in 0..s {
        for c in [6 * j, 6 * j + 2, 6 * j + 4] {
            padding_segments.push(segments.len());
            segments.push(UncertainSegment::doubled(
                cells[c].clone(),
                format!("pin{c}"),
            ));
        }
    }
    padding_segments.push(segments.len());
    segments.push(UncertainSegment::doubled(
        cells[6 * s].clone(),
        format!("pin{}", 6 * s),
    ));

    let profile = occurrence_profile(formula);
    let mut variable_gadgets = Vec::new();
    for var in 1..=formula.num_vars() {
        if !profile.occurs(var) {
            continue;
        }
        let side = |wanted: Literal, degree: usize| -> Vec<AeVertex> {
            let mut out = Vec::new();
            for (j, clause) in formula.clauses().iter().enumerate() {
                for (k, lit) in clause.iter().enumerate() {
                    if *lit == wanted {
                        out.push(AeVertex {
                            clause: j,
                            slot: k,
                            cell: 6 * j + 2 * k + 1,
                            degree,
                        });
                    }
                }
            }
            out
        };
        let positive = side(Literal::pos(var), profile.n(var));
        let negative = side(Literal::neg(var), profile.p(var));
        let mut edges = Vec::new();
        for a in 0..positive.len() {
            for b in 0..negative.len() {
                edges.push(AeEdge {
                    segment: segments.len(),
                    p_index: a,
                    n_index: b,
                });
                segments.push(UncertainSegment::new(
                    edge_copy(&cells[positive[a].cell], positive[a].degree, b, &delta),
                    edge_copy(&cells[negative[b].cell], negative[b].degree, a, &delta),
                    format!("x{}.P{}N{}", var, a + 1, b + 1),
                ));
            }
        }
        variable_gadgets.push(AeVariableGadget {
            var,
            positive,
            negative,
            edges,
        });
    }

    let instance = ScInstance::unit(segments).expect("copies stay inside the unit target");
    let certificate = AllEqualCertificate {
        formula: formula.clone(),
        l,
        delta,
        cells,
        clause_segments,
        literal_cells,
        padding_segments,
        variable_gadgets,
    };
    Ok((instance, certificate))
}

/// The common interval length, or the list of segments that break it.
pub fn assert_all_equal(instance: &ScInstance) -> Result<Rational, AllEqualError> {
    let segments = instance.segments();
    if segments.is_empty() {
        return Err(AllEqualError::Empty);
    }
    let expected = segments[0].interval(Pick::First).length();
    let deviants: Vec<usize> = segments
        .iter()
        .enumerate()
        .filter(|(_, seg)| {
            seg.interval(Pick::First).length() != expected
                || seg.interval(Pick::Second).length() != expected
        })
        .map(|(i, _)| i)
        .collect();
    if deviants.is_empty() {
        Ok(expected)
    } else {
        Err(AllEqualError::UnequalLengths { expected, deviants })
    }
}

/// One two-point region per uncertain segment (the midpoints of its two
/// intervals), with r = L/2, plus two sentinel regions flanking the span of
/// all midpoints at distances 2r and 3r.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcuInstance {
    pub r: Rational,
    pub regions: Vec<(Rational, Rational)>,
}

pub fn bcu_from_allequal(instance: &ScInstance) -> Result<BcuInstance, AllEqualError> {
    let l = assert_all_equal(instance)?;
    let r = &l / &Rational::from_int(2);
    let mut regions: Vec<(Rational, Rational)> = instance
        .segments()
        .iter()
        .map(|seg| {
            (
                seg.interval(Pick::First).midpoint(),
                seg.interval(Pick::Second).midpoint(),
            )
        })
        .collect();
    let points = || regions.iter().flat_map(|(a, b)| [a.clone(), b.clone()]);
    let x_l = points().min().unwrap();
    let x_r = points().max().unwrap();
    let two_r = &r + &r;
    let three_r = &two_r + &r;
    regions.push((&x_l - &two_r, &x_l - &three_r));
    regions.push((&x_r + &two_r, &x_r + &three_r));
    Ok(BcuInstance { r, regions })
}

/// Smallest radius making balls at the given centers connect: half the
/// largest gap between consecutive sorted points.
pub fn bcu_radius_for_selection(points: &[Rational]) -> Result<Rational, AllEqualError> {
    if points.is_empty() {
        return Err(AllEqualError::NoPoints);
    }
    let mut sorted = points.to_vec();
    sorted.sort();
    let max_gap = sorted
        .windows(2)
        .map(|w| &w[1] - &w[0])
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(max_gap / Rational::from_int(2))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BcuSolution {
    pub r_prime: Rational,
    /// One pick per region, lexicographically least among the optima.
    pub selection: Vec<Pick>,
}

/// Exhaustive minimum of `bcu_radius_for_selection` over all 2^k selections.
/// Selections are scanned in lexicographic pick order and only strict
/// improvements are kept, so the reported optimum is the lexicographically
/// least one. Intended for desk-scale instances (at most 30 regions).
pub fn bcu_solve(bcu: &BcuInstance) -> BcuSolution {
    let k = bcu.regions.len();
    assert!(k >= 1, "needs at least one region");
    assert!(k <= 30, "exhaustive search capped at 30 regions");

    // Scale every point by the common denominator; gaps then compare as
    // integers and the radius is recovered exactly at the end.
    let scale = bcu
        .regions
        .iter()
        .flat_map(|(a, b)| [a.denom().clone(), b.denom().clone()])
        .fold(BigInt::from(1), |acc, d| acc.lcm(&d));
    let scaled: Vec<[BigInt; 2]> = bcu
        .regions
        .iter()
        .map(|(a, b)| {
            let s = |x: &Rational| x.numer() * (&scale / x.denom());
            [s(a), s(b)]
        })
        .collect();

    let small: Option<Vec<[i128; 2]>> = scaled
        .iter()
        .map(|[a, b]| {
            let limit = i128::MAX / 4;
            match (a.to_i128(), b.to_i128()) {
                (Some(a), Some(b)) if a.abs() < limit && b.abs() < limit => Some([a, b]),
                _ => None,
            }
        })
        .collect();

    let (best_gap, best_bits) = match small {
        Some(points) => {
            let mut best: Option<(i128, u64)> = None;
            let mut buf = vec![0i128; k];
            for bits in 0u64..(1 << k) {
                for (i, slot) in buf.iter_mut().enumerate() {
                    *slot = points[i][(bits >> (k - 1 - i) & 1) as usize];
                }
                buf.sort_unstable();
                let gap = buf.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
                if best.as_ref().map_or(true, |(g, _)| gap < *g) {
                    best = Some((gap, bits));
                }
            }
            let (gap, bits) = best.unwrap();
            (BigInt::from(gap), bits)
        }
        None => {
            let mut best: Option<(BigInt, u64)> = None;
            for bits in 0u64..(1 << k) {
                let mut buf: Vec<&BigInt> = (0..k)
                    .map(|i| &scaled[i][(bits >> (k - 1 - i) & 1) as usize])
                    .collect();
                buf.sort_unstable();
                let gap = buf
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .max()
                    .unwrap_or_else(|| BigInt::from(0));
                if best.as_ref().map_or(true, |(g, _)| gap < *g) {
                    best = Some((gap, bits));
                }
            }
            best.unwrap()
        }
    };

    let r_prime = Rational::from_big(best_gap, BigInt::from(2) * scale);
    let selection = (0..k)
        .map(|i| {
            if best_bits >> (k - 1 - i) & 1 == 0 {
                Pick::First
            } else {
                Pick::Second
            }
        })
        .collect();
    BcuSolution { r_prime, selection }
}
