//! Seeded generators for desk-scale test material. Everything here is
//! deterministic in the generator state passed in, so a fixed seed fixes
//! the output byte for byte.

use rand::Rng;

use crate::approx::{WeightedClause, WeightedCnf};
use crate::cnf::{validate_djpsy_form, CnfFormula, Literal};
use crate::equivalence::check_contiguity;
use crate::instance::{ScInstance, UncertainSegment};
use crate::interval::Interval;
use crate::rational::Rational;
use crate::visibility::{Point2, Scene, Segment2, UncertainObstacle};

fn grid_point<R: Rng>(rng: &mut R, grid: u32) -> Rational {
    Rational::new(rng.gen_range(0..=grid) as i64, grid as i64)
}

fn grid_interval<R: Rng>(rng: &mut R, grid: u32) -> Interval {
    let a = rng.gen_range(0..=grid);
    let b = rng.gen_range(0..=grid);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Interval::new(
        Rational::new(lo as i64, grid as i64),
        Rational::new(hi as i64, grid as i64),
    )
    .unwrap()
}

/// Unit-target instance whose interval endpoints are fractions of a uniform
/// grid.
pub fn random_sc_instance<R: Rng>(rng: &mut R, segments: usize, grid: u32) -> ScInstance {
    assert!(grid >= 1);
    let segs = (0..segments)
        .map(|i| {
            UncertainSegment::new(
                grid_interval(rng, grid),
                grid_interval(rng, grid),
                format!("s{}", i + 1),
            )
        })
        .collect();
    ScInstance::unit(segs).unwrap()
}

/// Clauses of three distinct variables in ascending order with independent
/// random polarities.
pub fn random_3cnf<R: Rng>(rng: &mut R, num_vars: usize, num_clauses: usize) -> CnfFormula {
    assert!(num_vars >= 3, "three distinct variables per clause");
    let clauses = (0..num_clauses)
        .map(|_| {
            let mut vars: Vec<usize> = Vec::with_capacity(3);
            while vars.len() < 3 {
                let v = rng.gen_range(1..=num_vars);
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            vars.sort_unstable();
            vars.into_iter()
                .map(|var| Literal {
                    var,
                    positive: rng.gen(),
                })
                .collect()
        })
        .collect();
    CnfFormula::new(num_vars, clauses).unwrap()
}

/// Cyclic three-occurrence formula: m variables, m clauses, clause j holding
/// variables j, j+1, j+2 (mod m); each variable carries a random minority
/// polarity at one of its three occurrence slots. Always passes the
/// three-occurrence form check.
pub fn random_djpsy_3cnf<R: Rng>(rng: &mut R, m: usize) -> CnfFormula {
    assert!(m >= 3, "the cyclic construction needs at least three variables");
    // polarity[v][k]: sign of variable v+1 at occurrence slot k.
    let mut polarity = vec![[true; 3]; m];
    for row in polarity.iter_mut() {
        let minority: bool = rng.gen();
        let slot = rng.gen_range(0..3);
        *row = [!minority; 3];
        row[slot] = minority;
    }
    let clauses = (0..m)
        .map(|j| {
            (0..3)
                .map(|k| {
                    let v = (j + k) % m;
                    Literal {
                        var: v + 1,
                        positive: polarity[v][k],
                    }
                })
                .collect()
        })
        .collect();
    let formula = CnfFormula::new(m, clauses).unwrap();
    debug_assert!(validate_djpsy_form(&formula).ok);
    formula
}

/// A formula passing the contiguity check by construction: each literal
/// occurs in one contiguous clause block (or not at all). Clauses can come
/// out empty, so unsatisfiable outputs stay representable.
pub fn random_contiguous_formula<R: Rng>(
    rng: &mut R,
    num_vars: usize,
    num_clauses: usize,
) -> CnfFormula {
    let mut clauses: Vec<Vec<Literal>> = vec![Vec::new(); num_clauses];
    if num_clauses > 0 {
        for var in 1..=num_vars {
            for positive in [true, false] {
                if rng.gen_range(0..4) == 0 {
                    continue;
                }
                let lo = rng.gen_range(1..=num_clauses);
                let hi = rng.gen_range(lo..=num_clauses.min(lo + 3));
                for j in lo..=hi {
                    clauses[j - 1].push(Literal { var, positive });
                }
            }
        }
    }
    let formula = CnfFormula::new(num_vars, clauses).unwrap();
    debug_assert!(check_contiguity(&formula).verdict);
    formula
}

/// Equal-length instance over a uniform grid with both boundary cells
/// pinned by doubled segments and `extra` free one-cell segments. The
/// pinned ends anchor the connected-union radius at half a cell exactly
/// when the instance is coverable.
pub fn random_allequal_anchored<R: Rng>(rng: &mut R, grid: u32, extra: usize) -> ScInstance {
    assert!(grid >= 2);
    let cell = |c: u32| {
        Interval::new(
            Rational::new(c as i64, grid as i64),
            Rational::new((c + 1) as i64, grid as i64),
        )
        .unwrap()
    };
    let mut segs = vec![
        UncertainSegment::doubled(cell(0), "pin.lo"),
        UncertainSegment::doubled(cell(grid - 1), "pin.hi"),
    ];
    for i in 0..extra {
        let a = rng.gen_range(0..grid);
        let b = rng.gen_range(0..grid);
        segs.push(UncertainSegment::new(cell(a), cell(b), format!("s{}", i + 1)));
    }
    ScInstance::unit(segs).unwrap()
}

/// Scene over the unit viewed segment with horizontal placements strictly
/// between the viewed line (level 0) and the viewpoint (level 1), so the
/// projection preconditions hold structurally.
pub fn random_scene<R: Rng>(rng: &mut R, obstacles: usize, grid: u32) -> Scene {
    assert!(grid >= 1);
    let placement = |rng: &mut R| {
        let y = Rational::new(rng.gen_range(1i64..=3), 2);
        let x0 = grid_point(rng, grid);
        let x1 = grid_point(rng, grid);
        let (lo, hi) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
        Segment2 {
            a: Point2 {
                x: lo,
                y: y.clone(),
            },
            b: Point2 { x: hi, y },
        }
    };
    let obstacles = (0..obstacles)
        .map(|_| UncertainObstacle {
            first: placement(rng),
            second: placement(rng),
        })
        .collect();
    Scene {
        viewpoint: Point2 {
            x: grid_point(rng, grid),
            y: Rational::from_int(2),
        },
        viewed: Segment2 {
            a: Point2 {
                x: Rational::zero(),
                y: Rational::zero(),
            },
            b: Point2 {
                x: Rational::one(),
                y: Rational::zero(),
            },
        },
        obstacles,
    }
}

fn random_weighted_clauses<R: Rng>(
    rng: &mut R,
    num_vars: usize,
    num_clauses: usize,
    grid: u32,
    exactly_three: bool,
) -> WeightedCnf {
    assert!(num_vars >= 3 && grid >= 1);
    let clauses = (0..num_clauses)
        .map(|_| {
            let len = if exactly_three {
                3
            } else {
                rng.gen_range(1..=3)
            };
            let mut vars: Vec<usize> = Vec::with_capacity(len);
            while vars.len() < len {
                let v = rng.gen_range(1..=num_vars);
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            vars.sort_unstable();
            WeightedClause {
                literals: vars
                    .into_iter()
                    .map(|var| Literal {
                        var,
                        positive: rng.gen(),
                    })
                    .collect(),
                weight: Rational::new(rng.gen_range(1..=grid) as i64, grid as i64),
            }
        })
        .collect();
    WeightedCnf { num_vars, clauses }
}

/// Weighted CNF with one- to three-literal distinct-variable clauses and
/// positive grid-fraction weights.
pub fn random_wcnf<R: Rng>(
    rng: &mut R,
    num_vars: usize,
    num_clauses: usize,
    grid: u32,
) -> WeightedCnf {
    random_weighted_clauses(rng, num_vars, num_clauses, grid, false)
}

/// As `random_wcnf`, but every clause has exactly three literals.
pub fn random_e3_wcnf<R: Rng>(
    rng: &mut R,
    num_vars: usize,
    num_clauses: usize,
    grid: u32,
) -> WeightedCnf {
    random_weighted_clauses(rng, num_vars, num_clauses, grid, true)
}
