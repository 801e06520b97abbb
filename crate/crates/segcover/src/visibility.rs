//! Geometric front-end: project uncertain 2-D obstacle segments from a
//! viewpoint onto a viewed segment. Each placement's shadow is an interval
//! of the viewed segment parameterized to [0,1], so a scene becomes a cover
//! instance: coverable means some realization blocks the entire segment.

use serde::{Deserialize, Serialize};
use std::mem::swap;

use crate::instance::{ScInstance, UncertainSegment};
use crate::interval::Interval;
use crate::rational::Rational;
use crate::solver::{solve_dpll, SolveResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: Rational,
    pub y: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment2 {
    pub a: Point2,
    pub b: Point2,
}

/// An obstacle that will materialize as exactly one of two segments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UncertainObstacle {
    pub first: Segment2,
    pub second: Segment2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scene {
    pub viewpoint: Point2,
    pub viewed: Segment2,
    pub obstacles: Vec<UncertainObstacle>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum VisibilityError {
    #[error("the viewed segment is degenerate")]
    DegenerateViewed,
    #[error("the viewpoint lies on the line through the viewed segment")]
    ViewpointOnViewedLine,
    #[error("obstacle {obstacle} placement {placement} contains the viewpoint")]
    PlacementContainsViewpoint { obstacle: usize, placement: usize },
    #[error("obstacle {obstacle} placement {placement} intersects the viewed segment")]
    PlacementIntersectsViewed { obstacle: usize, placement: usize },
}

fn sub(p: &Point2, q: &Point2) -> (Rational, Rational) {
    (&p.x - &q.x, &p.y - &q.y)
}

fn cross2(u: &(Rational, Rational), v: &(Rational, Rational)) -> Rational {
    &u.0 * &v.1 - &u.1 * &v.0
}

fn lerp(p: &Point2, r: &Point2, w: &Rational) -> Point2 {
    Point2 {
        x: &p.x + &(w * &(&r.x - &p.x)),
        y: &p.y + &(w * &(&r.y - &p.y)),
    }
}

/// Sign of the turn p→q→r.
fn orient(p: &Point2, q: &Point2, r: &Point2) -> i8 {
    let c = cross2(&sub(q, p), &sub(r, p));
    if c.is_zero() {
        0
    } else if c > Rational::zero() {
        1
    } else {
        -1
    }
}

/// Whether r, already known collinear with [p,q], lies on the segment.
fn collinear_on_segment(p: &Point2, q: &Point2, r: &Point2) -> bool {
    let (lo_x, hi_x) = if p.x <= q.x { (&p.x, &q.x) } else { (&q.x, &p.x) };
    let (lo_y, hi_y) = if p.y <= q.y { (&p.y, &q.y) } else { (&q.y, &p.y) };
    lo_x <= &r.x && &r.x <= hi_x && lo_y <= &r.y && &r.y <= hi_y
}

fn point_on_segment(p: &Point2, seg: &Segment2) -> bool {
    orient(&seg.a, &seg.b, p) == 0 && collinear_on_segment(&seg.a, &seg.b, p)
}

fn segments_intersect(s: &Segment2, t: &Segment2) -> bool {
    let d1 = orient(&t.a, &t.b, &s.a);
    let d2 = orient(&t.a, &t.b, &s.b);
    let d3 = orient(&s.a, &s.b, &t.a);
    let d4 = orient(&s.a, &s.b, &t.b);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && collinear_on_segment(&t.a, &t.b, &s.a))
        || (d2 == 0 && collinear_on_segment(&t.a, &t.b, &s.b))
        || (d3 == 0 && collinear_on_segment(&s.a, &s.b, &t.a))
        || (d4 == 0 && collinear_on_segment(&s.a, &s.b, &t.b))
}

/// Parameter along the viewed segment (a→0, b→1) where the ray from q
/// through p meets the viewed line. Defined whenever p is off the viewer's
/// parallel level.
fn project_t(q: &Point2, viewed_a: &Point2, d: &(Rational, Rational), p: &Point2) -> Rational {
    let qa = sub(q, viewed_a);
    let pq = sub(p, q);
    &cross2(&qa, &pq) / &cross2(d, &pq)
}

fn clamp_to_unit(lo: Rational, hi: Rational) -> Interval {
    let zero = Rational::zero();
    let one = Rational::one();
    let lo = if lo < zero { zero.clone() } else { lo };
    let hi = if hi > one { one } else { hi };
    if lo > hi {
        Interval::point(zero)
    } else {
        Interval::new(lo, hi).unwrap()
    }
}

/// Shadow of one placement: clip it to the open slab between the viewed
/// line (level 0, closed) and the viewpoint's parallel level (1, open),
/// project the clipped ends, and clamp to the viewed segment. A clip at
/// level 1 means the shadow is a half-line; an exact midpoint probe decides
/// its direction. Anything entirely outside the slab casts nothing: [0,0].
fn placement_shadow(
    q: &Point2,
    viewed: &Segment2,
    d: &(Rational, Rational),
    s_q: &Rational,
    placement: &Segment2,
) -> Interval {
    let level = |p: &Point2| &cross2(d, &sub(p, &viewed.a)) / s_q;
    let zero = Rational::zero();
    let one = Rational::one();
    let (mut e0, mut e1) = (placement.a.clone(), placement.b.clone());
    let (mut s0, mut s1) = (level(&e0), level(&e1));
    if s0 > s1 {
        swap(&mut e0, &mut e1);
        swap(&mut s0, &mut s1);
    }
    if s1 <= zero || s0 >= one {
        return Interval::point(zero);
    }
    let low = if s0 < zero {
        let w = &(&zero - &s0) / &(&s1 - &s0);
        lerp(&e0, &e1, &w)
    } else {
        e0.clone()
    };
    let t_low = project_t(q, &viewed.a, d, &low);
    if s1 < one {
        let t_high = project_t(q, &viewed.a, d, &e1);
        let (lo, hi) = if t_low <= t_high {
            (t_low, t_high)
        } else {
            (t_high, t_low)
        };
        clamp_to_unit(lo, hi)
    } else {
        let w = &(&one - &s0) / &(&s1 - &s0);
        let at_level_one = lerp(&e0, &e1, &w);
        let mid = lerp(&low, &at_level_one, &Rational::new(1, 2));
        let t_mid = project_t(q, &viewed.a, d, &mid);
        debug_assert_ne!(
            t_mid, t_low,
            "a placement reaching level 1 collinearly would contain the viewpoint"
        );
        if t_mid > t_low {
            clamp_to_unit(t_low, one)
        } else {
            clamp_to_unit(zero, t_low)
        }
    }
}

/// Project every obstacle onto the viewed segment, yielding one uncertain
/// segment per obstacle over the unit target.
pub fn project_scene(
    q: &Point2,
    viewed: &Segment2,
    obstacles: &[UncertainObstacle],
) -> Result<ScInstance, VisibilityError> {
    if viewed.a == viewed.b {
        return Err(VisibilityError::DegenerateViewed);
    }
    let d = sub(&viewed.b, &viewed.a);
    let s_q = cross2(&d, &sub(q, &viewed.a));
    if s_q.is_zero() {
        return Err(VisibilityError::ViewpointOnViewedLine);
    }
    for (i, obstacle) in obstacles.iter().enumerate() {
        for (pi, placement) in [&obstacle.first, &obstacle.second].into_iter().enumerate() {
            if point_on_segment(q, placement) {
                return Err(VisibilityError::PlacementContainsViewpoint {
                    obstacle: i + 1,
                    placement: pi + 1,
                });
            }
            if segments_intersect(placement, viewed) {
                return Err(VisibilityError::PlacementIntersectsViewed {
                    obstacle: i + 1,
                    placement: pi + 1,
                });
            }
        }
    }
    let segments = obstacles
        .iter()
        .enumerate()
        .map(|(i, obstacle)| {
            UncertainSegment::new(
                placement_shadow(q, viewed, &d, &s_q, &obstacle.first),
                placement_shadow(q, viewed, &d, &s_q, &obstacle.second),
                format!("o{}", i + 1),
            )
        })
        .collect();
    Ok(ScInstance::unit(segments).expect("shadows are clamped to the unit target"))
}

/// Can some realization of the obstacles block every point of the viewed
/// segment? The solver's verdict on the projected instance.
pub fn fully_blockable(scene: &Scene) -> Result<SolveResult, VisibilityError> {
    let instance = project_scene(&scene.viewpoint, &scene.viewed, &scene.obstacles)?;
    Ok(solve_dpll(&instance))
}
