//! Segment cover: decision and optimisation problems over uncertain
//! segments on a line.
//!
//! An instance is a target interval plus a list of segments, each of which
//! will materialise as one of two closed rational intervals. The core
//! question is whether some choice of materialisations covers the target.
//! This crate provides exact rational arithmetic for the geometry, the
//! translations between segment instances and propositional formulas (in
//! both directions, including the bounded-occurrence and equal-length
//! special cases), exact solvers, an approximation pipeline through
//! weighted satisfiability, a gap-producing translation, and a small
//! planar-visibility application. Seeded generators for test material live
//! in [`gen`].

pub mod allequal;
pub mod approx;
pub mod cells;
pub mod cnf;
pub mod dimacs;
pub mod equivalence;
pub mod gen;
pub mod instance;
pub mod interval;
pub mod rational;
pub mod reduce3sat;
pub mod solver;
pub mod visibility;

pub use instance::{Choice, Pick, ScInstance, UncertainSegment};
pub use interval::Interval;
pub use rational::Rational;
