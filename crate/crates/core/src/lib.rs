//! Solver and analysis toolkit for constraint satisfaction problems whose
//! variables range over a countably infinite homogeneous graph.
//!
//! The domain never materializes: a family of forbidden finite subgraphs
//! stands in for the graph ([`graphs`]), tuples are abstracted to their
//! quantifier-free types ([`orbits`]), and solving happens on finite
//! relations of such types. On top of that sit canonical-function behavior
//! tables ([`behaviors`]), entailment-shape analysis ([`entailment`]), the
//! instance document format ([`instance`]), the local-consistency engine
//! ([`minimality`]), the deciders ([`solver`]), the finite type-structure
//! translation ([`typestructure`]), and a seeded instance generator
//! ([`generator`]).

pub mod behaviors;
pub mod entailment;
pub mod generator;
pub mod graphs;
pub mod instance;
pub mod minimality;
pub mod orbits;
pub mod solver;
pub mod typestructure;
