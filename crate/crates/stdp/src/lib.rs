//! Solver for the shortest two disjoint paths problem on undirected graphs
//! whose edge weights are conservative (no negative cycle) and whose
//! negative-weight edges span a bounded number of trees.
//!
//! The crate is organized around the pipeline of the solver:
//!
//! * [`graph`] — weighted instances, paths, walks, conservativeness checks;
//! * [`treekit`] — negative trees, tree paths, spines, shortcuts and the
//!   path-shape predicates used by the dynamic program;
//! * [`matching`] — exact minimum-weight perfect matching (T-join backend);
//! * [`conspath`] — shortest paths under conservative (negative) weights;
//! * [`flows`] — the two flow networks and min-cost flow with vertex
//!   capacities;
//! * [`uncross`] — combining two permissively disjoint path pairs that meet
//!   at a negative tree;
//! * [`partsol`] — the partial-solution dynamic program and the
//!   permissively disjoint path-pair solver built on it;
//! * [`solver`] — the top-level recursive solver;
//! * [`oracle`] — brute-force reference implementations and the seeded
//!   instance generator;
//! * [`cli`] — the command-line surface used by the `stdp` binary.

pub mod cli;
pub mod conspath;
pub mod flows;
pub mod graph;
pub mod matching;
pub mod oracle;
pub mod partsol;
pub mod solver;
pub mod treekit;
pub mod uncross;

pub use graph::{Path, PathPair, Vertex, Walk, Weight, WeightedInstance};
pub use solver::{solve, Solution};
