//! Matrix-product factorization of graphs.
//!
//! A graph G with adjacency matrix A is *factored* into graphs H and K with
//! adjacency matrices B and C when A = BC exactly, as 0/1 matrices. This
//! crate provides:
//!
//! - exact verification of candidate factorizations and the weighted
//!   product digraph HK ([`matrix`]);
//! - the 2-edge-colored union H (+) K with the diamond condition, matched
//!   pairs, and the pendant-neighbor map ([`union`]);
//! - automorphism enumeration and the fixed-edge-free involutions that are
//!   exactly the perfect-matching factors ([`automorphism`]);
//! - an exhaustive backtracking oracle, a zero-pruning reference search,
//!   and a strategy dispatcher combining constructions, primality, and the
//!   oracle ([`search`]);
//! - closed-form factorizations of even grids, all tori, and doubled
//!   forests ([`constructions`]);
//! - prime-graph classification with auditable rule traces ([`classify`]);
//! - a small-graph census for exhaustive cross-checks ([`census`]);
//! - JSON / graph6 / DOT interchange ([`io`]).
//!
//! With the default `parallel` feature, batch work (census classification,
//! oracle branch exploration, automorphism subtrees) runs on rayon; results
//! are merged in canonical order so output never depends on scheduling.
//! Building with `--no-default-features` yields the same API running
//! sequentially.

pub mod automorphism;
pub mod census;
pub mod checks;
pub mod classify;
pub mod constructions;
pub mod graph;
pub mod io;
pub mod matrix;
mod par;
pub mod perm;
pub mod search;
pub mod union;

pub use graph::SimpleGraph;
pub use matrix::{product, verify_factorization, Factorization, Provenance, WeightedDigraph};
