//! Expansions of real numbers in alphabet-base systems.
//!
//! A system pairs each digit `j ∈ {0, …, M}` with a real shift `d_j` and a
//! base `q_j > 1`; a digit sequence `(j_i)` represents
//! `Σ d_{j_i} / (q_{j_1} ⋯ q_{j_i})`. This crate computes greedy, lazy and
//! quasi expansions, checks them against lexicographic characterizations,
//! and classifies the set of points with a unique expansion.

pub mod numerics;
pub mod sequences;
pub mod system;
pub mod expansion;
pub mod classification;
pub mod oracle;
