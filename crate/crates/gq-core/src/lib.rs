#![forbid(unsafe_code)]

//! Exact-arithmetic toolkit for the one-parameter family of groups
//! `G_q = < x, y, z | [x, y^q] = z, [x, z] = [y, z] = 1 >` (q = 1 is the
//! 3-dimensional integral Heisenberg group).
//!
//! The crate provides free-group words over {x, y, z}, the canonical
//! normal form with a traced rewriting engine, breadth-first word-metric
//! balls, the normal-form bicombing together with exact checkers for its
//! recursivity and narrow-shape inequalities (constants M = 24q + 18,
//! k = 11/5), the recursive fan/ladder construction of van Kampen
//! diagrams with isoperimetric and isodiametric bounds, and the survey /
//! fuzzing harness behind the `gq` command line.

pub mod analysis;
pub mod combing;
pub mod diagram;
pub mod group;
pub mod metric;
pub mod word;

pub use group::{GroupParams, NormalForm, RewriteTrace};
pub use word::{Gen, Letter, Word};
