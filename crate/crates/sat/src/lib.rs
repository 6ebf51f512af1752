//! A small incremental CDCL SAT solver.
//!
//! Two-watched-literal propagation, first-UIP learning, VSIDS-style branching
//! with phase saving, geometric restarts and LBD-based learnt clause
//! reduction. Clauses can be added between `solve` calls; each call takes a
//! wall-clock budget and may return [`SolveStatus::Unknown`] when it expires.

mod dimacs;
mod lit;
mod solver;

pub use dimacs::{parse_dimacs, write_dimacs, Cnf, DimacsError};
pub use lit::{normalize_clause, Assignment, Lit, Var};
pub use solver::{
    default_seed, SolveOutcome, SolveStats, SolveStatus, Solver, SEED_ENV, TIME_CHECK_CONFLICTS,
};
