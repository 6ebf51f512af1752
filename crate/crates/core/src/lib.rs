//! Minimization of deterministic combinatorial filters.
//!
//! A filter is shrunk by searching for a zipped vertex cover of its states:
//! a family of state subsets, closed under transitions, whose members share
//! an output. The cover search is encoded as CNF and handed to an incremental
//! SAT solver with a descending size bound; a lazy variant withholds the zip
//! clauses until a returned cover violates them.

pub mod encoding;
pub mod filter;
pub mod generator;
pub mod io;
pub mod minimizer;
pub mod oracle;
