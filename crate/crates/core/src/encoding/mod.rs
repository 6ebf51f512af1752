//! Cover variables and the constraint systems over them.
//!
//! A candidate cover with at most `k` subsets is described by
//!
//! * `R(i, v)`: state `v` belongs to subset `i`,
//! * `a(i, j, y)`: the induced state of subset `i` moves to subset `j` on `y`,
//! * `b(i, o)`: output `o` is common to every member of subset `i`,
//! * `q(i)`: subset `i` is non-empty (integer programs only).
//!
//! The structural constants `t(y, v)` ("v has a y-child") and `p(o, v)`
//! ("o is an output of v") are read off the filter and folded away wherever
//! they make a constraint trivially true or a literal trivially false.
//!
//! The CNF rendering is what the solvers consume. The integer linear and
//! integer nonlinear renderings exist as evaluators (and an LP-file export) so
//! that all three can be cross-checked against the semantic definition.

mod cnf;
mod eval;
mod layout;
mod lp;

use thiserror::Error;

pub use cnf::{ban_size_units, build_cnf, zip1_group, zip2_group, ClauseTag, CnfFormula};
pub use eval::{eval_ilp, eval_inp, IlpReport, InpReport};
pub use filtermin_sat::{Assignment, Lit, Var};
pub use layout::{build_layout, cover_from_model, extension_from_cover, VarKind, VarLayout};
pub use lp::{lp_row_count, write_lp};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EncodingError {
    #[error("size bound k must be at least 1")]
    ZeroBound,
    #[error("filter is not deterministic")]
    NotDeterministic,
    #[error("filter has unreachable states: {0:?}")]
    Unreachable(Vec<usize>),
    #[error("cover has {subsets} subsets but the layout allows at most {k}")]
    TooManySubsets { subsets: usize, k: usize },
    #[error("cannot ban subset {banned}: valid range is 1..={k}")]
    BanOutOfRange { banned: usize, k: usize },
}
