//! Text formats: filter files, statistics CSV and GraphViz output.
//!
//! DIMACS and LP writers live with the encodings ([`crate::encoding`]).

mod dot;
mod flt;
mod stats;

pub use dot::write_dot;
pub use flt::{parse_flt, write_flt, FltError, FltErrorKind};
pub use stats::{write_stats_csv, STATS_HEADER};
