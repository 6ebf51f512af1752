//! The line-oriented `FLT v1` filter format.
//!
//! ```text
//! # comment
//! filter <name>
//! states <count>
//! initial <state-id>
//! out <state-id> <color>[,<color>]*
//! trans <src-id> <obs> <dst-id>
//! ```
//!
//! Tokens match `[A-Za-z0-9_]+`. Observations and colors are interned in the
//! order they are first mentioned. The writer is canonical: states ascending,
//! transitions sorted by source then observation, and tokens ordered so that
//! their first mentions follow declaration order. A filter read back from
//! written text keeps every id, and writing it again reproduces the text
//! byte for byte.

use std::fmt::Write as _;

use thiserror::Error;

use crate::filter::{is_valid_token, Filter, FilterBuilder, FilterError, State};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FltErrorKind {
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("`{directive}` expects {expected}")]
    Arity {
        directive: &'static str,
        expected: &'static str,
    },
    #[error("`{0}` is not a state id")]
    BadStateId(String),
    #[error("state {state} does not exist (filter has {count} states)")]
    DanglingState { state: usize, count: usize },
    #[error("empty color set")]
    EmptyColorSet,
    #[error("invalid token `{0}`")]
    InvalidToken(String),
    #[error("duplicate transition")]
    DuplicateTransition,
    #[error("outputs for state {0} were already given")]
    DuplicateOut(State),
    #[error("`{0}` given twice")]
    Repeated(&'static str),
    #[error("`{0}` must come before other directives")]
    OutOfOrder(&'static str),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FltError {
    #[error("line {line}: {kind}")]
    Line { line: usize, kind: FltErrorKind },
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error("{0}")]
    Filter(#[from] FilterError),
}

fn at(line: usize, kind: FltErrorKind) -> FltError {
    FltError::Line { line, kind }
}

pub fn parse_flt(text: &str) -> Result<Filter, FltError> {
    let mut name: Option<String> = None;
    let mut builder: Option<FilterBuilder> = None;
    let mut count = 0;
    let mut has_out = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        let directive = words[0];
        let args = &words[1..];
        let state = |s: &str| -> Result<State, FltError> {
            let v: usize = s.parse().map_err(|_| at(line, FltErrorKind::BadStateId(s.into())))?;
            if v >= count {
                return Err(at(line, FltErrorKind::DanglingState { state: v, count }));
            }
            Ok(v)
        };
        let arity = |expected: &'static str, directive: &'static str, n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(at(line, FltErrorKind::Arity { directive, expected }))
            }
        };

        match directive {
            "filter" => {
                arity("a name", "filter", 1)?;
                if name.is_some() {
                    return Err(at(line, FltErrorKind::Repeated("filter")));
                }
                if !is_valid_token(args[0]) {
                    return Err(at(line, FltErrorKind::InvalidToken(args[0].into())));
                }
                name = Some(args[0].to_string());
            }
            "states" => {
                arity("a state count", "states", 1)?;
                if builder.is_some() {
                    return Err(at(line, FltErrorKind::Repeated("states")));
                }
                let Some(n) = &name else {
                    return Err(at(line, FltErrorKind::OutOfOrder("filter")));
                };
                count = args[0]
                    .parse()
                    .map_err(|_| at(line, FltErrorKind::BadStateId(args[0].into())))?;
                builder = Some(FilterBuilder::new(n.clone(), count));
                has_out = vec![false; count];
            }
            "initial" | "out" | "trans" => {
                let Some(b) = builder.as_mut() else {
                    return Err(at(line, FltErrorKind::OutOfOrder("states")));
                };
                match directive {
                    "initial" => {
                        arity("a state id", "initial", 1)?;
                        b.initial(state(args[0])?).unwrap();
                    }
                    "out" => {
                        if args.len() != 2 {
                            return Err(if args.len() == 1 {
                                at(line, FltErrorKind::EmptyColorSet)
                            } else {
                                at(
                                    line,
                                    FltErrorKind::Arity {
                                        directive: "out",
                                        expected: "a state id and a color list",
                                    },
                                )
                            });
                        }
                        let v = state(args[0])?;
                        if std::mem::replace(&mut has_out[v], true) {
                            return Err(at(line, FltErrorKind::DuplicateOut(v)));
                        }
                        for color in args[1].split(',') {
                            if color.is_empty() {
                                return Err(at(line, FltErrorKind::EmptyColorSet));
                            }
                            b.output(v, color)
                                .map_err(|_| at(line, FltErrorKind::InvalidToken(color.into())))?;
                        }
                    }
                    _ => {
                        arity("a source, an observation and a target", "trans", 3)?;
                        let (src, dst) = (state(args[0])?, state(args[2])?);
                        b.transition(src, args[1], dst).map_err(|e| match e {
                            FilterError::DuplicateTransition { .. } => {
                                at(line, FltErrorKind::DuplicateTransition)
                            }
                            _ => at(line, FltErrorKind::InvalidToken(args[1].into())),
                        })?;
                    }
                }
            }
            other => return Err(at(line, FltErrorKind::UnknownDirective(other.into()))),
        }
    }

    if name.is_none() {
        return Err(FltError::Missing("filter"));
    }
    let builder = builder.ok_or(FltError::Missing("states"))?;
    Ok(builder.build()?)
}

/// Position of each token in the written file: tokens are numbered in order
/// of first use, scanning states (colors) or sources (observations)
/// ascending, and several new tokens at one state keep their current
/// relative order. Parsing the output interns tokens in exactly this order.
fn first_use_ranks<T: Copy + Ord>(groups: impl Iterator<Item = Vec<T>>, len: usize, index: impl Fn(T) -> usize) -> Vec<usize> {
    let mut rank = vec![usize::MAX; len];
    let mut next = 0;
    for mut group in groups {
        group.sort_unstable();
        for t in group {
            if rank[index(t)] == usize::MAX {
                rank[index(t)] = next;
                next += 1;
            }
        }
    }
    rank
}

pub fn write_flt(filter: &Filter) -> String {
    let color_rank = first_use_ranks(
        filter.states().map(|v| filter.coloring(v).iter().copied().collect()),
        filter.colors().len(),
        |c| c.0,
    );
    let obs_rank = first_use_ranks(
        filter.states().map(|v| filter.out_edges(v).map(|(y, _)| y).collect()),
        filter.observations().len(),
        |y| y.0,
    );

    let mut out = String::new();
    writeln!(out, "filter {}", filter.name()).unwrap();
    writeln!(out, "states {}", filter.num_states()).unwrap();
    for v in filter.initial() {
        writeln!(out, "initial {v}").unwrap();
    }
    for v in filter.states() {
        let mut colors: Vec<_> = filter.coloring(v).iter().copied().collect();
        colors.sort_by_key(|c| color_rank[c.0]);
        let names: Vec<&str> = colors.iter().map(|&c| filter.color_name(c)).collect();
        writeln!(out, "out {v} {}", names.join(",")).unwrap();
    }
    let mut trans: Vec<_> = filter.transitions().collect();
    trans.sort_by_key(|&(src, y, dst)| (src, obs_rank[y.0], dst));
    for (src, y, dst) in trans {
        writeln!(out, "trans {src} {} {dst}", filter.obs_name(y)).unwrap();
    }
    out
}
