//! Exhaustive search for a smallest zipped cover, independent of the
//! encodings and the solver.
//!
//! Subsets are bitmasks over the states. Only subsets whose members share an
//! output can appear in a cover, and a minimal cover never repeats a subset,
//! so for `k = 1, 2, ...` every `k`-element set of such subsets is examined in
//! lexicographic order until one contains the initial state and is zipped.

use thiserror::Error;

use crate::filter::{induced_filter, output_simulates, Cover, Filter, StateSet};

/// Largest filter the oracle accepts.
pub const MAX_STATES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub minimal_size: usize,
    pub witness_cover: Cover,
    /// Candidate covers examined.
    pub enumerated: u64,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("filter has {0} states; the oracle handles at most {MAX_STATES}")]
    TooLarge(usize),
    #[error("filter must be deterministic with one initial state")]
    NotDeterministic,
    #[error("no zipped cover with at most {0} subsets")]
    CapExceeded(usize),
    #[error("witness cover failed verification: {0}")]
    WitnessRejected(String),
}

struct Search {
    initial: u32,
    /// `child[v][y]`, as a single-bit mask or 0.
    child: Vec<Vec<u32>>,
    compatible: Vec<u32>,
    enumerated: u64,
}

impl Search {
    fn children(&self, mask: u32, y: usize) -> u32 {
        let mut out = 0;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            out |= self.child[v][y];
            rest &= rest - 1;
        }
        out
    }

    fn feasible(&self, chosen: &[u32]) -> bool {
        if !chosen.iter().any(|&s| s & self.initial != 0) {
            return false;
        }
        let num_obs = self.child.first().map_or(0, Vec::len);
        chosen.iter().all(|&s| {
            (0..num_obs).all(|y| {
                let c = self.children(s, y);
                c == 0 || chosen.iter().any(|&t| t & c == c)
            })
        })
    }

    fn search(&mut self, start: usize, chosen: &mut Vec<u32>, k: usize) -> bool {
        if chosen.len() == k {
            self.enumerated += 1;
            return self.feasible(chosen);
        }
        let need = k - chosen.len();
        for idx in start..=self.compatible.len().saturating_sub(need) {
            chosen.push(self.compatible[idx]);
            if self.search(idx + 1, chosen, k) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

fn to_set(mask: u32) -> StateSet {
    (0..32).filter(|v| mask & (1 << v) != 0).collect()
}

/// Size of a smallest zipped cover, trying bounds up to `cap`.
pub fn brute_minimal(filter: &Filter, cap: usize) -> Result<OracleResult, OracleError> {
    let n = filter.num_states();
    if n > MAX_STATES {
        return Err(OracleError::TooLarge(n));
    }
    let initial = filter.initial_state().ok_or(OracleError::NotDeterministic)?;
    if !filter.is_deterministic() {
        return Err(OracleError::NotDeterministic);
    }

    let num_obs = filter.observations().len();
    let child = (0..n)
        .map(|v| {
            filter
                .obs_ids()
                .map(|y| filter.child(v, y).map_or(0, |w| 1u32 << w))
                .collect()
        })
        .collect();
    debug_assert!(num_obs == filter.obs_ids().count());
    let compatible = (1u32..1 << n)
        .filter(|&mask| !filter.common_outputs(&to_set(mask)).is_empty())
        .collect();
    let mut search = Search {
        initial: 1 << initial,
        child,
        compatible,
        enumerated: 0,
    };

    for k in 1..=cap.min(n) {
        let mut chosen = Vec::with_capacity(k);
        if search.search(0, &mut chosen, k) {
            let cover = Cover::new(chosen.into_iter().map(to_set).collect());
            verify(filter, &cover)?;
            return Ok(OracleResult {
                minimal_size: k,
                witness_cover: cover,
                enumerated: search.enumerated,
            });
        }
    }
    Err(OracleError::CapExceeded(cap))
}

fn verify(filter: &Filter, cover: &Cover) -> Result<(), OracleError> {
    if !cover.is_feasible(filter) {
        return Err(OracleError::WitnessRejected("not a zipped cover".into()));
    }
    let induced = induced_filter(filter, cover).map_err(|e| OracleError::WitnessRejected(e.to_string()))?;
    match output_simulates(&induced, filter).failure {
        None => Ok(()),
        Some(f) => Err(OracleError::WitnessRejected(format!("{} on {:?}", f.kind, f.witness))),
    }
}
