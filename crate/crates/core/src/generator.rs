//! Random deterministic filters built as layered trees with extra loops and
//! back edges.
//!
//! The state count is `1 + d * w`: a root plus `d` layers of `w` states. Each
//! non-root state hangs off a uniformly chosen state in an earlier layer;
//! `m` distinct states get a self-loop; `n` distinct non-root states get an
//! edge back to a uniformly chosen state in an earlier layer. Each edge takes
//! an observation its source has not used yet, and each state takes `p`
//! distinct colors out of `n_o`.
//!
//! Randomness comes from ChaCha8 seeded with `seed`; attempt `i` runs on a
//! generator seeded from the `i`-th draw of that master stream. Tokens are
//! `y0, y1, ...` and `c0, c1, ...`, and the result is returned in canonical
//! form (as if written and parsed back).

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::filter::{Filter, FilterBuilder, State};
use crate::io::{parse_flt, write_flt};

/// Attempts made before giving up on a parameter set whose random tree keeps
/// exceeding the observation count at some state.
pub const MAX_ATTEMPTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GenParams {
    /// Layers below the root.
    pub d: usize,
    /// States per layer.
    pub w: usize,
    /// Self-loops.
    pub m: usize,
    /// Back edges.
    pub n: usize,
    /// Size of the color alphabet.
    pub n_o: usize,
    /// Colors per state.
    pub p: usize,
    /// Size of the observation alphabet.
    pub n_y: usize,
    pub seed: u64,
}

impl GenParams {
    pub fn num_states(&self) -> usize {
        1 + self.d * self.w
    }

    fn layer(&self, v: State) -> usize {
        if v == 0 {
            0
        } else {
            (v - 1) / self.w + 1
        }
    }

    /// States in layers strictly above `v`'s, which are `0..count`.
    fn earlier(&self, v: State) -> usize {
        1 + (self.layer(v) - 1) * self.w
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |msg: String| Err(GenError::InvalidParams(msg));
        let states = self.num_states();
        if self.d > 0 && self.w == 0 {
            return bad("w must be positive when d is".into());
        }
        if self.p == 0 || self.p > self.n_o {
            return bad(format!("need 1 <= p <= n_o, got p={} n_o={}", self.p, self.n_o));
        }
        if self.m > states {
            return bad(format!("m={} exceeds the {states} states", self.m));
        }
        if self.n > states - 1 {
            return bad(format!("n={} exceeds the {} non-root states", self.n, states - 1));
        }
        if self.n_y == 0 && states + self.m > 1 {
            return bad("n_y must be positive when there are edges".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("every one of {attempts} attempts put more than n_y out-edges on some state")]
    DegreeExceeded { attempts: usize },
}

pub fn generate(params: &GenParams) -> Result<Filter, GenError> {
    params.validate()?;
    let mut master = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(master.gen());
        if let Some(f) = attempt(params, &mut rng) {
            return Ok(f);
        }
    }
    Err(GenError::DegreeExceeded {
        attempts: MAX_ATTEMPTS,
    })
}

fn attempt(params: &GenParams, rng: &mut ChaCha8Rng) -> Option<Filter> {
    let states = params.num_states();
    let mut edges: Vec<(State, State)> = Vec::new();
    let mut pairs = BTreeSet::new();

    for v in 1..states {
        let parent = rng.gen_range(0..params.earlier(v));
        edges.push((parent, v));
        pairs.insert((parent, v));
    }
    for v in sample(rng, states, params.m).into_vec() {
        edges.push((v, v));
        pairs.insert((v, v));
    }
    for src in sample(rng, states - 1, params.n).into_iter().map(|i| i + 1) {
        let choices = params.earlier(src);
        let mut dst = rng.gen_range(0..choices);
        let mut redraws = 0;
        while pairs.contains(&(src, dst)) {
            redraws += 1;
            if redraws > 4 * choices {
                return None;
            }
            dst = rng.gen_range(0..choices);
        }
        edges.push((src, dst));
        pairs.insert((src, dst));
    }

    let mut out_degree = vec![0; states];
    for &(src, _) in &edges {
        out_degree[src] += 1;
    }
    if out_degree.iter().any(|&deg| deg > params.n_y) {
        return None;
    }

    let mut used: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); states];
    let mut b = FilterBuilder::new(format!("gen_{}", params.seed), states);
    b.initial(0).unwrap();
    for &(src, dst) in &edges {
        let free: Vec<usize> = (0..params.n_y).filter(|y| !used[src].contains(y)).collect();
        let y = free[rng.gen_range(0..free.len())];
        used[src].insert(y);
        b.transition(src, &format!("y{y}"), dst).unwrap();
    }
    for v in 0..states {
        let mut colors = sample(rng, params.n_o, params.p).into_vec();
        colors.sort_unstable();
        for c in colors {
            b.output(v, &format!("c{c}")).unwrap();
        }
    }
    let raw = b.build().expect("every state has an output");
    Some(parse_flt(&write_flt(&raw)).expect("writer output parses"))
}
