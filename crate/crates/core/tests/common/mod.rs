#![allow(dead_code)]

use std::collections::BTreeSet;

use filtermin_core::filter::{Cover, Filter, FilterBuilder, ObsId, StateSet};
use filtermin_core::io::{parse_flt, write_flt};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random filter on up to `max_states` states over at most three
/// observations and three colors. With `deterministic` unset, some
/// transitions fan out and there may be two initial states.
pub fn random_filter(rng: &mut ChaCha8Rng, max_states: usize, deterministic: bool) -> Filter {
    let n = rng.gen_range(1..=max_states);
    let num_obs = rng.gen_range(1..=3);
    let num_colors = rng.gen_range(1..=3);
    let mut b = FilterBuilder::new("rand", n);
    b.initial(0).unwrap();
    if !deterministic && n > 1 && rng.gen_bool(0.3) {
        b.initial(rng.gen_range(1..n)).unwrap();
    }
    for v in 0..n {
        for y in 0..num_obs {
            if !rng.gen_bool(0.65) {
                continue;
            }
            let fan = if deterministic || !rng.gen_bool(0.25) { 1 } else { 2 };
            let targets: BTreeSet<usize> = (0..fan).map(|_| rng.gen_range(0..n)).collect();
            for w in targets {
                b.transition(v, &format!("y{y}"), w).unwrap();
            }
        }
        let mut colors: Vec<usize> = (0..num_colors).filter(|_| rng.gen_bool(0.4)).collect();
        if colors.is_empty() {
            colors.push(rng.gen_range(0..num_colors));
        }
        for c in colors {
            b.output(v, &format!("c{c}")).unwrap();
        }
    }
    let f = b.build().unwrap();
    parse_flt(&write_flt(&f)).unwrap()
}

/// A random deterministic filter with every state reachable.
pub fn random_det_filter(rng: &mut ChaCha8Rng, max_states: usize) -> Filter {
    let (f, _) = random_filter(rng, max_states, true).strip_unreachable();
    f
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> StateSet {
    loop {
        let s: StateSet = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

/// A cover with at most `k` non-empty subsets, mixing shapes that are often
/// feasible (the identity, unions of identity classes) with arbitrary ones.
pub fn random_cover(rng: &mut ChaCha8Rng, filter: &Filter, k: usize) -> Cover {
    let n = filter.num_states();
    let mut subsets: Vec<StateSet> = match rng.gen_range(0..4) {
        0 => (0..n).map(|v| [v].into()).collect(),
        1 => {
            // random partition
            let parts = rng.gen_range(1..=n);
            let mut groups = vec![StateSet::new(); parts];
            for v in 0..n {
                groups[rng.gen_range(0..parts)].insert(v);
            }
            groups.retain(|g| !g.is_empty());
            groups
        }
        2 => {
            // identity classes plus a few overlapping unions
            let mut s: Vec<StateSet> = (0..n).map(|v| [v].into()).collect();
            for _ in 0..rng.gen_range(0..=2) {
                s.push(random_subset(rng, n));
            }
            s.shuffle(rng);
            s
        }
        _ => (0..rng.gen_range(1..=k)).map(|_| random_subset(rng, n)).collect(),
    };
    subsets.truncate(k);
    Cover::new(subsets)
}

/// A string the filter accepts from its initial states, of length below
/// `max_len`.
pub fn random_accepted_string(rng: &mut ChaCha8Rng, filter: &Filter, max_len: usize) -> Vec<ObsId> {
    let len = rng.gen_range(0..max_len);
    let mut current: StateSet = filter.initial().clone();
    let mut s = Vec::new();
    for _ in 0..len {
        let options: Vec<ObsId> = filter
            .obs_ids()
            .filter(|&y| !filter.post(&current, y).is_empty())
            .collect();
        let Some(&y) = options.choose(rng) else { break };
        current = filter.post(&current, y);
        s.push(y);
    }
    s
}

/// A string over the whole alphabet, accepted or not.
pub fn random_string(rng: &mut ChaCha8Rng, filter: &Filter, max_len: usize) -> Vec<ObsId> {
    let num_obs = filter.observations().len();
    if num_obs == 0 {
        return Vec::new();
    }
    (0..rng.gen_range(0..max_len)).map(|_| ObsId(rng.gen_range(0..num_obs))).collect()
}
