use filtermin_sat::{write_dimacs, Lit};

use super::{EncodingError, VarLayout};
use crate::filter::{ObsId, State};

/// Which constraint family a clause instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClauseTag {
    ValidCover,
    /// One clause of the group for state `state` and observation `obs`.
    Zip1 { state: State, obs: ObsId },
    /// One clause of the group for observation `obs`.
    Zip2 { obs: ObsId },
    Out1,
    Out2,
    /// Forbids any member in subset `k` (1-based).
    BanUnit(usize),
}

/// A clause list with one schema tag per clause.
///
/// Clauses are kept exactly as the schemas instantiate them. In particular a
/// zip clause for a self-loop with `i = j` is a tautology; it is still listed
/// (the solver discards it on insertion) so that counts follow the schemas.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
    pub tags: Vec<ClauseTag>,
}

impl CnfFormula {
    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    fn push(&mut self, tag: ClauseTag, clause: Vec<Lit>) {
        self.clauses.push(clause);
        self.tags.push(tag);
    }

    pub fn extend(&mut self, tag: ClauseTag, clauses: impl IntoIterator<Item = Vec<Lit>>) {
        for c in clauses {
            self.push(tag, c);
        }
    }

    pub fn count_where(&self, pred: impl Fn(&ClauseTag) -> bool) -> usize {
        self.tags.iter().filter(|t| pred(t)).count()
    }

    pub fn to_dimacs(&self) -> String {
        write_dimacs(self.num_vars, &self.clauses)
    }
}

/// The clause group `A(v, y)`: for all subsets `i, j`,
/// `!a(i,j,y) | !R(i,v) | R(j, v_y)`. Empty when `v` has no `y`-child.
pub fn zip1_group(layout: &VarLayout, state: State, obs: ObsId) -> Vec<Vec<Lit>> {
    let Some(child) = layout.child(state, obs) else {
        return Vec::new();
    };
    let k = layout.k();
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            out.push(vec![
                layout.a(i, j, obs).neg(),
                layout.r(i, state).neg(),
                layout.r(j, child).pos(),
            ]);
        }
    }
    out
}

/// The clause group `B(y)`: for every subset `i`, `a(i,1,y) | ... | a(i,k,y)`.
pub fn zip2_group(layout: &VarLayout, obs: ObsId) -> Vec<Vec<Lit>> {
    let k = layout.k();
    (0..k)
        .map(|i| (0..k).map(|j| layout.a(i, j, obs).pos()).collect())
        .collect()
}

/// The clause set for covers of size at most `layout.k()`.
///
/// Eager (`lazy = false`): one clause putting the initial state in some
/// subset, all zip clauses, and the output clauses. Lazy: one covering clause
/// per state and no zip clauses; those are added on demand.
pub fn build_cnf(layout: &VarLayout, lazy: bool) -> CnfFormula {
    let k = layout.k();
    let mut f = CnfFormula {
        num_vars: layout.num_sat_vars(),
        ..Default::default()
    };

    let covering = |v: State| (0..k).map(|i| layout.r(i, v).pos()).collect::<Vec<_>>();
    if lazy {
        for v in 0..layout.num_states() {
            f.push(ClauseTag::ValidCover, covering(v));
        }
    } else {
        f.push(ClauseTag::ValidCover, covering(layout.initial()));
        let live: Vec<_> = layout.live_pairs().collect();
        for &(v, y, _) in &live {
            f.extend(ClauseTag::Zip1 { state: v, obs: y }, zip1_group(layout, v, y));
        }
        for y in layout.filter().obs_ids() {
            f.extend(ClauseTag::Zip2 { obs: y }, zip2_group(layout, y));
        }
    }

    for i in 0..k {
        for (v, o) in layout.zero_p_pairs() {
            f.push(ClauseTag::Out1, vec![layout.b(i, o).neg(), layout.r(i, v).neg()]);
        }
    }
    for i in 0..k {
        let clause = layout.filter().color_ids().map(|o| layout.b(i, o).pos()).collect();
        f.push(ClauseTag::Out2, clause);
    }
    f
}

/// Unit clauses `!R(k_banned, v)` for every state; `k_banned` is 1-based.
pub fn ban_size_units(layout: &VarLayout, k_banned: usize) -> Result<Vec<Vec<Lit>>, EncodingError> {
    if k_banned == 0 || k_banned > layout.k() {
        return Err(EncodingError::BanOutOfRange {
            banned: k_banned,
            k: layout.k(),
        });
    }
    Ok((0..layout.num_states())
        .map(|v| vec![layout.r(k_banned - 1, v).neg()])
        .collect())
}
