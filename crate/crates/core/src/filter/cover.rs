use std::collections::BTreeMap;

use thiserror::Error;

use super::{Filter, ObsId, State, StateSet};

/// An indexed family of state subsets `K_1..K_m`. Empty subsets may appear in
/// intermediate covers (e.g. decoded from a solver model before trimming).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cover {
    subsets: Vec<StateSet>,
}

impl Cover {
    pub fn new(subsets: Vec<StateSet>) -> Self {
        Cover { subsets }
    }

    /// Every state in its own subset.
    pub fn identity(filter: &Filter) -> Self {
        Cover::new(filter.states().map(|v| StateSet::from([v])).collect())
    }

    pub fn subsets(&self) -> &[StateSet] {
        &self.subsets
    }

    pub fn into_subsets(self) -> Vec<StateSet> {
        self.subsets
    }

    /// Number of subsets including empty ones.
    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// The size of the induced filter.
    pub fn num_nonempty(&self) -> usize {
        self.subsets.iter().filter(|k| !k.is_empty()).count()
    }

    pub fn without_empty(&self) -> Cover {
        Cover::new(self.subsets.iter().filter(|k| !k.is_empty()).cloned().collect())
    }

    pub fn union(&self) -> StateSet {
        self.subsets.iter().flatten().copied().collect()
    }

    /// Every member is a state of `filter` and every state is covered.
    pub fn is_valid(&self, filter: &Filter) -> bool {
        let union = self.union();
        union.len() == filter.num_states() && union.iter().all(|&v| v < filter.num_states())
    }

    pub fn covers(&self, v: State) -> bool {
        self.subsets.iter().any(|k| k.contains(&v))
    }

    /// Some subset contains every initial state of `filter`.
    pub fn covers_initial(&self, filter: &Filter) -> bool {
        filter.initial().iter().all(|&v| self.covers(v))
    }

    /// Initial state covered, zipped, and a common output in every non-empty
    /// subset: exactly the covers whose induced filter solves the problem.
    pub fn is_feasible(&self, filter: &Filter) -> bool {
        self.covers_initial(filter)
            && is_zipped(filter, self)
            && self
                .subsets
                .iter()
                .all(|k| k.is_empty() || !filter.common_outputs(k).is_empty())
    }
}

/// A subset whose `y`-children fit in no single subset of the cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZipViolation {
    pub subset: usize,
    pub observation: ObsId,
    pub children: StateSet,
}

/// First violation in subset order, then observation order.
pub fn find_zip_violation(filter: &Filter, cover: &Cover) -> Option<ZipViolation> {
    for (i, k) in cover.subsets().iter().enumerate() {
        if k.is_empty() {
            continue;
        }
        for y in filter.obs_ids() {
            let children = filter.children_of_set(k, y);
            if children.is_empty() {
                continue;
            }
            if !cover.subsets().iter().any(|kj| children.is_subset(kj)) {
                return Some(ZipViolation {
                    subset: i,
                    observation: y,
                    children,
                });
            }
        }
    }
    None
}

pub fn is_zipped(filter: &Filter, cover: &Cover) -> bool {
    find_zip_violation(filter, cover).is_none()
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CoverError {
    #[error("cover mentions state {0}, which the filter does not have")]
    UnknownState(State),
    #[error("no subset contains the initial state")]
    InitialUncovered,
    #[error("subset {subset} has {observation}-children that fit in no single subset")]
    NotZipped { subset: usize, observation: String },
    #[error("states in subset {0} share no output")]
    NoCommonOutput(usize),
    #[error("filter must have exactly one initial state")]
    NotDeterministic,
}

/// The filter induced by a zipped cover: one state per non-empty subset, in
/// subset order. Ties are broken towards the lowest subset index, and each
/// state emits the smallest common output of its subset.
pub fn induced_filter(filter: &Filter, cover: &Cover) -> Result<Filter, CoverError> {
    let v0 = filter.initial_state().ok_or(CoverError::NotDeterministic)?;
    if let Some(&v) = cover.union().iter().find(|&&v| v >= filter.num_states()) {
        return Err(CoverError::UnknownState(v));
    }
    if let Some(violation) = find_zip_violation(filter, cover) {
        return Err(CoverError::NotZipped {
            subset: violation.subset,
            observation: filter.obs_name(violation.observation).to_string(),
        });
    }

    // subset index -> induced state id
    let mut state_of = vec![None; cover.len()];
    let mut next = 0;
    let mut coloring = Vec::new();
    for (i, k) in cover.subsets().iter().enumerate() {
        if k.is_empty() {
            continue;
        }
        let common = filter.common_outputs(k);
        let Some(&color) = common.first() else {
            return Err(CoverError::NoCommonOutput(i));
        };
        state_of[i] = Some(next);
        next += 1;
        coloring.push([color].into());
    }

    let initial = cover
        .subsets()
        .iter()
        .position(|k| k.contains(&v0))
        .and_then(|i| state_of[i])
        .ok_or(CoverError::InitialUncovered)?;

    let mut succ = Vec::with_capacity(next);
    for k in cover.subsets().iter().filter(|k| !k.is_empty()) {
        let mut edges = BTreeMap::new();
        for y in filter.obs_ids() {
            let children = filter.children_of_set(k, y);
            if children.is_empty() {
                continue;
            }
            let j = cover
                .subsets()
                .iter()
                .position(|kj| !kj.is_empty() && children.is_subset(kj))
                .expect("zipped cover has a target subset");
            edges.insert(y, StateSet::from([state_of[j].unwrap()]));
        }
        succ.push(edges);
    }

    Ok(Filter::from_parts(
        format!("{}_min", filter.name()),
        StateSet::from([initial]),
        filter.observations().to_vec(),
        filter.colors().to_vec(),
        succ,
        coloring,
    ))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{deterministic_isomorphic, output_simulates};
    use super::*;

    fn cover(sets: &[&[State]]) -> Cover {
        Cover::new(sets.iter().map(|s| set(s)).collect())
    }

    #[test]
    fn zipped_examples_on_chain3() {
        let f = chain3();
        assert!(is_zipped(&f, &cover(&[&[0, 1, 2]])));
        let v = find_zip_violation(&f, &cover(&[&[0, 1], &[2]])).unwrap();
        assert_eq!(v.subset, 0);
        assert_eq!(f.obs_name(v.observation), "a");
        assert_eq!(v.children, set(&[1, 2]));
        assert!(is_zipped(&f, &cover(&[&[0], &[1, 2]])));
    }

    #[test]
    fn induced_all_in_one() {
        let f = chain3();
        let g = induced_filter(&f, &cover(&[&[0, 1, 2]])).unwrap();
        assert_eq!(g.num_states(), 1);
        let a = g.obs_id("a").unwrap();
        assert_eq!(g.child(0, a), Some(0));
        assert_eq!(g.coloring(0).len(), 1);
        assert_eq!(g.color_name(*g.coloring(0).first().unwrap()), "g");
        assert!(output_simulates(&g, &f).holds());
    }

    #[test]
    fn identity_cover_reproduces_filter() {
        let f = chain3();
        let g = induced_filter(&f, &Cover::identity(&f)).unwrap();
        assert!(deterministic_isomorphic(&f, &g));
    }

    #[test]
    fn induced_twocolor_merge() {
        let f = twocolor();
        let g = induced_filter(&f, &cover(&[&[0], &[1, 2], &[3]])).unwrap();
        assert_eq!(g.num_states(), 3);
        assert!(g.is_deterministic());
        let (a, b) = (g.obs_id("a").unwrap(), g.obs_id("b").unwrap());
        assert_eq!(g.child(0, a), Some(1));
        assert_eq!(g.child(0, b), Some(1));
        assert_eq!(g.child(1, a), Some(2));
        assert_eq!(g.child(2, a), Some(2));
        assert!(output_simulates(&g, &f).holds());
    }

    #[test]
    fn lowest_index_tie_break() {
        let f = chain3();
        // children of {0} on a = {1}; both subset 1 and 2 contain it
        let g = induced_filter(&f, &cover(&[&[0], &[1, 2], &[1]])).unwrap();
        assert_eq!(g.num_states(), 3);
        assert_eq!(g.child(0, ObsId(0)), Some(1));
        // state for {1} is unreachable but still created
        assert_eq!(g.child(2, ObsId(0)), Some(1));
    }

    #[test]
    fn induced_rejects_bad_covers() {
        let f = chain3();
        assert!(matches!(
            induced_filter(&f, &cover(&[&[0, 1], &[2]])),
            Err(CoverError::NotZipped { subset: 0, .. })
        ));
        let t = twocolor();
        assert_eq!(
            induced_filter(&t, &cover(&[&[0, 3], &[1, 2], &[0, 1]])).unwrap_err(),
            CoverError::NotZipped {
                subset: 0,
                observation: "a".into()
            }
        );
        assert_eq!(
            induced_filter(&t, &cover(&[&[0, 1, 2, 3]])).unwrap_err(),
            CoverError::NoCommonOutput(0)
        );
        assert_eq!(
            induced_filter(&f, &cover(&[&[1, 2]])).unwrap_err(),
            CoverError::InitialUncovered
        );
    }

    #[test]
    fn feasibility_predicate() {
        let t = twocolor();
        assert!(cover(&[&[0], &[1, 2], &[3]]).is_feasible(&t));
        assert!(!cover(&[&[0, 3], &[1, 2]]).is_feasible(&t));
        assert!(cover(&[&[0], &[1, 2], &[3]]).is_valid(&t));
        assert!(!cover(&[&[0], &[3]]).is_valid(&t));
    }
}
