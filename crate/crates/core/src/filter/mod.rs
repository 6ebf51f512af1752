//! Procrustean filters: finite transition systems over observations whose
//! states emit non-empty sets of outputs ("colors").

mod cover;
mod simulation;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

pub use cover::{find_zip_violation, induced_filter, is_zipped, Cover, CoverError, ZipViolation};
pub use simulation::{output_simulates, FailureKind, SimulationFailure, SimulationVerdict};

/// States are dense integers `0..n`.
pub type State = usize;
pub type StateSet = BTreeSet<State>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObsId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorId(pub usize);

pub type ColorSet = BTreeSet<ColorId>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FilterError {
    #[error("state {state} is out of range (filter has {num_states} states)")]
    StateOutOfRange { state: State, num_states: usize },
    #[error("state {0} has no outputs")]
    NoOutputs(State),
    #[error("filter has no initial state")]
    NoInitialState,
    #[error("duplicate transition {src} --{obs}--> {dst}")]
    DuplicateTransition { src: State, obs: String, dst: State },
    #[error("unknown observation `{0}`")]
    UnknownObservation(String),
    #[error("invalid token `{0}` (expected [A-Za-z0-9_]+)")]
    InvalidToken(String),
}

pub fn is_valid_token(token: &str) -> bool {
    !token.is_empty() && token.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// A p-filter `(V, V0, Y, tau, C, c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    name: String,
    initial: StateSet,
    observations: Vec<String>,
    colors: Vec<String>,
    succ: Vec<BTreeMap<ObsId, StateSet>>,
    coloring: Vec<ColorSet>,
}

/// Incremental constructor for [`Filter`]; tokens are interned in the order
/// they are first mentioned.
#[derive(Debug, Clone)]
pub struct FilterBuilder {
    name: String,
    num_states: usize,
    initial: StateSet,
    observations: Vec<String>,
    obs_index: HashMap<String, ObsId>,
    colors: Vec<String>,
    color_index: HashMap<String, ColorId>,
    succ: Vec<BTreeMap<ObsId, StateSet>>,
    coloring: Vec<ColorSet>,
}

impl FilterBuilder {
    pub fn new(name: impl Into<String>, num_states: usize) -> Self {
        FilterBuilder {
            name: name.into(),
            num_states,
            initial: StateSet::new(),
            observations: Vec::new(),
            obs_index: HashMap::new(),
            colors: Vec::new(),
            color_index: HashMap::new(),
            succ: vec![BTreeMap::new(); num_states],
            coloring: vec![ColorSet::new(); num_states],
        }
    }

    fn check_state(&self, state: State) -> Result<(), FilterError> {
        if state < self.num_states {
            Ok(())
        } else {
            Err(FilterError::StateOutOfRange {
                state,
                num_states: self.num_states,
            })
        }
    }

    pub fn observation(&mut self, token: &str) -> Result<ObsId, FilterError> {
        if let Some(&id) = self.obs_index.get(token) {
            return Ok(id);
        }
        if !is_valid_token(token) {
            return Err(FilterError::InvalidToken(token.to_string()));
        }
        let id = ObsId(self.observations.len());
        self.observations.push(token.to_string());
        self.obs_index.insert(token.to_string(), id);
        Ok(id)
    }

    pub fn color(&mut self, token: &str) -> Result<ColorId, FilterError> {
        if let Some(&id) = self.color_index.get(token) {
            return Ok(id);
        }
        if !is_valid_token(token) {
            return Err(FilterError::InvalidToken(token.to_string()));
        }
        let id = ColorId(self.colors.len());
        self.colors.push(token.to_string());
        self.color_index.insert(token.to_string(), id);
        Ok(id)
    }

    pub fn initial(&mut self, state: State) -> Result<&mut Self, FilterError> {
        self.check_state(state)?;
        self.initial.insert(state);
        Ok(self)
    }

    pub fn transition(&mut self, src: State, obs: &str, dst: State) -> Result<&mut Self, FilterError> {
        self.check_state(src)?;
        self.check_state(dst)?;
        let y = self.observation(obs)?;
        if !self.succ[src].entry(y).or_default().insert(dst) {
            return Err(FilterError::DuplicateTransition {
                src,
                obs: obs.to_string(),
                dst,
            });
        }
        Ok(self)
    }

    pub fn output(&mut self, state: State, color: &str) -> Result<&mut Self, FilterError> {
        self.check_state(state)?;
        let c = self.color(color)?;
        self.coloring[state].insert(c);
        Ok(self)
    }

    pub fn outputs(&mut self, state: State, colors: &[&str]) -> Result<&mut Self, FilterError> {
        for c in colors {
            self.output(state, c)?;
        }
        Ok(self)
    }

    pub fn build(self) -> Result<Filter, FilterError> {
        if let Some(v) = self.coloring.iter().position(BTreeSet::is_empty) {
            return Err(FilterError::NoOutputs(v));
        }
        if self.initial.is_empty() && self.num_states > 0 {
            return Err(FilterError::NoInitialState);
        }
        Ok(Filter {
            name: self.name,
            initial: self.initial,
            observations: self.observations,
            colors: self.colors,
            succ: self.succ,
            coloring: self.coloring,
        })
    }
}

static EMPTY: StateSet = StateSet::new();

impl Filter {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn num_states(&self) -> usize {
        self.succ.len()
    }

    pub fn states(&self) -> std::ops::Range<State> {
        0..self.num_states()
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    /// The unique initial state of a deterministic filter.
    pub fn initial_state(&self) -> Option<State> {
        match self.initial.len() {
            1 => self.initial.first().copied(),
            _ => None,
        }
    }

    pub fn observations(&self) -> &[String] {
        &self.observations
    }

    pub fn obs_ids(&self) -> impl Iterator<Item = ObsId> {
        (0..self.observations.len()).map(ObsId)
    }

    pub fn obs_id(&self, token: &str) -> Option<ObsId> {
        self.observations.iter().position(|o| o == token).map(ObsId)
    }

    pub fn obs_name(&self, y: ObsId) -> &str {
        &self.observations[y.0]
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn color_ids(&self) -> impl Iterator<Item = ColorId> {
        (0..self.colors.len()).map(ColorId)
    }

    pub fn color_id(&self, token: &str) -> Option<ColorId> {
        self.colors.iter().position(|c| c == token).map(ColorId)
    }

    pub fn color_name(&self, c: ColorId) -> &str {
        &self.colors[c.0]
    }

    /// The output set `c(v)`.
    pub fn coloring(&self, v: State) -> &ColorSet {
        &self.coloring[v]
    }

    pub fn successors(&self, v: State, y: ObsId) -> &StateSet {
        self.succ[v].get(&y).unwrap_or(&EMPTY)
    }

    /// The `y`-child of `v`; for non-deterministic filters the smallest one.
    pub fn child(&self, v: State, y: ObsId) -> Option<State> {
        self.successors(v, y).first().copied()
    }

    /// Outgoing edges of `v` grouped by observation, in observation order.
    pub fn out_edges(&self, v: State) -> impl Iterator<Item = (ObsId, &StateSet)> {
        self.succ[v].iter().map(|(&y, dsts)| (y, dsts))
    }

    /// All transitions as `(src, obs, dst)`, sorted.
    pub fn transitions(&self) -> impl Iterator<Item = (State, ObsId, State)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(v, m)| m.iter().flat_map(move |(&y, d)| d.iter().map(move |&w| (v, y, w))))
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().flat_map(|m| m.values()).map(BTreeSet::len).sum()
    }

    /// States reached from `from` by reading `s`; empty iff `s` crashes.
    pub fn trace(&self, from: &StateSet, s: &[ObsId]) -> StateSet {
        let mut cur = from.clone();
        for &y in s {
            if cur.is_empty() {
                break;
            }
            cur = self.post(&cur, y);
        }
        cur
    }

    /// [`Filter::trace`] over observation tokens.
    pub fn trace_tokens<S: AsRef<str>>(&self, from: &StateSet, s: &[S]) -> Result<StateSet, FilterError> {
        Ok(self.trace(from, &self.parse_string(s)?))
    }

    /// Converts tokens to observation ids, rejecting tokens outside `Y`.
    pub fn parse_string<S: AsRef<str>>(&self, s: &[S]) -> Result<Vec<ObsId>, FilterError> {
        s.iter()
            .map(|t| {
                self.obs_id(t.as_ref())
                    .ok_or_else(|| FilterError::UnknownObservation(t.as_ref().to_string()))
            })
            .collect()
    }

    /// One-step image of a state set; same as [`Filter::children_of_set`].
    pub fn post(&self, from: &StateSet, y: ObsId) -> StateSet {
        from.iter().flat_map(|&v| self.successors(v, y).iter().copied()).collect()
    }

    /// All `y`-children of the members of `k`.
    pub fn children_of_set(&self, k: &StateSet, y: ObsId) -> StateSet {
        self.post(k, y)
    }

    pub fn colors_of_set(&self, states: &StateSet) -> ColorSet {
        states.iter().flat_map(|&v| self.coloring[v].iter().copied()).collect()
    }

    /// Outputs of all states reached from the initial states by `s`.
    pub fn colors_of(&self, s: &[ObsId]) -> ColorSet {
        self.colors_of_set(&self.trace(&self.initial, s))
    }

    /// Colors shared by every member of `k`.
    pub fn common_outputs(&self, k: &StateSet) -> ColorSet {
        let mut it = k.iter();
        let Some(&first) = it.next() else {
            return ColorSet::new();
        };
        let mut common = self.coloring[first].clone();
        for &v in it {
            common.retain(|c| self.coloring[v].contains(c));
        }
        common
    }

    /// One initial state and pairwise disjoint labels on sibling edges.
    pub fn is_deterministic(&self) -> bool {
        self.initial.len() == 1 && self.succ.iter().all(|m| m.values().all(|d| d.len() <= 1))
    }

    pub fn reachable_states(&self) -> StateSet {
        let mut seen = self.initial.clone();
        let mut queue: VecDeque<State> = self.initial.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            for dsts in self.succ[v].values() {
                for &w in dsts {
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
        }
        seen
    }

    /// Removes unreachable states, renumbering the rest in order. Returns the
    /// trimmed filter and the removed (original) state ids.
    pub fn strip_unreachable(&self) -> (Filter, Vec<State>) {
        let reachable = self.reachable_states();
        if reachable.len() == self.num_states() {
            return (self.clone(), Vec::new());
        }
        let mut renumber = vec![None; self.num_states()];
        for (new, &old) in reachable.iter().enumerate() {
            renumber[old] = Some(new);
        }
        let removed = self.states().filter(|v| renumber[*v].is_none()).collect();
        let succ = reachable
            .iter()
            .map(|&v| {
                self.succ[v]
                    .iter()
                    .map(|(&y, d)| (y, d.iter().map(|&w| renumber[w].unwrap()).collect()))
                    .collect()
            })
            .collect();
        let coloring = reachable.iter().map(|&v| self.coloring[v].clone()).collect();
        let filter = Filter {
            name: self.name.clone(),
            initial: self.initial.iter().map(|&v| renumber[v].unwrap()).collect(),
            observations: self.observations.clone(),
            colors: self.colors.clone(),
            succ,
            coloring,
        };
        (filter, removed)
    }

    /// Subset construction over the reachable part. Subset-states are numbered
    /// in breadth-first order from the initial set and colored by the union of
    /// their members' colors.
    pub fn determinize(&self) -> Filter {
        let mut index: HashMap<StateSet, State> = HashMap::new();
        let mut subsets: Vec<StateSet> = Vec::new();
        let mut succ: Vec<BTreeMap<ObsId, StateSet>> = Vec::new();
        index.insert(self.initial.clone(), 0);
        subsets.push(self.initial.clone());
        let mut next = 0;
        while next < subsets.len() {
            let current = subsets[next].clone();
            let mut edges = BTreeMap::new();
            for y in self.obs_ids() {
                let image = self.post(&current, y);
                if image.is_empty() {
                    continue;
                }
                let id = *index.entry(image.clone()).or_insert_with(|| {
                    subsets.push(image);
                    subsets.len() - 1
                });
                edges.insert(y, StateSet::from([id]));
            }
            succ.push(edges);
            next += 1;
        }
        let coloring = subsets.iter().map(|k| self.colors_of_set(k)).collect();
        Filter {
            name: self.name.clone(),
            initial: StateSet::from([0]),
            observations: self.observations.clone(),
            colors: self.colors.clone(),
            succ,
            coloring,
        }
    }

    /// Assembles a filter from parts that share this filter's alphabets.
    pub(crate) fn from_parts(
        name: String,
        initial: StateSet,
        observations: Vec<String>,
        colors: Vec<String>,
        succ: Vec<BTreeMap<ObsId, StateSet>>,
        coloring: Vec<ColorSet>,
    ) -> Filter {
        Filter {
            name,
            initial,
            observations,
            colors,
            succ,
            coloring,
        }
    }
}

/// Isomorphism of the reachable parts of two deterministic filters, matching
/// observations and colors by token. Returns `false` for non-deterministic input.
pub fn deterministic_isomorphic(a: &Filter, b: &Filter) -> bool {
    let (Some(a0), Some(b0)) = (a.initial_state(), b.initial_state()) else {
        return false;
    };
    if !a.is_deterministic() || !b.is_deterministic() {
        return false;
    }
    let color_names = |f: &Filter, v: State| -> BTreeSet<String> {
        f.coloring(v).iter().map(|&c| f.color_name(c).to_string()).collect()
    };
    let edges = |f: &Filter, v: State| -> BTreeMap<String, State> {
        f.out_edges(v)
            .filter_map(|(y, d)| d.first().map(|&w| (f.obs_name(y).to_string(), w)))
            .collect()
    };
    let mut a_to_b: HashMap<State, State> = HashMap::from([(a0, b0)]);
    let mut b_to_a: HashMap<State, State> = HashMap::from([(b0, a0)]);
    let mut queue = VecDeque::from([(a0, b0)]);
    while let Some((u, v)) = queue.pop_front() {
        if color_names(a, u) != color_names(b, v) {
            return false;
        }
        let (eu, ev) = (edges(a, u), edges(b, v));
        if eu.len() != ev.len() {
            return false;
        }
        for (token, &wu) in &eu {
            let Some(&wv) = ev.get(token) else {
                return false;
            };
            match (a_to_b.get(&wu), b_to_a.get(&wv)) {
                (None, None) => {
                    a_to_b.insert(wu, wv);
                    b_to_a.insert(wv, wu);
                    queue.push_back((wu, wv));
                }
                (Some(&x), Some(&y)) if x == wv && y == wu => {}
                _ => return false,
            }
        }
    }
    true
}
