use std::fmt::Write as _;

use filtermin_sat::{Assignment, Var};

use super::EncodingError;
use crate::filter::{ColorId, Cover, Filter, ObsId, State, StateSet};

/// What a solver variable stands for. Subset indices are 0-based here and
/// 1-based in every exported text format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    R { subset: usize, state: State },
    A { from: usize, to: usize, obs: ObsId },
    B { subset: usize, color: ColorId },
    Q { subset: usize },
}

/// Bijection between cover variables and solver variables for a fixed filter
/// and size bound `k`.
///
/// Numbering is contiguous: the `R` block, then `A`, then `B`, each in
/// lexicographic index order, then the `q` block used only by the integer
/// programs. The SAT encodings never mention `q`.
#[derive(Debug, Clone)]
pub struct VarLayout {
    filter: Filter,
    k: usize,
    initial: State,
    n_states: usize,
    n_obs: usize,
    n_colors: usize,
    /// `child[v][y]`, the `y`-child of `v`.
    child: Vec<Vec<Option<State>>>,
}

/// Lays out the variables for covers of `filter` with at most `k` subsets.
pub fn build_layout(filter: &Filter, k: usize) -> Result<VarLayout, EncodingError> {
    if k == 0 {
        return Err(EncodingError::ZeroBound);
    }
    if !filter.is_deterministic() {
        return Err(EncodingError::NotDeterministic);
    }
    let (_, unreachable) = filter.strip_unreachable();
    if !unreachable.is_empty() {
        return Err(EncodingError::Unreachable(unreachable));
    }
    let child = filter
        .states()
        .map(|v| filter.obs_ids().map(|y| filter.child(v, y)).collect())
        .collect();
    Ok(VarLayout {
        filter: filter.clone(),
        k,
        initial: filter.initial_state().unwrap(),
        n_states: filter.num_states(),
        n_obs: filter.observations().len(),
        n_colors: filter.colors().len(),
        child,
    })
}

impl VarLayout {
    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.n_states
    }

    pub fn num_obs(&self) -> usize {
        self.n_obs
    }

    pub fn num_colors(&self) -> usize {
        self.n_colors
    }

    pub fn num_r(&self) -> usize {
        self.k * self.n_states
    }

    pub fn num_a(&self) -> usize {
        self.k * self.k * self.n_obs
    }

    pub fn num_b(&self) -> usize {
        self.k * self.n_colors
    }

    /// Variables used by the CNF encodings (`R`, `A`, `B`).
    pub fn num_sat_vars(&self) -> usize {
        self.num_r() + self.num_a() + self.num_b()
    }

    /// All variables including the `q` block.
    pub fn num_vars(&self) -> usize {
        self.num_sat_vars() + self.k
    }

    pub fn r(&self, subset: usize, state: State) -> Var {
        debug_assert!(subset < self.k && state < self.n_states);
        Var((subset * self.n_states + state) as u32)
    }

    pub fn a(&self, from: usize, to: usize, obs: ObsId) -> Var {
        debug_assert!(from < self.k && to < self.k && obs.0 < self.n_obs);
        Var((self.num_r() + (from * self.k + to) * self.n_obs + obs.0) as u32)
    }

    pub fn b(&self, subset: usize, color: ColorId) -> Var {
        debug_assert!(subset < self.k && color.0 < self.n_colors);
        Var((self.num_r() + self.num_a() + subset * self.n_colors + color.0) as u32)
    }

    pub fn q(&self, subset: usize) -> Var {
        debug_assert!(subset < self.k);
        Var((self.num_sat_vars() + subset) as u32)
    }

    pub fn kind(&self, var: Var) -> Option<VarKind> {
        let mut idx = var.index();
        if idx < self.num_r() {
            return Some(VarKind::R {
                subset: idx / self.n_states,
                state: idx % self.n_states,
            });
        }
        idx -= self.num_r();
        if idx < self.num_a() {
            let obs = ObsId(idx % self.n_obs);
            let pair = idx / self.n_obs;
            return Some(VarKind::A {
                from: pair / self.k,
                to: pair % self.k,
                obs,
            });
        }
        idx -= self.num_a();
        if idx < self.num_b() {
            return Some(VarKind::B {
                subset: idx / self.n_colors,
                color: ColorId(idx % self.n_colors),
            });
        }
        idx -= self.num_b();
        (idx < self.k).then_some(VarKind::Q { subset: idx })
    }

    /// `t(y, v)`: whether `v` has a `y`-child.
    pub fn t(&self, obs: ObsId, state: State) -> bool {
        self.child[state][obs.0].is_some()
    }

    /// `p(o, v)`: whether `o` is an output of `v`.
    pub fn p(&self, color: ColorId, state: State) -> bool {
        self.filter.coloring(state).contains(&color)
    }

    /// `v_y`, the `y`-child of `v`.
    pub fn child(&self, state: State, obs: ObsId) -> Option<State> {
        self.child[state][obs.0]
    }

    /// `(v, y)` pairs with `t(y, v) = 1`, in state then observation order.
    pub fn live_pairs(&self) -> impl Iterator<Item = (State, ObsId, State)> + '_ {
        (0..self.n_states).flat_map(move |v| {
            (0..self.n_obs).filter_map(move |y| self.child[v][y].map(|w| (v, ObsId(y), w)))
        })
    }

    /// `(o, v)` pairs with `p(o, v) = 0`, in state then color order.
    pub fn zero_p_pairs(&self) -> impl Iterator<Item = (State, ColorId)> + '_ {
        (0..self.n_states).flat_map(move |v| {
            (0..self.n_colors)
                .map(ColorId)
                .filter(move |&o| !self.p(o, v))
                .map(move |o| (v, o))
        })
    }

    /// Name used in LP files, e.g. `R_1_0`, `a_1_2_y`, `b_1_g`, `q_1`.
    pub fn var_name(&self, var: Var) -> String {
        match self.kind(var).expect("variable belongs to the layout") {
            VarKind::R { subset, state } => format!("R_{}_{}", subset + 1, state),
            VarKind::A { from, to, obs } => {
                format!("a_{}_{}_{}", from + 1, to + 1, self.filter.obs_name(obs))
            }
            VarKind::B { subset, color } => {
                format!("b_{}_{}", subset + 1, self.filter.color_name(color))
            }
            VarKind::Q { subset } => format!("q_{}", subset + 1),
        }
    }

    /// Variable-map sidecar for DIMACS files: one line per CNF variable,
    /// `<id> R <i> <v>`, `<id> a <i> <j> <y>` or `<id> b <i> <o>`.
    pub fn varmap(&self) -> String {
        let mut out = String::new();
        for idx in 0..self.num_sat_vars() {
            let var = Var(idx as u32);
            let id = var.to_dimacs();
            match self.kind(var).unwrap() {
                VarKind::R { subset, state } => writeln!(out, "{id} R {} {state}", subset + 1),
                VarKind::A { from, to, obs } => writeln!(
                    out,
                    "{id} a {} {} {}",
                    from + 1,
                    to + 1,
                    self.filter.obs_name(obs)
                ),
                VarKind::B { subset, color } => {
                    writeln!(out, "{id} b {} {}", subset + 1, self.filter.color_name(color))
                }
                VarKind::Q { .. } => unreachable!(),
            }
            .unwrap();
        }
        out
    }
}

/// Reads subsets off the `R` variables, dropping empty ones.
pub fn cover_from_model(layout: &VarLayout, model: &Assignment) -> Cover {
    let subsets = (0..layout.k)
        .map(|i| {
            (0..layout.n_states)
                .filter(|&v| model.value(layout.r(i, v)))
                .collect::<StateSet>()
        })
        .filter(|k| !k.is_empty())
        .collect();
    Cover::new(subsets)
}

/// Canonical assignment describing `cover` over every layout variable.
///
/// `a(i, j, y)` is set iff `K_j` holds all `y`-children of `K_i`; when `K_i`
/// has no `y`-children only `a(i, 1, y)` is set. `b(i, o)` is set for the
/// common outputs of `K_i` (for empty `K_i`, the first color). `q(i)` marks
/// non-empty subsets.
pub fn extension_from_cover(layout: &VarLayout, cover: &Cover) -> Result<Assignment, EncodingError> {
    if cover.len() > layout.k {
        return Err(EncodingError::TooManySubsets {
            subsets: cover.len(),
            k: layout.k,
        });
    }
    let filter = &layout.filter;
    let mut asg = Assignment::new(layout.num_vars());
    let empty = StateSet::new();
    let subset = |i: usize| cover.subsets().get(i).unwrap_or(&empty);

    for i in 0..layout.k {
        let ki = subset(i);
        for &v in ki {
            asg.set(layout.r(i, v), true);
        }
        asg.set(layout.q(i), !ki.is_empty());
        for y in filter.obs_ids() {
            let children = filter.children_of_set(ki, y);
            if children.is_empty() {
                asg.set(layout.a(i, 0, y), true);
                continue;
            }
            for j in 0..layout.k {
                if children.is_subset(subset(j)) {
                    asg.set(layout.a(i, j, y), true);
                }
            }
        }
        if ki.is_empty() {
            if layout.n_colors > 0 {
                asg.set(layout.b(i, ColorId(0)), true);
            }
        } else {
            for o in filter.common_outputs(ki) {
                asg.set(layout.b(i, o), true);
            }
        }
    }
    Ok(asg)
}
