//! The anytime minimization loop.
//!
//! Starting from the trivial bound `k = |V|`, each round asks the solver for
//! a cover with at most `k` subsets. A model yields a cover, kept if it is
//! the smallest so far; the largest subset index is then banned with unit
//! clauses and the bound drops by one.
//! UNSAT proves the previous cover minimal, and running out of time returns
//! the best cover found so far.
//!
//! [`Method::LazySat`] starts without zip clauses. When a model's cover is not
//! zipped it loads only the clause groups relevant to the first violation and
//! solves again with the same bound.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use filtermin_sat::{Lit, SolveStatus, Solver};
use thiserror::Error;

use crate::encoding::{
    ban_size_units, build_cnf, build_layout, cover_from_model, zip1_group, zip2_group,
    EncodingError, VarLayout,
};
use crate::filter::{find_zip_violation, induced_filter, Cover, CoverError, Filter, ObsId, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Sat,
    LazySat,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Sat, Method::LazySat];

    pub fn name(self) -> &'static str {
        match self {
            Method::Sat => "sat",
            Method::LazySat => "lazy-sat",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sat" => Ok(Method::Sat),
            "lazy-sat" | "lazysat" | "lazy" => Ok(Method::LazySat),
            other => Err(format!("unknown method `{other}` (expected sat or lazy-sat)")),
        }
    }
}

/// Wall-clock allowance shared by every solver call and every zip check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub total: Duration,
    pub consumed: Duration,
}

impl Budget {
    pub fn new(total: Duration) -> Self {
        Budget {
            total,
            consumed: Duration::ZERO,
        }
    }

    pub fn remaining(&self) -> Duration {
        self.total.saturating_sub(self.consumed)
    }

    pub fn is_exhausted(&self) -> bool {
        self.consumed >= self.total
    }

    pub fn consume(&mut self, d: Duration) {
        self.consumed += d;
    }
}

/// One value of the size bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iteration {
    /// Bound in force: covers with at most `k` subsets.
    pub k: usize,
    pub outcome: SolveStatus,
    /// Time spent on this bound, solver calls and zip checks included.
    pub elapsed: Duration,
    /// Clauses handed to the solver so far, bans and loaded groups included.
    pub clauses_in_solver: usize,
    /// Size of the best cover known once this bound is settled.
    pub best_size_so_far: usize,
    /// Solver calls made for this bound (more than one only for the lazy
    /// method).
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimizeReport {
    pub method: Method,
    pub best_cover: Cover,
    pub best_filter: Filter,
    /// Set when no smaller cover exists.
    pub proven_minimal: bool,
    pub iterations: Vec<Iteration>,
    /// Zip clause groups `A(v, y)` loaded by the lazy method.
    pub zip1_groups_loaded: usize,
    /// Zip clause groups `B(y)` loaded by the lazy method.
    pub zip2_groups_loaded: usize,
    pub elapsed: Duration,
}

impl MinimizeReport {
    pub fn best_size(&self) -> usize {
        self.best_cover.num_nonempty()
    }

    /// Clauses handed to the solver over the whole run.
    pub fn clauses_in_solver(&self) -> usize {
        self.iterations.last().map_or(0, |it| it.clauses_in_solver)
    }

    /// True when the run stopped on the budget without improving on the
    /// input.
    pub fn timed_out_without_improvement(&self, input_states: usize) -> bool {
        !self.proven_minimal && self.best_size() >= input_states
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MinimizeError {
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("cannot build the minimized filter: {0}")]
    Cover(#[from] CoverError),
}

/// Groups loaded so far by the lazy method: observations whose `B(y)` group
/// is in the solver, and `(state, observation)` pairs whose `A(v, y)` group
/// is.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LazyState {
    pub loaded_obs: BTreeSet<ObsId>,
    pub loaded_pairs: BTreeSet<(State, ObsId)>,
}

struct Run<'a> {
    filter: &'a Filter,
    layout: VarLayout,
    solver: Solver,
    clauses: usize,
    lazy: Option<LazyState>,
}

impl Run<'_> {
    fn add(&mut self, clauses: Vec<Vec<Lit>>) {
        self.clauses += clauses.len();
        for c in &clauses {
            self.solver.add_clause(c);
        }
    }

    /// Loads the groups for the first zip violation of `cover`. Returns
    /// false when the cover is zipped.
    fn repair(&mut self, cover: &Cover) -> bool {
        let Some(violation) = find_zip_violation(self.filter, cover) else {
            return false;
        };
        let y = violation.observation;
        let lazy = self.lazy.as_mut().expect("repair is only used by the lazy method");
        let mut fresh = Vec::new();
        if lazy.loaded_obs.insert(y) {
            fresh.extend(zip2_group(&self.layout, y));
        }
        for &v in &cover.subsets()[violation.subset] {
            if self.layout.child(v, y).is_some() && lazy.loaded_pairs.insert((v, y)) {
                fresh.extend(zip1_group(&self.layout, v, y));
            }
        }
        self.add(fresh);
        true
    }
}

pub fn minimize(filter: &Filter, method: Method, budget: Budget, seed: u64) -> Result<MinimizeReport, MinimizeError> {
    let start = Instant::now();
    let mut budget = budget;
    let n = filter.num_states();
    let layout = build_layout(filter, n)?;
    let lazy = method == Method::LazySat;
    let cnf = build_cnf(&layout, lazy);

    let mut run = Run {
        filter,
        layout,
        solver: Solver::with_seed(seed),
        clauses: 0,
        lazy: lazy.then(LazyState::default),
    };
    run.solver.reserve_vars(cnf.num_vars);
    run.add(cnf.clauses);

    let mut best = Cover::identity(filter);
    let mut proven = false;
    let mut iterations = Vec::new();
    let mut k = n;

    while k >= 1 && !budget.is_exhausted() {
        let bound_start = Instant::now();
        let mut rounds = 0;
        let outcome = loop {
            let round_start = Instant::now();
            let result = run.solver.solve(budget.remaining());
            rounds += 1;
            let status = match result.status {
                SolveStatus::Sat => {
                    let model = result.model.expect("a satisfiable call returns a model");
                    let cover = cover_from_model(&run.layout, &model);
                    if lazy && run.repair(&cover) {
                        None
                    } else {
                        if cover.num_nonempty() < best.num_nonempty() {
                            best = cover;
                        }
                        Some(SolveStatus::Sat)
                    }
                }
                other => Some(other),
            };
            budget.consume(round_start.elapsed());
            match status {
                Some(s) => break s,
                None if budget.is_exhausted() => break SolveStatus::Unknown,
                None => {}
            }
        };

        match outcome {
            SolveStatus::Sat => {
                debug_assert!(best.num_nonempty() <= k);
                let bans = ban_size_units(&run.layout, k)?;
                run.add(bans);
            }
            SolveStatus::Unsat => proven = true,
            SolveStatus::Unknown => {}
        }
        iterations.push(Iteration {
            k,
            outcome,
            elapsed: bound_start.elapsed(),
            clauses_in_solver: run.clauses,
            best_size_so_far: best.num_nonempty(),
            rounds,
        });
        if outcome != SolveStatus::Sat {
            break;
        }
        k -= 1;
    }
    if k == 0 {
        // a one-subset cover was found
        proven = true;
    }

    let best_filter = induced_filter(filter, &best)?;
    let (zip1_groups_loaded, zip2_groups_loaded) = run
        .lazy
        .as_ref()
        .map_or((0, 0), |l| (l.loaded_pairs.len(), l.loaded_obs.len()));
    Ok(MinimizeReport {
        method,
        best_cover: best,
        best_filter,
        proven_minimal: proven,
        iterations,
        zip1_groups_loaded,
        zip2_groups_loaded,
        elapsed: start.elapsed(),
    })
}

/// Eager minimization: every zip clause is in the solver from the start.
pub fn minimize_sat(filter: &Filter, budget: Budget, seed: u64) -> Result<MinimizeReport, MinimizeError> {
    minimize(filter, Method::Sat, budget, seed)
}

/// Lazy minimization: zip clause groups are loaded as violations show up.
pub fn minimize_lazy(filter: &Filter, budget: Budget, seed: u64) -> Result<MinimizeReport, MinimizeError> {
    minimize(filter, Method::LazySat, budget, seed)
}
