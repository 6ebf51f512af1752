//! Conflict-driven clause learning with two watched literals.
//!
//! The solver only ever grows its clause database from the outside, so clauses
//! learned during one `solve` call stay implied by the problem in every later
//! call. That is what makes the descending-bound loops of the minimizer cheap:
//! each bound tightening keeps all previously derived knowledge.

use std::time::{Duration, Instant};

use crate::lit::{normalize_clause, Assignment, Lit, Var};

const NO_REASON: u32 = u32::MAX;
const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;

/// The clock is read once every this many conflicts.
pub const TIME_CHECK_CONFLICTS: u64 = 64;
const TIME_CHECK_DECISIONS: u64 = 4096;

const RESTART_FIRST: f64 = 100.0;
const RESTART_GROWTH: f64 = 1.5;
const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;
const RANDOM_DECISION_FREQ: f64 = 0.005;

/// Environment variable consulted by [`default_seed`].
pub const SEED_ENV: &str = "FILTERMIN_SEED";

/// Seed from `FILTERMIN_SEED`, or 0 if unset or unparsable.
pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Sat,
    Unsat,
    /// The time budget ran out before an answer was found.
    Unknown,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Sat => "SAT",
            SolveStatus::Unsat => "UNSAT",
            SolveStatus::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub elapsed: Duration,
}

impl SolveStats {
    /// Equality on the deterministic counters, ignoring wall-clock time.
    pub fn same_work(&self, other: &SolveStats) -> bool {
        self.conflicts == other.conflicts
            && self.decisions == other.decisions
            && self.propagations == other.propagations
            && self.restarts == other.restarts
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Present iff `status == Sat`; total over all declared variables.
    pub model: Option<Assignment>,
    /// Counters for this call only.
    pub stats: SolveStats,
}

#[derive(Debug, Clone, Copy)]
struct ClauseHeader {
    start: u32,
    len: u32,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f32,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

/// Binary max-heap of variables keyed by activity.
#[derive(Debug, Default)]
struct VarOrder {
    heap: Vec<u32>,
    pos: Vec<u32>,
}

const NOT_IN_HEAP: u32 = u32::MAX;

impl VarOrder {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n, NOT_IN_HEAP);
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] != NOT_IN_HEAP
    }

    fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v as usize] = self.heap.len() as u32;
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.pos[v as usize] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn before(a: u32, b: u32, act: &[f64]) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if !Self::before(v, p, act) {
                break;
            }
            self.heap[i] = p;
            self.pos[p as usize] = i as u32;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && Self::before(self.heap[right], self.heap[left], act) {
                right
            } else {
                left
            };
            let c = self.heap[child];
            if !Self::before(c, v, act) {
                break;
            }
            self.heap[i] = c;
            self.pos[c as usize] = i as u32;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }
}

/// SplitMix64; only drives the rare random branching decisions.
#[derive(Debug, Clone)]
struct Rng(u64);

impl Rng {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// An incremental CDCL solver.
///
/// Clauses may be added between calls to [`Solver::solve`]; there is no way to
/// remove them. Once the clause set is found unsatisfiable the solver stays
/// unsatisfiable.
pub struct Solver {
    seed: u64,
    rng: Rng,
    ok: bool,

    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    seen: Vec<bool>,
    analyze_clear: Vec<Lit>,
    order: VarOrder,
    var_inc: f64,

    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,

    arena: Vec<Lit>,
    headers: Vec<ClauseHeader>,
    learnts: Vec<u32>,
    wasted: usize,
    watches: Vec<Vec<Watcher>>,
    cla_inc: f64,
    max_learnts: f64,

    /// Problem clauses as added (normalized, tautologies dropped), for export.
    problem: Vec<Vec<Lit>>,
    /// Set when an empty clause was added.
    has_empty_clause: bool,

    totals: SolveStats,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    /// Solver seeded from [`default_seed`].
    pub fn new() -> Self {
        Solver::with_seed(default_seed())
    }

    pub fn with_seed(seed: u64) -> Self {
        Solver {
            seed,
            rng: Rng(seed),
            ok: true,
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            polarity: Vec::new(),
            activity: Vec::new(),
            seen: Vec::new(),
            analyze_clear: Vec::new(),
            order: VarOrder::default(),
            var_inc: 1.0,
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            arena: Vec::new(),
            headers: Vec::new(),
            learnts: Vec::new(),
            wasted: 0,
            watches: Vec::new(),
            cla_inc: 1.0,
            max_learnts: 0.0,
            problem: Vec::new(),
            has_empty_clause: false,
            totals: SolveStats::default(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    /// Number of problem clauses retained (tautologies are not counted).
    pub fn num_clauses(&self) -> usize {
        self.problem.len() + usize::from(self.has_empty_clause)
    }

    pub fn num_learnts(&self) -> usize {
        self.learnts.len()
    }

    /// Cumulative counters over all `solve` calls.
    pub fn total_stats(&self) -> SolveStats {
        self.totals
    }

    /// False once the clause set is known to be unsatisfiable.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn problem_clauses(&self) -> &[Vec<Lit>] {
        &self.problem
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var(self.assigns.len() as u32);
        self.reserve_vars(self.assigns.len() + 1);
        v
    }

    /// Ensures variables `0..n` exist.
    pub fn reserve_vars(&mut self, n: usize) {
        if n <= self.assigns.len() {
            return;
        }
        let old = self.assigns.len();
        self.assigns.resize(n, UNDEF);
        self.level.resize(n, 0);
        self.reason.resize(n, NO_REASON);
        self.polarity.resize(n, false);
        self.activity.resize(n, 0.0);
        self.seen.resize(n, false);
        self.watches.resize_with(2 * n, Vec::new);
        self.order.grow(n);
        for v in old..n {
            self.order.insert(v as u32, &self.activity);
        }
    }

    /// Adds a clause. Variables are created on demand; duplicate literals are
    /// merged and tautologies dropped. Returns `false` if the solver is now
    /// known to be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if let Some(max) = lits.iter().map(|l| l.var().index()).max() {
            self.reserve_vars(max + 1);
        }
        let mut c = lits.to_vec();
        if !normalize_clause(&mut c) {
            return self.ok;
        }
        if c.is_empty() {
            self.has_empty_clause = true;
            self.ok = false;
            return false;
        }
        self.problem.push(c.clone());
        if !self.ok {
            return false;
        }
        self.cancel_until(0);

        if c.iter().any(|&l| self.value(l) == TRUE) {
            return true;
        }
        c.retain(|&l| self.value(l) != FALSE);
        match c.len() {
            0 => {
                self.ok = false;
            }
            1 => {
                self.enqueue(c[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.attach_new(&c, false, 0);
            }
        }
        self.ok
    }

    /// Searches for a model within `budget` of wall-clock time.
    pub fn solve(&mut self, budget: Duration) -> SolveOutcome {
        let start = Instant::now();
        let mut stats = SolveStats::default();
        let status = self.search(start, budget, &mut stats);
        stats.elapsed = start.elapsed();

        let model = if status == SolveStatus::Sat {
            let values = self.assigns.iter().map(|&a| a == TRUE).collect();
            Some(Assignment::from_values(values))
        } else {
            None
        };
        self.cancel_until(0);

        #[cfg(debug_assertions)]
        if let Some(m) = &model {
            for c in &self.problem {
                debug_assert!(m.satisfies(c), "model violates problem clause {c:?}");
            }
        }

        self.totals.conflicts += stats.conflicts;
        self.totals.decisions += stats.decisions;
        self.totals.propagations += stats.propagations;
        self.totals.restarts += stats.restarts;
        self.totals.elapsed += stats.elapsed;
        SolveOutcome {
            status,
            model,
            stats,
        }
    }

    fn search(&mut self, start: Instant, budget: Duration, stats: &mut SolveStats) -> SolveStatus {
        if !self.ok {
            return SolveStatus::Unsat;
        }
        if budget.is_zero() {
            return SolveStatus::Unknown;
        }
        self.cancel_until(0);
        if self.propagate_counted(stats).is_some() {
            self.ok = false;
            return SolveStatus::Unsat;
        }
        if self.max_learnts == 0.0 {
            self.max_learnts = (self.problem.len() as f64 / 3.0).max(5000.0);
        }

        let mut restart_limit = RESTART_FIRST;
        let mut since_restart = 0u64;
        let mut learnt = Vec::new();
        loop {
            if let Some(confl) = self.propagate_counted(stats) {
                stats.conflicts += 1;
                since_restart += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SolveStatus::Unsat;
                }
                let (bt_level, lbd) = self.analyze(confl, &mut learnt);
                self.cancel_until(bt_level);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let cref = self.attach_new(&learnt, true, lbd);
                    self.bump_clause(cref);
                    self.enqueue(learnt[0], cref);
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLAUSE_DECAY;

                if stats.conflicts % TIME_CHECK_CONFLICTS == 0 && start.elapsed() >= budget {
                    return SolveStatus::Unknown;
                }
            } else {
                if since_restart as f64 >= restart_limit {
                    stats.restarts += 1;
                    since_restart = 0;
                    restart_limit *= RESTART_GROWTH;
                    self.cancel_until(0);
                }
                if self.learnts.len() as f64 >= self.max_learnts + self.trail.len() as f64 {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                let Some(next) = self.pick_branch() else {
                    return SolveStatus::Sat;
                };
                stats.decisions += 1;
                if stats.decisions % TIME_CHECK_DECISIONS == 0 && start.elapsed() >= budget {
                    return SolveStatus::Unknown;
                }
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, NO_REASON);
            }
        }
    }

    #[inline]
    fn value(&self, l: Lit) -> i8 {
        lit_value(&self.assigns, l)
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var().index();
        debug_assert_eq!(self.assigns[v], UNDEF);
        self.assigns[v] = if l.is_positive() { TRUE } else { FALSE };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index();
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.polarity[v] = l.is_positive();
            self.order.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        if !self.order.is_empty() && self.rng.next_f64() < RANDOM_DECISION_FREQ {
            let idx = (self.rng.next_u64() % self.order.heap.len() as u64) as usize;
            let v = self.order.heap[idx];
            if self.assigns[v as usize] == UNDEF {
                return Some(Lit::new(Var(v), self.polarity[v as usize]));
            }
        }
        while let Some(v) = self.order.pop(&self.activity) {
            if self.assigns[v as usize] == UNDEF {
                return Some(Lit::new(Var(v), self.polarity[v as usize]));
            }
        }
        None
    }

    fn attach_new(&mut self, lits: &[Lit], learnt: bool, lbd: u32) -> u32 {
        debug_assert!(lits.len() >= 2);
        let cref = self.headers.len() as u32;
        self.headers.push(ClauseHeader {
            start: self.arena.len() as u32,
            len: lits.len() as u32,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        });
        self.arena.extend_from_slice(lits);
        self.watch(cref);
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn watch(&mut self, cref: u32) {
        let h = self.headers[cref as usize];
        let l0 = self.arena[h.start as usize];
        let l1 = self.arena[h.start as usize + 1];
        self.watches[(!l0).code()].push(Watcher { cref, blocker: l1 });
        self.watches[(!l1).code()].push(Watcher { cref, blocker: l0 });
    }

    fn propagate_counted(&mut self, stats: &mut SolveStats) -> Option<u32> {
        let before = self.qhead;
        let confl = self.propagate();
        stats.propagations += (self.qhead - before) as u64;
        confl
    }

    /// Unit propagation; returns the conflicting clause, if any.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut j = 0;
            'watchers: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if lit_value(&self.assigns, w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let h = self.headers[w.cref as usize];
                if h.deleted {
                    continue;
                }
                let start = h.start as usize;
                let lits = &mut self.arena[start..start + h.len as usize];
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let nw = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                if first != w.blocker && lit_value(&self.assigns, first) == TRUE {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                for k in 2..lits.len() {
                    if lit_value(&self.assigns, lits[k]) != FALSE {
                        lits.swap(1, k);
                        let nl = lits[1];
                        self.watches[(!nl).code()].push(nw);
                        continue 'watchers;
                    }
                }
                ws[j] = nw;
                j += 1;
                if lit_value(&self.assigns, first) == FALSE {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                    self.qhead = self.trail.len();
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn clause_lits(&self, cref: u32) -> &[Lit] {
        let h = &self.headers[cref as usize];
        &self.arena[h.start as usize..(h.start + h.len) as usize]
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.increased(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let h = &mut self.headers[cref as usize];
        if !h.learnt {
            return;
        }
        h.activity += self.cla_inc as f32;
        if h.activity > 1e20 {
            for &c in &self.learnts {
                self.headers[c as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Fills `out` with the learnt clause (the
    /// asserting literal first, a literal of the backjump level second) and
    /// returns the backjump level and the clause's LBD.
    fn analyze(&mut self, mut confl: u32, out: &mut Vec<Lit>) -> (u32, u32) {
        out.clear();
        out.push(Lit::new(Var(0), true));
        let current = self.decision_level();
        let mut pending = 0usize;
        let mut index = self.trail.len();
        let mut p: Option<Lit> = None;

        loop {
            self.bump_clause(confl);
            let skip = usize::from(p.is_some());
            let h = self.headers[confl as usize];
            for k in skip..h.len as usize {
                let q = self.arena[h.start as usize + k];
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= current {
                        pending += 1;
                    } else {
                        out.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let lit = self.trail[index];
            let v = lit.var().index();
            self.seen[v] = false;
            pending -= 1;
            p = Some(lit);
            if pending == 0 {
                break;
            }
            confl = self.reason[v];
        }
        out[0] = !p.unwrap();

        self.analyze_clear.clear();
        self.analyze_clear.extend_from_slice(out);

        // Drop literals whose reason is subsumed by the rest of the clause.
        let mut keep = 1;
        for i in 1..out.len() {
            let l = out[i];
            let r = self.reason[l.var().index()];
            let redundant = r != NO_REASON
                && self.clause_lits(r)[1..].iter().all(|q| {
                    let v = q.var().index();
                    self.seen[v] || self.level[v] == 0
                });
            if !redundant {
                out[keep] = l;
                keep += 1;
            }
        }
        for l in &self.analyze_clear {
            self.seen[l.var().index()] = false;
        }
        out.truncate(keep);

        let mut bt = 0;
        if out.len() > 1 {
            let mut max_i = 1;
            for i in 2..out.len() {
                if self.level[out[i].var().index()] > self.level[out[max_i].var().index()] {
                    max_i = i;
                }
            }
            out.swap(1, max_i);
            bt = self.level[out[1].var().index()];
        }
        let mut levels: Vec<u32> = out.iter().map(|l| self.level[l.var().index()]).collect();
        levels.sort_unstable();
        levels.dedup();
        (bt, levels.len() as u32)
    }

    fn is_locked(&self, cref: u32) -> bool {
        let first = self.clause_lits(cref)[0];
        self.value(first) == TRUE && self.reason[first.var().index()] == cref
    }

    /// Deletes roughly half of the learnt clauses, keeping glue clauses and
    /// clauses that are currently reasons.
    fn reduce_db(&mut self) {
        let mut learnts = std::mem::take(&mut self.learnts);
        learnts.sort_by(|&a, &b| {
            let (ha, hb) = (&self.headers[a as usize], &self.headers[b as usize]);
            hb.lbd
                .cmp(&ha.lbd)
                .then(ha.activity.partial_cmp(&hb.activity).unwrap())
        });
        let half = learnts.len() / 2;
        let mut kept = Vec::with_capacity(learnts.len());
        for (i, &c) in learnts.iter().enumerate() {
            let h = self.headers[c as usize];
            if i < half && h.lbd > 2 && h.len > 2 && !self.is_locked(c) {
                self.headers[c as usize].deleted = true;
                self.wasted += h.len as usize;
            } else {
                kept.push(c);
            }
        }
        self.learnts = kept;
        if self.wasted > self.arena.len() / 2 {
            self.collect_garbage();
        }
    }

    /// Compacts the clause arena and rebuilds every watch list.
    fn collect_garbage(&mut self) {
        let mut remap = vec![NO_REASON; self.headers.len()];
        let mut arena = Vec::with_capacity(self.arena.len() - self.wasted);
        let mut headers = Vec::with_capacity(self.headers.len());
        for (old, h) in self.headers.iter().enumerate() {
            if h.deleted {
                continue;
            }
            remap[old] = headers.len() as u32;
            let start = arena.len() as u32;
            arena.extend_from_slice(&self.arena[h.start as usize..(h.start + h.len) as usize]);
            headers.push(ClauseHeader { start, ..*h });
        }
        self.arena = arena;
        self.headers = headers;
        self.wasted = 0;
        for c in &mut self.learnts {
            *c = remap[*c as usize];
        }
        for l in &self.trail {
            let r = &mut self.reason[l.var().index()];
            if *r != NO_REASON {
                *r = remap[*r as usize];
            }
        }
        for w in &mut self.watches {
            w.clear();
        }
        for cref in 0..self.headers.len() as u32 {
            self.watch(cref);
        }
    }
}

#[inline]
fn lit_value(assigns: &[i8], l: Lit) -> i8 {
    let a = assigns[l.var().index()];
    if l.is_positive() {
        a
    } else {
        -a
    }
}
