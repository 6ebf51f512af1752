mod common;

use common::*;
use filtermin_core::encoding::*;
use filtermin_core::filter::Filter;
use filtermin_sat::{SolveStatus, Solver};
use rand::Rng;
use std::time::Duration;

fn satisfies_all(clauses: &[Vec<Lit>], asg: &Assignment) -> bool {
    clauses.iter().all(|c| asg.satisfies(c))
}

#[test]
fn four_views_of_feasibility_agree() {
    let mut r = rng(100);
    let (mut feasible, mut total) = (0, 0);
    while total < 1500 {
        let f = random_det_filter(&mut r, 6);
        let n = f.num_states();
        let k = r.gen_range(1..=n + 1);
        let cover = random_cover(&mut r, &f, k);
        let layout = build_layout(&f, k).unwrap();
        let asg = extension_from_cover(&layout, &cover).unwrap();

        let semantic = cover.is_feasible(&f);
        let cnf = satisfies_all(&build_cnf(&layout, false).clauses, &asg);
        let ilp = eval_ilp(&layout, &asg).feasible();
        let inp = eval_inp(&layout, &asg).feasible();
        assert_eq!((cnf, ilp, inp), (semantic, semantic, semantic), "{cover:?} on\n{f:?}");

        // the lazy clause set with every group loaded says the same
        let mut lazy = build_cnf(&layout, true).clauses;
        for y in f.obs_ids() {
            lazy.extend(zip2_group(&layout, y));
            for v in f.states() {
                lazy.extend(zip1_group(&layout, v, y));
            }
        }
        assert_eq!(satisfies_all(&lazy, &asg), semantic);

        feasible += usize::from(semantic);
        total += 1;
    }
    assert!(feasible > 300, "only {feasible} feasible samples");
    assert!(total - feasible > 300);
}

#[test]
fn model_round_trip() {
    let mut r = rng(101);
    for _ in 0..500 {
        let f = random_det_filter(&mut r, 6);
        let k = f.num_states();
        let cover = random_cover(&mut r, &f, k).without_empty();
        let layout = build_layout(&f, k).unwrap();
        let asg = extension_from_cover(&layout, &cover).unwrap();
        assert_eq!(cover_from_model(&layout, &asg), cover);
    }
}

/// Clauses over the R/a/b variables plus one variable per structural constant,
/// pinned by unit clauses; nothing is folded.
fn unfolded(layout: &VarLayout, f: &Filter) -> (usize, Vec<Vec<Lit>>) {
    let k = layout.k();
    let n = f.num_states();
    let base = layout.num_sat_vars();
    let num_obs = f.observations().len();
    let t = |y: usize, v: usize| Var((base + y * n + v) as u32);
    let p_base = base + num_obs * n;
    let p = |o: usize, v: usize| Var((p_base + o * n + v) as u32);
    let total = p_base + f.colors().len() * n;

    let mut cnf = vec![(0..k).map(|i| layout.r(i, f.initial_state().unwrap()).pos()).collect()];
    for y in f.obs_ids() {
        for v in f.states() {
            cnf.push(vec![if f.child(v, y).is_some() { t(y.0, v).pos() } else { t(y.0, v).neg() }]);
            for i in 0..k {
                for j in 0..k {
                    let mut c = vec![layout.a(i, j, y).neg(), layout.r(i, v).neg(), t(y.0, v).neg()];
                    if let Some(w) = f.child(v, y) {
                        c.push(layout.r(j, w).pos());
                    }
                    cnf.push(c);
                }
            }
        }
        for i in 0..k {
            cnf.push((0..k).map(|j| layout.a(i, j, y).pos()).collect());
        }
    }
    for o in f.color_ids() {
        for v in f.states() {
            let has = f.coloring(v).contains(&o);
            cnf.push(vec![if has { p(o.0, v).pos() } else { p(o.0, v).neg() }]);
            for i in 0..k {
                cnf.push(vec![layout.b(i, o).neg(), layout.r(i, v).neg(), p(o.0, v).pos()]);
            }
        }
    }
    for i in 0..k {
        cnf.push(f.color_ids().map(|o| layout.b(i, o).pos()).collect());
    }
    (total, cnf)
}

#[test]
fn folding_constants_keeps_the_model_set() {
    let mut r = rng(102);
    let mut checked = 0;
    while checked < 40 {
        let f = random_det_filter(&mut r, 3);
        let k = r.gen_range(1..=2);
        let layout = build_layout(&f, k).unwrap();
        let vars = layout.num_sat_vars();
        if vars > 16 {
            continue;
        }
        let folded = build_cnf(&layout, false).clauses;
        let (total, raw) = unfolded(&layout, &f);
        let mut frozen = Assignment::new(total);
        for c in raw.iter().filter(|c| c.len() == 1 && c[0].var().index() >= vars) {
            frozen.set(c[0].var(), c[0].is_positive());
        }
        for bits in 0u32..1 << vars {
            let mut asg = frozen.clone();
            for v in 0..vars {
                asg.set(Var(v as u32), bits >> v & 1 == 1);
            }
            assert_eq!(satisfies_all(&folded, &asg), satisfies_all(&raw, &asg));
        }
        checked += 1;
    }
}

#[test]
fn folding_constants_is_equisatisfiable() {
    let mut r = rng(103);
    for _ in 0..100 {
        let f = random_det_filter(&mut r, 6);
        let k = r.gen_range(1..=f.num_states());
        let layout = build_layout(&f, k).unwrap();
        let solve = |clauses: &[Vec<Lit>]| {
            let mut s = Solver::with_seed(1);
            for c in clauses {
                s.add_clause(c);
            }
            s.solve(Duration::from_secs(30)).status
        };
        let folded = solve(&build_cnf(&layout, false).clauses);
        let raw = solve(&unfolded(&layout, &f).1);
        assert_ne!(folded, SolveStatus::Unknown);
        assert_eq!(folded, raw);
    }
}

#[test]
fn clause_counts_follow_the_formulas() {
    let mut r = rng(104);
    for _ in 0..100 {
        let f = random_det_filter(&mut r, 6);
        let k = r.gen_range(1..=f.num_states() + 2);
        let layout = build_layout(&f, k).unwrap();
        let n = f.num_states();
        let obs = f.observations().len();
        let edges = f.num_transitions();
        let missing_colors: usize = f.states().map(|v| f.colors().len() - f.coloring(v).len()).sum();

        let eager = build_cnf(&layout, false);
        let count = |cnf: &CnfFormula, pred: fn(&ClauseTag) -> bool| cnf.count_where(pred);
        assert_eq!(count(&eager, |t| *t == ClauseTag::ValidCover), 1);
        assert_eq!(count(&eager, |t| matches!(t, ClauseTag::Zip1 { .. })), k * k * edges);
        assert_eq!(count(&eager, |t| matches!(t, ClauseTag::Zip2 { .. })), k * obs);
        assert_eq!(count(&eager, |t| *t == ClauseTag::Out1), k * missing_colors);
        assert_eq!(count(&eager, |t| *t == ClauseTag::Out2), k);
        assert_eq!(eager.len(), 1 + k * k * edges + k * obs + k * missing_colors + k);
        assert_eq!(eager.tags.len(), eager.len());

        let lazy = build_cnf(&layout, true);
        assert_eq!(lazy.len(), n + k * missing_colors + k);

        // each Zip1 tag names a live (state, observation) pair
        for (c, t) in eager.clauses.iter().zip(&eager.tags) {
            if let ClauseTag::Zip1 { state, obs } = t {
                assert!(f.child(*state, *obs).is_some());
                assert_eq!(c.len(), 3);
            }
        }

        assert_eq!(layout.num_vars(), k * n + k * k * obs + k * f.colors().len() + k);
        assert_eq!(
            lp_row_count(&layout),
            k * n + (k - 1) + 1 + k * k * edges + k * obs + k * missing_colors + k
        );
        let text = write_lp(&layout);
        let rows = text
            .lines()
            .skip_while(|l| *l != "Subject To")
            .skip(1)
            .take_while(|l| *l != "Binary")
            .count();
        assert_eq!(rows, lp_row_count(&layout));
    }
}

#[test]
fn bans_only_remove_models() {
    let mut r = rng(105);
    for _ in 0..60 {
        let f = random_det_filter(&mut r, 5);
        let n = f.num_states();
        let layout = build_layout(&f, n).unwrap();
        let base = build_cnf(&layout, false).clauses;
        let mut solver = Solver::with_seed(2);
        for c in &base {
            solver.add_clause(c);
        }
        for banned in (1..=n).rev() {
            for c in ban_size_units(&layout, banned).unwrap() {
                solver.add_clause(&c);
            }
            let out = solver.solve(Duration::from_secs(30));
            let Some(model) = out.model else {
                assert_eq!(out.status, SolveStatus::Unsat);
                break;
            };
            assert!(satisfies_all(&base, &model));
            for i in banned - 1..n {
                assert!(f.states().all(|v| !model.value(layout.r(i, v))));
            }
            assert!(cover_from_model(&layout, &model).len() < banned);
        }
    }
}

#[test]
fn exported_cnf_matches_the_solver_view() {
    let mut r = rng(106);
    for _ in 0..20 {
        let f = random_det_filter(&mut r, 6);
        let layout = build_layout(&f, f.num_states()).unwrap();
        let cnf = build_cnf(&layout, false);
        let parsed = filtermin_sat::parse_dimacs(&cnf.to_dimacs()).unwrap();
        assert_eq!(parsed.num_vars, layout.num_sat_vars());
        assert_eq!(parsed.clauses, cnf.clauses);
        // every variable in the map is named once
        let map = layout.varmap();
        assert_eq!(map.lines().count(), layout.num_sat_vars());
    }
}

