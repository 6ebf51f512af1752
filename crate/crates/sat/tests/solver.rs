use std::time::Duration;

use filtermin_sat::{parse_dimacs, Lit, SolveStatus, Solver};
use proptest::prelude::*;

const BUDGET: Duration = Duration::from_secs(60);

struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

fn random_3cnf(rng: &mut XorShift, vars: u64, clauses: usize) -> Vec<Vec<Lit>> {
    (0..clauses)
        .map(|_| {
            (0..3)
                .map(|_| {
                    let v = rng.below(vars) as i32 + 1;
                    Lit::from_dimacs(if rng.below(2) == 0 { v } else { -v })
                })
                .collect()
        })
        .collect()
}

fn pigeonhole(pigeons: i32, holes: i32) -> Vec<Vec<Lit>> {
    let var = |p: i32, h: i32| Lit::from_dimacs(p * holes + h + 1);
    let mut cnf = Vec::new();
    for p in 0..pigeons {
        cnf.push((0..holes).map(|h| var(p, h)).collect());
    }
    for h in 0..holes {
        for p in 0..pigeons {
            for q in p + 1..pigeons {
                cnf.push(vec![!var(p, h), !var(q, h)]);
            }
        }
    }
    cnf
}

fn satisfiable_by_enumeration(num_vars: usize, clauses: &[Vec<Lit>]) -> bool {
    (0u64..1 << num_vars).any(|bits| {
        clauses.iter().all(|c| {
            c.iter().any(|l| {
                let v = bits >> l.var().index() & 1 == 1;
                v == l.is_positive()
            })
        })
    })
}

/// Clause masks for fast enumeration: `(positive vars, negative vars)`.
fn masks(clauses: &[Vec<Lit>]) -> Vec<(u32, u32)> {
    clauses
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(pos, neg), l| {
                let bit = 1u32 << l.var().index();
                if l.is_positive() {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect()
}

fn solver_with(clauses: &[Vec<Lit>], seed: u64) -> Solver {
    let mut s = Solver::with_seed(seed);
    for c in clauses {
        s.add_clause(c);
    }
    s
}

#[test]
fn pigeonhole_4_3_is_unsat() {
    let cnf = pigeonhole(4, 3);
    assert!(!satisfiable_by_enumeration(12, &cnf));
    let mut s = solver_with(&cnf, 0);
    assert_eq!(s.solve(BUDGET).status, SolveStatus::Unsat);
}

#[test]
fn pigeonhole_3_3_is_sat() {
    let cnf = pigeonhole(3, 3);
    let mut s = solver_with(&cnf, 0);
    let out = s.solve(BUDGET);
    let model = out.model.expect("PHP(3,3) has a model");
    assert!(cnf.iter().all(|c| model.satisfies(c)));
}

#[test]
fn random_3cnf_ratio_two_models_check_out() {
    let mut rng = XorShift(0x5eed_1234);
    for _ in 0..10 {
        let cnf = random_3cnf(&mut rng, 50, 100);
        let mut s = solver_with(&cnf, 7);
        let out = s.solve(BUDGET);
        assert_eq!(out.status, SolveStatus::Sat);
        let model = out.model.unwrap();
        assert_eq!(model.num_vars(), s.num_vars());
        for c in &cnf {
            assert!(model.satisfies(c), "clause {c:?} unsatisfied");
        }
    }
}

#[test]
fn fixed_seed_reruns_are_identical() {
    let mut rng = XorShift(99);
    // near the phase transition so the search does real work
    let cnf = random_3cnf(&mut rng, 80, 340);
    let run = || {
        let mut s = solver_with(&cnf, 42);
        let a = s.solve(BUDGET);
        s.add_clause(&[Lit::from_dimacs(1), Lit::from_dimacs(2)]);
        let b = s.solve(BUDGET);
        (a, b)
    };
    let (a1, b1) = run();
    let (a2, b2) = run();
    assert_eq!(a1.status, a2.status);
    assert_eq!(a1.model, a2.model);
    assert!(a1.stats.same_work(&a2.stats));
    assert_eq!(b1.model, b2.model);
    assert!(b1.stats.same_work(&b2.stats));
}

#[test]
fn threshold_3cnf_agrees_with_enumeration() {
    let mut rng = XorShift(0x5eed_1234);
    let mut unsat = 0;
    for _ in 0..60 {
        let cnf = random_3cnf(&mut rng, 20, 86);
        let m = masks(&cnf);
        let expected = (0u32..1 << 20).any(|x| m.iter().all(|&(p, n)| x & p != 0 || !x & n != 0));
        let mut s = solver_with(&cnf, 3);
        let out = s.solve(BUDGET);
        assert_eq!(out.status == SolveStatus::Sat, expected);
        if let Some(model) = out.model {
            assert!(cnf.iter().all(|c| model.satisfies(c)));
        } else {
            unsat += 1;
        }
    }
    assert!(unsat > 5);
}

#[test]
fn seeds_agree_on_larger_threshold_instances() {
    let mut rng = XorShift(77);
    for _ in 0..20 {
        let cnf = random_3cnf(&mut rng, 90, 383);
        let a = solver_with(&cnf, 1).solve(BUDGET).status;
        let b = solver_with(&cnf, 2).solve(BUDGET).status;
        assert_ne!(a, SolveStatus::Unknown);
        assert_eq!(a, b);
    }
}

#[test]
fn harder_unsat_instance_needs_learning() {
    let mut s = solver_with(&pigeonhole(7, 6), 3);
    let out = s.solve(BUDGET);
    assert_eq!(out.status, SolveStatus::Unsat);
    assert!(out.stats.conflicts > 0);
}

#[test]
fn export_round_trips() {
    let mut rng = XorShift(5);
    let cnf = random_3cnf(&mut rng, 20, 60);
    let s = solver_with(&cnf, 0);
    let text = s.export_dimacs();
    let parsed = parse_dimacs(&text).unwrap();
    assert_eq!(parsed.num_vars, s.num_vars());
    assert_eq!(parsed.clauses, s.problem_clauses());
    let header = text.lines().next().unwrap();
    assert_eq!(header, format!("p cnf {} {}", s.num_vars(), s.num_clauses()));
}

fn small_cnf() -> impl Strategy<Value = Vec<Vec<Lit>>> {
    let lit = (1i32..=8, any::<bool>()).prop_map(|(v, pos)| Lit::from_dimacs(if pos { v } else { -v }));
    prop::collection::vec(prop::collection::vec(lit, 1..4), 0..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn agrees_with_enumeration(cnf in small_cnf(), seed in any::<u64>()) {
        let expected = satisfiable_by_enumeration(8, &cnf);
        let mut s = solver_with(&cnf, seed);
        let out = s.solve(BUDGET);
        prop_assert_eq!(out.status == SolveStatus::Sat, expected);
        if let Some(m) = out.model {
            for c in &cnf {
                prop_assert!(m.satisfies(c));
            }
        }
    }

    #[test]
    fn interleaved_solves_do_not_change_the_answer(cnf in small_cnf(), split in 1usize..8) {
        let mut incremental = Solver::with_seed(1);
        let mut seen_unsat = false;
        for (i, c) in cnf.iter().enumerate() {
            incremental.add_clause(c);
            if i % split == 0 {
                let status = incremental.solve(BUDGET).status;
                // once unsat, always unsat
                prop_assert!(!(seen_unsat && status != SolveStatus::Unsat));
                seen_unsat |= status == SolveStatus::Unsat;
            }
        }
        let last = incremental.solve(BUDGET).status;
        prop_assert!(!(seen_unsat && last != SolveStatus::Unsat));
        let mut batch = solver_with(&cnf, 1);
        prop_assert_eq!(last, batch.solve(BUDGET).status);
    }
}
