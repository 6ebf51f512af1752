//! Benchmark suites over generated filters.
//!
//! Every suite sweeps one generator parameter, samples `repeats` instances
//! per value, and minimizes each instance with every requested method under
//! a fixed per-instance budget. Instance seeds are drawn in order from a
//! ChaCha8 stream seeded with the master seed, so the instance set does not
//! depend on the number of worker threads.

use std::fmt;
use std::time::Duration;

use filtermin_core::filter::output_simulates;
use filtermin_core::generator::{generate, GenParams};
use filtermin_core::minimizer::{minimize, Budget, Method};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Vary the number of observations.
    ObsSweep,
    /// Vary the number of outputs.
    OutSweep,
    /// A few large instances.
    Large,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::ObsSweep => "obs-sweep",
            Suite::OutSweep => "out-sweep",
            Suite::Large => "large",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchSpec {
    pub suite: Suite,
    pub repeats: usize,
    /// Generator parameters shared by every configuration; the swept field
    /// and the seed are overwritten.
    pub base: GenParams,
    /// Values taken by the swept field (`n_y` for the observation sweep and
    /// the large suite, `n_o` for the output sweep).
    pub sweep: Vec<usize>,
    pub methods: Vec<Method>,
    pub budget: Duration,
    pub seed: u64,
    pub jobs: usize,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("repeats must be at least 1")]
    NoRepeats,
    #[error("sweep range is empty")]
    EmptySweep,
    #[error("no methods selected")]
    NoMethods,
}

impl BenchSpec {
    pub fn defaults(suite: Suite) -> Self {
        let base = GenParams {
            d: 4,
            w: 3,
            m: 2,
            n: 2,
            n_o: 5,
            p: 2,
            n_y: 5,
            seed: 0,
        };
        let (base, sweep, repeats) = match suite {
            Suite::ObsSweep => (base, (3..=11).collect(), 10),
            Suite::OutSweep => (base, (2..=10).collect(), 10),
            Suite::Large => (
                GenParams {
                    d: 20,
                    w: 5,
                    m: 10,
                    n: 10,
                    n_o: 5,
                    p: 1,
                    n_y: 50,
                    seed: 0,
                },
                vec![50],
                3,
            ),
        };
        BenchSpec {
            suite,
            repeats,
            base,
            sweep,
            methods: Method::ALL.to_vec(),
            budget: Duration::from_secs(60),
            seed: 0,
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.repeats == 0 {
            return Err(BenchError::NoRepeats);
        }
        if self.sweep.is_empty() {
            return Err(BenchError::EmptySweep);
        }
        if self.methods.is_empty() {
            return Err(BenchError::NoMethods);
        }
        Ok(())
    }

    pub fn configs(&self) -> Vec<GenParams> {
        self.sweep
            .iter()
            .map(|&value| {
                let mut p = self.base;
                match self.suite {
                    Suite::OutSweep => p.n_o = value,
                    Suite::ObsSweep | Suite::Large => p.n_y = value,
                }
                p
            })
            .collect()
    }

    /// `(config index, instance index, params with the instance seed)` in
    /// output order.
    fn instances(&self) -> Vec<(usize, usize, GenParams)> {
        let mut stream = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::new();
        for (c, params) in self.configs().into_iter().enumerate() {
            for i in 0..self.repeats {
                out.push((c, i, GenParams { seed: stream.gen(), ..params }));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    Failed(String),
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Ok => f.write_str("ok"),
            RowStatus::Failed(msg) => write!(f, "failed: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub suite: Suite,
    pub config: usize,
    pub instance: usize,
    pub params: GenParams,
    pub method: Method,
    pub status: RowStatus,
    pub states: usize,
    pub best_size: usize,
    pub proven: bool,
    pub elapsed: Duration,
    pub final_clause_count: usize,
}

fn run_instance(spec: &BenchSpec, config: usize, instance: usize, params: GenParams) -> Vec<BenchRow> {
    let row = |method, status, states| BenchRow {
        suite: spec.suite,
        config,
        instance,
        params,
        method,
        status,
        states,
        best_size: 0,
        proven: false,
        elapsed: Duration::ZERO,
        final_clause_count: 0,
    };
    let filter = match generate(&params) {
        Ok(f) => f,
        Err(e) => {
            return spec
                .methods
                .iter()
                .map(|&m| row(m, RowStatus::Failed(e.to_string()), 0))
                .collect()
        }
    };
    let states = filter.num_states();
    spec.methods
        .iter()
        .map(|&method| match minimize(&filter, method, Budget::new(spec.budget), params.seed) {
            Err(e) => row(method, RowStatus::Failed(e.to_string()), states),
            Ok(report) => {
                let status = if !report.best_filter.is_deterministic() {
                    RowStatus::Failed("result is not deterministic".into())
                } else if let Some(f) = output_simulates(&report.best_filter, &filter).failure {
                    RowStatus::Failed(format!("result does not simulate its input ({})", f.kind))
                } else {
                    RowStatus::Ok
                };
                BenchRow {
                    best_size: report.best_size(),
                    proven: report.proven_minimal,
                    elapsed: report.elapsed,
                    final_clause_count: report.clauses_in_solver(),
                    ..row(method, status, states)
                }
            }
        })
        .collect()
}

/// Runs every instance of the suite. Rows come back sorted by configuration,
/// instance and method.
pub fn run_bench(spec: &BenchSpec) -> Result<Vec<BenchRow>, BenchError> {
    spec.validate()?;
    let instances = spec.instances();
    let work = |&(c, i, p): &(usize, usize, GenParams)| run_instance(spec, c, i, p);
    let mut rows: Vec<BenchRow> = if spec.jobs <= 1 {
        instances.iter().flat_map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| instances.par_iter().flat_map_iter(work).collect())
    };
    let order = |m: Method| spec.methods.iter().position(|&x| x == m);
    rows.sort_by_key(|r| (r.config, r.instance, order(r.method)));
    Ok(rows)
}

pub const BENCH_HEADER: [&str; 18] = [
    "suite",
    "config",
    "d",
    "w",
    "m",
    "n",
    "n_o",
    "p",
    "n_y",
    "instance",
    "seed",
    "method",
    "status",
    "states",
    "best_size",
    "proven",
    "elapsed_ms",
    "final_clause_count",
];

/// Bench rows as CSV. With `timing` unset the elapsed column is written as 0
/// so that output is byte-stable.
pub fn write_bench_csv(rows: &[BenchRow], timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(BENCH_HEADER).unwrap();
    for r in rows {
        let p = &r.params;
        let elapsed = if timing {
            format!("{:.3}", r.elapsed.as_secs_f64() * 1000.0)
        } else {
            "0".to_string()
        };
        w.write_record([
            r.suite.to_string(),
            r.config.to_string(),
            p.d.to_string(),
            p.w.to_string(),
            p.m.to_string(),
            p.n.to_string(),
            p.n_o.to_string(),
            p.p.to_string(),
            p.n_y.to_string(),
            r.instance.to_string(),
            p.seed.to_string(),
            r.method.to_string(),
            r.status.to_string(),
            r.states.to_string(),
            r.best_size.to_string(),
            r.proven.to_string(),
            elapsed,
            r.final_clause_count.to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suite: Suite) -> BenchSpec {
        BenchSpec {
            repeats: 2,
            budget: Duration::from_secs(10),
            base: GenParams {
                d: 2,
                w: 2,
                ..BenchSpec::defaults(suite).base
            },
            ..BenchSpec::defaults(suite)
        }
    }

    #[test]
    fn default_row_counts() {
        let spec = BenchSpec::defaults(Suite::ObsSweep);
        assert_eq!(spec.instances().len() * spec.methods.len(), 180);
        let spec = BenchSpec::defaults(Suite::OutSweep);
        assert_eq!(spec.instances().len() * spec.methods.len(), 180);
        assert_eq!(BenchSpec::defaults(Suite::Large).instances().len(), 3);
    }

    #[test]
    fn rows_are_sorted_and_reproducible() {
        let mut spec = small(Suite::OutSweep);
        spec.sweep = vec![2, 3];
        let a = run_bench(&spec).unwrap();
        assert_eq!(a.len(), 2 * 2 * 2);
        assert!(a.iter().all(|r| r.status == RowStatus::Ok));
        let keys: Vec<_> = a.iter().map(|r| (r.config, r.instance, r.method.name())).collect();
        let mut sorted = keys.clone();
        sorted.sort_by_key(|&(c, i, m)| (c, i, m != "sat"));
        assert_eq!(keys, sorted);

        spec.jobs = 2;
        let b = run_bench(&spec).unwrap();
        assert_eq!(write_bench_csv(&a, false), write_bench_csv(&b, false));
    }

    #[test]
    fn generator_failures_become_rows() {
        let mut spec = small(Suite::ObsSweep);
        spec.sweep = vec![1];
        spec.repeats = 1;
        let rows = run_bench(&spec).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| matches!(r.status, RowStatus::Failed(_))));
        assert!(write_bench_csv(&rows, true).contains("failed: "));
    }

    #[test]
    fn invalid_specs() {
        let mut spec = small(Suite::Large);
        spec.repeats = 0;
        assert_eq!(run_bench(&spec), Err(BenchError::NoRepeats));
        let mut spec = small(Suite::Large);
        spec.sweep.clear();
        assert_eq!(run_bench(&spec), Err(BenchError::EmptySweep));
    }
}
