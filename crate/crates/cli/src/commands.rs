use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use filtermin_core::encoding::{build_cnf, build_layout, write_lp};
use filtermin_core::filter::{output_simulates, Filter};
use filtermin_core::generator::{generate, GenError, GenParams};
use filtermin_core::io::{parse_flt, write_flt, write_stats_csv};
use filtermin_core::minimizer::{minimize as run_minimizer, Budget};
use filtermin_sat::default_seed;
use thiserror::Error;

use crate::bench::{run_bench, write_bench_csv, BenchSpec, RowStatus};
use crate::{BenchArgs, CheckArgs, ExportArgs, Exit, GenArgs, MinimizeArgs};

/// Errors that map to the usage exit code.
#[derive(Debug, Error)]
#[error("{0}")]
struct UsageError(String);

pub(crate) fn classify(err: &anyhow::Error) -> Exit {
    if err.chain().any(|e| e.is::<UsageError>()) {
        Exit::Usage
    } else {
        Exit::Failure
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn load(path: &Path) -> Result<Filter> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_flt(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Loads a filter for the solvers: it must be deterministic, and unreachable
/// states are dropped with a warning.
fn load_for_solving(path: &Path) -> Result<Filter> {
    let filter = load(path)?;
    if let Some(reason) = nondeterminism(&filter) {
        bail!("{}: filter is not deterministic: {reason}", path.display());
    }
    let (filter, removed) = filter.strip_unreachable();
    if !removed.is_empty() {
        eprintln!(
            "warning: {}: ignoring unreachable states {removed:?}; remaining states are renumbered",
            path.display()
        );
    }
    Ok(filter)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn nondeterminism(filter: &Filter) -> Option<String> {
    let initial = filter.initial().len();
    if initial != 1 {
        return Some(format!("{initial} initial states"));
    }
    filter.states().find_map(|v| {
        filter.out_edges(v).find_map(|(y, dsts)| {
            (dsts.len() > 1).then(|| format!("state {v} has {} successors on {}", dsts.len(), filter.obs_name(y)))
        })
    })
}

pub(crate) fn minimize(args: MinimizeArgs) -> Result<Exit> {
    let filter = load_for_solving(&args.input)?;
    let seed = args.seed.unwrap_or_else(default_seed);
    let budget = Budget::new(Duration::from_millis(args.timeout_ms));
    let report = run_minimizer(&filter, args.method, budget, seed)?;

    if !report.best_filter.is_deterministic() {
        bail!("internal error: minimized filter is not deterministic");
    }
    if let Some(f) = output_simulates(&report.best_filter, &filter).failure {
        bail!("internal error: minimized filter fails to simulate the input ({})", f.kind);
    }
    if let Some(out) = &args.out {
        write(out, &write_flt(&report.best_filter))?;
    }
    if let Some(stats) = &args.stats {
        write(stats, &write_stats_csv(&report))?;
    }

    let n = filter.num_states();
    let verdict = if report.proven_minimal { "proven minimal" } else { "not proven minimal" };
    println!("best size: {} (input {n} states, {verdict})", report.best_size());
    if report.timed_out_without_improvement(n) {
        eprintln!("time budget exhausted before any cover smaller than the input was found");
        return Ok(Exit::Timeout);
    }
    Ok(Exit::Success)
}

pub(crate) fn gen(args: GenArgs) -> Result<Exit> {
    let params = GenParams {
        d: args.layers,
        w: args.width,
        m: args.self_loops,
        n: args.back_edges,
        n_o: args.outputs,
        p: args.outputs_per_state,
        n_y: args.observations,
        seed: args.seed,
    };
    let filter = generate(&params).map_err(|e| match e {
        GenError::InvalidParams(_) => usage(e.to_string()),
        GenError::DegreeExceeded { .. } => anyhow::Error::new(e),
    })?;
    let text = write_flt(&filter);
    match &args.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(Exit::Success)
}

pub(crate) fn check(args: CheckArgs) -> Result<Exit> {
    if let Some(path) = &args.deterministic {
        let filter = load(path)?;
        return Ok(match nondeterminism(&filter) {
            None => {
                println!("deterministic");
                Exit::Success
            }
            Some(reason) => {
                println!("not deterministic: {reason}");
                Exit::Failure
            }
        });
    }
    let paths = args.simulates.expect("clap requires one of the checks");
    let candidate = load(&paths[0])?;
    let reference = load(&paths[1])?;
    match output_simulates(&candidate, &reference).failure {
        None => {
            println!("{} output simulates {}", paths[0].display(), paths[1].display());
            Ok(Exit::Success)
        }
        Some(f) => {
            let witness = if f.witness.is_empty() {
                "<empty string>".to_string()
            } else {
                f.witness.join(" ")
            };
            println!("simulation fails ({}) on: {witness}", f.kind);
            Ok(Exit::Failure)
        }
    }
}

pub(crate) fn export(args: ExportArgs) -> Result<Exit> {
    if args.dimacs.is_none() && args.varmap.is_none() && args.lp.is_none() {
        return Err(usage("nothing to export: pass --dimacs, --varmap or --lp"));
    }
    let filter = load_for_solving(&args.input)?;
    let k = args.k.unwrap_or(filter.num_states());
    let layout = build_layout(&filter, k).map_err(|e| usage(e.to_string()))?;
    if let Some(path) = &args.dimacs {
        write(path, &build_cnf(&layout, args.lazy).to_dimacs())?;
    }
    if let Some(path) = &args.varmap {
        write(path, &layout.varmap())?;
    }
    if let Some(path) = &args.lp {
        write(path, &write_lp(&layout))?;
    }
    Ok(Exit::Success)
}

pub(crate) fn bench(args: BenchArgs) -> Result<Exit> {
    let mut spec = BenchSpec::defaults(args.suite);
    if let Some(r) = args.repeats {
        spec.repeats = r;
    }
    if let Some(s) = args.sweep {
        spec.sweep = s;
    }
    if let Some(m) = args.methods {
        spec.methods = m;
    }
    spec.budget = Duration::from_millis(args.timeout_ms);
    spec.seed = args.seed;
    spec.jobs = args.jobs.max(1);

    let rows = run_bench(&spec).map_err(|e| usage(e.to_string()))?;
    let text = write_bench_csv(&rows, !args.no_timing);
    match &args.csv {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    let failed = rows.iter().filter(|r| r.status != RowStatus::Ok).count();
    if failed > 0 {
        eprintln!("warning: {failed} of {} runs failed; see the status column", rows.len());
    }
    Ok(Exit::Success)
}
