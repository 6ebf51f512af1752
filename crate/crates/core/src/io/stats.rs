use std::time::Duration;

use crate::minimizer::MinimizeReport;

pub const STATS_HEADER: [&str; 6] = [
    "method",
    "k",
    "outcome",
    "elapsed_ms",
    "clauses_in_solver",
    "best_size_so_far",
];

fn millis(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1000.0)
}

/// One row per size bound tried.
pub fn write_stats_csv(report: &MinimizeReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(STATS_HEADER).unwrap();
    for it in &report.iterations {
        w.write_record([
            report.method.name().to_string(),
            it.k.to_string(),
            it.outcome.to_string(),
            millis(it.elapsed),
            it.clauses_in_solver.to_string(),
            it.best_size_so_far.to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
