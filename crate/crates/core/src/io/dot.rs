use std::fmt::Write as _;

use crate::filter::Filter;

/// GraphViz rendering for eyeballing small filters.
pub fn write_dot(filter: &Filter) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", filter.name()).unwrap();
    out.push_str("  rankdir=LR;\n");
    for v in filter.states() {
        let colors: Vec<&str> = filter.coloring(v).iter().map(|&c| filter.color_name(c)).collect();
        let shape = if filter.initial().contains(&v) { "doublecircle" } else { "circle" };
        writeln!(out, "  s{v} [label=\"{v}\\n{{{}}}\", shape={shape}];", colors.join(",")).unwrap();
    }
    for (src, y, dst) in filter.transitions() {
        writeln!(out, "  s{src} -> s{dst} [label=\"{}\"];", filter.obs_name(y)).unwrap();
    }
    out.push_str("}\n");
    out
}
