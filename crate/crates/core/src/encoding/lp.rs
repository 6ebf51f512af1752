use std::collections::BTreeMap;
use std::fmt::Write as _;

use filtermin_sat::Var;

use super::VarLayout;

#[derive(Clone, Copy)]
enum Sense {
    Le,
    Ge,
}

struct Row {
    name: String,
    terms: BTreeMap<Var, i64>,
    sense: Sense,
    rhs: i64,
}

impl Row {
    fn new(name: String, terms: &[(Var, i64)], sense: Sense, rhs: i64) -> Row {
        let mut merged = BTreeMap::new();
        for &(v, c) in terms {
            *merged.entry(v).or_insert(0) += c;
        }
        merged.retain(|_, c| *c != 0);
        Row {
            name,
            terms: merged,
            sense,
            rhs,
        }
    }
}

/// Rows of the linear program with the structural constants already moved to
/// the right-hand side.
fn rows(layout: &VarLayout) -> Vec<Row> {
    let k = layout.k();
    let n = layout.num_states();
    let filter = layout.filter();
    let mut rows = Vec::new();

    for i in 0..k {
        for v in 0..n {
            rows.push(Row::new(
                format!("nes_{}_{}", i + 1, v),
                &[(layout.r(i, v), 1), (layout.q(i), -1)],
                Sense::Le,
                0,
            ));
        }
    }
    for i in 1..k {
        rows.push(Row::new(
            format!("sym_{}", i + 1),
            &[(layout.q(i), 1), (layout.q(i - 1), -1)],
            Sense::Le,
            0,
        ));
    }
    let cover: Vec<_> = (0..k).map(|i| (layout.r(i, layout.initial()), 1)).collect();
    rows.push(Row::new("valid_cover".into(), &cover, Sense::Ge, 1));

    // a + R(i,v) + 1 - R(j,v_y) <= 2, only where t(y,v) = 1
    for (v, y, w) in layout.live_pairs() {
        for i in 0..k {
            for j in 0..k {
                rows.push(Row::new(
                    format!("zip1_{}_{}_{}_{}", i + 1, j + 1, v, filter.obs_name(y)),
                    &[(layout.a(i, j, y), 1), (layout.r(i, v), 1), (layout.r(j, w), -1)],
                    Sense::Le,
                    1,
                ));
            }
        }
    }
    for i in 0..k {
        for y in filter.obs_ids() {
            let terms: Vec<_> = (0..k).map(|j| (layout.a(i, j, y), 1)).collect();
            rows.push(Row::new(
                format!("zip2_{}_{}", i + 1, filter.obs_name(y)),
                &terms,
                Sense::Ge,
                1,
            ));
        }
    }
    // 2 - b - R + p >= 1, only where p(o,v) = 0
    for i in 0..k {
        for (v, o) in layout.zero_p_pairs() {
            rows.push(Row::new(
                format!("out1_{}_{}_{}", i + 1, filter.color_name(o), v),
                &[(layout.b(i, o), 1), (layout.r(i, v), 1)],
                Sense::Le,
                1,
            ));
        }
    }
    for i in 0..k {
        let terms: Vec<_> = filter.color_ids().map(|o| (layout.b(i, o), 1)).collect();
        rows.push(Row::new(format!("out2_{}", i + 1), &terms, Sense::Ge, 1));
    }
    rows
}

/// Number of constraint rows [`write_lp`] emits.
pub fn lp_row_count(layout: &VarLayout) -> usize {
    let k = layout.k();
    let live = layout.live_pairs().count();
    let zero_p = layout.zero_p_pairs().count();
    k * layout.num_states()
        + (k - 1)
        + 1
        + k * k * live
        + k * layout.num_obs()
        + k * zero_p
        + k
}

/// The full integer linear program in CPLEX LP format: minimize the number of
/// non-empty subsets subject to the cover, symmetry, zip and output rows.
pub fn write_lp(layout: &VarLayout) -> String {
    let name = |v: Var| layout.var_name(v);
    let mut out = String::new();
    writeln!(out, "\\ filter {} k={}", layout.filter().name(), layout.k()).unwrap();
    out.push_str("Minimize\n obj:");
    for i in 0..layout.k() {
        if i > 0 {
            out.push_str(" +");
        }
        write!(out, " {}", name(layout.q(i))).unwrap();
    }
    out.push_str("\nSubject To\n");
    for row in rows(layout) {
        write!(out, " {}:", row.name).unwrap();
        if row.terms.is_empty() {
            out.push_str(" 0");
        }
        for (idx, (&v, &c)) in row.terms.iter().enumerate() {
            let sign = if c < 0 { "-" } else if idx > 0 { "+" } else { "" };
            let coeff = if c.abs() == 1 { String::new() } else { format!("{} ", c.abs()) };
            if sign.is_empty() {
                write!(out, " {coeff}{}", name(v)).unwrap();
            } else {
                write!(out, " {sign} {coeff}{}", name(v)).unwrap();
            }
        }
        let op = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
        };
        writeln!(out, " {op} {}", row.rhs).unwrap();
    }
    out.push_str("Binary\n");
    for idx in 0..layout.num_vars() {
        writeln!(out, " {}", name(Var(idx as u32))).unwrap();
    }
    out.push_str("End\n");
    out
}
