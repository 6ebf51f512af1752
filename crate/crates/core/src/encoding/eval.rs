use filtermin_sat::{Assignment, Var};

use super::VarLayout;
use crate::filter::State;

/// Per-family verdicts of the integer nonlinear program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InpReport {
    pub ne_subset: bool,
    pub symmetry: bool,
    pub valid_cover: bool,
    pub zip: bool,
    pub out: bool,
    /// Number of subsets flagged non-empty, `sum q(i)`.
    pub objective: usize,
    /// Reachable states in no subset. Informational; no family forbids it
    /// directly.
    pub uncovered: Vec<State>,
}

impl InpReport {
    pub fn feasible(&self) -> bool {
        self.ne_subset && self.symmetry && self.valid_cover && self.zip && self.out
    }
}

/// Per-family verdicts of the integer linear program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpReport {
    pub ne_subset: bool,
    pub symmetry: bool,
    pub valid_cover: bool,
    pub zip1: bool,
    pub zip2: bool,
    pub out1: bool,
    pub out2: bool,
    pub objective: usize,
    pub uncovered: Vec<State>,
}

impl IlpReport {
    pub fn feasible(&self) -> bool {
        self.ne_subset
            && self.symmetry
            && self.valid_cover
            && self.zip1
            && self.zip2
            && self.out1
            && self.out2
    }
}

fn int(asg: &Assignment, var: Var) -> i64 {
    i64::from(asg.value(var))
}

/// Families shared by both integer programs: `(ne_subset, symmetry, valid_cover, objective, uncovered)`.
fn shared_rows(layout: &VarLayout, asg: &Assignment) -> (bool, bool, bool, usize, Vec<State>) {
    let k = layout.k();
    let n = layout.num_states();
    let r = |i, v| int(asg, layout.r(i, v));
    let q = |i| int(asg, layout.q(i));

    let ne_subset = (0..k).all(|i| (0..n).all(|v| r(i, v) <= q(i)));
    let symmetry = (1..k).all(|i| q(i) <= q(i - 1));
    let valid_cover = (0..k).map(|j| r(j, layout.initial())).sum::<i64>() >= 1;
    let objective = (0..k).map(q).sum::<i64>() as usize;
    let uncovered = (0..n).filter(|&v| (0..k).all(|i| r(i, v) == 0)).collect();
    (ne_subset, symmetry, valid_cover, objective, uncovered)
}

/// Evaluates the nonlinear program's constraints literally over 0/1 integers.
/// Only `R` and `q` are read.
pub fn eval_inp(layout: &VarLayout, asg: &Assignment) -> InpReport {
    let (ne_subset, symmetry, valid_cover, objective, uncovered) = shared_rows(layout, asg);
    let k = layout.k();
    let n = layout.num_states();
    let filter = layout.filter();
    let r = |i, v| int(asg, layout.r(i, v));

    // sum_j prod_v (2 - R(i,v) - t(y,v) + R(j, v_y)) >= 1
    let zip = (0..k).all(|i| {
        filter.obs_ids().all(|y| {
            let total: i64 = (0..k)
                .map(|j| {
                    (0..n)
                        .map(|v| {
                            let t = i64::from(layout.t(y, v));
                            let child = layout.child(v, y).map_or(0, |w| r(j, w));
                            2 - r(i, v) - t + child
                        })
                        .product::<i64>()
                })
                .sum();
            total >= 1
        })
    });

    // sum_o prod_v (1 - R(i,v) + p(o,v)) >= 1
    let out = (0..k).all(|i| {
        let total: i64 = filter
            .color_ids()
            .map(|o| {
                (0..n)
                    .map(|v| 1 - r(i, v) + i64::from(layout.p(o, v)))
                    .product::<i64>()
            })
            .sum();
        total >= 1
    });

    InpReport {
        ne_subset,
        symmetry,
        valid_cover,
        zip,
        out,
        objective,
        uncovered,
    }
}

/// Evaluates the linearized program's rows over 0/1 integers.
pub fn eval_ilp(layout: &VarLayout, asg: &Assignment) -> IlpReport {
    let (ne_subset, symmetry, valid_cover, objective, uncovered) = shared_rows(layout, asg);
    let k = layout.k();
    let n = layout.num_states();
    let filter = layout.filter();
    let r = |i, v| int(asg, layout.r(i, v));
    let a = |i, j, y| int(asg, layout.a(i, j, y));
    let b = |i, o| int(asg, layout.b(i, o));

    // a(i,j,y) + R(i,v) + t(y,v) - R(j,v_y) <= 2
    let zip1 = (0..k).all(|i| {
        (0..k).all(|j| {
            filter.obs_ids().all(|y| {
                (0..n).all(|v| {
                    let t = i64::from(layout.t(y, v));
                    let child = layout.child(v, y).map_or(0, |w| r(j, w));
                    a(i, j, y) + r(i, v) + t - child <= 2
                })
            })
        })
    });
    let zip2 = (0..k).all(|i| filter.obs_ids().all(|y| (0..k).map(|j| a(i, j, y)).sum::<i64>() >= 1));
    // 1 - b(i,o) + 1 - R(i,v) + p(o,v) >= 1
    let out1 = (0..k).all(|i| {
        filter.color_ids().all(|o| {
            (0..n).all(|v| 1 - b(i, o) + 1 - r(i, v) + i64::from(layout.p(o, v)) >= 1)
        })
    });
    let out2 = (0..k).all(|i| filter.color_ids().map(|o| b(i, o)).sum::<i64>() >= 1);

    IlpReport {
        ne_subset,
        symmetry,
        valid_cover,
        zip1,
        zip2,
        out1,
        out2,
        objective,
        uncovered,
    }
}
