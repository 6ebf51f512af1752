use std::collections::{HashMap, VecDeque};
use std::fmt;

use super::{ColorSet, Filter, ObsId, StateSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// A string of the reference language has no run in the candidate.
    Crash,
    /// The candidate reaches two or more states on a reference string.
    Nondeterministic,
    /// The candidate emits an output the reference does not, or none at all.
    ColorEscape,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureKind::Crash => "crash",
            FailureKind::Nondeterministic => "nondeterministic",
            FailureKind::ColorEscape => "color-escape",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationFailure {
    pub kind: FailureKind,
    /// A shortest failing string, as reference observation tokens.
    pub witness: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationVerdict {
    pub failure: Option<SimulationFailure>,
}

impl SimulationVerdict {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }

    pub fn witness(&self) -> Option<&[String]> {
        self.failure.as_ref().map(|f| f.witness.as_slice())
    }
}

/// Checks that `candidate` output simulates `reference`: every string the
/// reference admits reaches exactly one candidate state, whose outputs are a
/// non-empty subset of the reference's outputs on that string.
///
/// Alphabets are matched by token; the candidate may have extra tokens.
/// Breadth-first search over pairs of reached state sets, so the witness is a
/// shortest failing string.
pub fn output_simulates(candidate: &Filter, reference: &Filter) -> SimulationVerdict {
    let obs_map: Vec<Option<ObsId>> = reference
        .observations()
        .iter()
        .map(|t| candidate.obs_id(t))
        .collect();
    let ref_colors_named = |set: &ColorSet| -> Vec<&str> {
        set.iter().map(|&c| reference.color_name(c)).collect()
    };

    type Node = (StateSet, StateSet);
    let start: Node = (reference.initial().clone(), candidate.initial().clone());
    let mut parent: HashMap<Node, Option<(Node, ObsId)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);

    let witness_of = |parent: &HashMap<Node, Option<(Node, ObsId)>>, node: &Node| {
        let mut tokens = Vec::new();
        let mut cur = node.clone();
        while let Some(Some((prev, y))) = parent.get(&cur) {
            tokens.push(reference.obs_name(*y).to_string());
            cur = prev.clone();
        }
        tokens.reverse();
        tokens
    };

    while let Some(node) = queue.pop_front() {
        let (ref_set, cand_set) = &node;
        if ref_set.is_empty() {
            continue;
        }
        let kind = if cand_set.is_empty() {
            Some(FailureKind::Crash)
        } else if cand_set.len() >= 2 {
            Some(FailureKind::Nondeterministic)
        } else {
            let allowed = ref_colors_named(&reference.colors_of_set(ref_set));
            let emitted = candidate.colors_of_set(cand_set);
            let escapes = emitted.is_empty()
                || emitted
                    .iter()
                    .any(|&c| !allowed.contains(&candidate.color_name(c)));
            escapes.then_some(FailureKind::ColorEscape)
        };
        if let Some(kind) = kind {
            return SimulationVerdict {
                failure: Some(SimulationFailure {
                    kind,
                    witness: witness_of(&parent, &node),
                }),
            };
        }
        for y in reference.obs_ids() {
            let next_ref = reference.post(ref_set, y);
            if next_ref.is_empty() {
                continue;
            }
            let next_cand = match obs_map[y.0] {
                Some(cy) => candidate.post(cand_set, cy),
                None => StateSet::new(),
            };
            let next = (next_ref, next_cand);
            if !parent.contains_key(&next) {
                parent.insert(next.clone(), Some((node.clone(), y)));
                queue.push_back(next);
            }
        }
    }
    SimulationVerdict { failure: None }
}
