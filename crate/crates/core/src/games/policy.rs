use std::sync::Arc;

use super::model::{GameModel, Owner};
use crate::error::{domain, Result};

/// Time-varying feedback for one player: an edge index per `(step, state)`
/// up to `horizon`, then a stationary rule.
///
/// Entries at states the player does not own are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackPolicy {
    owner: Owner,
    steps: Vec<Vec<usize>>,
    stationary: Vec<usize>,
}

impl FeedbackPolicy {
    pub fn new(model: &GameModel, owner: Owner, steps: Vec<Vec<usize>>, stationary: Vec<usize>) -> Result<Self> {
        if owner == Owner::Uncontrolled {
            return Err(domain("policies belong to MAX or MIN"));
        }
        for row in steps.iter().chain(std::iter::once(&stationary)) {
            if row.len() != model.n_states() {
                return Err(domain("policy row must cover every state"));
            }
            for (s, &e) in row.iter().enumerate() {
                if model.owner(s) == owner && e >= model.successors(s).len() {
                    return Err(domain(format!("policy picks edge {e} at `{}` which has fewer edges", model.name(s))));
                }
            }
        }
        Ok(Self { owner, steps, stationary })
    }

    /// Same choice at every step.
    pub fn stationary(model: &GameModel, owner: Owner, choice: Vec<usize>) -> Result<Self> {
        Self::new(model, owner, Vec::new(), choice)
    }

    pub fn owner(&self) -> Owner {
        self.owner
    }

    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    pub fn choice(&self, step: usize, state: usize) -> usize {
        self.steps.get(step).unwrap_or(&self.stationary)[state]
    }
}

/// Closure of feedback policies under separation by initial state and concatenation.
///
/// A choice may depend on the initial state and on the state at each
/// concatenation time, which is what closure under both operations needs.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    Feedback(Arc<FeedbackPolicy>),
    /// `members[ω]` is used for processes starting at `ω`.
    Separated(Vec<Policy>),
    /// `first` before `step`, then `second` restarted at time zero.
    Concatenated { first: Box<Policy>, second: Box<Policy>, step: usize },
}

impl Policy {
    pub fn feedback(p: FeedbackPolicy) -> Self {
        Policy::Feedback(Arc::new(p))
    }

    /// Edge index at the last state of `history`; the step is `history.len() - 1`.
    pub fn choose(&self, history: &[usize]) -> usize {
        match self {
            Policy::Feedback(p) => p.choice(history.len() - 1, *history.last().unwrap()),
            Policy::Separated(members) => members[history[0]].choose(history),
            Policy::Concatenated { first, second, step } => {
                if history.len() - 1 < *step {
                    first.choose(history)
                } else {
                    second.choose(&history[*step..])
                }
            }
        }
    }

    /// Step after which choices no longer depend on the step index.
    pub fn settle_step(&self) -> usize {
        match self {
            Policy::Feedback(p) => p.horizon(),
            Policy::Separated(members) => members.iter().map(Policy::settle_step).max().unwrap_or(0),
            Policy::Concatenated { first, second, step } => first.settle_step().max(step + second.settle_step()),
        }
    }
}

/// The successor of `history.last()` when both players follow their policies.
pub fn joint_successor(model: &GameModel, max: &Policy, min: &Policy, history: &[usize]) -> usize {
    let s = *history.last().unwrap();
    let succ = model.successors(s);
    match model.owner(s) {
        Owner::Max => succ[max.choose(history)],
        Owner::Min => succ[min.choose(history)],
        Owner::Uncontrolled => succ[0],
    }
}

/// All stationary policies of `owner`, in lexicographic order of choices.
pub fn stationary_policies(model: &GameModel, owner: Owner) -> Vec<FeedbackPolicy> {
    let n = model.n_states();
    let mut rows = vec![vec![0usize; n]];
    for s in 0..n {
        if model.owner(s) != owner {
            continue;
        }
        let deg = model.successors(s).len();
        rows = rows
            .into_iter()
            .flat_map(|row| {
                (0..deg).map(move |e| {
                    let mut r = row.clone();
                    r[s] = e;
                    r
                })
            })
            .collect();
    }
    rows.into_iter()
        .map(|row| FeedbackPolicy { owner, steps: Vec::new(), stationary: row })
        .collect()
}

/// A small deterministic sample of `owner`'s policies: up to `stationary_cap`
/// stationary ones plus two that change with the step index.
pub fn sample_policies(model: &GameModel, owner: Owner, horizon: usize, stationary_cap: usize) -> Vec<Policy> {
    let mut out: Vec<Policy> = stationary_policies(model, owner)
        .into_iter()
        .take(stationary_cap)
        .map(Policy::feedback)
        .collect();
    let n = model.n_states();
    for shift in 0..2 {
        let steps: Vec<Vec<usize>> = (0..horizon)
            .map(|k| (0..n).map(|s| (k + s + shift) % model.successors(s).len()).collect())
            .collect();
        let stationary = (0..n).map(|s| shift % model.successors(s).len()).collect();
        out.push(Policy::feedback(FeedbackPolicy { owner, steps, stationary }));
    }
    out
}
