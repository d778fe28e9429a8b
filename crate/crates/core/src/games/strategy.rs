use super::model::{GameModel, Owner};
use super::policy::Policy;
use super::process::{grid_step, Process};
use crate::error::{domain, Error, Result};

/// Default bound on the number of paths enumerated by the finite checks.
pub const ENUMERATION_CAP: u128 = 200_000;

/// A set of processes owned by one player.
///
/// Induced sets contain every process consistent with a policy at the
/// owner's states; explicit sets list path prefixes of a fixed length;
/// concatenated sets apply the gluing rule literally.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategySet {
    Induced { owner: Owner, policy: Policy },
    Explicit { owner: Owner, horizon: usize, paths: Vec<Vec<usize>> },
    Concatenated { first: Box<StrategySet>, second: Box<StrategySet>, step: usize },
}

impl StrategySet {
    pub fn induced(owner: Owner, policy: Policy) -> Self {
        StrategySet::Induced { owner, policy }
    }

    pub fn owner(&self) -> Owner {
        match self {
            StrategySet::Induced { owner, .. } | StrategySet::Explicit { owner, .. } => *owner,
            StrategySet::Concatenated { first, .. } => first.owner(),
        }
    }

    pub fn policy(&self) -> Option<&Policy> {
        match self {
            StrategySet::Induced { policy, .. } => Some(policy),
            _ => None,
        }
    }

    /// Whether some member starts with the path `z`.
    pub fn contains_prefix(&self, model: &GameModel, z: &[usize]) -> bool {
        match self {
            StrategySet::Induced { owner, policy } => (1..z.len()).all(|n| {
                let s = z[n - 1];
                model.owner(s) != *owner || model.successors(s)[policy.choose(&z[..n])] == z[n]
            }),
            StrategySet::Explicit { horizon, paths, .. } => {
                z.len() <= horizon + 1 && paths.iter().any(|p| p.starts_with(z))
            }
            StrategySet::Concatenated { first, second, step } => {
                if z.len() <= *step {
                    first.contains_prefix(model, z)
                } else {
                    first.contains_prefix(model, &z[..=*step]) && second.contains_prefix(model, &z[*step..])
                }
            }
        }
    }

    /// Whether the first `horizon` steps of `z` can be extended inside the set.
    pub fn contains(&self, model: &GameModel, z: &Process, horizon: usize) -> bool {
        self.contains_prefix(model, &z.states(horizon + 1))
    }

    /// All member prefixes with `horizon` steps starting at `start`, in
    /// lexicographic order of edge choices.
    pub fn members(&self, model: &GameModel, start: usize, horizon: usize) -> Result<Vec<Vec<usize>>> {
        enumeration_guard(model, horizon, ENUMERATION_CAP)?;
        let mut out = Vec::new();
        let mut path = vec![start];
        collect(model, horizon, &mut path, &mut out, &|p| self.contains_prefix(model, p));
        Ok(out)
    }
}

/// Paths of `horizon` steps from `start` accepted by `keep` at every prefix.
pub(crate) fn collect(
    model: &GameModel,
    horizon: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    keep: &dyn Fn(&[usize]) -> bool,
) {
    if !keep(path) {
        return;
    }
    if path.len() == horizon + 1 {
        out.push(path.clone());
        return;
    }
    let s = *path.last().unwrap();
    for &next in model.successors(s) {
        path.push(next);
        collect(model, horizon, path, out, keep);
        path.pop();
    }
}

/// Every path of `horizon` steps starting at `start`.
pub fn all_paths(model: &GameModel, start: usize, horizon: usize) -> Result<Vec<Vec<usize>>> {
    enumeration_guard(model, horizon, ENUMERATION_CAP)?;
    let mut out = Vec::new();
    collect(model, horizon, &mut vec![start], &mut out, &|_| true);
    Ok(out)
}

/// Refuses when `|Ω| · branching^horizon` exceeds `cap`.
pub fn enumeration_guard(model: &GameModel, horizon: usize, cap: u128) -> Result<()> {
    let b = model.max_branching() as u128;
    let mut required = model.n_states() as u128;
    for _ in 0..horizon {
        required = required.saturating_mul(b);
        if required > cap {
            break;
        }
    }
    if required > cap {
        return Err(Error::EnumerationCap { required, cap });
    }
    Ok(())
}

/// `A′ ⋄_τ A″`. Policy-induced operands give the induced set of the
/// concatenated policy; anything else keeps the literal gluing rule.
pub fn concatenate_strategy(first: &StrategySet, second: &StrategySet, tau: f64, dt: f64) -> Result<StrategySet> {
    if first.owner() != second.owner() {
        return Err(domain("concatenated strategies must belong to the same player"));
    }
    let step = grid_step(tau, dt)?;
    Ok(match (first, second) {
        (StrategySet::Induced { owner, policy: p1 }, StrategySet::Induced { policy: p2, .. }) => StrategySet::Induced {
            owner: *owner,
            policy: Policy::Concatenated { first: Box::new(p1.clone()), second: Box::new(p2.clone()), step },
        },
        _ => literal_concatenation(first, second, step),
    })
}

/// The gluing rule `{z′ ⋄ z″ : z′(τ) = z″(0)}` without any simplification.
pub fn literal_concatenation(first: &StrategySet, second: &StrategySet, step: usize) -> StrategySet {
    StrategySet::Concatenated { first: Box::new(first.clone()), second: Box::new(second.clone()), step }
}

/// Selects `sets[ω]` for processes starting at `ω`.
pub fn separate(model: &GameModel, sets: &[StrategySet], horizon: usize) -> Result<StrategySet> {
    if sets.len() != model.n_states() {
        return Err(domain("separation needs one strategy per state"));
    }
    let owner = sets[0].owner();
    if sets.iter().any(|s| s.owner() != owner) {
        return Err(domain("separated strategies must belong to the same player"));
    }
    if let Some(policies) = sets.iter().map(StrategySet::policy).collect::<Option<Vec<_>>>() {
        return Ok(StrategySet::Induced {
            owner,
            policy: Policy::Separated(policies.into_iter().cloned().collect()),
        });
    }
    let mut paths = Vec::new();
    for (w, set) in sets.iter().enumerate() {
        paths.extend(set.members(model, w, horizon)?);
    }
    Ok(StrategySet::Explicit { owner, horizon, paths })
}
