use std::fmt;

use super::model::{GameModel, Owner};
use super::policy::{stationary_policies, FeedbackPolicy, Policy};
use super::strategy::{
    all_paths, collect, concatenate_strategy, enumeration_guard, literal_concatenation, separate, StrategySet,
    ENUMERATION_CAP,
};
use crate::error::{domain, Result};

/// Maps `ξ: Ω → family` are enumerated exhaustively up to this count and
/// sampled with a fixed stride beyond it.
const MAX_SEPARATION_MAPS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Playable,
    Separation,
    Concatenation,
    Saddle,
}

impl Axiom {
    pub fn tag(self) -> &'static str {
        match self {
            Axiom::Playable => "p",
            Axiom::Separation => "omega",
            Axiom::Concatenation => "concat",
            Axiom::Saddle => "s",
        }
    }
}

/// How the listed sets stand for the whole family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closure {
    /// The family is the closure of the listed policies under separation and
    /// concatenation; closure is checked against the literal set rules.
    PolicyExpressions,
    /// The family is exactly the list.
    Listed,
}

#[derive(Debug, Clone)]
pub struct StrategyFamily {
    pub owner: Owner,
    pub sets: Vec<StrategySet>,
    pub closure: Closure,
}

impl StrategyFamily {
    pub fn new(owner: Owner, sets: Vec<StrategySet>, closure: Closure) -> Result<Self> {
        if sets.is_empty() {
            return Err(domain("strategy family is empty"));
        }
        if sets.iter().any(|s| s.owner() != owner) {
            return Err(domain("strategy family mixes players"));
        }
        Ok(Self { owner, sets, closure })
    }
}

/// The policy-induced family for `owner`: every stationary policy and two
/// step-dependent ones, closed under policy expressions.
pub fn policy_family(model: &GameModel, owner: Owner, horizon: usize) -> StrategyFamily {
    let mut sets: Vec<StrategySet> = stationary_policies(model, owner)
        .into_iter()
        .map(|p| StrategySet::induced(owner, Policy::feedback(p)))
        .collect();
    let n = model.n_states();
    for shift in 0..2 {
        let steps = (0..horizon)
            .map(|k| (0..n).map(|s| (k + s + shift) % model.successors(s).len()).collect())
            .collect();
        let stationary = vec![0; n];
        let p = FeedbackPolicy::new(model, owner, steps, stationary).expect("choices are in range");
        sets.push(StrategySet::induced(owner, Policy::feedback(p)));
    }
    StrategyFamily { owner, sets, closure: Closure::PolicyExpressions }
}

/// Stationary policies taken as a closed list. Separation and concatenation
/// leave this list on most models.
pub fn stationary_family(model: &GameModel, owner: Owner) -> StrategyFamily {
    let sets = stationary_policies(model, owner)
        .into_iter()
        .map(|p| StrategySet::induced(owner, Policy::feedback(p)))
        .collect();
    StrategyFamily { owner, sets, closure: Closure::Listed }
}

/// A MAX set holding one path from `start` only; unplayable elsewhere.
pub fn pinned_path_strategy(model: &GameModel, start: usize, horizon: usize) -> StrategySet {
    let mut path = vec![start];
    for _ in 0..horizon {
        path.push(model.successors(*path.last().unwrap())[0]);
    }
    StrategySet::Explicit { owner: Owner::Max, horizon, paths: vec![path] }
}

/// A MAX policy and a MIN set that disagree at a MAX state with two moves:
/// MAX always takes edge 0 there, the MIN set only holds paths avoiding it.
/// Returns `None` when no MAX state has two moves.
pub fn clash_min_strategy(model: &GameModel, horizon: usize) -> Result<Option<(StrategySet, StrategySet, usize)>> {
    let Some(w) = (0..model.n_states()).find(|&s| model.owner(s) == Owner::Max && model.successors(s).len() > 1)
    else {
        return Ok(None);
    };
    let max = StrategySet::induced(
        Owner::Max,
        Policy::feedback(FeedbackPolicy::stationary(model, Owner::Max, vec![0; model.n_states()])?),
    );
    let banned = model.successors(w)[0];
    let mut paths = Vec::new();
    for s in 0..model.n_states() {
        paths.extend(
            all_paths(model, s, horizon)?
                .into_iter()
                .filter(|p| p.windows(2).all(|e| !(e[0] == w && e[1] == banned))),
        );
    }
    let min = StrategySet::Explicit { owner: Owner::Min, horizon, paths };
    Ok(Some((max, min, w)))
}

/// Concrete evidence that an axiom fails.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Unplayable { owner: Owner, set: usize, state: usize },
    Separation { owner: Owner, map: Vec<usize>, state: usize },
    Concatenation { owner: Owner, left: usize, right: usize, step: usize, state: usize },
    NoCommonProcess { max_set: usize, min_set: usize, state: usize },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Unplayable { owner, set, state } => {
                write!(f, "{} set {set} has no process from state {state}", owner.tag())
            }
            Witness::Separation { owner, map, state } => {
                write!(f, "{} separation {map:?} differs from its selection at state {state}", owner.tag())
            }
            Witness::Concatenation { owner, left, right, step, state } => {
                write!(f, "{} sets {left} and {right} glued at step {step} leave the family at state {state}", owner.tag())
            }
            Witness::NoCommonProcess { max_set, min_set, state } => {
                write!(f, "MAX set {max_set} and MIN set {min_set} share no process from state {state}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub passed: bool,
    /// Number of elementary comparisons made.
    pub checked: usize,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub horizon: usize,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn get(&self, axiom: Axiom) -> &AxiomResult {
        self.results.iter().find(|r| r.axiom == axiom).expect("every axiom is reported")
    }

    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

fn tally(axiom: Axiom, checks: impl IntoIterator<Item = Result<Option<Witness>>>) -> Result<AxiomResult> {
    let mut checked = 0;
    for c in checks {
        checked += 1;
        if let Some(w) = c? {
            return Ok(AxiomResult { axiom, passed: false, checked, witness: Some(w) });
        }
    }
    Ok(AxiomResult { axiom, passed: true, checked, witness: None })
}

/// Members from every state, indexed by state.
fn profile(model: &GameModel, set: &StrategySet, horizon: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    (0..model.n_states()).map(|w| set.members(model, w, horizon)).collect()
}

fn playable(model: &GameModel, fam: &StrategyFamily, horizon: usize) -> Vec<Result<Option<Witness>>> {
    let mut out = Vec::new();
    for (i, set) in fam.sets.iter().enumerate() {
        for w in 0..model.n_states() {
            out.push(set.members(model, w, horizon).map(|m| {
                m.is_empty().then_some(Witness::Unplayable { owner: fam.owner, set: i, state: w })
            }));
        }
    }
    out
}

/// Index maps `Ω → family`, exhaustive or strided.
fn separation_maps(n_states: usize, n_sets: usize) -> Vec<Vec<usize>> {
    let total = (n_sets as u128).checked_pow(n_states as u32).unwrap_or(u128::MAX);
    let count = total.min(MAX_SEPARATION_MAPS as u128) as usize;
    let stride = (total / count as u128).max(1);
    (0..count)
        .map(|i| {
            let mut code = i as u128 * stride;
            (0..n_states)
                .map(|_| {
                    let d = (code % n_sets as u128) as usize;
                    code /= n_sets as u128;
                    d
                })
                .collect()
        })
        .collect()
}

fn separation(
    model: &GameModel,
    fam: &StrategyFamily,
    profiles: &[Vec<Vec<Vec<usize>>>],
    horizon: usize,
) -> Result<AxiomResult> {
    let n = model.n_states();
    let maps = separation_maps(n, fam.sets.len());
    tally(
        Axiom::Separation,
        maps.into_iter().map(|xi| {
            let wanted: Vec<&Vec<Vec<usize>>> = (0..n).map(|w| &profiles[xi[w]][w]).collect();
            let found = match fam.closure {
                Closure::PolicyExpressions => {
                    let chosen: Vec<StrategySet> = xi.iter().map(|&i| fam.sets[i].clone()).collect();
                    let stitched = separate(model, &chosen, horizon)?;
                    let got = profile(model, &stitched, horizon)?;
                    (0..n).find(|&w| &got[w] != wanted[w])
                }
                Closure::Listed => {
                    let hit = profiles.iter().any(|p| (0..n).all(|w| &p[w] == wanted[w]));
                    (!hit).then(|| first_mismatch(profiles, &wanted))
                }
            };
            Ok(found.map(|state| Witness::Separation { owner: fam.owner, map: xi, state }))
        }),
    )
}

/// The state where the closest listed profile disagrees with `wanted`.
fn first_mismatch(profiles: &[Vec<Vec<Vec<usize>>>], wanted: &[&Vec<Vec<usize>>]) -> usize {
    let score = |p: &Vec<Vec<Vec<usize>>>| (0..wanted.len()).take_while(|&w| &p[w] == wanted[w]).count();
    profiles.iter().map(score).max().unwrap_or(0)
}

fn concatenation(
    model: &GameModel,
    fam: &StrategyFamily,
    profiles: &[Vec<Vec<Vec<usize>>>],
    horizon: usize,
) -> Result<AxiomResult> {
    let n = model.n_states();
    let mut checks = Vec::new();
    for (i, a) in fam.sets.iter().enumerate() {
        for (j, b) in fam.sets.iter().enumerate() {
            for step in 0..horizon {
                checks.push((i, j, step, a, b));
            }
        }
    }
    tally(
        Axiom::Concatenation,
        checks.into_iter().map(|(i, j, step, a, b)| {
            let literal = profile(model, &literal_concatenation(a, b, step), horizon)?;
            let found = match fam.closure {
                Closure::PolicyExpressions => {
                    let stitched = concatenate_strategy(a, b, step as f64 * model.dt(), model.dt())?;
                    let got = profile(model, &stitched, horizon)?;
                    (0..n).find(|&w| got[w] != literal[w])
                }
                Closure::Listed => {
                    let wanted: Vec<&Vec<Vec<usize>>> = literal.iter().collect();
                    let hit = profiles.iter().any(|p| (0..n).all(|w| &p[w] == wanted[w]));
                    (!hit).then(|| first_mismatch(profiles, &wanted))
                }
            };
            Ok(found.map(|state| Witness::Concatenation { owner: fam.owner, left: i, right: j, step, state }))
        }),
    )
}

/// Common processes of a MAX set and a MIN set from `start`.
pub fn common_processes(
    model: &GameModel,
    max: &StrategySet,
    min: &StrategySet,
    start: usize,
    horizon: usize,
) -> Result<Vec<Vec<usize>>> {
    enumeration_guard(model, horizon, ENUMERATION_CAP)?;
    let mut out = Vec::new();
    collect(model, horizon, &mut vec![start], &mut out, &|p| {
        max.contains_prefix(model, p) && min.contains_prefix(model, p)
    });
    Ok(out)
}

fn saddle(model: &GameModel, maxfam: &StrategyFamily, minfam: &StrategyFamily, horizon: usize) -> Result<AxiomResult> {
    let mut checks = Vec::new();
    for (i, a) in maxfam.sets.iter().enumerate() {
        for (j, b) in minfam.sets.iter().enumerate() {
            for w in 0..model.n_states() {
                checks.push((i, j, w, a, b));
            }
        }
    }
    tally(
        Axiom::Saddle,
        checks.into_iter().map(|(i, j, w, a, b)| {
            let common = common_processes(model, a, b, w, horizon)?;
            Ok(common.is_empty().then_some(Witness::NoCommonProcess { max_set: i, min_set: j, state: w }))
        }),
    )
}

/// Checks (p) and closure for both families and (s) for every pair, by
/// enumerating prefixes with `horizon` steps.
pub fn check_axioms(
    model: &GameModel,
    maxfam: &StrategyFamily,
    minfam: &StrategyFamily,
    horizon: usize,
) -> Result<AxiomReport> {
    if maxfam.owner != Owner::Max || minfam.owner != Owner::Min {
        return Err(domain("expected a MAX family and a MIN family"));
    }
    enumeration_guard(model, horizon, ENUMERATION_CAP)?;
    let mut results = Vec::new();

    let mut play = playable(model, maxfam, horizon);
    play.extend(playable(model, minfam, horizon));
    results.push(tally(Axiom::Playable, play)?);

    let max_profiles: Vec<_> = maxfam.sets.iter().map(|s| profile(model, s, horizon)).collect::<Result<_>>()?;
    let min_profiles: Vec<_> = minfam.sets.iter().map(|s| profile(model, s, horizon)).collect::<Result<_>>()?;

    let mut sep = separation(model, maxfam, &max_profiles, horizon)?;
    if sep.passed {
        let other = separation(model, minfam, &min_profiles, horizon)?;
        sep = AxiomResult { checked: sep.checked + other.checked, ..other };
    }
    results.push(sep);

    let mut cat = concatenation(model, maxfam, &max_profiles, horizon)?;
    if cat.passed {
        let other = concatenation(model, minfam, &min_profiles, horizon)?;
        cat = AxiomResult { checked: cat.checked + other.checked, ..other };
    }
    results.push(cat);

    results.push(saddle(model, maxfam, minfam, horizon)?);
    Ok(AxiomReport { horizon, results })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::bundled;

    #[test]
    fn policy_families_pass_everywhere() {
        for model in bundled::all_bundled() {
            let maxfam = policy_family(&model, Owner::Max, 4);
            let minfam = policy_family(&model, Owner::Min, 4);
            let report = check_axioms(&model, &maxfam, &minfam, 4).unwrap();
            for r in &report.results {
                assert!(r.passed, "{} fails {:?}: {:?}", model.id(), r.axiom, r.witness);
            }
        }
    }

    #[test]
    fn exactly_one_common_process_for_policy_pairs() {
        let m = bundled::alt4();
        let maxfam = policy_family(&m, Owner::Max, 5);
        let minfam = policy_family(&m, Owner::Min, 5);
        for a in &maxfam.sets {
            for b in &minfam.sets {
                for w in 0..4 {
                    assert_eq!(common_processes(&m, a, b, w, 5).unwrap().len(), 1);
                }
            }
        }
    }

    #[test]
    fn pinned_path_is_unplayable_elsewhere() {
        let m = bundled::alt4();
        let maxfam = StrategyFamily::new(Owner::Max, vec![pinned_path_strategy(&m, 0, 4)], Closure::Listed).unwrap();
        let minfam = policy_family(&m, Owner::Min, 4);
        let report = check_axioms(&m, &maxfam, &minfam, 4).unwrap();
        let p = report.get(Axiom::Playable);
        assert!(!p.passed);
        assert_eq!(p.witness, Some(Witness::Unplayable { owner: Owner::Max, set: 0, state: 1 }));
    }

    #[test]
    fn clash_fails_saddle_axiom() {
        let m = bundled::alt4();
        let (max, min, w) = clash_min_strategy(&m, 4).unwrap().unwrap();
        let maxfam = StrategyFamily::new(Owner::Max, vec![max], Closure::Listed).unwrap();
        let minfam = StrategyFamily::new(Owner::Min, vec![min], Closure::Listed).unwrap();
        let report = check_axioms(&m, &maxfam, &minfam, 4).unwrap();
        assert!(report.get(Axiom::Playable).passed);
        let s = report.get(Axiom::Saddle);
        assert!(!s.passed);
        assert_eq!(s.witness, Some(Witness::NoCommonProcess { max_set: 0, min_set: 0, state: w }));
    }

    #[test]
    fn stationary_list_is_not_closed() {
        let m = bundled::alt4();
        let maxfam = stationary_family(&m, Owner::Max);
        let minfam = stationary_family(&m, Owner::Min);
        let report = check_axioms(&m, &maxfam, &minfam, 4).unwrap();
        assert!(report.get(Axiom::Playable).passed);
        assert!(report.get(Axiom::Saddle).passed);
        assert!(!report.get(Axiom::Concatenation).passed);
    }

    #[test]
    fn refuses_large_horizons() {
        let m = bundled::alt4();
        let f = policy_family(&m, Owner::Max, 2);
        let g = policy_family(&m, Owner::Min, 2);
        assert!(check_axioms(&m, &f, &g, 30).is_err());
    }
}
