use super::dp::ValueTable;
use crate::densities::Density;
use crate::error::{Error, Result};
use crate::games::{all_paths, step_weights, GameModel, Owner, PayoffEnclosure, ENUMERATION_CAP};

/// Per-state lower and upper values from exhaustive policy enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteValues {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Largest number of policies enumerated for one player and state.
    pub policies: u128,
}

/// Decision points `(step, state)` of `owner` with a real choice, reachable
/// from `start` within `steps` transitions.
fn decision_points(model: &GameModel, owner: Owner, start: usize, steps: usize) -> Vec<(usize, usize)> {
    let mut reach = vec![false; model.n_states()];
    reach[start] = true;
    let mut out = Vec::new();
    for n in 0..steps {
        let mut next = vec![false; model.n_states()];
        for s in (0..model.n_states()).filter(|&s| reach[s]) {
            if model.owner(s) == owner && model.successors(s).len() > 1 {
                out.push((n, s));
            }
            for &t in model.successors(s) {
                next[t] = true;
            }
        }
        reach = next;
    }
    out
}

/// `sup` over `owner`'s time-varying policies of the opponent's best reply,
/// taken over consistent paths. For MIN the roles of sup and inf swap.
fn guaranteed(model: &GameModel, owner: Owner, start: usize, paths: &[(Vec<usize>, f64)], steps: usize) -> Result<(f64, u128)> {
    let points = decision_points(model, owner, start, steps);
    let radix: Vec<usize> = points.iter().map(|&(_, s)| model.successors(s).len()).collect();
    let count = radix.iter().try_fold(1u128, |acc, &r| acc.checked_mul(r as u128)).unwrap_or(u128::MAX);
    if count > ENUMERATION_CAP {
        return Err(Error::EnumerationCap { required: count, cap: ENUMERATION_CAP });
    }
    let slot = |n: usize, s: usize| points.iter().position(|&p| p == (n, s));
    // index of the decision point used at each path step, or None
    let hooks: Vec<Vec<Option<usize>>> = paths
        .iter()
        .map(|(z, _)| (0..steps).map(|n| slot(n, z[n])).collect())
        .collect();
    let maximizing = owner == Owner::Max;
    let mut digits = vec![0usize; points.len()];
    let mut best = if maximizing { f64::NEG_INFINITY } else { f64::INFINITY };
    for _ in 0..count {
        let mut reply = if maximizing { f64::INFINITY } else { f64::NEG_INFINITY };
        for ((z, value), hook) in paths.iter().zip(&hooks) {
            let consistent = hook.iter().enumerate().all(|(n, h)| match h {
                Some(i) => {
                    let (_, s) = points[*i];
                    model.successors(s)[digits[*i]] == z[n + 1]
                }
                None => true,
            });
            if consistent {
                reply = if maximizing { reply.min(*value) } else { reply.max(*value) };
            }
        }
        best = if maximizing { best.max(reply) } else { best.min(reply) };
        for (d, &r) in digits.iter_mut().zip(&radix) {
            *d += 1;
            if *d < r {
                break;
            }
            *d = 0;
        }
    }
    Ok((best, count))
}

/// Lower and upper values of `Σ_{n=0}^{L} w_n g(z_n) + T(z_L)` by enumerating
/// every time-varying policy of each player and every consistent path.
pub fn bruteforce_segment(model: &GameModel, weights: &[f64], terminal: &[f64]) -> Result<BruteValues> {
    let steps = weights.len().saturating_sub(1);
    let mut lower = Vec::with_capacity(model.n_states());
    let mut upper = Vec::with_capacity(model.n_states());
    let mut policies = 0u128;
    for start in 0..model.n_states() {
        let paths: Vec<(Vec<usize>, f64)> = all_paths(model, start, steps)?
            .into_iter()
            .map(|z| {
                let run: f64 = weights.iter().zip(&z).map(|(w, &s)| w * model.cost(s)).sum();
                let end = terminal[*z.last().unwrap()];
                (z, run + end)
            })
            .collect();
        let (lo, a) = guaranteed(model, Owner::Max, start, &paths, steps)?;
        let (up, b) = guaranteed(model, Owner::Min, start, &paths, steps)?;
        lower.push(lo);
        upper.push(up);
        policies = policies.max(a).max(b);
    }
    Ok(BruteValues { lower, upper, policies })
}

/// Exhaustive sup-inf and inf-sup over `horizon` steps of `ρ`; the tail
/// mass beyond the horizon is added to `hi`.
pub fn lower_upper_bruteforce(model: &GameModel, d: &Density, horizon: usize) -> Result<(ValueTable, ValueTable)> {
    let mut weights = step_weights(d, model.dt(), horizon);
    weights.push(0.0);
    let tail = d.tail_mass(horizon as f64 * model.dt());
    let b = bruteforce_segment(model, &weights, &vec![0.0; model.n_states()])?;
    let table = |vals: &[f64]| ValueTable {
        model_id: model.id().to_string(),
        density_id: d.kind_name().to_string(),
        lambda: f64::NAN,
        steps: horizon,
        entries: vals.iter().map(|&v| PayoffEnclosure { lo: v, hi: v + tail }).collect(),
    };
    Ok((table(&b.lower), table(&b.upper)))
}
