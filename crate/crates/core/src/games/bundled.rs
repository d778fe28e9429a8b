//! Small models shipped with the library, addressable as `bundled/<name>`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{GameModel, Owner, StateSpec};

fn state(name: &str, owner: Owner, cost: f64) -> StateSpec {
    StateSpec { name: name.to_string(), owner, cost }
}

fn build(id: &str, states: Vec<StateSpec>, edges: Vec<Vec<usize>>) -> GameModel {
    GameModel::new(id, states, edges, 1.0).expect("bundled model is valid")
}

/// One absorbing state with cost `c0`.
pub fn single(c0: f64) -> GameModel {
    build("single", vec![state("s", Owner::Uncontrolled, c0)], vec![vec![0]])
}

/// Deterministic two-cycle with costs 0 and 1.
pub fn cycle2() -> GameModel {
    build(
        "cycle2",
        vec![state("a", Owner::Uncontrolled, 0.0), state("b", Owner::Uncontrolled, 1.0)],
        vec![vec![1], vec![0]],
    )
}

/// Deterministic three-cycle with costs 1, 0, 0.
pub fn cycle3() -> GameModel {
    build(
        "cycle3",
        vec![
            state("a", Owner::Uncontrolled, 1.0),
            state("b", Owner::Uncontrolled, 0.0),
            state("c", Owner::Uncontrolled, 0.0),
        ],
        vec![vec![1], vec![2], vec![0]],
    )
}

/// MIN may stay on cost 1 or leave for an absorbing zero.
pub fn min_escape() -> GameModel {
    build(
        "min_escape",
        vec![state("s", Owner::Min, 1.0), state("z", Owner::Uncontrolled, 0.0)],
        vec![vec![0, 1], vec![1]],
    )
}

/// MIN picks between absorbing costs 0 and 1.
pub fn min_choice() -> GameModel {
    build(
        "min_choice",
        vec![
            state("s", Owner::Min, 0.5),
            state("lo", Owner::Uncontrolled, 0.0),
            state("hi", Owner::Uncontrolled, 1.0),
        ],
        vec![vec![1, 2], vec![1], vec![2]],
    )
}

/// Three states alternating MAX and MIN turns.
pub fn alt3() -> GameModel {
    build(
        "alt3",
        vec![
            state("x", Owner::Max, 0.0),
            state("y", Owner::Min, 1.0),
            state("z", Owner::Uncontrolled, 0.5),
        ],
        vec![vec![1, 2], vec![0, 2], vec![0]],
    )
}

/// Four states, two per player, every controlled state with two moves.
pub fn alt4() -> GameModel {
    build(
        "alt4",
        vec![
            state("a", Owner::Max, 0.3),
            state("b", Owner::Min, 1.0),
            state("c", Owner::Min, 0.6),
            state("d", Owner::Max, 0.0),
        ],
        vec![vec![1, 2], vec![0, 3], vec![0, 3], vec![1, 2]],
    )
}

/// Seeded random turn-based model with at most four states, out-degree at
/// most two and costs on the grid `k/16`.
pub fn random(seed: u64) -> GameModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=4usize);
    let mut states = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(n);
    for i in 0..n {
        let owner = match rng.gen_range(0..3) {
            0 => Owner::Max,
            1 => Owner::Min,
            _ => Owner::Uncontrolled,
        };
        let degree = if owner == Owner::Uncontrolled { 1 } else { rng.gen_range(1..=2usize.min(n)) };
        let mut succ: Vec<usize> = sample(&mut rng, n, degree).into_vec();
        succ.sort_unstable();
        let cost = rng.gen_range(0..=16) as f64 / 16.0;
        states.push(state(&format!("s{i}"), owner, cost));
        edges.push(succ);
    }
    GameModel::new(format!("random{seed}"), states, edges, 1.0).expect("random model is valid")
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 7] = ["single", "cycle2", "cycle3", "min_escape", "min_choice", "alt3", "alt4"];

/// Looks up a bundled model; `random<seed>` is also accepted.
pub fn by_name(name: &str) -> Option<GameModel> {
    Some(match name {
        "single" => single(0.7),
        "cycle2" => cycle2(),
        "cycle3" => cycle3(),
        "min_escape" => min_escape(),
        "min_choice" => min_choice(),
        "alt3" => alt3(),
        "alt4" => alt4(),
        _ => return name.strip_prefix("random")?.parse().ok().map(random),
    })
}

pub fn all_bundled() -> Vec<GameModel> {
    NAMES.iter().map(|n| by_name(n).unwrap()).collect()
}
