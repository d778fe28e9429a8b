use crate::error::{Error, Result};

/// Which player picks the successor at a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Owner {
    Max,
    Min,
    /// Exactly one successor; nobody chooses.
    Uncontrolled,
}

impl Owner {
    pub fn swapped(self) -> Self {
        match self {
            Owner::Max => Owner::Min,
            Owner::Min => Owner::Max,
            Owner::Uncontrolled => Owner::Uncontrolled,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Owner::Max => "MAX",
            Owner::Min => "MIN",
            Owner::Uncontrolled => "NONE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "MAX" | "max" => Some(Owner::Max),
            "MIN" | "min" => Some(Owner::Min),
            "NONE" | "none" => Some(Owner::Uncontrolled),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    pub name: String,
    pub owner: Owner,
    /// Running cost in `[0, 1]`.
    pub cost: f64,
}

/// A finite turn-based graph game with uniform step duration.
///
/// Processes are edge paths held piecewise constant on `[n dt, (n+1) dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameModel {
    id: String,
    states: Vec<StateSpec>,
    edges: Vec<Vec<usize>>,
    dt: f64,
}

impl GameModel {
    pub fn new(id: impl Into<String>, states: Vec<StateSpec>, edges: Vec<Vec<usize>>, dt: f64) -> Result<Self> {
        let id = id.into();
        let bad = |msg: String| Err(Error::InvalidModel(format!("{id}: {msg}")));
        if states.is_empty() {
            return bad("no states".into());
        }
        if edges.len() != states.len() {
            return bad(format!("{} states but {} successor lists", states.len(), edges.len()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return bad(format!("dt must be positive, got {dt}"));
        }
        for (i, (s, succ)) in states.iter().zip(&edges).enumerate() {
            if !(0.0..=1.0).contains(&s.cost) {
                return bad(format!("state `{}` has cost {} outside [0, 1]", s.name, s.cost));
            }
            if succ.is_empty() {
                return bad(format!("state `{}` has no outgoing edge", s.name));
            }
            if let Some(&t) = succ.iter().find(|&&t| t >= states.len()) {
                return bad(format!("state `{}` points at unknown state index {t}", s.name));
            }
            let mut sorted = succ.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != succ.len() {
                return bad(format!("state `{}` lists a duplicate edge", s.name));
            }
            if s.owner == Owner::Uncontrolled && succ.len() != 1 {
                return bad(format!("uncontrolled state `{}` must have exactly one successor", s.name));
            }
            if states[..i].iter().any(|o| o.name == s.name) {
                return bad(format!("duplicate state name `{}`", s.name));
            }
        }
        Ok(Self { id, states, edges, dt })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[StateSpec] {
        &self.states
    }

    pub fn name(&self, s: usize) -> &str {
        &self.states[s].name
    }

    pub fn owner(&self, s: usize) -> Owner {
        self.states[s].owner
    }

    pub fn cost(&self, s: usize) -> f64 {
        self.states[s].cost
    }

    pub fn successors(&self, s: usize) -> &[usize] {
        &self.edges[s]
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s.name == name)
    }

    pub fn max_branching(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(1)
    }

    /// Cost `1 - g` with MAX and MIN swapped.
    pub fn reflect_cost(&self) -> GameModel {
        let states = self
            .states
            .iter()
            .map(|s| StateSpec { name: s.name.clone(), owner: s.owner.swapped(), cost: 1.0 - s.cost })
            .collect();
        GameModel { id: format!("{}~reflected", self.id), states, edges: self.edges.clone(), dt: self.dt }
    }

    /// Number of edge paths with `steps` transitions, summed over all starts.
    pub fn path_count(&self, steps: usize) -> u128 {
        let mut counts = vec![1u128; self.n_states()];
        for _ in 0..steps {
            counts = (0..self.n_states())
                .map(|s| self.edges[s].iter().map(|&t| counts[t]).fold(0u128, |a, b| a.saturating_add(b)))
                .collect();
        }
        counts.iter().fold(0u128, |a, &b| a.saturating_add(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(name: &str, owner: Owner, cost: f64) -> StateSpec {
        StateSpec { name: name.into(), owner, cost }
    }

    #[test]
    fn validation() {
        let ok = GameModel::new("m", vec![st("a", Owner::Max, 0.5)], vec![vec![0]], 1.0);
        assert!(ok.is_ok());
        assert!(GameModel::new("m", vec![st("a", Owner::Max, 1.5)], vec![vec![0]], 1.0).is_err());
        assert!(GameModel::new("m", vec![st("a", Owner::Max, 0.5)], vec![vec![]], 1.0).is_err());
        assert!(GameModel::new("m", vec![st("a", Owner::Max, 0.5)], vec![vec![0]], 0.0).is_err());
        assert!(GameModel::new("m", vec![st("a", Owner::Max, 0.5)], vec![vec![1]], 1.0).is_err());
        let two = vec![st("a", Owner::Uncontrolled, 0.0), st("b", Owner::Max, 0.0)];
        assert!(GameModel::new("m", two, vec![vec![0, 1], vec![0]], 1.0).is_err());
    }

    #[test]
    fn reflect_is_involution() {
        let m = GameModel::new(
            "m",
            vec![st("a", Owner::Max, 0.25), st("b", Owner::Min, 1.0), st("c", Owner::Uncontrolled, 0.0)],
            vec![vec![1, 2], vec![0, 2], vec![0]],
            0.5,
        )
        .unwrap();
        let r = m.reflect_cost();
        assert_eq!(r.cost(1), 0.0);
        assert_eq!(r.owner(0), Owner::Min);
        assert_eq!(r.owner(2), Owner::Uncontrolled);
        let rr = r.reflect_cost().with_id("m");
        assert_eq!(rr, m);
    }

    #[test]
    fn path_counts() {
        let m = GameModel::new(
            "m",
            vec![st("a", Owner::Max, 0.0), st("b", Owner::Min, 0.0)],
            vec![vec![0, 1], vec![0]],
            1.0,
        )
        .unwrap();
        assert_eq!(m.path_count(0), 2);
        assert_eq!(m.path_count(1), 3);
        assert_eq!(m.path_count(2), 5);
    }
}
