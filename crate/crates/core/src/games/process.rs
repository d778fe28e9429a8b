use std::sync::Arc;

use super::model::GameModel;
use crate::error::{domain, Error, Result};

/// A state trajectory on the `dt` grid: an explicit prefix followed by a
/// stationary successor rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Process {
    dt: f64,
    prefix: Vec<usize>,
    tail: Arc<Vec<usize>>,
}

/// Converts a grid-aligned time to its step index.
pub fn grid_step(tau: f64, dt: f64) -> Result<usize> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(domain(format!("time must be nonnegative, got {tau}")));
    }
    let k = (tau / dt).round();
    if (k * dt - tau).abs() > 1e-9 * tau.max(1.0) {
        return Err(domain(format!("time {tau} is not a multiple of dt = {dt}")));
    }
    Ok(k as usize)
}

impl Process {
    /// `tail[s]` is the successor taken from `s` once the prefix is exhausted.
    pub fn new(model: &GameModel, prefix: Vec<usize>, tail: Vec<usize>) -> Result<Self> {
        if prefix.is_empty() {
            return Err(domain("process prefix must contain the initial state"));
        }
        if tail.len() != model.n_states() {
            return Err(domain("tail rule must give a successor for every state"));
        }
        for w in prefix.windows(2) {
            if w[0] >= model.n_states() || !model.successors(w[0]).contains(&w[1]) {
                return Err(domain(format!("prefix step {} -> {} is not an edge", w[0], w[1])));
            }
        }
        if *prefix.last().unwrap() >= model.n_states() {
            return Err(domain("prefix ends at an unknown state"));
        }
        for (s, &t) in tail.iter().enumerate() {
            if !model.successors(s).contains(&t) {
                return Err(domain(format!("tail step {s} -> {t} is not an edge")));
            }
        }
        Ok(Self { dt: model.dt(), prefix, tail: Arc::new(tail) })
    }

    /// Follows the first listed edge everywhere after `prefix`.
    pub fn with_default_tail(model: &GameModel, prefix: Vec<usize>) -> Result<Self> {
        let tail = (0..model.n_states()).map(|s| model.successors(s)[0]).collect();
        Self::new(model, prefix, tail)
    }

    pub fn start(&self) -> usize {
        self.prefix[0]
    }

    pub fn state_at_step(&self, n: usize) -> usize {
        if n < self.prefix.len() {
            return self.prefix[n];
        }
        let mut s = *self.prefix.last().unwrap();
        for _ in self.prefix.len() - 1..n {
            s = self.tail[s];
        }
        s
    }

    /// `z(t)`, constant on `[n dt, (n+1) dt)`.
    pub fn sample(&self, t: f64) -> Result<usize> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(domain(format!("sample time must be nonnegative, got {t}")));
        }
        // absorb rounding when t sits on a grid point
        let n = (t / self.dt * (1.0 + 1e-12)).floor() as usize;
        Ok(self.state_at_step(n))
    }

    /// States at steps `0..len`.
    pub fn states(&self, len: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(len);
        let mut s = self.prefix[0];
        for n in 0..len {
            s = if n < self.prefix.len() { self.prefix[n] } else { self.tail[s] };
            out.push(s);
        }
        out
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `z′ ⋄_τ z″`: this process on `[0, τ)`, then `t ↦ z″(t - τ)`.
    pub fn concatenate(&self, other: &Process, tau: f64) -> Result<Process> {
        let k = grid_step(tau, self.dt)?;
        let here = self.state_at_step(k);
        if here != other.start() {
            return Err(Error::Concatenation { step: k, left: here, right: other.start() });
        }
        let mut prefix = self.states(k);
        prefix.extend_from_slice(&other.prefix);
        Ok(Process { dt: self.dt, prefix, tail: Arc::clone(&other.tail) })
    }
}
