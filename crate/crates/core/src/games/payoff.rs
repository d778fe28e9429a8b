use super::model::GameModel;
use super::process::Process;
use crate::densities::Density;
use crate::error::{domain, Error, Result};

/// Largest truncation horizon accepted, in steps.
pub const MAX_STEPS: usize = 20_000_000;

/// Guaranteed bracket `[lo, hi]` for a density-weighted payoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffEnclosure {
    pub lo: f64,
    pub hi: f64,
}

impl PayoffEnclosure {
    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.lo - tol <= x && x <= self.hi + tol
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { lo: c * self.lo, hi: c * self.hi }
    }

    pub fn shift(&self, x: f64) -> Self {
        Self { lo: self.lo + x, hi: self.hi + x }
    }
}

fn check_horizon_mass(horizon_mass: f64) -> Result<()> {
    if !(horizon_mass > 0.0 && horizon_mass < 1.0) {
        return Err(domain(format!("horizon mass must lie in (0, 1), got {horizon_mass}")));
    }
    Ok(())
}

/// First step count `N` whose tail `∫_{N dt}^∞ ρ` is at most
/// `(1 − horizon_mass)` times the total mass.
pub fn horizon_steps(d: &Density, dt: f64, horizon_mass: f64) -> Result<usize> {
    check_horizon_mass(horizon_mass)?;
    let allowed = (1.0 - horizon_mass) * d.total_mass();
    let done = |n: usize| d.tail_mass(n as f64 * dt) <= allowed;
    if done(0) {
        return Ok(0);
    }
    let mut hi = 1usize;
    while !done(hi) {
        if hi > MAX_STEPS {
            return Err(Error::HorizonOverflow { horizon_mass, max_steps: MAX_STEPS });
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if done(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi > MAX_STEPS {
        return Err(Error::HorizonOverflow { horizon_mass, max_steps: MAX_STEPS });
    }
    Ok(hi)
}

/// `w_n = ∫_{n dt}^{(n+1) dt} ρ` for `n < steps`.
pub fn step_weights(d: &Density, dt: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|n| d.interval_mass(n as f64 * dt, (n + 1) as f64 * dt)).collect()
}

/// Weights of the steps meeting `[a, b)`, clipped to the interval.
///
/// Returns the index of the first step and one weight per step up to and
/// including `⌊b/dt⌋`, whose weight vanishes when `b` is on the grid.
pub fn segment_weights(d: &Density, dt: f64, a: f64, b: f64) -> (usize, Vec<f64>) {
    let first = (a / dt).floor() as usize;
    let last = ((b / dt).floor() as usize).max(first);
    let weights = (first..=last)
        .map(|n| {
            let lo = (n as f64 * dt).max(a);
            let hi = ((n + 1) as f64 * dt).min(b);
            d.interval_mass(lo, hi)
        })
        .collect();
    (first, weights)
}

/// `∫₀^∞ ρ(t) g(z(t)) dt` bracketed by truncation at `horizon_mass`.
pub fn payoff(model: &GameModel, d: &Density, z: &Process, horizon_mass: f64) -> Result<PayoffEnclosure> {
    let dt = model.dt();
    let n = horizon_steps(d, dt, horizon_mass)?;
    let states = z.states(n.max(1));
    let lo: f64 = step_weights(d, dt, n).iter().zip(&states).map(|(w, &s)| w * model.cost(s)).sum();
    Ok(PayoffEnclosure { lo, hi: lo + d.tail_mass(n as f64 * dt) })
}
