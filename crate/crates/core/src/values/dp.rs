use rayon::prelude::*;

use crate::densities::{Density, DensityFamily};
use crate::error::Result;
use crate::games::{horizon_steps, step_weights, GameModel, Owner, PayoffEnclosure};

/// Per-state value enclosures for one density.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    pub model_id: String,
    pub density_id: String,
    pub lambda: f64,
    /// Truncation horizon in steps.
    pub steps: usize,
    pub entries: Vec<PayoffEnclosure>,
}

impl ValueTable {
    pub fn labelled(mut self, density_id: impl Into<String>, lambda: f64) -> Self {
        self.density_id = density_id.into();
        self.lambda = lambda;
        self
    }

    pub fn max_width(&self) -> f64 {
        self.entries.iter().map(PayoffEnclosure::width).fold(0.0, f64::max)
    }

    pub fn lo(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.lo).collect()
    }

    pub fn hi(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.hi).collect()
    }
}

/// One Bellman step for an enclosure end: the owner's best successor value.
fn best(model: &GameModel, s: usize, next: &[f64]) -> f64 {
    let vals = model.successors(s).iter().map(|&t| next[t]);
    match model.owner(s) {
        Owner::Max => vals.fold(f64::NEG_INFINITY, f64::max),
        Owner::Min => vals.fold(f64::INFINITY, f64::min),
        Owner::Uncontrolled => next[model.successors(s)[0]],
    }
}

/// Game value of `Σ_{n=0}^{L} w_n g(z_n) + T(z_L)` with `L = weights.len() - 1`,
/// computed separately for both ends of the terminal enclosure.
///
/// Empty weights return the terminal unchanged.
pub fn backward_induction(model: &GameModel, weights: &[f64], terminal: &[PayoffEnclosure]) -> Vec<PayoffEnclosure> {
    let n = model.n_states();
    let Some((&last, rest)) = weights.split_last() else {
        return terminal.to_vec();
    };
    let mut lo: Vec<f64> = (0..n).map(|s| last * model.cost(s) + terminal[s].lo).collect();
    let mut hi: Vec<f64> = (0..n).map(|s| last * model.cost(s) + terminal[s].hi).collect();
    let (mut lo_next, mut hi_next) = (vec![0.0; n], vec![0.0; n]);
    for &w in rest.iter().rev() {
        for s in 0..n {
            let run = w * model.cost(s);
            lo_next[s] = run + best(model, s, &lo);
            hi_next[s] = run + best(model, s, &hi);
        }
        std::mem::swap(&mut lo, &mut lo_next);
        std::mem::swap(&mut hi, &mut hi_next);
    }
    lo.into_iter().zip(hi).map(|(lo, hi)| PayoffEnclosure { lo, hi }).collect()
}

/// Value enclosures of `∫ ρ g(z)` truncated at `horizon_mass`.
pub fn dp_value(model: &GameModel, d: &Density, horizon_mass: f64) -> Result<ValueTable> {
    let steps = horizon_steps(d, model.dt(), horizon_mass)?;
    Ok(dp_value_steps(model, d, steps).labelled(d.kind_name(), f64::NAN))
}

/// Value enclosures with a fixed truncation horizon.
pub fn dp_value_steps(model: &GameModel, d: &Density, steps: usize) -> ValueTable {
    let dt = model.dt();
    let mut weights = step_weights(d, dt, steps);
    weights.push(0.0);
    let tail = d.tail_mass(steps as f64 * dt);
    let terminal = vec![PayoffEnclosure { lo: 0.0, hi: tail }; model.n_states()];
    ValueTable {
        model_id: model.id().to_string(),
        density_id: d.kind_name().to_string(),
        lambda: f64::NAN,
        steps,
        entries: backward_induction(model, &weights, &terminal),
    }
}

/// [`dp_value`] for `ρ_λ` of a family.
pub fn dp_value_family(model: &GameModel, fam: &DensityFamily, lambda: f64, horizon_mass: f64) -> Result<ValueTable> {
    Ok(dp_value(model, &fam.density(lambda)?, horizon_mass)?.labelled(fam.id.clone(), lambda))
}

/// [`dp_value_family`] over a λ grid, in grid order.
pub fn dp_sweep(model: &GameModel, fam: &DensityFamily, lambdas: &[f64], horizon_mass: f64) -> Result<Vec<ValueTable>> {
    lambdas.par_iter().map(|&l| dp_value_family(model, fam, l, horizon_mass)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::bundled;

    #[test]
    fn single_state_brackets_cost() {
        let m = bundled::single(0.35);
        for fam in [DensityFamily::cesaro(), DensityFamily::exponential()] {
            let t = dp_value_family(&m, &fam, 0.01, 0.99).unwrap();
            assert!(t.entries[0].contains(0.35, 1e-12));
            assert!(t.max_width() <= 0.01 + 1e-12);
        }
    }

    #[test]
    fn minimizer_takes_zero() {
        let m = bundled::min_choice();
        let t = dp_value(&m, &Density::cesaro(0.1).unwrap(), 0.999).unwrap();
        // s costs 0.5 for one step, then lo forever
        assert!((t.entries[0].lo - 0.05).abs() < 1e-12 && t.entries[0].width() == 0.0);
        assert_eq!(t.entries[1].hi, 0.0);
    }

    #[test]
    fn cycle2_averages_to_half() {
        let m = bundled::cycle2();
        let t = dp_value(&m, &Density::cesaro(1e-3).unwrap(), 0.999).unwrap();
        for e in &t.entries {
            assert!((e.mid() - 0.5).abs() < 1e-3);
        }
    }

    #[test]
    fn reflection_identity() {
        let m = bundled::alt4();
        let r = m.reflect_cost();
        let d = Density::cesaro(0.5).unwrap();
        let (a, b) = (dp_value(&m, &d, 0.999).unwrap(), dp_value(&r, &d, 0.999).unwrap());
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert!((1.0 - x.hi - y.lo).abs() < 1e-12);
        }
    }

    #[test]
    fn higher_horizon_mass_never_widens() {
        let m = bundled::alt4();
        let d = Density::exponential(0.05).unwrap();
        let coarse = dp_value(&m, &d, 0.9).unwrap();
        let fine = dp_value(&m, &d, 0.999).unwrap();
        for (c, f) in coarse.entries.iter().zip(&fine.entries) {
            assert!(f.width() <= c.width());
            assert!(c.lo <= f.lo + 1e-12 && f.hi <= c.hi + 1e-12);
        }
        assert!(fine.max_width() <= 1e-3 + 1e-12);
    }
}
