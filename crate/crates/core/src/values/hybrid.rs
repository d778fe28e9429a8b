use super::dp::{backward_induction, dp_value, ValueTable};
use crate::densities::{Density, DensityFamily};
use crate::error::{domain, Result};
use crate::games::{segment_weights, GameModel};

/// Value of the hybrid payoff `∫₀^q ρ_λ g(z) + V⁺[ρ̄](z(q))` with `q = q[ρ_λ](r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridValue {
    pub table: ValueTable,
    pub q: f64,
    /// Step whose state carries the terminal value, `⌊q/dt⌋`.
    pub terminal_step: usize,
    /// `q − terminal_step · dt`; the prefix integral uses exact partial weights.
    pub rounding_offset: f64,
    /// Rescaled parameter when the terminal uses `(1 − r) V⁺[ρ_ν]`.
    pub nu: Option<f64>,
    pub terminal: ValueTable,
}

/// Terminal values at `z(q)`: `(1 − r)` times the value under `ρ_ν` for
/// self-similar families, the shifted sub-density otherwise.
pub fn hybrid_terminal(
    model: &GameModel,
    fam: &DensityFamily,
    lambda: f64,
    r: f64,
    horizon_mass: f64,
) -> Result<(ValueTable, Option<f64>)> {
    if fam.is_self_similar() {
        let nu = fam.nu(lambda, r)?;
        let t = dp_value(model, &fam.density(nu)?, horizon_mass)?;
        let entries = t.entries.iter().map(|e| e.scale(1.0 - r)).collect();
        Ok((ValueTable { entries, ..t.labelled(fam.id.clone(), nu) }, Some(nu)))
    } else {
        let shifted = fam.density(lambda)?.shift_by_quantile(r)?;
        let t = dp_value(model, &shifted, horizon_mass)?;
        Ok((t.labelled(format!("{}~shifted", fam.id), lambda), None))
    }
}

/// Game value of the hybrid payoff for `ρ_λ` split at mass `r`.
pub fn hybrid_value(model: &GameModel, fam: &DensityFamily, lambda: f64, r: f64, horizon_mass: f64) -> Result<HybridValue> {
    if !(r > 0.0 && r < 1.0) {
        return Err(domain(format!("split mass r must lie in (0, 1), got {r}")));
    }
    let d = fam.density(lambda)?;
    let q = d.quantile(r)?;
    let (terminal, nu) = hybrid_terminal(model, fam, lambda, r, horizon_mass)?;
    let (first, weights) = segment_weights(&d, model.dt(), 0.0, q);
    debug_assert_eq!(first, 0);
    let entries = backward_induction(model, &weights, &terminal.entries);
    let terminal_step = weights.len() - 1;
    let table = ValueTable {
        model_id: model.id().to_string(),
        density_id: format!("{}~hybrid", fam.id),
        lambda,
        steps: terminal_step + terminal.steps,
        entries,
    };
    Ok(HybridValue {
        table,
        q,
        terminal_step,
        rounding_offset: q - terminal_step as f64 * model.dt(),
        nu,
        terminal,
    })
}

/// Direct value under `ϖ_λ` and the two-segment composition split at step
/// `split`, where the suffix is the rescaled Cesàro game.
pub fn bellman_split(model: &GameModel, lambda: f64, split: usize) -> Result<(ValueTable, ValueTable)> {
    let r = lambda * split as f64 * model.dt();
    if !(r > 0.0 && r < 1.0) {
        return Err(domain("split point must fall inside the Cesàro support"));
    }
    let direct = dp_value(model, &Density::cesaro(lambda)?, 0.999)?;
    let fam = DensityFamily::cesaro();
    let composed = hybrid_value(model, &fam, lambda, r, 0.999)?;
    Ok((direct, composed.table))
}
