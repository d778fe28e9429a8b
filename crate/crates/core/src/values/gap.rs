use super::brute::lower_upper_bruteforce;
use super::dp::dp_value_family;
use crate::densities::DensityFamily;
use crate::error::Result;
use crate::games::GameModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapMode {
    /// Exhaustive sup-inf against inf-sup over this many steps.
    Brute { horizon: usize },
    /// Enclosure width of the backward induction.
    Dp { horizon_mass: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleGapReport {
    pub model_id: String,
    pub family_id: String,
    pub mode: GapMode,
    /// `(λ, sup_ω gap)` in grid order.
    pub rows: Vec<(f64, f64)>,
    /// Gap never increases along the grid (within 1e-12).
    pub nonincreasing: bool,
}

/// `sup_ω` distance between the upper and lower values along a λ grid.
///
/// In brute mode both values are truncated identically and the point values
/// are compared; in DP mode the enclosure width bounds the gap.
pub fn saddle_gap(model: &GameModel, fam: &DensityFamily, lambdas: &[f64], mode: GapMode) -> Result<SaddleGapReport> {
    let mut rows = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let gap = match mode {
            GapMode::Brute { horizon } => {
                let (lo, up) = lower_upper_bruteforce(model, &fam.density(l)?, horizon)?;
                lo.entries.iter().zip(&up.entries).map(|(a, b)| (b.lo - a.lo).abs()).fold(0.0, f64::max)
            }
            GapMode::Dp { horizon_mass } => dp_value_family(model, fam, l, horizon_mass)?.max_width(),
        };
        rows.push((l, gap));
    }
    let nonincreasing = rows.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    Ok(SaddleGapReport {
        model_id: model.id().to_string(),
        family_id: fam.id.clone(),
        mode,
        rows,
        nonincreasing,
    })
}
