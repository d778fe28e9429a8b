use super::limits::LimitEstimate;
use super::schedules::{GeometricSchedule, PartitionSchedule};
use crate::densities::{Density, DensityFamily};
use crate::error::{domain, Result};
use crate::games::{GameModel, PayoffEnclosure};
use crate::values::{backward_induction, dp_value, ValueTable};

/// Per-step weights of the rate-`c` Lebesgue measure on `[0, len)`, with the
/// final entry on the step holding `len`.
fn flat_weights(c: f64, dt: f64, len: f64) -> Vec<f64> {
    let last = (len / dt).floor() as usize;
    (0..=last)
        .map(|n| c * (((n + 1) as f64 * dt).min(len) - n as f64 * dt).max(0.0))
        .collect()
}

/// Weights of `scale · ς′(offset + t)` on the grid over `[0, len)`.
fn modified_weights(s: &PartitionSchedule, scale: f64, dt: f64, offset: f64, len: f64) -> Vec<f64> {
    let last = (len / dt).floor() as usize;
    (0..=last)
        .map(|n| {
            let a = n as f64 * dt;
            let b = ((n + 1) as f64 * dt).min(len);
            if b <= a {
                0.0
            } else {
                scale * s.modified_mass(offset + a, offset + b)
            }
        })
        .collect()
}

fn point_terminal(v: &[f64], scale: f64) -> Vec<PayoffEnclosure> {
    v.iter().map(|&x| PayoffEnclosure::point(scale * x)).collect()
}

fn lower_ends(model: &GameModel, weights: &[f64], terminal: &[PayoffEnclosure]) -> Vec<f64> {
    backward_induction(model, weights, terminal).iter().map(|e| e.lo).collect()
}

/// `min_ω (rhs − lhs)` and the state attaining it.
fn worst(lhs: &[f64], rhs: &[f64]) -> (f64, usize) {
    lhs.iter()
        .zip(rhs)
        .map(|(l, r)| r - l)
        .enumerate()
        .fold((f64::INFINITY, 0), |best, (i, m)| if m < best.0 { (m, i) } else { best })
}

/// One segment inequality of a descent chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentCheck {
    pub m: usize,
    pub start: f64,
    pub end: f64,
    /// Smallest `rhs − lhs` over states, slack included.
    pub margin: f64,
    pub worst_state: usize,
    /// Margin of the weaker form with `e^{M/k} ς′` in place of `λ_m`
    /// (partition schedules only).
    pub modified_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentReport {
    pub schedule: &'static str,
    pub segments: Vec<SegmentCheck>,
    /// Per-state margin of the telescoped bound.
    pub telescoped: Vec<f64>,
    /// Allowance added for the uncertainty of `V*`.
    pub v_star_half_width: f64,
    /// `V*` bracket too wide to be informative.
    pub inconclusive: bool,
}

impl DescentReport {
    pub fn segments_hold(&self) -> bool {
        self.segments.iter().all(|s| s.margin >= 0.0 && s.modified_margin.is_none_or(|m| m >= 0.0))
    }

    pub fn telescoped_holds(&self) -> bool {
        self.telescoped.iter().all(|&m| m >= 0.0)
    }

    pub fn passed(&self) -> bool {
        !self.inconclusive && self.segments_hold() && self.telescoped_holds()
    }
}

/// `V* ± h` is informative only when `h` is far below the chain's slack.
const HALF_WIDTH_LIMIT: f64 = 0.05;

fn check_estimate(model: &GameModel, v: &LimitEstimate) -> Result<()> {
    if v.mid.len() != model.n_states() {
        return Err(domain("limit estimate must give one value per state"));
    }
    Ok(())
}

/// Checks, for every segment `m`,
/// `V*(ω) ≤ V⁻[μ p^{1−m} ∫₀^{t_m} g + p V*(z(t_m))](ω) + 3κ`
/// and the telescoped `V* ≤ μ V⁻[1_{[0,τ_k]}] + 2/k`.
pub fn verify_geometric_chain(model: &GameModel, s: &GeometricSchedule, v: &LimitEstimate) -> Result<DescentReport> {
    check_estimate(model, v)?;
    let dt = model.dt();
    let h = v.half_width;
    let mut segments = Vec::with_capacity(s.k);
    for m in 1..=s.k {
        let rate = s.mu * s.p.powi(1 - m as i32);
        let w = flat_weights(rate, dt, s.t[m - 1]);
        let seg = lower_ends(model, &w, &point_terminal(&v.mid, s.p));
        let rhs: Vec<f64> = seg.iter().map(|x| x + 3.0 * s.kappa + (1.0 + s.p) * h).collect();
        let (margin, worst_state) = worst(&v.mid, &rhs);
        segments.push(SegmentCheck { m, start: s.tau[m - 1], end: s.tau[m], margin, worst_state, modified_margin: None });
    }
    let w = flat_weights(s.mu, dt, s.tau_k());
    let zero = vec![PayoffEnclosure::point(0.0); model.n_states()];
    let total = lower_ends(model, &w, &zero);
    let telescoped = total.iter().zip(&v.mid).map(|(t, x)| t + 2.0 / s.k as f64 + h - x).collect();
    Ok(DescentReport {
        schedule: "geometric",
        segments,
        telescoped,
        v_star_half_width: h,
        inconclusive: h > HALF_WIDTH_LIMIT,
    })
}

/// Checks, for every interval `m`,
/// `p^{m−1} V*(ω) ≤ V⁻[∫₀^{Δ_m} λ_m g + p^m V*(z(Δ_m))](ω) + 3κ`,
/// the same with `e^{M/k} ς′` in place of `λ_m`, and the telescoped
/// `V* ≤ V⁻[ς′] + 3ε`.
pub fn verify_partition_chain(model: &GameModel, s: &PartitionSchedule, v: &LimitEstimate) -> Result<DescentReport> {
    check_estimate(model, v)?;
    let dt = model.dt();
    let h = v.half_width;
    let scale = (s.m_bound / s.k as f64).exp();
    let mut segments = Vec::with_capacity(s.intervals());
    for m in 1..=s.intervals() {
        let (a, b) = (s.tau[m - 1], s.tau[m]);
        let (pm1, pm) = (s.p.powi(m as i32 - 1), s.p.powi(m as i32));
        let lhs: Vec<f64> = v.mid.iter().map(|x| pm1 * x).collect();
        let terminal = point_terminal(&v.mid, pm);
        let slack = 3.0 * s.kappa + (pm1 + pm) * h;
        let plain = lower_ends(model, &flat_weights(s.lambdas[m - 1], dt, b - a), &terminal);
        let plain: Vec<f64> = plain.iter().map(|x| x + slack).collect();
        let modified = lower_ends(model, &modified_weights(s, scale, dt, a, b - a), &terminal);
        let modified: Vec<f64> = modified.iter().map(|x| x + slack).collect();
        let (margin, worst_state) = worst(&lhs, &plain);
        let (mm, _) = worst(&lhs, &modified);
        segments.push(SegmentCheck { m, start: a, end: b, margin, worst_state, modified_margin: Some(mm) });
    }
    let mut w = s.modified_step_weights(dt);
    w.push(0.0);
    let zero = vec![PayoffEnclosure::point(0.0); model.n_states()];
    let total = lower_ends(model, &w, &zero);
    let telescoped = total.iter().zip(&v.mid).map(|(t, x)| t + 3.0 * s.eps + h - x).collect();
    Ok(DescentReport {
        schedule: "partition",
        segments,
        telescoped,
        v_star_half_width: h,
        inconclusive: h > HALF_WIDTH_LIMIT,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `V⁻ > V* − 6ε`.
    Lower,
    /// `V⁺ < V* + 6ε`, checked on the reflected model.
    Upper,
}

/// Lower bound at one scale `μ`, with the sharper margin alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub model_id: String,
    pub side: Side,
    pub mu: f64,
    pub eps: f64,
    pub values: ValueTable,
    /// Per-state distance to the stated `6ε` bound, conservative in the enclosure.
    pub margin_6eps: Vec<f64>,
    /// Same against the sharper `4ε` bound for geometric schedules (`6ε` for partitions).
    pub margin_4eps: Vec<f64>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.margin_6eps.iter().all(|&m| m > 0.0)
    }

    pub fn min_margin(&self) -> f64 {
        self.margin_6eps.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn lower_bound_report(
    model: &GameModel,
    d: &Density,
    mu: f64,
    eps: f64,
    v: &LimitEstimate,
    horizon_mass: f64,
    sharp: f64,
) -> Result<BoundReport> {
    check_estimate(model, v)?;
    let values = dp_value(model, d, horizon_mass)?.labelled(d.kind_name(), mu);
    let base: Vec<f64> = values.entries.iter().zip(&v.mid).map(|(e, x)| e.lo - (x + v.half_width)).collect();
    Ok(BoundReport {
        model_id: model.id().to_string(),
        side: Side::Lower,
        mu,
        eps,
        margin_6eps: base.iter().map(|b| b + 6.0 * eps).collect(),
        margin_4eps: base.iter().map(|b| b + sharp * eps).collect(),
        values,
    })
}

/// `V⁻[ϖ_μ](ω) > V*(ω) − 6ε` at the schedule's `μ` and `ε`.
pub fn tochi_check(model: &GameModel, s: &GeometricSchedule, v: &LimitEstimate, horizon_mass: f64) -> Result<BoundReport> {
    lower_bound_report(model, &Density::cesaro(s.mu)?, s.mu, s.eps, v, horizon_mass, 4.0)
}

/// `V⁻[ς_μ](ω) > V*(ω) − 6ε` at the schedule's `μ` and `ε`.
pub fn chito_check(
    model: &GameModel,
    fam: &DensityFamily,
    s: &PartitionSchedule,
    v: &LimitEstimate,
    horizon_mass: f64,
) -> Result<BoundReport> {
    lower_bound_report(model, &fam.density(s.mu)?, s.mu, s.eps, v, horizon_mass, 6.0)
}

/// `V⁺[ϖ_μ](ω) < V*(ω) + 6ε`, via the lower bound on the reflected model.
pub fn tochi_upper_check(model: &GameModel, s: &GeometricSchedule, v: &LimitEstimate, horizon_mass: f64) -> Result<BoundReport> {
    let reflected = model.reflect_cost();
    let mut r = tochi_check(&reflected, s, &v.reflected(), horizon_mass)?;
    r.side = Side::Upper;
    r.model_id = model.id().to_string();
    r.values.entries = r.values.entries.iter().map(|e| PayoffEnclosure { lo: 1.0 - e.hi, hi: 1.0 - e.lo }).collect();
    r.values.model_id = model.id().to_string();
    Ok(r)
}
