use std::sync::Arc;

use super::generator::Generator;
use crate::error::{domain, Error, Result};

/// Absolute tolerance for integrals of densities.
pub const QUAD_TOL: f64 = 1e-10;
/// Mass-coordinate tolerance for quantile searches.
pub const QUANTILE_TOL: f64 = 1e-10;

const MAX_DOUBLINGS: u32 = 1000;

/// A nonnegative function on `[0, ∞)` with cumulative-mass and quantile access.
///
/// Base kinds have total mass 1. `Shifted` is the tail `t ↦ ρ(t + q)` and
/// carries the leftover sub-probability mass.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    /// `λ 1_{[0, 1/λ]}`
    Cesaro { rate: f64 },
    /// `λ e^{-λt}`
    Exponential { rate: f64 },
    /// `f(T - t) 1_{[0,T]}(t) / ∫₀ᵀ f`
    Generated { generator: Arc<Generator>, horizon: f64 },
    Tabulated(Arc<Tabulated>),
    Shifted { base: Arc<Density>, offset: f64 },
}

/// Piecewise-constant density: `values[i]` on `[knots[i], knots[i+1])`, zero past the last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    knots: Vec<f64>,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Tabulated {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() + 1 || values.is_empty() {
            return Err(domain("tabulated density needs one more knot than values"));
        }
        if knots[0] != 0.0 {
            return Err(domain("tabulated density must start at t = 0"));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("tabulated knots must be strictly increasing"));
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(domain("tabulated values must be finite and nonnegative"));
        }
        let mut cumulative = vec![0.0];
        for i in 0..values.len() {
            cumulative.push(cumulative[i] + values[i] * (knots[i + 1] - knots[i]));
        }
        let total = *cumulative.last().unwrap();
        if (total - 1.0).abs() > 1e-9 {
            return Err(domain(format!("tabulated density has total mass {total}, expected 1")));
        }
        Ok(Self { knots, values, cumulative })
    }

    /// Builds from `(knot, value)` pairs; the last pair marks the support end and its value must be 0.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        if !matches!(pairs.last(), Some(&(_, 0.0))) {
            return Err(domain("last tabulated knot must carry value 0 (support end)"));
        }
        let knots = pairs.iter().map(|p| p.0).collect();
        let values = pairs[..pairs.len() - 1].iter().map(|p| p.1).collect();
        Self::new(knots, values)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn right(&self, t: f64) -> f64 {
        if t >= *self.knots.last().unwrap() {
            return 0.0;
        }
        self.values[self.knots.partition_point(|&k| k <= t) - 1]
    }

    fn left(&self, t: f64) -> f64 {
        if t <= 0.0 || t > *self.knots.last().unwrap() {
            return 0.0;
        }
        self.values[self.knots.partition_point(|&k| k < t) - 1]
    }

    fn mass(&self, t: f64) -> f64 {
        let end = *self.knots.last().unwrap();
        if t >= end {
            return *self.cumulative.last().unwrap();
        }
        let i = self.knots.partition_point(|&k| k <= t) - 1;
        self.cumulative[i] + self.values[i] * (t - self.knots[i])
    }
}

/// Total variation of `ln ρ` over a half-open interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogVariation {
    /// `+∞` when the density vanishes somewhere in the interval.
    pub value: f64,
    /// Computed from monotone pieces rather than a sampled grid.
    pub exact: bool,
    /// Grid refinement settled (always true for exact results).
    pub converged: bool,
}

impl LogVariation {
    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

impl Density {
    pub fn cesaro(rate: f64) -> Result<Self> {
        check_rate(rate)?;
        Ok(Density::Cesaro { rate })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        check_rate(rate)?;
        Ok(Density::Exponential { rate })
    }

    pub fn generated(generator: Arc<Generator>, horizon: f64) -> Result<Self> {
        generator.validate()?;
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(domain(format!("generated density needs a positive horizon, got {horizon}")));
        }
        Ok(Density::Generated { generator, horizon })
    }

    pub fn tabulated(table: Tabulated) -> Self {
        Density::Tabulated(Arc::new(table))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Density::Cesaro { .. } => "cesaro",
            Density::Exponential { .. } => "exponential",
            Density::Generated { .. } => "generated",
            Density::Tabulated(_) => "tabulated",
            Density::Shifted { .. } => "shifted",
        }
    }

    /// `ρ(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.value_at(t))
    }

    pub(crate) fn value_at(&self, t: f64) -> f64 {
        match self {
            Density::Cesaro { rate } => {
                if t <= 1.0 / rate {
                    *rate
                } else {
                    0.0
                }
            }
            Density::Exponential { rate } => rate * (-rate * t).exp(),
            Density::Generated { generator, horizon } => {
                if t <= *horizon {
                    generator.density_ratio(horizon - t, *horizon)
                } else {
                    0.0
                }
            }
            Density::Tabulated(tab) => tab.right(t),
            Density::Shifted { base, offset } => base.value_at(t + offset),
        }
    }

    /// Right limit `ρ(t+)`.
    pub(crate) fn right_limit(&self, t: f64) -> f64 {
        match self {
            Density::Cesaro { rate } => {
                if t < 1.0 / rate {
                    *rate
                } else {
                    0.0
                }
            }
            Density::Generated { horizon, .. } if t >= *horizon => 0.0,
            Density::Tabulated(tab) => tab.right(t),
            Density::Shifted { base, offset } => base.right_limit(t + offset),
            _ => self.value_at(t),
        }
    }

    /// Left limit `ρ(t-)` for `t > 0`.
    pub(crate) fn left_limit(&self, t: f64) -> f64 {
        match self {
            Density::Tabulated(tab) => tab.left(t),
            Density::Shifted { base, offset } => base.left_limit(t + offset),
            _ => self.value_at(t),
        }
    }

    /// `∫ₐᵇ ρ` for `0 ≤ a ≤ b`.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            Density::Cesaro { rate } => {
                let end = 1.0 / rate;
                rate * (b.min(end) - a.min(end))
            }
            Density::Exponential { rate } => {
                // e^{-λa} - e^{-λb}
                (-rate * a).exp() * (-(-rate * (b - a)).exp_m1())
            }
            Density::Generated { generator, horizon } => {
                let (a, b) = (a.min(*horizon), b.min(*horizon));
                if b <= a {
                    0.0
                } else {
                    generator.mass_ratio(horizon - b, horizon - a, *horizon)
                }
            }
            Density::Tabulated(tab) => tab.mass(b) - tab.mass(a),
            Density::Shifted { base, offset } => base.interval_mass(a + offset, b + offset),
        }
    }

    /// `∫₀ᵀ ρ`.
    pub fn mass(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.interval_mass(0.0, t))
    }

    /// Mass over `[0, ∞)`.
    pub fn total_mass(&self) -> f64 {
        match self {
            Density::Shifted { base, offset } => base.total_mass() - base.interval_mass(0.0, *offset),
            Density::Tabulated(tab) => *tab.cumulative.last().unwrap(),
            _ => 1.0,
        }
    }

    /// Mass over `[t, ∞)`, computed without cancellation for the closed forms.
    pub fn tail_mass(&self, t: f64) -> f64 {
        match self {
            Density::Exponential { rate } => (-rate * t).exp(),
            Density::Shifted { base, offset } => base.tail_mass(t + offset),
            _ => match self.support_end() {
                Some(end) if t >= end => 0.0,
                Some(end) => self.interval_mass(t, end),
                None => (self.total_mass() - self.interval_mass(0.0, t)).max(0.0),
            },
        }
    }

    /// Right end of the support, if bounded.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            Density::Cesaro { rate } => Some(1.0 / rate),
            Density::Exponential { .. } => None,
            Density::Generated { horizon, .. } => Some(*horizon),
            Density::Tabulated(tab) => tab.knots.last().copied(),
            Density::Shifted { base, offset } => base.support_end().map(|e| (e - offset).max(0.0)),
        }
    }

    /// Minimal `q` with `∫₀^q ρ = r`.
    ///
    /// `r` is an absolute mass level; for shifted densities it must stay below
    /// the remaining total mass.
    pub fn quantile(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r < 1.0) {
            return Err(domain(format!("quantile level must lie in (0, 1), got {r}")));
        }
        let mut hi = 1.0f64;
        let mut doublings = 0;
        while self.interval_mass(0.0, hi) < r {
            hi *= 2.0;
            doublings += 1;
            if doublings > MAX_DOUBLINGS || !hi.is_finite() {
                return Err(Error::UnreachableQuantile { r, horizon: hi });
            }
        }
        let mut lo = 0.0f64;
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.interval_mass(0.0, mid) >= r {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let reached = self.interval_mass(0.0, hi);
        if (reached - r).abs() > QUANTILE_TOL {
            // only possible when ρ has an atom-like jump in mass, which the kinds exclude
            return Err(Error::UnreachableQuantile { r, horizon: hi });
        }
        Ok(hi)
    }

    /// `t ↦ ρ(t + q[ρ](r))`, a sub-probability density of mass `1 - r`.
    pub fn shift_by_quantile(&self, r: f64) -> Result<Density> {
        let q = self.quantile(r)?;
        Ok(Density::Shifted { base: Arc::new(self.clone()), offset: q })
    }

    /// Points in `(a, b)` where `ln ρ` may jump or switch monotonicity.
    /// `None` if the kind does not expose its structure.
    fn breakpoints(&self, a: f64, b: f64) -> Option<Vec<f64>> {
        let inside = |x: f64| x > a && x < b;
        match self {
            Density::Cesaro { rate } => Some([1.0 / rate].into_iter().filter(|&x| inside(x)).collect()),
            Density::Exponential { .. } => Some(Vec::new()),
            Density::Generated { generator, horizon } => {
                let mut pts: Vec<f64> = generator
                    .turning_points(horizon - b, horizon - a)
                    .into_iter()
                    .map(|s| horizon - s)
                    .filter(|&x| inside(x))
                    .collect();
                if inside(*horizon) {
                    pts.push(*horizon);
                }
                pts.sort_by(f64::total_cmp);
                Some(pts)
            }
            Density::Tabulated(_) => None,
            Density::Shifted { base, offset } => base
                .breakpoints(a + offset, b + offset)
                .map(|v| v.into_iter().map(|x| x - offset).filter(|&x| inside(x)).collect()),
        }
    }

    /// Total variation of `ln ρ` on `[a, b)`.
    ///
    /// Exact when the kind exposes monotone pieces; otherwise a refined grid sum.
    pub fn log_total_variation(&self, a: f64, b: f64) -> Result<LogVariation> {
        check_time(a)?;
        if !(a < b) {
            return Err(domain(format!("variation interval needs a < b, got [{a}, {b})")));
        }
        match self.breakpoints(a, b) {
            Some(pts) => Ok(self.exact_log_variation(a, b, &pts)),
            None => Ok(self.refined_grid_variation(a, b)),
        }
    }

    fn exact_log_variation(&self, a: f64, b: f64, interior: &[f64]) -> LogVariation {
        let mut nodes = Vec::with_capacity(interior.len() + 2);
        nodes.push(a);
        nodes.extend_from_slice(interior);
        nodes.push(b);
        let mut total = 0.0;
        for (i, w) in nodes.windows(2).enumerate() {
            let start = self.right_limit(w[0]);
            let end = self.left_limit(w[1]);
            if !(start > 0.0 && end > 0.0) {
                return LogVariation { value: f64::INFINITY, exact: true, converged: true };
            }
            total += (end.ln() - start.ln()).abs();
            if i > 0 {
                let before = self.left_limit(w[0]);
                total += (start.ln() - before.ln()).abs();
            }
        }
        LogVariation { value: total, exact: true, converged: true }
    }

    fn refined_grid_variation(&self, a: f64, b: f64) -> LogVariation {
        let mut n = 64;
        let mut prev = log_variation_grid(self, a, b, n);
        while n < (1 << 18) {
            n *= 2;
            let next = log_variation_grid(self, a, b, n);
            if next.is_infinite() {
                return LogVariation { value: next, exact: false, converged: true };
            }
            if (next - prev).abs() <= 1e-12 * next.max(1.0) {
                return LogVariation { value: next, exact: false, converged: true };
            }
            prev = next;
        }
        LogVariation { value: prev, exact: false, converged: false }
    }
}

/// Grid-sum lower estimate of `Var_a^b[ln ρ]` with `n` uniform cells.
///
/// Samples right values at `a + jh` and the left limit at `b`.
pub fn log_variation_grid(d: &Density, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut prev = d.right_limit(a);
    if prev <= 0.0 {
        return f64::INFINITY;
    }
    let mut total = 0.0;
    for j in 1..=n {
        let v = if j == n { d.left_limit(b) } else { d.right_limit(a + j as f64 * h) };
        if v <= 0.0 {
            return f64::INFINITY;
        }
        total += (v.ln() - prev.ln()).abs();
        prev = v;
    }
    total
}

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("rate must be positive and finite, got {rate}")))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("time must be finite and nonnegative, got {t}")))
    }
}
