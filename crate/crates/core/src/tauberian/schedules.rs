use crate::densities::{regularity_diagnostic, Density, DensityFamily};
use crate::error::{domain, Error, Result};
use crate::grid::GridSpec;
use crate::quadrature::integrate;

/// Largest `k` tried by the feasibility scans.
pub const K_CAP: usize = 10_000;
/// Headroom applied to the measured regularity bound.
pub const M_HEADROOM: f64 = 1.1;
/// Floor for the regularity bound so that constant densities are correct everywhere.
pub const M_FLOOR: f64 = 1e-3;

const QUAD_TOL: f64 = 1e-13;

/// Flatness check `∫₀^{t_m} |ρ_{λ_m} − λ_m| ≤ ε λ_m t_m` for one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatnessCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Segments of `[0, τ_k]` on which `ρ_{λ_m}` is within `1 + ε` of its initial rate.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricSchedule {
    pub family_id: String,
    pub eps: f64,
    pub mu: f64,
    /// Mass level below which the family's log-variation stays under `ε/2`.
    pub r_check: f64,
    pub k: usize,
    pub p: f64,
    pub kappa: f64,
    /// `λ_1 … λ_k`.
    pub lambdas: Vec<f64>,
    /// Segment lengths `t_1 … t_k`.
    pub t: Vec<f64>,
    /// `τ_0 = 0, τ_1, …, τ_k`.
    pub tau: Vec<f64>,
    pub flatness: Vec<FlatnessCheck>,
    /// `|p^k − 1/k|`.
    pub pk_error: f64,
    pub lambdas_below_k_mu: bool,
    /// `τ_k μ`, to be compared with `1 + 3ε`.
    pub tau_mu: f64,
    /// `μ 1_{[0,τ_k]} ≤ ϖ_μ + μ 1_{(1/μ,(1+3ε)/μ]}` on the check grid.
    pub comparison_ok: bool,
}

impl GeometricSchedule {
    pub fn tau_k(&self) -> f64 {
        *self.tau.last().unwrap()
    }

    pub fn tau_bound_ok(&self) -> bool {
        self.tau_mu < 1.0 + 3.0 * self.eps
    }

    pub fn flatness_ok(&self) -> bool {
        self.flatness.iter().all(|f| f.ok)
    }

    /// Every arithmetic invariant holds.
    pub fn valid(&self, fp_tol: f64) -> bool {
        self.pk_error <= fp_tol && self.lambdas_below_k_mu && self.tau_bound_ok() && self.flatness_ok() && self.comparison_ok
    }
}

fn max_variation(fam: &DensityFamily, lambdas: &[f64], r: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &l in lambdas {
        let d = fam.density(l)?;
        worst = worst.max(d.log_total_variation(0.0, d.quantile(r)?)?.value);
    }
    Ok(worst)
}

/// Largest `r` (by bisection) with log-variation below `bound` on `[0, q(r)]`
/// for every λ in `lambdas`.
fn flat_mass_level(fam: &DensityFamily, lambdas: &[f64], bound: f64) -> Result<f64> {
    let top = 1.0 - 1e-9;
    if max_variation(fam, lambdas, top)? < bound {
        return Ok(top);
    }
    let (mut lo, mut hi) = (0.0, top);
    if max_variation(fam, lambdas, 1e-12)? >= bound {
        return Err(Error::Infeasible(format!(
            "family `{}` has log-variation above {bound} at every mass level",
            fam.id
        )));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid <= 0.0 || max_variation(fam, lambdas, mid)? < bound {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn cesaro_value(mu: f64, t: f64) -> f64 {
    if t <= 1.0 / mu {
        mu
    } else {
        0.0
    }
}

/// Geometric schedule for a self-similar family at scale `μ`, with `0 < ε < 1/4`.
pub fn build_geometric_schedule(fam: &DensityFamily, mu: f64, eps: f64) -> Result<GeometricSchedule> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(domain(format!("ε must lie in (0, 1/4), got {eps}")));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(domain(format!("μ must be positive, got {mu}")));
    }
    if !fam.is_self_similar() {
        return Err(Error::Unsupported(format!("family `{}` is not self-similar", fam.id)));
    }
    let mut probe = GridSpec::default_lambda().points();
    probe.push(mu);
    let r_check = flat_mass_level(fam, &probe, eps / 2.0)?;

    let k_min = (2.0 / eps).max(4.0);
    let mut k = k_min.floor() as usize + 1;
    while (k as f64) <= k_min + 1e-9 {
        k += 1;
    }
    while ((k as f64).ln() / k as f64) >= r_check {
        k += 1;
        if k > K_CAP {
            return Err(Error::Infeasible(format!("no k ≤ {K_CAP} satisfies ln k / k < ř = {r_check}")));
        }
    }
    let kf = k as f64;
    let p = (-kf.ln() / kf).exp();
    let kappa = 1.0 / (3.0 * kf * kf);

    let mut lambdas = Vec::with_capacity(k);
    let mut t = Vec::with_capacity(k);
    let mut tau = vec![0.0];
    let mut flatness = Vec::with_capacity(k);
    for m in 1..=k {
        let lambda = mu * p.powi(1 - m as i32) / (1.0 + eps);
        let d = fam.density(lambda)?;
        let tm = d.quantile(1.0 - p)?;
        let (lhs, _) = integrate(|s: f64| (d.eval(s).unwrap_or(0.0) - lambda).abs(), 0.0, tm, QUAD_TOL * lambda * tm);
        let rhs = eps * lambda * tm;
        flatness.push(FlatnessCheck { lhs, rhs, ok: lhs <= rhs });
        lambdas.push(lambda);
        t.push(tm);
        tau.push(tau.last().unwrap() + tm);
    }
    let tau_k = *tau.last().unwrap();
    let outer = (1.0 + 3.0 * eps) / mu;
    let mut points: Vec<f64> = (0..=4000).map(|j| 1.05 * outer * j as f64 / 4000.0).collect();
    points.extend([tau_k, 1.0 / mu, outer]);
    let comparison_ok = points.iter().all(|&s| {
        let lhs = if s <= tau_k { mu } else { 0.0 };
        let band = if s > 1.0 / mu && s <= outer { mu } else { 0.0 };
        lhs <= cesaro_value(mu, s) + band
    });
    Ok(GeometricSchedule {
        family_id: fam.id.clone(),
        eps,
        mu,
        r_check,
        k,
        p,
        kappa,
        pk_error: (p.powi(k as i32) - 1.0 / kf).abs(),
        lambdas_below_k_mu: lambdas.iter().all(|&l| l < kf * mu),
        tau_mu: tau_k * mu,
        comparison_ok,
        lambdas,
        t,
        tau,
        flatness,
    })
}

/// `k²` intervals of equal geometric mass ratio covering `[0, T(μ)]`, with
/// the modified density `ς′`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSchedule {
    pub family_id: String,
    pub eps: f64,
    pub mu: f64,
    /// Regularity bound `M`.
    pub m_bound: f64,
    pub k: usize,
    pub kappa: f64,
    pub p: f64,
    pub delta: f64,
    /// `T(μ) = q[ς_μ](1 − ε)`.
    pub horizon: f64,
    /// `τ_0 = 0, …, τ_{k²} = T(μ)`.
    pub tau: Vec<f64>,
    /// Interval means `λ_1 … λ_{k²}`.
    pub lambdas: Vec<f64>,
    /// `Var[ln ς_μ]` per interval.
    pub variation: Vec<f64>,
    pub correct: Vec<bool>,
    pub density: Density,
    /// `|Σ_{i<k²} p^i δ − (1 − ε)|`.
    pub geometric_sum_error: f64,
    /// Mass of `ς_μ` over the incorrect intervals; `ς′` carries the same mass there.
    pub incorrect_mass: f64,
    /// `‖ς′ − ς_μ‖₁` on `[0, T(μ)]` plus the tail beyond `T(μ)`.
    pub l1_perturbation: f64,
    /// `max_m |∫ ς′ − (p^{m−1} − p^m)|` over the intervals.
    pub mean_identity_error: f64,
}

impl PartitionSchedule {
    pub fn intervals(&self) -> usize {
        self.lambdas.len()
    }

    pub fn incorrect_count(&self) -> usize {
        self.correct.iter().filter(|&&c| !c).count()
    }

    pub fn delta_ok(&self) -> bool {
        self.delta < self.eps / self.k as f64
    }

    /// Every arithmetic invariant holds.
    pub fn valid(&self, fp_tol: f64) -> bool {
        let kd = self.k as f64 * self.delta;
        self.delta_ok()
            && self.geometric_sum_error <= fp_tol
            && self.incorrect_count() <= self.k
            && self.incorrect_mass <= kd + fp_tol
            && kd < self.eps
            && self.l1_perturbation < 2.0 * self.eps
            && self.mean_identity_error <= fp_tol
    }

    fn interval_of(&self, t: f64) -> Option<usize> {
        if !(t >= 0.0 && t < self.horizon) {
            return None;
        }
        Some((self.tau.partition_point(|&x| x <= t) - 1).min(self.intervals() - 1))
    }

    /// `ς′(t)`.
    pub fn modified_value(&self, t: f64) -> f64 {
        match self.interval_of(t) {
            None => 0.0,
            Some(i) if self.correct[i] => self.density.eval(t).unwrap_or(0.0),
            Some(i) => self.lambdas[i],
        }
    }

    /// `∫ₐᵇ ς′`.
    pub fn modified_mass(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(0.0), b.min(self.horizon));
        if b <= a {
            return 0.0;
        }
        let first = self.interval_of(a).unwrap();
        let mut total = 0.0;
        for i in first..self.intervals() {
            let (lo, hi) = (self.tau[i].max(a), self.tau[i + 1].min(b));
            if hi <= lo {
                if self.tau[i] >= b {
                    break;
                }
                continue;
            }
            total += if self.correct[i] { self.density.interval_mass(lo, hi) } else { self.lambdas[i] * (hi - lo) };
        }
        total
    }

    /// `∫ ς′` over each step `[n dt, (n+1) dt)` up to `T(μ)`.
    pub fn modified_step_weights(&self, dt: f64) -> Vec<f64> {
        let steps = (self.horizon / dt).ceil() as usize;
        (0..steps).map(|n| self.modified_mass(n as f64 * dt, (n + 1) as f64 * dt)).collect()
    }
}

/// `M = 1.1 ×` the measured limsup of `Var_0^{q(1−ε)}[ln ς_λ]`, floored at [`M_FLOOR`].
pub fn measured_regularity_bound(fam: &DensityFamily, eps: f64) -> Result<f64> {
    let rep = regularity_diagnostic(fam, 1.0 - eps, &GridSpec::default_lambda().points())?;
    if !rep.regular {
        return Err(Error::Infeasible(format!("family `{}` is not regular at r = {}", fam.id, 1.0 - eps)));
    }
    Ok((M_HEADROOM * rep.limsup).max(M_FLOOR))
}

/// Partition schedule for `ς_μ`; `m_bound` defaults to [`measured_regularity_bound`].
pub fn build_partition_schedule(fam: &DensityFamily, mu: f64, eps: f64, m_bound: Option<f64>) -> Result<PartitionSchedule> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("ε must lie in (0, 1), got {eps}")));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(domain(format!("μ must be positive, got {mu}")));
    }
    let m_bound = match m_bound {
        Some(m) if m > 0.0 && m.is_finite() => m,
        Some(m) => return Err(domain(format!("regularity bound M must be positive, got {m}"))),
        None => measured_regularity_bound(fam, eps)?,
    };
    let target = -eps.ln();
    let mut k = m_bound.floor() as usize + 1;
    while !((m_bound / k as f64).exp() < 1.0 + eps && k as f64 * eps > target) {
        k += 1;
        if k > K_CAP {
            return Err(Error::Infeasible(format!(
                "no k ≤ {K_CAP} with e^(M/k) < 1 + ε and k ε > −ln ε (M = {m_bound})"
            )));
        }
    }
    let kf = k as f64;
    let k2 = k * k;
    let p = eps.powf(1.0 / (kf * kf));
    let delta = 1.0 - p;
    let kappa = eps / (3.0 * kf * kf);

    let density = fam.density(mu)?;
    let horizon = density.quantile(1.0 - eps)?;
    let mut tau = vec![0.0];
    for m in 1..k2 {
        tau.push(density.quantile(1.0 - p.powi(m as i32))?);
    }
    tau.push(horizon);

    let mut lambdas = Vec::with_capacity(k2);
    let mut variation = Vec::with_capacity(k2);
    let mut correct = Vec::with_capacity(k2);
    for m in 1..=k2 {
        let (a, b) = (tau[m - 1], tau[m]);
        if !(b > a) {
            return Err(Error::Infeasible(format!("interval {m} of the partition is empty")));
        }
        let mass = p.powi(m as i32 - 1) - p.powi(m as i32);
        lambdas.push(mass / (b - a));
        let v = density.log_total_variation(a, b)?;
        if v.is_infinite() {
            return Err(Error::VariationUndefined(a));
        }
        variation.push(v.value);
        correct.push(v.value < m_bound / kf);
    }

    let geometric_sum: f64 = (0..k2).map(|i| p.powi(i as i32) * delta).sum();
    let mut sched = PartitionSchedule {
        family_id: fam.id.clone(),
        eps,
        mu,
        m_bound,
        k,
        kappa,
        p,
        delta,
        horizon,
        tau,
        lambdas,
        variation,
        correct,
        density,
        geometric_sum_error: (geometric_sum - (1.0 - eps)).abs(),
        incorrect_mass: 0.0,
        l1_perturbation: 0.0,
        mean_identity_error: 0.0,
    };
    let mut incorrect_mass = 0.0;
    let mut l1 = sched.density.tail_mass(horizon);
    let mut mean_err: f64 = 0.0;
    for m in 1..=k2 {
        let (a, b) = (sched.tau[m - 1], sched.tau[m]);
        let expected = p.powi(m as i32 - 1) - p.powi(m as i32);
        mean_err = mean_err.max((sched.modified_mass(a, b) - expected).abs());
        if !sched.correct[m - 1] {
            incorrect_mass += sched.density.interval_mass(a, b);
            let lam = sched.lambdas[m - 1];
            let d = &sched.density;
            l1 += integrate(|t: f64| (d.eval(t).unwrap_or(0.0) - lam).abs(), a, b, QUAD_TOL).0;
        }
    }
    sched.incorrect_mass = incorrect_mass;
    sched.l1_perturbation = l1;
    sched.mean_identity_error = mean_err;
    Ok(sched)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{Generator, GeneratorTable};

    #[test]
    fn geometric_cesaro() {
        for eps in [0.1, 0.2] {
            let s = build_geometric_schedule(&DensityFamily::cesaro(), 1e-3, eps).unwrap();
            assert!(s.k as f64 > 2.0 / eps);
            assert_eq!(s.k, (2.0 / eps).round() as usize + 1);
            assert!(s.pk_error < 1e-12);
            assert!(s.tau_bound_ok() && s.comparison_ok && s.lambdas_below_k_mu);
            assert!(s.flatness.iter().all(|f| f.lhs == 0.0 || f.lhs < 1e-12 * f.rhs));
            assert!(s.valid(1e-9));
        }
    }

    #[test]
    fn geometric_exponential_needs_larger_k() {
        let eps = 0.2;
        let s = build_geometric_schedule(&DensityFamily::exponential(), 1e-3, eps).unwrap();
        // Var on [0, q(r)] is −ln(1−r), so ř = 1 − e^{−ε/2}
        assert!((s.r_check - (1.0 - (-eps / 2.0).exp())).abs() < 1e-9);
        let kf = s.k as f64;
        assert!(kf.ln() / kf < s.r_check);
        assert!((kf - 1.0).ln() / (kf - 1.0) >= s.r_check);
        assert!(s.valid(1e-9));
    }

    #[test]
    fn geometric_rejects_bad_inputs() {
        assert!(build_geometric_schedule(&DensityFamily::cesaro(), 1e-3, 0.3).is_err());
        assert!(build_geometric_schedule(&DensityFamily::fixed_bump(), 1e-3, 0.1).is_err());
        let wobble = DensityFamily::generated("w", Generator::SinSquared { amp: 50.0, freq: 40.0 }).unwrap();
        assert!(matches!(build_geometric_schedule(&wobble, 1e-3, 0.2), Err(Error::Infeasible(_))));
    }

    #[test]
    fn partition_exponential_all_correct() {
        for eps in [0.1, 0.2] {
            let s = build_partition_schedule(&DensityFamily::exponential(), 1e-3, eps, None).unwrap();
            assert!((s.m_bound - 1.1 * -eps.ln()).abs() < 1e-9);
            assert!(s.k as f64 > s.m_bound);
            assert_eq!(s.incorrect_count(), 0);
            for (v, _) in s.variation.iter().zip(&s.lambdas) {
                assert!((v - (-s.p.ln())).abs() < 1e-9);
            }
            assert!(s.mean_identity_error <= 1e-9);
            assert!(s.valid(1e-9), "{s:?}");
        }
    }

    #[test]
    fn partition_cesaro_keeps_density() {
        let s = build_partition_schedule(&DensityFamily::cesaro(), 1e-2, 0.2, None).unwrap();
        assert_eq!(s.incorrect_count(), 0);
        for t in [0.0, 10.0, 55.5, 79.9] {
            assert_eq!(s.modified_value(t), 1e-2);
        }
        assert_eq!(s.modified_value(80.0 + 1e-9), 0.0);
        let w = s.modified_step_weights(1.0);
        assert!((w.iter().sum::<f64>() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn partition_with_incorrect_intervals() {
        // generator steps from 20 down to 1 near s = 2, so ς jumps up near t = T − 2
        let table = GeneratorTable::new(&[(0.0, 20.0), (2.0, 20.0), (2.001, 1.0), (10.0, 1.0)]).unwrap();
        let fam = DensityFamily::generated("step", Generator::Table(table)).unwrap();
        let (mu, eps) = (0.2, 0.3);
        let d = fam.density(mu).unwrap();
        let total = d.log_total_variation(0.0, d.quantile(1.0 - eps).unwrap()).unwrap().value;
        assert!((total - 20f64.ln()).abs() < 1e-6);
        let s = build_partition_schedule(&fam, mu, eps, Some(1.1 * total)).unwrap();
        assert!(s.incorrect_count() >= 1 && s.incorrect_count() <= s.k);
        assert!(s.mean_identity_error <= 1e-9);
        for (i, &c) in s.correct.iter().enumerate() {
            let mid = 0.5 * (s.tau[i] + s.tau[i + 1]);
            if !c {
                assert_eq!(s.modified_value(mid), s.lambdas[i]);
            } else {
                assert_eq!(s.modified_value(mid), d.eval(mid).unwrap());
            }
        }
        assert!(s.valid(1e-9), "{s:?}");
    }
}
