use crate::error::{domain, Result};

/// A unit-step signal: a finite prefix followed by a repeating block.
#[derive(Debug, Clone, PartialEq)]
pub struct EventuallyPeriodic {
    prefix: Vec<f64>,
    period: Vec<f64>,
}

impl EventuallyPeriodic {
    pub fn new(prefix: Vec<f64>, period: Vec<f64>) -> Result<Self> {
        if period.is_empty() {
            return Err(domain("signal needs a nonempty periodic tail"));
        }
        if prefix.iter().chain(&period).any(|v| !(0.0..=1.0).contains(v)) {
            return Err(domain("signal values must lie in [0, 1]"));
        }
        Ok(Self { prefix, period })
    }

    pub fn periodic(period: Vec<f64>) -> Result<Self> {
        Self::new(Vec::new(), period)
    }

    /// Average over one period, the common limit of both means.
    pub fn period_mean(&self) -> f64 {
        self.period.iter().sum::<f64>() / self.period.len() as f64
    }

    fn at(&self, n: usize) -> f64 {
        match self.prefix.get(n) {
            Some(&v) => v,
            None => self.period[(n - self.prefix.len()) % self.period.len()],
        }
    }

    /// `∫₀ᵀ s(t) dt`.
    pub fn integral(&self, t: f64) -> f64 {
        let whole = t.floor() as usize;
        let mut sum = 0.0;
        let head = whole.min(self.prefix.len());
        sum += self.prefix[..head].iter().sum::<f64>();
        if whole > head {
            let rest = whole - head;
            let p = self.period.len();
            sum += (rest / p) as f64 * self.period.iter().sum::<f64>();
            sum += self.period[..rest % p].iter().sum::<f64>();
        }
        sum + (t - whole as f64) * self.at(whole)
    }

    /// `(1/T) ∫₀ᵀ s`.
    pub fn cesaro_mean(&self, t: f64) -> f64 {
        self.integral(t) / t
    }

    /// `λ ∫₀^∞ e^{−λt} s(t) dt`, summed in closed form over the periodic tail.
    pub fn abel_mean(&self, lambda: f64) -> f64 {
        let step = -(-lambda).exp_m1();
        let disc = |n: usize| (-lambda * n as f64).exp();
        let head: f64 = self.prefix.iter().enumerate().map(|(n, v)| v * disc(n)).sum();
        let block: f64 = self.period.iter().enumerate().map(|(j, v)| v * disc(j)).sum();
        let tail = disc(self.prefix.len()) * block / -(-lambda * self.period.len() as f64).exp_m1();
        step * (head + tail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyReport {
    pub lambdas: Vec<f64>,
    /// Mean over `[0, 1/λ]` per λ.
    pub cesaro: Vec<f64>,
    pub abel: Vec<f64>,
    pub cesaro_limit: f64,
    pub abel_limit: f64,
    pub closed_form: f64,
    pub difference: f64,
}

/// Cesàro and Abel means of one trajectory along a decreasing λ grid.
pub fn hardy_single_trajectory(signal: &EventuallyPeriodic, lambdas: &[f64]) -> Result<HardyReport> {
    if lambdas.is_empty() || lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(domain("λ grid must be nonempty and positive"));
    }
    let cesaro: Vec<f64> = lambdas.iter().map(|&l| signal.cesaro_mean(1.0 / l)).collect();
    let abel: Vec<f64> = lambdas.iter().map(|&l| signal.abel_mean(l)).collect();
    let (c, a) = (*cesaro.last().unwrap(), *abel.last().unwrap());
    Ok(HardyReport {
        lambdas: lambdas.to_vec(),
        cesaro,
        abel,
        cesaro_limit: c,
        abel_limit: a,
        closed_form: signal.period_mean(),
        difference: (c - a).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_abel(s: &EventuallyPeriodic, lambda: f64) -> f64 {
        (0..200_000).map(|n| s.at(n) * ((-lambda * n as f64).exp() - (-lambda * (n + 1) as f64).exp())).sum()
    }

    #[test]
    fn constant_signal() {
        let s = EventuallyPeriodic::periodic(vec![0.3]).unwrap();
        let r = hardy_single_trajectory(&s, &[0.1, 1e-4]).unwrap();
        assert!((r.cesaro_limit - 0.3).abs() < 1e-12 && (r.abel_limit - 0.3).abs() < 1e-12);
    }

    #[test]
    fn periodic_limits() {
        for (period, limit) in [(vec![0.0, 1.0], 0.5), (vec![1.0, 0.0, 0.0], 1.0 / 3.0)] {
            let s = EventuallyPeriodic::periodic(period).unwrap();
            let r = hardy_single_trajectory(&s, &[1e-2, 1e-3, 1e-4]).unwrap();
            assert!((r.cesaro_limit - limit).abs() < 1e-3);
            assert!((r.abel_limit - limit).abs() < 1e-3);
        }
    }

    #[test]
    fn closed_forms_match_direct_sums() {
        let s = EventuallyPeriodic::new(vec![1.0, 0.25, 0.5], vec![0.0, 1.0, 1.0, 0.5]).unwrap();
        for lambda in [0.5, 0.05, 0.001] {
            assert!((s.abel_mean(lambda) - brute_abel(&s, lambda)).abs() < 1e-9);
        }
        let direct: f64 = (0..17).map(|n| s.at(n)).sum::<f64>() + 0.4 * s.at(17);
        assert!((s.integral(17.4) - direct).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_signals() {
        assert!(EventuallyPeriodic::new(vec![0.5], vec![]).is_err());
        assert!(EventuallyPeriodic::periodic(vec![1.5]).is_err());
    }
}
