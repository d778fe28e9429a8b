use crate::error::{domain, Result};

/// A strictly positive generator `f` on `[0, ∞)` for the self-similar family
/// `ρ_{1/T}(t) = f(T - t) 1_{[0,T]}(t) / ∫₀ᵀ f`.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Constant(f64),
    /// `a + b s`
    Affine { intercept: f64, slope: f64 },
    /// `e^{rate s}`
    Exp { rate: f64 },
    /// `1 + amp sin²(freq s)`
    SinSquared { amp: f64, freq: f64 },
    /// Piecewise-linear through `(knot, value)` pairs, constant past the last knot.
    Table(GeneratorTable),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorTable {
    knots: Vec<f64>,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl GeneratorTable {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(domain("generator table needs at least one (knot, value) pair"));
        }
        if points[0].0 != 0.0 {
            return Err(domain("generator table must start at knot 0"));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(domain("generator knots must be strictly increasing"));
            }
        }
        if let Some(&(s, v)) = points.iter().find(|p| !(p.1 > 0.0 && p.1.is_finite())) {
            return Err(domain(format!("generator value at knot {s} must be positive, got {v}")));
        }
        let knots: Vec<f64> = points.iter().map(|p| p.0).collect();
        let values: Vec<f64> = points.iter().map(|p| p.1).collect();
        let mut cumulative = vec![0.0];
        for i in 1..knots.len() {
            let seg = 0.5 * (values[i - 1] + values[i]) * (knots[i] - knots[i - 1]);
            cumulative.push(cumulative[i - 1] + seg);
        }
        Ok(Self { knots, values, cumulative })
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.knots.iter().copied().zip(self.values.iter().copied())
    }

    fn segment(&self, s: f64) -> usize {
        self.knots.partition_point(|&k| k <= s).saturating_sub(1)
    }

    fn value(&self, s: f64) -> f64 {
        let i = self.segment(s);
        if i + 1 >= self.knots.len() {
            return self.values[i];
        }
        let f = (s - self.knots[i]) / (self.knots[i + 1] - self.knots[i]);
        self.values[i] + f * (self.values[i + 1] - self.values[i])
    }

    fn integral(&self, s: f64) -> f64 {
        let i = self.segment(s);
        let ds = s - self.knots[i];
        self.cumulative[i] + 0.5 * ds * (self.values[i] + self.value(s))
    }
}

impl Generator {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Generator::Constant(c) => c > 0.0 && c.is_finite(),
            Generator::Affine { intercept, slope } => intercept > 0.0 && slope >= 0.0 && slope.is_finite(),
            Generator::Exp { rate } => rate.is_finite(),
            Generator::SinSquared { amp, freq } => amp >= 0.0 && freq > 0.0 && amp.is_finite() && freq.is_finite(),
            Generator::Table(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(domain(format!("generator {self:?} is not strictly positive on [0, inf)")))
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match self {
            Generator::Constant(c) => *c,
            Generator::Affine { intercept, slope } => intercept + slope * s,
            Generator::Exp { rate } => (rate * s).exp(),
            Generator::SinSquared { amp, freq } => 1.0 + amp * (freq * s).sin().powi(2),
            Generator::Table(t) => t.value(s),
        }
    }

    /// `∫₀ˢ f`.
    pub fn integral(&self, s: f64) -> f64 {
        match self {
            Generator::Constant(c) => c * s,
            Generator::Affine { intercept, slope } => intercept * s + 0.5 * slope * s * s,
            Generator::Exp { rate } => {
                if *rate == 0.0 {
                    s
                } else {
                    (rate * s).exp_m1() / rate
                }
            }
            Generator::SinSquared { amp, freq } => {
                s + amp * (0.5 * s - (2.0 * freq * s).sin() / (4.0 * freq))
            }
            Generator::Table(t) => t.integral(s),
        }
    }

    /// `∫ᵤᵛ f / ∫₀ᵀ f`, stable for large `T`.
    pub(crate) fn mass_ratio(&self, u: f64, v: f64, horizon: f64) -> f64 {
        match self {
            Generator::Exp { rate } if *rate > 0.0 => {
                // e^{a(v-T)} (1 - e^{-a(v-u)}) / (1 - e^{-aT})
                let a = *rate;
                (a * (v - horizon)).exp() * (-(-a * (v - u)).exp_m1()) / (-(-a * horizon).exp_m1())
            }
            _ => (self.integral(v) - self.integral(u)) / self.integral(horizon),
        }
    }

    /// `f(s) / ∫₀ᵀ f`, stable for large `T`.
    pub(crate) fn density_ratio(&self, s: f64, horizon: f64) -> f64 {
        match self {
            Generator::Exp { rate } if *rate > 0.0 => {
                let a = *rate;
                a * (a * (s - horizon)).exp() / (-(-a * horizon).exp_m1())
            }
            _ => self.value(s) / self.integral(horizon),
        }
    }

    /// Points in `(a, b)` where `f` may switch between increasing and decreasing.
    pub fn turning_points(&self, a: f64, b: f64) -> Vec<f64> {
        match self {
            Generator::Constant(_) | Generator::Affine { .. } | Generator::Exp { .. } => Vec::new(),
            Generator::SinSquared { freq, amp } => {
                if *amp == 0.0 {
                    return Vec::new();
                }
                // extrema of sin² at multiples of π/(2 freq)
                let step = std::f64::consts::FRAC_PI_2 / freq;
                let first = (a / step).floor() as i64 + 1;
                let mut out = Vec::new();
                let mut j = first.max(0);
                loop {
                    let x = j as f64 * step;
                    if x >= b {
                        break;
                    }
                    if x > a {
                        out.push(x);
                    }
                    j += 1;
                }
                out
            }
            Generator::Table(t) => t.knots.iter().copied().filter(|&k| k > a && k < b).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    fn check_integral(g: &Generator, s: f64) {
        let (q, _) = integrate(|x| g.value(x), 0.0, s, 1e-12);
        assert!((g.integral(s) - q).abs() < 1e-9 * q.max(1.0), "{g:?} at {s}: {} vs {q}", g.integral(s));
    }

    #[test]
    fn integrals_match_quadrature() {
        check_integral(&Generator::Constant(2.0), 3.0);
        check_integral(&Generator::Affine { intercept: 1.0, slope: 1.0 }, 7.5);
        check_integral(&Generator::Exp { rate: 1.0 }, 5.0);
        check_integral(&Generator::Exp { rate: -0.5 }, 5.0);
        check_integral(&Generator::SinSquared { amp: 0.5, freq: 1.3 }, 9.0);
        let t = GeneratorTable::new(&[(0.0, 1.0), (2.0, 3.0), (5.0, 0.5)]).unwrap();
        let g = Generator::Table(t);
        check_integral(&g, 1.3);
        check_integral(&g, 4.0);
        check_integral(&g, 8.0);
    }

    #[test]
    fn stable_exp_ratio() {
        let g = Generator::Exp { rate: 1.0 };
        // huge horizon: the plain formula overflows
        let r = g.mass_ratio(1e4 - 1.0, 1e4, 1e4);
        assert!((r - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        assert!((g.density_ratio(1e4, 1e4) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn table_validation() {
        assert!(GeneratorTable::new(&[]).is_err());
        assert!(GeneratorTable::new(&[(1.0, 1.0)]).is_err());
        assert!(GeneratorTable::new(&[(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(GeneratorTable::new(&[(0.0, 1.0), (1.0, 0.0)]).is_err());
        assert!(Generator::Affine { intercept: 1.0, slope: -1.0 }.validate().is_err());
    }

    #[test]
    fn sin_turning_points() {
        let g = Generator::SinSquared { amp: 1.0, freq: 1.0 };
        let pts = g.turning_points(0.0, 4.0);
        let h = std::f64::consts::FRAC_PI_2;
        assert_eq!(pts.len(), 2);
        assert!((pts[0] - h).abs() < 1e-15 && (pts[1] - 2.0 * h).abs() < 1e-15);
    }
}
