use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Uniform,
    Geometric,
}

/// A grid on an interval; `start` may exceed `end` for grids walking toward zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(start: f64, end: f64, n_points: usize, spacing: Spacing) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || start == end {
            return Err(domain(format!("grid endpoints must be finite and distinct, got {start}, {end}")));
        }
        if n_points < 2 {
            return Err(domain("grid needs at least 2 points"));
        }
        if spacing == Spacing::Geometric && (start <= 0.0 || end <= 0.0) {
            return Err(domain("geometric grid needs positive endpoints"));
        }
        Ok(Self { start, end, n_points, spacing })
    }

    /// The default lambda grid: 1 down to 1e-4 over 17 geometric points.
    pub fn default_lambda() -> Self {
        Self { start: 1.0, end: 1e-4, n_points: 17, spacing: Spacing::Geometric }
    }

    pub fn t_min(&self) -> f64 {
        self.start.min(self.end)
    }

    pub fn t_max(&self) -> f64 {
        self.start.max(self.end)
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.n_points;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    return self.end;
                }
                let f = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Uniform => self.start + f * (self.end - self.start),
                    Spacing::Geometric => self.start * (self.end / self.start).powf(f),
                }
            })
            .collect()
    }

    /// Parses `start:end:geomN` or `start:end:linN`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(domain(format!("grid `{s}` must look like start:end:geomN")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| domain(format!("grid `{s}`: `{p}` is not a number")))
        };
        let (start, end) = (num(parts[0])?, num(parts[1])?);
        let rule = parts[2].trim();
        let (spacing, count) = if let Some(c) = rule.strip_prefix("geom") {
            (Spacing::Geometric, c)
        } else if let Some(c) = rule.strip_prefix("lin") {
            (Spacing::Uniform, c)
        } else {
            return Err(domain(format!("grid `{s}`: spacing must be geomN or linN")));
        };
        let n = count
            .parse::<usize>()
            .map_err(|_| domain(format!("grid `{s}`: bad point count `{count}`")))?;
        Self::new(start, end, n, spacing)
    }
}

pub const DEFAULT_R_GRID: [f64; 5] = [0.5, 0.25, 0.1, 0.05, 0.01];
