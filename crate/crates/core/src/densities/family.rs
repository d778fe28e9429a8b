use std::sync::Arc;

use super::density::Density;
use super::generator::Generator;
use crate::error::{domain, Error, Result};

/// Residual bound for accepting a self-similar decomposition.
pub const DECOMPOSITION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// `ϖ_λ = λ 1_{[0,1/λ]}`
    Cesaro,
    /// `π_λ = λ e^{-λt}`
    Exponential,
    /// `ρ_{1/T}(t) = f(T - t) 1_{[0,T]}(t) / ∫₀ᵀ f`
    Generated(Arc<Generator>),
    /// The same density for every parameter (not self-similar).
    Fixed(Density),
}

/// Claims recorded with a family, checked against the diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FamilyClaims {
    pub flat_at_zero: Option<bool>,
    pub regular: Option<bool>,
}

/// A λ-indexed family of densities.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFamily {
    pub id: String,
    pub kind: FamilyKind,
    pub claims: FamilyClaims,
}

/// Output of a self-similar decomposition `ρ̄_λʳ = h ρ_ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub h: f64,
    pub nu: f64,
    /// Sup-norm gap on the test grid.
    pub residual: f64,
    pub ok: bool,
}

impl DensityFamily {
    pub fn cesaro() -> Self {
        Self {
            id: "cesaro".into(),
            kind: FamilyKind::Cesaro,
            claims: FamilyClaims { flat_at_zero: Some(true), regular: Some(true) },
        }
    }

    pub fn exponential() -> Self {
        Self {
            id: "exp".into(),
            kind: FamilyKind::Exponential,
            claims: FamilyClaims { flat_at_zero: Some(true), regular: Some(true) },
        }
    }

    pub fn generated(id: impl Into<String>, generator: Generator) -> Result<Self> {
        generator.validate()?;
        Ok(Self { id: id.into(), kind: FamilyKind::Generated(Arc::new(generator)), claims: FamilyClaims::default() })
    }

    pub fn fixed(id: impl Into<String>, density: Density) -> Self {
        Self { id: id.into(), kind: FamilyKind::Fixed(density), claims: FamilyClaims::default() }
    }

    /// The constant bump `1_{[0,1]}` for every parameter; violates escape of mass.
    pub fn fixed_bump() -> Self {
        Self::fixed("bump", Density::Cesaro { rate: 1.0 })
    }

    pub fn density(&self, lambda: f64) -> Result<Density> {
        match &self.kind {
            FamilyKind::Cesaro => Density::cesaro(lambda),
            FamilyKind::Exponential => Density::exponential(lambda),
            FamilyKind::Generated(g) => {
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return Err(domain(format!("family parameter must be positive, got {lambda}")));
                }
                Density::generated(Arc::clone(g), 1.0 / lambda)
            }
            FamilyKind::Fixed(d) => Ok(d.clone()),
        }
    }

    pub fn is_self_similar(&self) -> bool {
        !matches!(self.kind, FamilyKind::Fixed(_))
    }

    /// The parameter `ν(λ, r)` with `ρ̄_λʳ = (1 - r) ρ_ν`.
    pub fn nu(&self, lambda: f64, r: f64) -> Result<f64> {
        if !(r > 0.0 && r < 1.0) {
            return Err(domain(format!("r must lie in (0, 1), got {r}")));
        }
        match &self.kind {
            FamilyKind::Cesaro => Ok(lambda / (1.0 - r)),
            FamilyKind::Exponential => Ok(lambda),
            FamilyKind::Generated(_) => {
                let horizon = 1.0 / lambda;
                let q = self.density(lambda)?.quantile(r)?;
                Ok(1.0 / (horizon - q))
            }
            FamilyKind::Fixed(_) => Err(Error::Unsupported(format!("family `{}` is not self-similar", self.id))),
        }
    }

    pub fn self_similar_decompose(&self, lambda: f64, r: f64) -> Result<Decomposition> {
        let nu = self.nu(lambda, r)?;
        let h = 1.0 - r;
        let shifted = self.density(lambda)?.shift_by_quantile(r)?;
        let target = self.density(nu)?;
        let t_hi = match shifted.support_end() {
            Some(end) => end,
            None => target.quantile(1.0 - 1e-9)?,
        };
        let residual = (0..1000)
            .map(|j| {
                let t = t_hi * j as f64 / 1000.0;
                (shifted.value_at(t) - h * target.value_at(t)).abs()
            })
            .fold(0.0, f64::max);
        Ok(Decomposition { h, nu, residual, ok: residual <= DECOMPOSITION_TOL })
    }

    /// Whether `ρ_λ(0) = λ` holds at each parameter, to relative tolerance `tol`.
    pub fn starts_at_rate(&self, lambdas: &[f64], tol: f64) -> Result<bool> {
        for &lam in lambdas {
            let d = self.density(lam)?;
            if (d.value_at(0.0) - lam).abs() > tol * lam {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
