use crate::densities::{
    escape_diagnostic, flatness_diagnostic, regularity_diagnostic, DensityFamily,
};
use crate::error::Result;
use crate::games::GameModel;
use crate::grid::DEFAULT_R_GRID;
use crate::values::{dp_sweep, ValueTable};

/// Widths above this make a limit estimate inconclusive.
pub const NOISE_TOL: f64 = 1e-3;
/// Relative tolerance for `ρ_λ(0) = λ`.
pub const FP_TOL: f64 = 1e-9;
/// Mass levels at which regularity is tested.
pub const REGULARITY_R: [f64; 2] = [0.5, 0.9];
/// Horizons at which escape of mass is tested.
pub const ESCAPE_T: [f64; 2] = [1.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    NotConverged,
    /// Enclosures too wide to decide.
    Inconclusive,
}

impl Verdict {
    pub fn tag(self) -> &'static str {
        match self {
            Verdict::Converged => "converged",
            Verdict::NotConverged => "not-converged",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Value midpoints along a decreasing λ grid and the finest-λ limit estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub model_id: String,
    pub family_id: String,
    pub lambdas: Vec<f64>,
    pub tables: Vec<ValueTable>,
    /// `sup_ω` and `inf_ω` of the midpoints per λ.
    pub sup_mid: Vec<f64>,
    pub inf_mid: Vec<f64>,
    /// Per-state midpoint at the smallest λ.
    pub v_star: Vec<f64>,
    /// `sup_ω |V_λ(ω) − V*(ω)|` per λ.
    pub gaps: Vec<f64>,
    /// Largest enclosure width per λ.
    pub widths: Vec<f64>,
    pub verdict: Verdict,
}

impl LimitReport {
    /// Enclosure width at the smallest λ.
    pub fn final_width(&self) -> f64 {
        *self.widths.last().unwrap()
    }

    /// Uniformity gap at the second smallest λ; the last gap is zero by construction.
    pub fn last_gap(&self) -> f64 {
        if self.gaps.len() >= 2 {
            self.gaps[self.gaps.len() - 2]
        } else {
            0.0
        }
    }

    /// The bracket `V* ± half_width` used by the descent checks.
    pub fn estimate(&self) -> LimitEstimate {
        LimitEstimate { mid: self.v_star.clone(), half_width: 0.5 * self.final_width() + self.last_gap() }
    }
}

/// Per-state centre of a limit bracket with a common half width.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub mid: Vec<f64>,
    pub half_width: f64,
}

impl LimitEstimate {
    pub fn exact(mid: Vec<f64>) -> Self {
        Self { mid, half_width: 0.0 }
    }

    /// Bracket for `1 − V*`, as seen from the reflected model.
    pub fn reflected(&self) -> Self {
        Self { mid: self.mid.iter().map(|v| 1.0 - v).collect(), half_width: self.half_width }
    }
}

/// DP values of `fam` along `lambdas` (decreasing) with a limit estimate.
pub fn uniform_limit_estimate(model: &GameModel, fam: &DensityFamily, lambdas: &[f64], horizon_mass: f64) -> Result<LimitReport> {
    let tables = dp_sweep(model, fam, lambdas, horizon_mass)?;
    let mids: Vec<Vec<f64>> = tables.iter().map(|t| t.entries.iter().map(|e| e.mid()).collect()).collect();
    let v_star = mids.last().cloned().unwrap_or_default();
    let gaps: Vec<f64> = mids
        .iter()
        .map(|m| m.iter().zip(&v_star).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .collect();
    let widths: Vec<f64> = tables.iter().map(ValueTable::max_width).collect();
    let sup_mid = mids.iter().map(|m| m.iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
    let inf_mid = mids.iter().map(|m| m.iter().copied().fold(f64::INFINITY, f64::min)).collect();
    let mut report = LimitReport {
        model_id: model.id().to_string(),
        family_id: fam.id.clone(),
        lambdas: lambdas.to_vec(),
        tables,
        sup_mid,
        inf_mid,
        v_star,
        gaps,
        widths,
        verdict: Verdict::Inconclusive,
    };
    report.verdict = verdict(&report);
    Ok(report)
}

fn verdict(r: &LimitReport) -> Verdict {
    // widths equal to 1 − horizon_mass sit exactly on the tolerance
    if r.final_width() > NOISE_TOL * (1.0 + 1e-9) || r.lambdas.len() < 3 {
        return Verdict::Inconclusive;
    }
    // exclude the final gap, which is zero by construction
    let head = &r.gaps[..r.gaps.len() - 1];
    let tail = &head[head.len() / 2..];
    let monotone = tail.windows(2).all(|w| w[1] <= w[0] + NOISE_TOL);
    if monotone && r.last_gap() <= 10.0 * NOISE_TOL {
        Verdict::Converged
    } else {
        Verdict::NotConverged
    }
}

/// `5 · (enclosure width + last-λ gap)`, taking the worse of the two reports.
pub fn coincide_tol(a: &LimitReport, b: &LimitReport) -> f64 {
    5.0 * (a.final_width().max(b.final_width()) + a.last_gap().max(b.last_gap()))
}

/// `sup_ω |V*_a − V*_b|` and the state attaining it.
pub fn limit_difference(a: &LimitReport, b: &LimitReport) -> (f64, usize) {
    a.v_star
        .iter()
        .zip(&b.v_star)
        .map(|(x, y)| (x - y).abs())
        .enumerate()
        .fold((0.0, 0), |best, (i, d)| if d > best.0 { (d, i) } else { best })
}

/// Density-side hypotheses of the Tauberian and Abelian directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypotheses {
    pub self_similar: bool,
    pub starts_at_rate: bool,
    pub flat: bool,
    pub regular: bool,
    pub escapes: bool,
}

impl Hypotheses {
    pub fn tauberian(&self) -> bool {
        self.self_similar && self.starts_at_rate && self.flat && self.regular
    }

    pub fn abelian(&self) -> bool {
        self.regular && self.escapes
    }
}

/// Runs the density diagnostics on `fam` along `lambdas`.
pub fn check_hypotheses(fam: &DensityFamily, lambdas: &[f64]) -> Result<Hypotheses> {
    let self_similar = fam.is_self_similar()
        && [(lambdas[0], 0.5), (*lambdas.last().unwrap(), 0.1)]
            .iter()
            .map(|&(l, r)| fam.self_similar_decompose(l, r).map(|d| d.ok))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .all(|ok| ok);
    let starts_at_rate = fam.starts_at_rate(lambdas, FP_TOL)?;
    let flat = flatness_diagnostic(fam, &DEFAULT_R_GRID, lambdas)?.flat;
    let mut regular = true;
    for r in REGULARITY_R {
        regular &= regularity_diagnostic(fam, r, lambdas)?.regular;
    }
    let escapes = escape_diagnostic(fam, &ESCAPE_T, lambdas)?.escapes;
    Ok(Hypotheses { self_similar, starts_at_rate, flat, regular, escapes })
}

/// Comparison of one family's limit against the Cesàro limit.
#[derive(Debug, Clone)]
pub struct CoincidenceReport {
    pub model_id: String,
    pub family_id: String,
    pub hypotheses: Hypotheses,
    /// Hypotheses of the direction being checked hold.
    pub hypotheses_met: bool,
    pub family: LimitReport,
    pub cesaro: LimitReport,
    pub difference: f64,
    pub witness_state: usize,
    pub tol: f64,
    pub coincide: bool,
}

impl CoincidenceReport {
    /// Coincidence with both limits established and the hypotheses met.
    pub fn passed(&self) -> bool {
        self.coincide
            && self.hypotheses_met
            && self.family.verdict == Verdict::Converged
            && self.cesaro.verdict == Verdict::Converged
    }
}

fn coincidence(
    model: &GameModel,
    fam: &DensityFamily,
    lambdas: &[f64],
    horizon_mass: f64,
    met: impl Fn(&Hypotheses) -> bool,
) -> Result<CoincidenceReport> {
    let hypotheses = check_hypotheses(fam, lambdas)?;
    let family = uniform_limit_estimate(model, fam, lambdas, horizon_mass)?;
    let cesaro = uniform_limit_estimate(model, &DensityFamily::cesaro(), lambdas, horizon_mass)?;
    let (difference, witness_state) = limit_difference(&family, &cesaro);
    let tol = coincide_tol(&family, &cesaro);
    Ok(CoincidenceReport {
        model_id: model.id().to_string(),
        family_id: fam.id.clone(),
        hypotheses_met: met(&hypotheses),
        hypotheses,
        family,
        cesaro,
        difference,
        witness_state,
        tol,
        coincide: difference <= tol,
    })
}

/// Limit of a self-similar, flat, regular family against the Cesàro limit.
/// The comparison runs even when the hypotheses fail.
pub fn tauber_check(model: &GameModel, fam: &DensityFamily, lambdas: &[f64], horizon_mass: f64) -> Result<CoincidenceReport> {
    coincidence(model, fam, lambdas, horizon_mass, Hypotheses::tauberian)
}

/// Limit of a regular family whose mass escapes to infinity against the Cesàro limit.
pub fn abel_check(model: &GameModel, fam: &DensityFamily, mus: &[f64], horizon_mass: f64) -> Result<CoincidenceReport> {
    coincidence(model, fam, mus, horizon_mass, Hypotheses::abelian)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCell {
    pub difference: f64,
    pub tol: f64,
    pub witness_state: usize,
    pub pass: bool,
}

/// Pairwise limit comparisons; the Cesàro and exponential families are
/// always included, first.
#[derive(Debug, Clone)]
pub struct CorollaryReport {
    pub model_id: String,
    pub families: Vec<String>,
    pub limits: Vec<LimitReport>,
    pub cells: Vec<Vec<MatrixCell>>,
}

impl CorollaryReport {
    pub fn all_pass(&self) -> bool {
        self.cells.iter().flatten().all(|c| c.pass)
    }
}

pub fn corollary_equivalence(
    model: &GameModel,
    fams: &[DensityFamily],
    lambdas: &[f64],
    horizon_mass: f64,
) -> Result<CorollaryReport> {
    let mut all = vec![DensityFamily::cesaro(), DensityFamily::exponential()];
    for f in fams {
        if !all.iter().any(|g| g.id == f.id) {
            all.push(f.clone());
        }
    }
    let limits: Vec<LimitReport> =
        all.iter().map(|f| uniform_limit_estimate(model, f, lambdas, horizon_mass)).collect::<Result<_>>()?;
    let cells = limits
        .iter()
        .map(|a| {
            limits
                .iter()
                .map(|b| {
                    let (difference, witness_state) = limit_difference(a, b);
                    let tol = coincide_tol(a, b);
                    MatrixCell { difference, tol, witness_state, pass: difference <= tol }
                })
                .collect()
        })
        .collect();
    Ok(CorollaryReport {
        model_id: model.id().to_string(),
        families: all.into_iter().map(|f| f.id).collect(),
        limits,
        cells,
    })
}
