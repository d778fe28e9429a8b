use tauberlab_core::densities::DensityFamily;
use tauberlab_core::games::{
    check_axioms, clash_min_strategy, pinned_path_strategy, policy_family, stationary_family, Closure, GameModel, Owner,
    StrategyFamily,
};
use tauberlab_core::tauberian::{
    abel_check, build_geometric_schedule, build_partition_schedule, chito_check, corollary_equivalence,
    hardy_single_trajectory, tauber_check, tochi_check, tochi_upper_check, uniform_limit_estimate,
    verify_geometric_chain, verify_partition_chain, BoundReport, CoincidenceReport, DescentReport, EventuallyPeriodic,
    LimitEstimate, LimitReport, Side, FP_TOL, NOISE_TOL,
};

use crate::error::{CliError, Status};
use crate::input::{default_models, load_model, parse_families, parse_family_spec, parse_grid, parse_list, positive};
use crate::output::{flag, gap_chart, num, slug, Artifacts, Table};
use crate::{Check, Schedule, Strategies, TauberArgs};

const LIMIT_UNITS: &str = "lambda in 1/time; gap, width and midpoints in cost units";

struct Ctx<'a> {
    args: &'a TauberArgs,
    lambdas: Vec<f64>,
    models: Vec<GameModel>,
    out: Artifacts,
    status: Status,
}

pub fn run(a: &TauberArgs) -> Result<(Status, Artifacts), CliError> {
    if a.check.is_none() && a.schedule.is_none() {
        return Err(CliError::input("tauber needs --check or --schedule"));
    }
    if !(a.horizon_mass > 0.0 && a.horizon_mass < 1.0) {
        return Err(CliError::input(format!("--horizon-mass must lie in (0, 1), got {}", a.horizon_mass)));
    }
    positive("--eps", a.eps)?;
    positive("--mu", a.mu)?;
    let models = if a.model.is_empty() {
        default_models()
    } else {
        a.model.iter().map(|m| load_model(m, a.seed)).collect::<Result<_, _>>()?
    };
    let mut ctx = Ctx {
        args: a,
        lambdas: parse_grid(a.lambda_grid.as_deref())?,
        models: models.into_iter().map(|m| m.model).collect(),
        out: Artifacts::default(),
        status: Status::Pass,
    };
    match a.check {
        Some(Check::Corollary) => corollary(&mut ctx)?,
        Some(Check::Tauber) => coincidence(&mut ctx, "tauber")?,
        Some(Check::Abel) => coincidence(&mut ctx, "abel")?,
        Some(Check::Axioms) => axioms(&mut ctx)?,
        Some(Check::Hardy) => hardy(&mut ctx)?,
        None => {}
    }
    match a.schedule {
        Some(Schedule::Geometric) => geometric(&mut ctx)?,
        Some(Schedule::Partition) => partition(&mut ctx)?,
        None => {}
    }
    Ok((ctx.status, ctx.out))
}

fn limits_table(name: String, producer: &str) -> Table {
    Table::new(
        name,
        producer,
        LIMIT_UNITS,
        &["model_id", "family_id", "lambda", "gap", "width", "sup_mid", "inf_mid", "verdict"],
    )
}

fn push_limit(t: &mut Table, r: &LimitReport) {
    for i in 0..r.lambdas.len() {
        t.row([
            r.model_id.clone(),
            r.family_id.clone(),
            num(r.lambdas[i]),
            num(r.gaps[i]),
            num(r.widths[i]),
            num(r.sup_mid[i]),
            num(r.inf_mid[i]),
            r.verdict.tag().to_string(),
        ]);
    }
}

fn chart(ctx: &mut Ctx, model: &GameModel, title: &str, limits: &[&LimitReport]) {
    if !ctx.args.svg {
        return;
    }
    let series: Vec<(String, Vec<(f64, f64)>)> = limits
        .iter()
        .map(|r| (r.family_id.clone(), r.lambdas.iter().copied().zip(r.gaps.iter().copied()).collect()))
        .collect();
    ctx.out.svg(format!("gaps_{}_{}.svg", slug(title), slug(model.id())), gap_chart(&format!("{title}: {}", model.id()), &series));
}

fn corollary(ctx: &mut Ctx) -> Result<(), CliError> {
    let fams = parse_families(&ctx.args.families)?;
    let mut matrix = Table::new(
        "corollary_matrix.csv".to_string(),
        "tauber --check corollary",
        "differences and tolerances in cost units",
        &["model_id", "family_a", "family_b", "difference", "coincide_tol", "witness_state", "result"],
    );
    let mut limits = limits_table("corollary_limits.csv".into(), "tauber --check corollary");
    let models = std::mem::take(&mut ctx.models);
    for m in &models {
        let r = corollary_equivalence(m, &fams, &ctx.lambdas, ctx.args.horizon_mass)?;
        for (i, row) in r.cells.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                matrix.row([
                    m.id().to_string(),
                    r.families[i].clone(),
                    r.families[j].clone(),
                    num(c.difference),
                    num(c.tol),
                    m.name(c.witness_state).to_string(),
                    flag(c.pass).to_string(),
                ]);
            }
        }
        for l in &r.limits {
            push_limit(&mut limits, l);
        }
        let worst = r.cells.iter().flatten().map(|c| c.difference).fold(0.0, f64::max);
        println!(
            "{}: {} over {}; largest pairwise difference {}",
            m.id(),
            if r.all_pass() { "all pairs coincide" } else { "NOT all pairs coincide" },
            r.families.join(","),
            num(worst)
        );
        ctx.status = ctx.status.and(r.all_pass());
        chart(ctx, m, "corollary", &r.limits.iter().collect::<Vec<_>>());
    }
    ctx.models = models;
    ctx.out.table(matrix);
    ctx.out.table(limits);
    Ok(())
}

fn coincidence(ctx: &mut Ctx, which: &str) -> Result<(), CliError> {
    let fams = parse_families(&ctx.args.families)?;
    let producer = format!("tauber --check {which}");
    let mut table = Table::new(
        format!("{which}_checks.csv"),
        &producer,
        "differences and tolerances in cost units",
        &[
            "model_id",
            "family_id",
            "self_similar",
            "starts_at_rate",
            "flat",
            "regular",
            "escapes",
            "hypotheses_met",
            "family_verdict",
            "cesaro_verdict",
            "difference",
            "coincide_tol",
            "witness_state",
            "result",
        ],
    );
    let mut limits = limits_table(format!("{which}_limits.csv"), &producer);
    let models = std::mem::take(&mut ctx.models);
    for m in &models {
        for f in &fams {
            let r: CoincidenceReport = if which == "tauber" {
                tauber_check(m, f, &ctx.lambdas, ctx.args.horizon_mass)?
            } else {
                abel_check(m, f, &ctx.lambdas, ctx.args.horizon_mass)?
            };
            let h = &r.hypotheses;
            table.row([
                m.id().to_string(),
                f.id.clone(),
                h.self_similar.to_string(),
                h.starts_at_rate.to_string(),
                h.flat.to_string(),
                h.regular.to_string(),
                h.escapes.to_string(),
                r.hypotheses_met.to_string(),
                r.family.verdict.tag().to_string(),
                r.cesaro.verdict.tag().to_string(),
                num(r.difference),
                num(r.tol),
                m.name(r.witness_state).to_string(),
                flag(r.passed()).to_string(),
            ]);
            push_limit(&mut limits, &r.family);
            println!(
                "{} / {}: difference {} vs tol {}; hypotheses {}; {}",
                m.id(),
                f.id,
                num(r.difference),
                num(r.tol),
                if r.hypotheses_met { "met" } else { "NOT met" },
                flag(r.passed())
            );
            ctx.status = ctx.status.and(r.passed());
            chart(ctx, m, &format!("{which}_{}", f.id), &[&r.family, &r.cesaro]);
        }
    }
    ctx.models = models;
    ctx.out.table(table);
    ctx.out.table(limits);
    Ok(())
}

fn strategy_families(m: &GameModel, mode: Strategies, horizon: usize) -> Result<(StrategyFamily, StrategyFamily), CliError> {
    Ok(match mode {
        Strategies::Policy => (policy_family(m, Owner::Max, horizon), policy_family(m, Owner::Min, horizon)),
        Strategies::Stationary => (stationary_family(m, Owner::Max), stationary_family(m, Owner::Min)),
        Strategies::Pinned => (
            StrategyFamily::new(Owner::Max, vec![pinned_path_strategy(m, 0, horizon)], Closure::Listed)?,
            policy_family(m, Owner::Min, horizon),
        ),
        Strategies::Clash => {
            let (max, min, _) = clash_min_strategy(m, horizon)?
                .ok_or_else(|| CliError::input(format!("model `{}` admits no clashing pair", m.id())))?;
            (
                StrategyFamily::new(Owner::Max, vec![max], Closure::Listed)?,
                StrategyFamily::new(Owner::Min, vec![min], Closure::Listed)?,
            )
        }
    })
}

fn axioms(ctx: &mut Ctx) -> Result<(), CliError> {
    let h = ctx.args.horizon;
    let mut table = Table::new(
        "axioms.csv".to_string(),
        "tauber --check axioms",
        "horizon and checked in model steps and cases",
        &["model_id", "horizon", "axiom", "result", "checked", "witness"],
    );
    for m in &ctx.models {
        let (maxfam, minfam) = strategy_families(m, ctx.args.strategies, h)?;
        let report = check_axioms(m, &maxfam, &minfam, h)?;
        for r in &report.results {
            let witness = r.witness.as_ref().map(|w| w.to_string()).unwrap_or_default();
            table.row([
                m.id().to_string(),
                h.to_string(),
                r.axiom.tag().to_string(),
                flag(r.passed).to_string(),
                r.checked.to_string(),
                witness.clone(),
            ]);
            println!("{} ({}): {}{}", m.id(), r.axiom.tag(), flag(r.passed), if witness.is_empty() { String::new() } else { format!(", {witness}") });
        }
        ctx.status = ctx.status.and(report.all_passed());
    }
    ctx.out.table(table);
    Ok(())
}

fn hardy(ctx: &mut Ctx) -> Result<(), CliError> {
    let signals = match &ctx.args.period {
        Some(p) => vec![parse_list("--period", p)?],
        None => vec![vec![1.0, 0.0], vec![1.0, 0.0, 0.0]],
    };
    let mut table = Table::new(
        "hardy.csv".to_string(),
        "tauber --check hardy",
        "lambda in 1/time; means in signal units",
        &["signal", "lambda", "cesaro_mean", "abel_mean", "closed_form"],
    );
    for period in signals {
        let label = period.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ");
        let sig = EventuallyPeriodic::periodic(period)?;
        let r = hardy_single_trajectory(&sig, &ctx.lambdas)?;
        for i in 0..r.lambdas.len() {
            table.row([label.clone(), num(r.lambdas[i]), num(r.cesaro[i]), num(r.abel[i]), num(r.closed_form)]);
        }
        let ok = (r.cesaro_limit - r.closed_form).abs() <= NOISE_TOL && (r.abel_limit - r.closed_form).abs() <= NOISE_TOL;
        println!(
            "period [{label}]: Cesàro {} Abel {} closed form {}; {}",
            num(r.cesaro_limit),
            num(r.abel_limit),
            num(r.closed_form),
            flag(ok)
        );
        ctx.status = ctx.status.and(ok);
    }
    ctx.out.table(table);
    Ok(())
}

fn summary_table(name: String, producer: &str) -> Table {
    Table::new(name, producer, "times in time units, rates in 1/time", &["quantity", "value", "target", "result"])
}

fn quantity(t: &mut Table, name: &str, value: String) {
    t.row([name.to_string(), value, String::new(), String::new()]);
}

fn target(t: &mut Table, name: &str, value: f64, goal: f64, ok: bool) {
    t.row([name.to_string(), num(value), num(goal), flag(ok).to_string()]);
}

/// The finest-λ Cesàro limit bracket for a model.
fn limit_bracket(ctx: &Ctx, m: &GameModel) -> Result<LimitEstimate, CliError> {
    Ok(uniform_limit_estimate(m, &DensityFamily::cesaro(), &ctx.lambdas, ctx.args.horizon_mass)?.estimate())
}

fn descent_tables(producer: &str, stem: &str) -> (Table, Table) {
    let segs = Table::new(
        format!("{stem}_descent.csv"),
        producer,
        "start and end in time units; margins in cost units",
        &["model_id", "m", "start", "end", "margin", "modified_margin", "worst_state"],
    );
    let bounds = Table::new(
        format!("{stem}_bounds.csv"),
        producer,
        "values and margins in cost units",
        &["model_id", "side", "omega", "lo", "hi", "margin_6eps", "margin_sharp", "result"],
    );
    (segs, bounds)
}

fn push_descent(t: &mut Table, m: &GameModel, r: &DescentReport) {
    for s in &r.segments {
        t.row([
            m.id().to_string(),
            s.m.to_string(),
            num(s.start),
            num(s.end),
            num(s.margin),
            s.modified_margin.map(num).unwrap_or_default(),
            m.name(s.worst_state).to_string(),
        ]);
    }
    let tele = r.telescoped.iter().copied().fold(f64::INFINITY, f64::min);
    t.row([m.id().to_string(), "telescoped".into(), String::new(), String::new(), num(tele), String::new(), String::new()]);
}

fn push_bound(t: &mut Table, m: &GameModel, r: &BoundReport) {
    let side = match r.side {
        Side::Lower => "lower",
        Side::Upper => "upper",
    };
    for (s, e) in r.values.entries.iter().enumerate() {
        t.row([
            m.id().to_string(),
            side.to_string(),
            m.name(s).to_string(),
            num(e.lo),
            num(e.hi),
            num(r.margin_6eps[s]),
            num(r.margin_4eps[s]),
            flag(r.margin_6eps[s] > 0.0).to_string(),
        ]);
    }
}

fn schedule_family(ctx: &Ctx, default: DensityFamily) -> Result<DensityFamily, CliError> {
    match &ctx.args.family {
        Some(s) => parse_family_spec(s),
        None => Ok(default),
    }
}

fn geometric(ctx: &mut Ctx) -> Result<(), CliError> {
    let a = ctx.args;
    let fam = schedule_family(ctx, DensityFamily::cesaro())?;
    let s = build_geometric_schedule(&fam, a.mu, a.eps)?;
    let producer = "tauber --schedule geometric";
    let stem = format!("schedule_geometric_{}", slug(&fam.id));
    let mut sum = summary_table(format!("{stem}.csv"), producer);
    quantity(&mut sum, "family", fam.id.clone());
    quantity(&mut sum, "eps", num(s.eps));
    quantity(&mut sum, "mu", num(s.mu));
    quantity(&mut sum, "r_check", num(s.r_check));
    quantity(&mut sum, "k", s.k.to_string());
    quantity(&mut sum, "p", num(s.p));
    quantity(&mut sum, "kappa", num(s.kappa));
    let pk = s.p.powi(s.k as i32);
    target(&mut sum, "p^k=1/k", pk, 1.0 / s.k as f64, s.pk_error <= FP_TOL);
    target(&mut sum, "tau_k*mu<1+3eps", s.tau_mu, 1.0 + 3.0 * s.eps, s.tau_bound_ok());
    target(&mut sum, "lambda_m<k*mu", s.lambdas.iter().copied().fold(0.0, f64::max), s.k as f64 * s.mu, s.lambdas_below_k_mu);
    sum.row(["flatness".to_string(), String::new(), String::new(), flag(s.flatness_ok()).to_string()]);
    sum.row(["cesaro_comparison".to_string(), String::new(), String::new(), flag(s.comparison_ok).to_string()]);
    let valid = s.valid(FP_TOL);
    sum.row(["valid".to_string(), String::new(), String::new(), flag(valid).to_string()]);

    let mut iv = Table::new(
        format!("{stem}_intervals.csv"),
        producer,
        "lambda in 1/time; t and tau in time units",
        &["m", "lambda", "t", "tau_end", "flat_lhs", "flat_rhs", "flat"],
    );
    for m in 0..s.k {
        let f = &s.flatness[m];
        iv.row([(m + 1).to_string(), num(s.lambdas[m]), num(s.t[m]), num(s.tau[m + 1]), num(f.lhs), num(f.rhs), flag(f.ok).to_string()]);
    }
    println!("geometric schedule for {}: k = {}, p = {}, |p^k − 1/k| = {}, τ_k μ = {}; {}", fam.id, s.k, num(s.p), num(s.pk_error), num(s.tau_mu), flag(valid));
    ctx.status = ctx.status.and(valid);
    ctx.out.table(sum);
    ctx.out.table(iv);

    if !a.model.is_empty() {
        let (mut segs, mut bounds) = descent_tables(producer, &stem);
        for m in &ctx.models {
            let v = limit_bracket(ctx, m)?;
            let chain = verify_geometric_chain(m, &s, &v)?;
            let low = tochi_check(m, &s, &v, a.horizon_mass)?;
            let up = tochi_upper_check(m, &s, &v, a.horizon_mass)?;
            push_descent(&mut segs, m, &chain);
            push_bound(&mut bounds, m, &low);
            push_bound(&mut bounds, m, &up);
            let ok = chain.passed() && low.passed() && up.passed();
            println!(
                "{}: chain {}, lower bound margin {}, upper bound margin {}",
                m.id(),
                flag(chain.passed()),
                num(low.min_margin()),
                num(up.min_margin())
            );
            ctx.status = ctx.status.and(ok);
        }
        ctx.out.table(segs);
        ctx.out.table(bounds);
    }
    Ok(())
}

fn partition(ctx: &mut Ctx) -> Result<(), CliError> {
    let a = ctx.args;
    let fam = schedule_family(ctx, DensityFamily::exponential())?;
    let s = build_partition_schedule(&fam, a.mu, a.eps, a.m_bound)?;
    let producer = "tauber --schedule partition";
    let stem = format!("schedule_partition_{}", slug(&fam.id));
    let mut sum = summary_table(format!("{stem}.csv"), producer);
    quantity(&mut sum, "family", fam.id.clone());
    quantity(&mut sum, "eps", num(s.eps));
    quantity(&mut sum, "mu", num(s.mu));
    quantity(&mut sum, "M", num(s.m_bound));
    quantity(&mut sum, "k", s.k.to_string());
    quantity(&mut sum, "p", num(s.p));
    quantity(&mut sum, "kappa", num(s.kappa));
    quantity(&mut sum, "delta", num(s.delta));
    quantity(&mut sum, "horizon", num(s.horizon));
    quantity(&mut sum, "intervals", s.intervals().to_string());
    let k = s.k as f64;
    target(&mut sum, "incorrect_intervals<=k", s.incorrect_count() as f64, k, s.incorrect_count() <= s.k);
    target(&mut sum, "delta<eps/k", s.delta, s.eps / k, s.delta_ok());
    target(&mut sum, "geometric_sum_error", s.geometric_sum_error, FP_TOL, s.geometric_sum_error <= FP_TOL);
    target(&mut sum, "incorrect_mass<=k*delta", s.incorrect_mass, k * s.delta, s.incorrect_mass <= k * s.delta + FP_TOL);
    target(&mut sum, "l1_perturbation<2eps", s.l1_perturbation, 2.0 * s.eps, s.l1_perturbation < 2.0 * s.eps);
    target(&mut sum, "mean_identity_error", s.mean_identity_error, FP_TOL, s.mean_identity_error <= FP_TOL);
    let valid = s.valid(FP_TOL);
    sum.row(["valid".to_string(), String::new(), String::new(), flag(valid).to_string()]);

    let mut iv = Table::new(
        format!("{stem}_intervals.csv"),
        producer,
        "tau in time units; lambda in 1/time; variation dimensionless",
        &["m", "tau_start", "tau_end", "lambda", "variation", "correct"],
    );
    for m in 0..s.intervals() {
        iv.row([
            (m + 1).to_string(),
            num(s.tau[m]),
            num(s.tau[m + 1]),
            num(s.lambdas[m]),
            num(s.variation[m]),
            s.correct[m].to_string(),
        ]);
    }
    println!(
        "partition schedule for {}: M = {}, k = {}, {} of {} intervals incorrect, mean identity error {}; {}",
        fam.id,
        num(s.m_bound),
        s.k,
        s.incorrect_count(),
        s.intervals(),
        num(s.mean_identity_error),
        flag(valid)
    );
    ctx.status = ctx.status.and(valid);
    ctx.out.table(sum);
    ctx.out.table(iv);

    if !a.model.is_empty() {
        let (mut segs, mut bounds) = descent_tables(producer, &stem);
        for m in &ctx.models {
            let v = limit_bracket(ctx, m)?;
            let chain = verify_partition_chain(m, &s, &v)?;
            let low = chito_check(m, &fam, &s, &v, a.horizon_mass)?;
            push_descent(&mut segs, m, &chain);
            push_bound(&mut bounds, m, &low);
            println!("{}: chain {}, lower bound margin {}", m.id(), flag(chain.passed()), num(low.min_margin()));
            ctx.status = ctx.status.and(chain.passed() && low.passed());
        }
        ctx.out.table(segs);
        ctx.out.table(bounds);
    }
    Ok(())
}
