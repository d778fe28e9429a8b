use std::time::{Duration, Instant};

use tauberlab_core::densities::{Density, DensityFamily, Generator};
use tauberlab_core::games::{
    bundled, check_axioms, clash_min_strategy, pinned_path_strategy, policy_family, stationary_family, Axiom, Closure,
    Owner, StrategyFamily, Witness,
};
use tauberlab_core::grid::GridSpec;
use tauberlab_core::tauberian::{
    build_geometric_schedule, build_partition_schedule, chito_check, corollary_equivalence, hardy_single_trajectory,
    tochi_check, tochi_upper_check, uniform_limit_estimate, EventuallyPeriodic, FP_TOL,
};
use tauberlab_core::values::{dp_value_steps, lower_upper_bruteforce};

type Outcome = Result<String, String>;

fn within_budget(start: Instant, budget: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    if took > budget {
        Err(format!("{detail}; took {took:?}, budget {budget:?}"))
    } else {
        Ok(format!("{detail}; {took:.2?}"))
    }
}

fn density_identities() -> Outcome {
    let start = Instant::now();
    let mut worst_inv = 0.0f64;
    let mut worst_var = 0.0f64;
    let mut worst_shift = 0.0f64;
    for lambda in [1.0, 0.1, 0.01] {
        let bases = [Density::cesaro(lambda).unwrap(), Density::exponential(lambda).unwrap()];
        for r in [0.1, 0.5, 0.9] {
            for d in &bases {
                let q = d.quantile(r).map_err(|e| e.to_string())?;
                worst_inv = worst_inv.max((d.mass(q).unwrap() - r).abs());
            }
            let qw = bases[0].quantile(r).unwrap();
            let vw = bases[0].log_total_variation(0.0, qw).unwrap().value;
            if vw != 0.0 {
                return Err(format!("Var ln ϖ = {vw} at λ={lambda}, r={r}"));
            }
            let qp = bases[1].quantile(r).unwrap();
            let vp = bases[1].log_total_variation(0.0, qp).unwrap().value;
            worst_var = worst_var.max((vp + (1.0 - r).ln()).abs());

            let sw = bases[0].shift_by_quantile(r).unwrap();
            let sp = bases[1].shift_by_quantile(r).unwrap();
            let scaled = Density::cesaro(lambda / (1.0 - r)).unwrap();
            let span = 2.0 / lambda;
            for j in 0..1000 {
                let t = (j as f64 + 0.5) * span / 1000.0;
                let a = (sw.eval(t).unwrap() - (1.0 - r) * scaled.eval(t).unwrap()).abs();
                let b = (sp.eval(t).unwrap() - (1.0 - r) * bases[1].eval(t).unwrap()).abs();
                worst_shift = worst_shift.max(a).max(b);
            }
        }
    }
    let detail = format!("inversion {worst_inv:.1e}, Var ln π error {worst_var:.1e}, shift error {worst_shift:.1e}");
    if worst_inv > 1e-8 || worst_var > 1e-9 || worst_shift > 1e-9 {
        return Err(detail);
    }
    within_budget(start, Duration::from_secs(1), detail)
}

fn oracle_densities() -> Vec<Density> {
    vec![
        Density::cesaro(0.25).unwrap(),
        Density::exponential(0.5).unwrap(),
        Density::generated(std::sync::Arc::new(Generator::Affine { intercept: 1.0, slope: 1.0 }), 3.5).unwrap(),
    ]
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut cells = 0;
    let mut worst = 0.0f64;
    for seed in 0..24u64 {
        let m = bundled::random(seed);
        let horizon = 3 + (seed % 3) as usize;
        for d in oracle_densities() {
            let (lower, upper) = lower_upper_bruteforce(&m, &d, horizon).map_err(|e| e.to_string())?;
            let dp = dp_value_steps(&m, &d, horizon);
            for s in 0..m.n_states() {
                let (l, u, e) = (lower.entries[s], upper.entries[s], dp.entries[s]);
                worst = worst.max((l.lo - u.lo).abs()).max((l.hi - u.hi).abs());
                if (l.lo - u.lo).abs() > 1e-12 || !e.contains(l.lo, 1e-12) || !e.contains(l.hi, 1e-12) {
                    return Err(format!("{} state {s}: lower {l:?}, upper {u:?}, dp {e:?}", m.id()));
                }
            }
            cells += 1;
        }
    }
    within_budget(start, Duration::from_secs(30), format!("{cells} model/density cells, max |V⁻−V⁺| {worst:.1e}"))
}

fn order_of_play() -> Outcome {
    let mut pairs = 0;
    let mut violations = Vec::new();
    let models = bundled::all_bundled().into_iter().chain((100..120).map(bundled::random));
    for m in models {
        for d in oracle_densities() {
            let (lower, upper) = lower_upper_bruteforce(&m, &d, 4).map_err(|e| e.to_string())?;
            for s in 0..m.n_states() {
                if lower.entries[s].lo > upper.entries[s].lo + 1e-12 {
                    violations.push(format!("{}:{s}", m.id()));
                }
            }
            pairs += 1;
        }
    }
    if violations.is_empty() {
        Ok(format!("{pairs} (model, density) pairs, 0 violations"))
    } else {
        Err(format!("violations at {violations:?}"))
    }
}

fn axiom_suite() -> Outcome {
    let start = Instant::now();
    let horizon = 4;
    let mut models = 0;
    for m in bundled::all_bundled() {
        let maxfam = policy_family(&m, Owner::Max, horizon);
        let minfam = policy_family(&m, Owner::Min, horizon);
        let report = check_axioms(&m, &maxfam, &minfam, horizon).map_err(|e| e.to_string())?;
        if let Some(r) = report.results.iter().find(|r| !r.passed) {
            return Err(format!("{} fails {}: {:?}", m.id(), r.axiom.tag(), r.witness));
        }
        models += 1;
    }

    let m = bundled::alt4();
    let minfam = policy_family(&m, Owner::Min, horizon);
    let pinned = StrategyFamily::new(Owner::Max, vec![pinned_path_strategy(&m, 0, horizon)], Closure::Listed).unwrap();
    let r = check_axioms(&m, &pinned, &minfam, horizon).unwrap();
    let p = r.get(Axiom::Playable);
    if p.passed || !matches!(p.witness, Some(Witness::Unplayable { .. })) {
        return Err(format!("pinned path did not fail (p): {:?}", p.witness));
    }

    let (max, min, _) = clash_min_strategy(&m, horizon).unwrap().ok_or("no clash construction on alt4")?;
    let maxfam = StrategyFamily::new(Owner::Max, vec![max], Closure::Listed).unwrap();
    let clash = StrategyFamily::new(Owner::Min, vec![min], Closure::Listed).unwrap();
    let r = check_axioms(&m, &maxfam, &clash, horizon).unwrap();
    let s = r.get(Axiom::Saddle);
    if s.passed || !matches!(s.witness, Some(Witness::NoCommonProcess { .. })) {
        return Err(format!("clash did not fail (s): {:?}", s.witness));
    }

    let r = check_axioms(&m, &stationary_family(&m, Owner::Max), &stationary_family(&m, Owner::Min), horizon).unwrap();
    let c = r.get(Axiom::Concatenation);
    if c.passed || c.witness.is_none() {
        return Err("stationary list did not fail (⋄)".into());
    }
    within_budget(
        start,
        Duration::from_secs(5),
        format!("{models} models pass (p)(ω)(⋄)(s); violators fail with witnesses"),
    )
}

fn tauberian_coincidence() -> Outcome {
    let start = Instant::now();
    let lambdas = GridSpec::default_lambda().points();
    let affine = DensityFamily::generated("gen:affine:1:1", Generator::Affine { intercept: 1.0, slope: 1.0 }).unwrap();
    let mut worst = 0.0f64;
    for m in bundled::all_bundled() {
        let r = corollary_equivalence(&m, std::slice::from_ref(&affine), &lambdas, 0.999).map_err(|e| e.to_string())?;
        for (i, row) in r.cells.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                worst = worst.max(c.difference / c.tol.max(f64::MIN_POSITIVE));
                if !c.pass {
                    return Err(format!(
                        "{}: {} vs {} differ by {:.3e} > {:.3e} at state {}",
                        m.id(),
                        r.families[i],
                        r.families[j],
                        c.difference,
                        c.tol,
                        c.witness_state
                    ));
                }
            }
        }
    }
    within_budget(
        start,
        Duration::from_secs(120),
        format!("ϖ, π, gen 1+s agree on all bundled models; worst difference/tol {worst:.2}"),
    )
}

fn hardy_check() -> Outcome {
    let lambdas = [1e-2, 1e-3, 1e-4];
    let mut parts = Vec::new();
    for (period, expected) in [(vec![1.0, 0.0], 0.5), (vec![1.0, 0.0, 0.0], 1.0 / 3.0)] {
        let signal = EventuallyPeriodic::periodic(period).unwrap();
        let r = hardy_single_trajectory(&signal, &lambdas).map_err(|e| e.to_string())?;
        let ec = (r.cesaro_limit - expected).abs();
        let ea = (r.abel_limit - expected).abs();
        if ec > 1e-3 || ea > 1e-3 || (r.closed_form - expected).abs() > 1e-12 {
            return Err(format!("period mean {expected}: Cesàro {} Abel {}", r.cesaro_limit, r.abel_limit));
        }
        parts.push(format!("{expected:.4}: Cesàro err {ec:.1e}, Abel err {ea:.1e}"));
    }
    Ok(parts.join("; "))
}

fn schedule_arithmetic() -> Outcome {
    let mut parts = Vec::new();
    for eps in [0.1, 0.2] {
        for fam in [DensityFamily::cesaro(), DensityFamily::exponential()] {
            let s = build_geometric_schedule(&fam, 1e-3, eps).map_err(|e| e.to_string())?;
            let bound = 1.0 + 3.0 * eps;
            if s.pk_error > FP_TOL || s.tau_k() * s.mu >= bound + FP_TOL {
                return Err(format!(
                    "{} ε={eps}: |p^k − 1/k| = {:.1e}, τ_k μ = {}",
                    fam.id,
                    s.pk_error,
                    s.tau_k() * s.mu
                ));
            }
            parts.push(format!("geo {} ε={eps} k={}", fam.id, s.k));
        }
        let p = build_partition_schedule(&DensityFamily::exponential(), 1e-3, eps, None).map_err(|e| e.to_string())?;
        if p.incorrect_count() != 0 || p.k as f64 <= p.m_bound || p.mean_identity_error > FP_TOL {
            return Err(format!(
                "partition ε={eps}: {} incorrect, k={} M={}, mean identity error {:.1e}",
                p.incorrect_count(),
                p.k,
                p.m_bound,
                p.mean_identity_error
            ));
        }
        parts.push(format!("partition exp ε={eps} k={} 0 incorrect", p.k));
    }
    Ok(parts.join("; "))
}

fn scale_bounds() -> Outcome {
    let lambdas = GridSpec::default_lambda().points();
    let mu = 1e-3;
    let mut worst = f64::INFINITY;
    let mut checks = 0;
    for m in bundled::all_bundled() {
        let v = uniform_limit_estimate(&m, &DensityFamily::cesaro(), &lambdas, 0.999)
            .map_err(|e| e.to_string())?
            .estimate();
        for eps in [0.1, 0.2] {
            let g = build_geometric_schedule(&DensityFamily::cesaro(), mu, eps).map_err(|e| e.to_string())?;
            let fam = DensityFamily::exponential();
            let p = build_partition_schedule(&fam, mu, eps, None).map_err(|e| e.to_string())?;
            let reports = [
                tochi_check(&m, &g, &v, 0.999),
                chito_check(&m, &fam, &p, &v, 0.999),
                tochi_upper_check(&m, &g, &v, 0.999),
            ];
            for r in reports {
                let r = r.map_err(|e| e.to_string())?;
                worst = worst.min(r.min_margin());
                if !r.passed() {
                    return Err(format!("{} {:?} ε={eps}: margin {}", m.id(), r.side, r.min_margin()));
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} bound checks, smallest 6ε margin {worst:.3e}"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("density identities", density_identities),
        ("oracle equivalence", oracle_equivalence),
        ("lower/upper ordering", order_of_play),
        ("axiom suite", axiom_suite),
        ("tauberian coincidence", tauberian_coincidence),
        ("hardy check", hardy_check),
        ("schedule arithmetic", schedule_arithmetic),
        ("scale bounds", scale_bounds),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("[PASS] {}. {name}: {detail}", i + 1),
            Err(detail) => {
                println!("[FAIL] {}. {name}: {detail}", i + 1);
                failed.push(*name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
