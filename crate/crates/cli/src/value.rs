use tauberlab_core::densities::DensityFamily;
use tauberlab_core::games::GameModel;
use tauberlab_core::values::{dp_sweep, lower_upper_bruteforce, ValueTable};

use crate::error::{CliError, Status};
use crate::input::{load_model, parse_family_spec, parse_grid};
use crate::output::{num, slug, Artifacts, Table};
use crate::ValueArgs;

const UNITS: &str = "lambda in 1/time; lo and hi are payoff bounds in cost units; horizon_steps in model steps";

fn push(table: &mut Table, model: &GameModel, fam: &str, t: &ValueTable, order: Option<&str>) {
    for (s, e) in t.entries.iter().enumerate() {
        let mut row = vec![model.id().to_string(), fam.to_string(), num(t.lambda), model.name(s).to_string()];
        row.extend(order.map(str::to_string));
        row.extend([num(e.lo), num(e.hi), t.steps.to_string()]);
        table.row(row);
    }
}

pub fn run(a: &ValueArgs) -> Result<(Status, Artifacts), CliError> {
    let loaded = load_model(&a.model, a.seed)?;
    let model = loaded.model;
    let fam = match (&a.family, loaded.family) {
        (Some(spec), _) => parse_family_spec(spec)?,
        (None, Some(f)) => f,
        (None, None) => DensityFamily::cesaro(),
    };
    let lambdas = parse_grid(a.lambda_grid.as_deref())?;
    if !(a.horizon_mass > 0.0 && a.horizon_mass < 1.0) {
        return Err(CliError::input(format!("--horizon-mass must lie in (0, 1), got {}", a.horizon_mass)));
    }
    let stem = format!("values_{}_{}", slug(model.id()), slug(&fam.id));
    let mut out = Artifacts::default();

    if a.brute {
        let mut table = Table::new(
            format!("{stem}_brute.csv"),
            "value --brute",
            UNITS,
            &["model_id", "family_id", "lambda", "omega", "order", "lo", "hi", "horizon_steps"],
        );
        let mut worst = 0.0f64;
        for &l in &lambdas {
            let d = fam.density(l)?;
            let (lower, upper) = lower_upper_bruteforce(&model, &d, a.horizon)?;
            for (x, y) in lower.entries.iter().zip(&upper.entries) {
                worst = worst.max((x.lo - y.lo).abs());
            }
            push(&mut table, &model, &fam.id, &lower.labelled(fam.id.clone(), l), Some("lower"));
            push(&mut table, &model, &fam.id, &upper.labelled(fam.id.clone(), l), Some("upper"));
        }
        println!("{} / {}: {} steps, largest |V⁻ − V⁺| = {}", model.id(), fam.id, a.horizon, num(worst));
        out.table(table);
        return Ok((Status::Pass, out));
    }

    let tables = dp_sweep(&model, &fam, &lambdas, a.horizon_mass)?;
    let mut table = Table::new(
        format!("{stem}.csv"),
        "value",
        UNITS,
        &["model_id", "family_id", "lambda", "omega", "lo", "hi", "horizon_steps"],
    );
    for t in &tables {
        push(&mut table, &model, &fam.id, t, None);
    }
    if let Some(t) = tables.last() {
        let cells: Vec<String> =
            t.entries.iter().enumerate().map(|(s, e)| format!("{}=[{}, {}]", model.name(s), num(e.lo), num(e.hi))).collect();
        println!("{} / {} at λ = {}: {}", model.id(), fam.id, num(t.lambda), cells.join(" "));
    }
    out.table(table);
    Ok((Status::Pass, out))
}
