use tauberlab_core::densities::{
    escape_diagnostic, flatness_diagnostic, regularity_diagnostic, DiagnosticRow, ESCAPE_TOL, FLAT_TOL,
};
use tauberlab_core::grid::DEFAULT_R_GRID;
use tauberlab_core::tauberian::ESCAPE_T;

use crate::error::{CliError, Status};
use crate::input::{parse_family_spec, parse_grid, parse_list};
use crate::output::{num, slug, Artifacts, Table};
use crate::{DensityArgs, Diag};

const COLUMNS: [&str; 5] = ["family_id", "lambda", "r_or_T", "statistic", "value"];
const UNITS: &str = "lambda in 1/time; r_or_T is a mass level r or a time T; log_variation and mass dimensionless";

fn push(table: &mut Table, rows: &[DiagnosticRow]) {
    for r in rows {
        table.row([r.family_id.clone(), num(r.lambda), num(r.arg), r.statistic.to_string(), num(r.value)]);
    }
}

pub fn run(a: &DensityArgs) -> Result<(Status, Artifacts), CliError> {
    let fam = parse_family_spec(&a.family)?;
    let lambdas = parse_grid(a.lambda_grid.as_deref())?;
    let r_grid = match &a.r_grid {
        Some(s) => parse_list("--r-grid", s)?,
        None => DEFAULT_R_GRID.to_vec(),
    };
    let diag = match a.diag {
        Diag::Flat => "flat",
        Diag::Regular => "regular",
        Diag::Escape => "escape",
        Diag::Quantile => "quantile",
    };
    let mut table = Table::new(format!("density_{}_{diag}.csv", slug(&fam.id)), "density", UNITS, &COLUMNS);
    match a.diag {
        Diag::Flat => {
            let rep = flatness_diagnostic(&fam, &r_grid, &lambdas)?;
            push(&mut table, &rep.rows);
            println!(
                "{}: flatness double-limit estimate {} (tol {FLAT_TOL}); flat = {}",
                fam.id,
                num(rep.limit_estimate),
                rep.flat
            );
        }
        Diag::Regular => {
            let rep = regularity_diagnostic(&fam, a.r, &lambdas)?;
            push(&mut table, &rep.rows);
            println!(
                "{}: limsup of log-variation at r = {} is {}; convergent = {}, regular = {}",
                fam.id,
                a.r,
                num(rep.limsup),
                rep.convergent,
                rep.regular
            );
        }
        Diag::Escape => {
            let t_grid = match &a.t_grid {
                Some(s) => parse_list("--t-grid", s)?,
                None => ESCAPE_T.to_vec(),
            };
            let rep = escape_diagnostic(&fam, &t_grid, &lambdas)?;
            push(&mut table, &rep.rows);
            println!(
                "{}: mass escapes = {} (tol {ESCAPE_TOL}); failing T: {:?}",
                fam.id, rep.escapes, rep.failing_t
            );
        }
        Diag::Quantile => {
            let mut worst = 0.0f64;
            for &l in &lambdas {
                let d = fam.density(l)?;
                for &r in &r_grid {
                    let q = d.quantile(r)?;
                    let err = (d.mass(q)? - r).abs();
                    worst = worst.max(err);
                    table.row([fam.id.clone(), num(l), num(r), "quantile".into(), num(q)]);
                    table.row([fam.id.clone(), num(l), num(r), "inversion_error".into(), num(err)]);
                }
            }
            println!("{}: largest quantile inversion error {}", fam.id, num(worst));
        }
    }
    let mut out = Artifacts::default();
    out.table(table);
    Ok((Status::Pass, out))
}
