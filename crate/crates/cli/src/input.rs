use std::path::Path;

use tauberlab_core::densities::{DensityFamily, Generator};
use tauberlab_core::games::{bundled, parse_family, parse_model, GameModel};
use tauberlab_core::grid::GridSpec;

use crate::error::CliError;

/// A model plus the family its file declares, if any.
pub struct LoadedModel {
    pub model: GameModel,
    pub family: Option<DensityFamily>,
}

/// `bundled/<name>` (`bundled/random` takes `seed`) or a model file.
pub fn load_model(spec: &str, seed: u64) -> Result<LoadedModel, CliError> {
    if let Some(name) = spec.strip_prefix("bundled/") {
        let model = if name == "random" { Some(bundled::random(seed)) } else { bundled::by_name(name) };
        return model.map(|model| LoadedModel { model, family: None }).ok_or_else(|| {
            CliError::input(format!(
                "unknown bundled model `{name}`; known: {}, random, random<seed>",
                bundled::NAMES.join(", ")
            ))
        });
    }
    let text = read(spec)?;
    let file = parse_model(&text, spec)?;
    Ok(LoadedModel { model: file.model, family: file.family })
}

/// Every bundled model, used when no `--model` is given.
pub fn default_models() -> Vec<LoadedModel> {
    bundled::all_bundled().into_iter().map(|model| LoadedModel { model, family: None }).collect()
}

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(Path::new(path)).map_err(|e| CliError::input(format!("{path}: {e}")))
}

fn number(spec: &str, field: &str) -> Result<f64, CliError> {
    field
        .parse::<f64>()
        .map_err(|_| CliError::input(format!("family `{spec}`: `{field}` is not a number")))
}

/// `cesaro`, `exp`, `bump`, `gen:const:c`, `gen:affine:a:b`, `gen:exp:a`,
/// `gen:sinsq:a:w`, or a family file.
pub fn parse_family_spec(spec: &str) -> Result<DensityFamily, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let generator = match parts.as_slice() {
        ["cesaro"] => return Ok(DensityFamily::cesaro()),
        ["exp"] => return Ok(DensityFamily::exponential()),
        ["bump"] => return Ok(DensityFamily::fixed_bump()),
        ["gen", "const", c] => Generator::Constant(number(spec, c)?),
        ["gen", "affine", a, b] => Generator::Affine { intercept: number(spec, a)?, slope: number(spec, b)? },
        ["gen", "exp", a] => Generator::Exp { rate: number(spec, a)? },
        ["gen", "sinsq", a, w] => Generator::SinSquared { amp: number(spec, a)?, freq: number(spec, w)? },
        ["gen", ..] => {
            return Err(CliError::input(format!(
                "family `{spec}`: expected gen:const:c, gen:affine:a:b, gen:exp:a or gen:sinsq:a:w"
            )))
        }
        _ => {
            let text = read(spec)?;
            return Ok(parse_family(&text, spec)?);
        }
    };
    Ok(DensityFamily::generated(spec, generator)?)
}

pub fn parse_families(list: &str) -> Result<Vec<DensityFamily>, CliError> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(parse_family_spec).collect()
}

pub fn parse_grid(spec: Option<&str>) -> Result<Vec<f64>, CliError> {
    match spec {
        None => Ok(GridSpec::default_lambda().points()),
        Some(s) => Ok(GridSpec::parse(s)?.points()),
    }
}

/// Comma-separated numbers.
pub fn parse_list(what: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| CliError::input(format!("{what}: `{t}` is not a number"))))
        .collect()
}

pub fn positive(what: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::input(format!("{what} must be positive, got {x}")))
    }
}
