//! Plain-text model and family files.
//!
//! ```text
//! # comments run to end of line
//! id alt
//! dt 0.5
//! [states]
//! a MAX 0.3
//! b MIN 1
//! [edges]
//! a b
//! b a
//! [family]
//! id affine
//! kind generated
//! generator affine 1 1
//! ```
//!
//! Family kinds are `cesaro`, `exponential`, `generated` (with a
//! `generator const c | affine a b | exp a | sinsq a w | table` line) and
//! `tabulated`. Tables take `knot t v` lines; a tabulated density is
//! piecewise constant with value `v` from `t` to the next knot and must end
//! with value 0.

use std::fmt::Write;

use super::model::{GameModel, Owner, StateSpec};
use crate::densities::{Density, DensityFamily, Generator, GeneratorTable, Tabulated};
use crate::error::{Error, Result};

/// Contents of a model file.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub model: GameModel,
    pub family: Option<DensityFamily>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Header,
    States,
    Edges,
    Family,
}

struct Ctx<'a> {
    source: &'a str,
    line: usize,
}

impl Ctx<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { source_name: self.source.to_string(), line: self.line, message: message.into() }
    }

    fn number(&self, tok: Option<&str>, what: &str) -> Result<f64> {
        let tok = tok.ok_or_else(|| self.err(format!("missing {what}")))?;
        tok.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.err(format!("{what} `{tok}` is not a number")))
    }

    fn done(&self, mut rest: std::str::SplitWhitespace<'_>) -> Result<()> {
        match rest.next() {
            Some(tok) => Err(self.err(format!("unexpected `{tok}`"))),
            None => Ok(()),
        }
    }
}

#[derive(Default)]
struct FamilyBuilder {
    id: Option<String>,
    kind: Option<(String, usize)>,
    generator: Option<(Vec<String>, usize)>,
    knots: Vec<(f64, f64)>,
    first_line: usize,
}

impl FamilyBuilder {
    fn line(&mut self, ctx: &Ctx<'_>, key: &str, mut rest: std::str::SplitWhitespace<'_>) -> Result<()> {
        if self.first_line == 0 {
            self.first_line = ctx.line;
        }
        match key {
            "id" => {
                self.id = Some(rest.next().ok_or_else(|| ctx.err("missing family id"))?.to_string());
                ctx.done(rest)
            }
            "kind" => {
                let k = rest.next().ok_or_else(|| ctx.err("missing family kind"))?;
                if !matches!(k, "cesaro" | "exponential" | "generated" | "tabulated") {
                    return Err(ctx.err(format!("unknown family kind `{k}`")));
                }
                self.kind = Some((k.to_string(), ctx.line));
                ctx.done(rest)
            }
            "generator" => {
                self.generator = Some((rest.map(str::to_string).collect(), ctx.line));
                Ok(())
            }
            "knot" => {
                let t = ctx.number(rest.next(), "knot position")?;
                let v = ctx.number(rest.next(), "knot value")?;
                if let Some(&(prev, _)) = self.knots.last() {
                    if t <= prev {
                        return Err(ctx.err("knots must be strictly increasing"));
                    }
                }
                self.knots.push((t, v));
                ctx.done(rest)
            }
            other => Err(ctx.err(format!("unknown family key `{other}`"))),
        }
    }

    fn build(self, source: &str) -> Result<DensityFamily> {
        let at = |line: usize| Ctx { source, line };
        let (kind, kind_line) = self.kind.ok_or_else(|| at(self.first_line).err("family has no `kind` line"))?;
        let id = self.id.unwrap_or_else(|| kind.clone());
        let wrap = |line: usize, e: Error| at(line).err(e.to_string());
        match kind.as_str() {
            "cesaro" => Ok(DensityFamily { id, ..DensityFamily::cesaro() }),
            "exponential" => Ok(DensityFamily { id, ..DensityFamily::exponential() }),
            "generated" => {
                let (toks, line) =
                    self.generator.ok_or_else(|| at(kind_line).err("generated family needs a `generator` line"))?;
                let ctx = at(line);
                let mut it = toks.iter().map(String::as_str);
                let name = it.next().ok_or_else(|| ctx.err("missing generator name"))?;
                let mut num = |what: &str| ctx.number(it.next(), what);
                let generator = match name {
                    "const" => Generator::Constant(num("constant")?),
                    "affine" => Generator::Affine { intercept: num("intercept")?, slope: num("slope")? },
                    "exp" => Generator::Exp { rate: num("rate")? },
                    "sinsq" => Generator::SinSquared { amp: num("amplitude")?, freq: num("frequency")? },
                    "table" => Generator::Table(GeneratorTable::new(&self.knots).map_err(|e| wrap(line, e))?),
                    other => return Err(ctx.err(format!("unknown generator `{other}`"))),
                };
                if let Some(tok) = it.next() {
                    return Err(ctx.err(format!("unexpected `{tok}`")));
                }
                DensityFamily::generated(id, generator).map_err(|e| wrap(line, e))
            }
            _ => {
                let table = Tabulated::from_pairs(&self.knots).map_err(|e| wrap(kind_line, e))?;
                Ok(DensityFamily::fixed(id, Density::tabulated(table)))
            }
        }
    }
}

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Parses a model file; `source` names it in error messages.
pub fn parse_model(text: &str, source: &str) -> Result<ModelFile> {
    let mut section = Section::Header;
    let mut id: Option<String> = None;
    let mut dt: Option<f64> = None;
    let mut states: Vec<StateSpec> = Vec::new();
    let mut state_lines: Vec<usize> = Vec::new();
    let mut edges: Vec<(String, String, usize)> = Vec::new();
    let mut family: Option<FamilyBuilder> = None;

    for (i, raw) in text.lines().enumerate() {
        let ctx = Ctx { source, line: i + 1 };
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = match name.trim() {
                "states" => Section::States,
                "edges" => Section::Edges,
                "family" => {
                    if family.is_some() {
                        return Err(ctx.err("duplicate [family] section"));
                    }
                    family = Some(FamilyBuilder::default());
                    Section::Family
                }
                other => return Err(ctx.err(format!("unknown section [{other}]"))),
            };
            continue;
        }
        let mut toks = line.split_whitespace();
        let first = toks.next().unwrap();
        match section {
            Section::Header => match first {
                "id" => {
                    id = Some(toks.next().ok_or_else(|| ctx.err("missing model id"))?.to_string());
                    ctx.done(toks)?;
                }
                "dt" => {
                    let v = ctx.number(toks.next(), "dt")?;
                    if v <= 0.0 {
                        return Err(ctx.err("dt must be positive"));
                    }
                    dt = Some(v);
                    ctx.done(toks)?;
                }
                other => return Err(ctx.err(format!("unknown key `{other}` before the first section"))),
            },
            Section::States => {
                let owner_tok = toks.next().ok_or_else(|| ctx.err("missing owner"))?;
                let owner = Owner::parse(owner_tok)
                    .ok_or_else(|| ctx.err(format!("owner `{owner_tok}` is not MAX, MIN or NONE")))?;
                let cost = ctx.number(toks.next(), "cost")?;
                if !(0.0..=1.0).contains(&cost) {
                    return Err(ctx.err(format!("cost {cost} is outside [0, 1]")));
                }
                if states.iter().any(|s| s.name == first) {
                    return Err(ctx.err(format!("duplicate state `{first}`")));
                }
                ctx.done(toks)?;
                states.push(StateSpec { name: first.to_string(), owner, cost });
                state_lines.push(ctx.line);
            }
            Section::Edges => {
                let to = toks.next().ok_or_else(|| ctx.err("edge needs a target"))?;
                ctx.done(toks)?;
                edges.push((first.to_string(), to.to_string(), ctx.line));
            }
            Section::Family => family.as_mut().unwrap().line(&ctx, first, toks)?,
        }
    }

    let end = Ctx { source, line: text.lines().count().max(1) };
    let dt = dt.ok_or_else(|| end.err("missing `dt`"))?;
    if states.is_empty() {
        return Err(end.err("model has no states"));
    }
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
    for (from, to, line) in &edges {
        let ctx = Ctx { source, line: *line };
        let lookup = |name: &str| {
            states.iter().position(|s| s.name == name).ok_or_else(|| ctx.err(format!("unknown state `{name}`")))
        };
        let (a, b) = (lookup(from)?, lookup(to)?);
        if succ[a].contains(&b) {
            return Err(ctx.err(format!("duplicate edge {from} -> {to}")));
        }
        succ[a].push(b);
    }
    for (s, spec) in states.iter().enumerate() {
        let ctx = Ctx { source, line: state_lines[s] };
        if succ[s].is_empty() {
            return Err(ctx.err(format!("state `{}` has no outgoing edge", spec.name)));
        }
        if spec.owner == Owner::Uncontrolled && succ[s].len() != 1 {
            return Err(ctx.err(format!("uncontrolled state `{}` needs exactly one successor", spec.name)));
        }
    }
    let id = id.unwrap_or_else(|| file_stem(source));
    let model = GameModel::new(id, states, succ, dt).map_err(|e| end.err(e.to_string()))?;
    let family = family.map(|f| f.build(source)).transpose()?;
    Ok(ModelFile { model, family })
}

/// Parses a file holding only family keys, with or without a `[family]` header.
pub fn parse_family(text: &str, source: &str) -> Result<DensityFamily> {
    let mut builder = FamilyBuilder::default();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let ctx = Ctx { source, line: i + 1 };
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        if line == "[family]" && !seen_header && builder.first_line == 0 {
            seen_header = true;
            continue;
        }
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap();
        builder.line(&ctx, key, toks)?;
    }
    if builder.first_line == 0 {
        return Err(Ctx { source, line: 1 }.err("family file is empty"));
    }
    builder.build(source)
}

fn file_stem(source: &str) -> String {
    std::path::Path::new(source)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("model")
        .to_string()
}

/// Writes `model` in the format read by [`parse_model`].
pub fn write_model(model: &GameModel) -> String {
    let mut out = String::new();
    writeln!(out, "id {}", model.id()).unwrap();
    writeln!(out, "dt {}", model.dt()).unwrap();
    out.push_str("[states]\n");
    for s in model.states() {
        writeln!(out, "{} {} {}", s.name, s.owner.tag(), s.cost).unwrap();
    }
    out.push_str("[edges]\n");
    for s in 0..model.n_states() {
        for &t in model.successors(s) {
            writeln!(out, "{} {}", model.name(s), model.name(t)).unwrap();
        }
    }
    out
}
