use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliError;

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A CSV table held in memory until the run finishes.
pub struct Table {
    name: String,
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    /// `units` goes into the leading comment row together with producer and version.
    pub fn new(name: impl Into<String>, producer: &str, units: &str, columns: &[&str]) -> Self {
        let mut buf = Vec::new();
        buf.extend_from_slice(format!("# tauberlab {producer} v{VERSION}; units: {units}\n").as_bytes());
        let mut writer = csv::Writer::from_writer(buf);
        writer.write_record(columns).unwrap();
        Self { name: name.into(), writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).unwrap();
    }

    fn finish(self) -> (String, Vec<u8>) {
        let bytes = self.writer.into_inner().map_err(|e| e.to_string()).unwrap();
        (self.name, bytes)
    }
}

/// Files produced by one subcommand, written together at the end.
#[derive(Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn table(&mut self, t: Table) {
        self.files.push(t.finish());
    }

    pub fn svg(&mut self, name: impl Into<String>, body: String) {
        self.files.push((name.into(), body.into_bytes()));
    }

    pub fn write_all(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::input(format!("cannot create output directory {}: {e}", dir.display())))?;
        let mut written = Vec::new();
        for (name, bytes) in self.files {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Shortest round-trip form; scientific outside `[1e-4, 1e6)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn flag(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

/// File-name friendly form of a family or model id.
pub fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

/// One polyline per series of `(λ, gap)`; `λ` on a log axis, largest on the left.
pub fn gap_chart(title: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

    let pts = series.iter().flat_map(|s| s.1.iter()).filter(|p| p.0 > 0.0);
    let (mut lmin, mut lmax, mut gmax) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(l, g) in pts {
        lmin = lmin.min(l.log10());
        lmax = lmax.max(l.log10());
        gmax = gmax.max(g);
    }
    if !lmin.is_finite() || lmin == lmax {
        lmin -= 1.0;
        lmax += 1.0;
    }
    if gmax <= 0.0 {
        gmax = 1.0;
    }
    let x = |l: f64| PAD + (lmax - l.log10()) / (lmax - lmin) * (W - 2.0 * PAD);
    let y = |g: f64| H - PAD - g / gmax * (H - 2.0 * PAD);

    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{PAD}" y="25" font-family="sans-serif" font-size="14">{}</text>"#, escape(title)).unwrap();
    writeln!(
        out,
        r#"<path d="M{PAD} {PAD} L{PAD} {b} L{r} {b}" stroke="black" fill="none"/>"#,
        b = H - PAD,
        r = W - PAD
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{PAD}" y="{}" font-family="sans-serif" font-size="11">λ = 1e{lmax:.1} … 1e{lmin:.1} (log scale)</text>"#,
        H - PAD + 20.0
    )
    .unwrap();
    writeln!(out, r#"<text x="5" y="{}" font-family="sans-serif" font-size="11">gap ≤ {gmax:.3e}</text>"#, PAD - 5.0)
        .unwrap();
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        for (j, &(l, g)) in pts.iter().filter(|p| p.0 > 0.0).enumerate() {
            write!(d, "{}{:.2} {:.2} ", if j == 0 { "M" } else { "L" }, x(l), y(g)).unwrap();
        }
        writeln!(out, r#"<path d="{}" stroke="{color}" fill="none" stroke-width="1.5"/>"#, d.trim_end()).unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            W - PAD - 120.0,
            PAD + 15.0 * i as f64,
            escape(label)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
