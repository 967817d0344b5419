//! CSV, SVG and JSON output for monogamy runs and p-sweeps.
//!
//! All numbers are written with 12 significant digits so files are
//! byte-identical across runs with the same inputs.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lab::{Branch, MonogamyRecord, RunSummary, SweepRecord};

pub const CSV_HEADER: [&str; 8] = [
    "sample_id",
    "n_ab",
    "n_ac",
    "n_a_bc",
    "lhs",
    "residual",
    "sampler",
    "seed",
];
pub const SWEEP_HEADER: [&str; 4] = ["p", "analytic_residual", "numeric_residual", "branch"];

const SIGNIFICANT: usize = 12;
const CANVAS: f64 = 800.0;
const MARGIN: f64 = 12.0;

/// Formats `x` with 12 significant digits, switching to exponent notation
/// for magnitudes below 1e-5 or at least 1e12.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-5..12).contains(&exponent) {
        return format!("{:.*e}", SIGNIFICANT - 1, x);
    }
    let decimals = (SIGNIFICANT as i32 - 1 - exponent).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    fmt_sig(x).parse().unwrap_or(x)
}

fn require_records<T>(records: &[T]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::OutOfRange("no records to emit".into()));
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

pub fn render_csv(records: &[MonogamyRecord]) -> Result<String> {
    require_records(records)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for r in records {
        w.write_record([
            r.sample_id.to_string(),
            fmt_sig(r.n_ab),
            fmt_sig(r.n_ac),
            fmt_sig(r.n_a_bc),
            fmt_sig(r.lhs),
            fmt_sig(r.residual),
            r.sampler.to_string(),
            r.seed.to_string(),
        ])
        .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

pub fn emit_csv(records: &[MonogamyRecord], path: &Path) -> Result<()> {
    let text = render_csv(records)?;
    fs::write(path, text)?;
    Ok(())
}

fn parse_field<T: std::str::FromStr>(row: &csv::StringRecord, idx: usize) -> Result<T> {
    let raw = row
        .get(idx)
        .ok_or_else(|| Error::Parse(format!("missing column {idx}")))?;
    raw.parse()
        .map_err(|_| Error::Parse(format!("bad value '{raw}' in column {}", CSV_HEADER[idx])))
}

/// Reads records written by [`render_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<MonogamyRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_error)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    rdr.records()
        .map(|row| {
            let row = row.map_err(csv_error)?;
            Ok(MonogamyRecord {
                sample_id: parse_field(&row, 0)?,
                n_ab: parse_field(&row, 1)?,
                n_ac: parse_field(&row, 2)?,
                n_a_bc: parse_field(&row, 3)?,
                lhs: parse_field(&row, 4)?,
                residual: parse_field(&row, 5)?,
                sampler: parse_field(&row, 6)?,
                seed: parse_field(&row, 7)?,
            })
        })
        .collect()
}

pub fn render_sweep_csv(records: &[SweepRecord]) -> Result<String> {
    require_records(records)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER).map_err(csv_error)?;
    for r in records {
        w.write_record([
            fmt_sig(r.p),
            fmt_sig(r.analytic_residual),
            fmt_sig(r.numeric_residual),
            r.branch.to_string(),
        ])
        .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

pub fn emit_sweep_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    fs::write(path, render_sweep_csv(records)?)?;
    Ok(())
}

/// Screen coordinates of a unit-square point.
pub fn to_screen(x: f64, y: f64) -> (f64, f64) {
    let span = CANVAS - 2.0 * MARGIN;
    (MARGIN + x * span, CANVAS - MARGIN - y * span)
}

fn coord(v: f64) -> String {
    format!("{v:.3}")
}

fn svg_open(out: &mut String, title: &str) {
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{CANVAS}\" height=\"{CANVAS}\" viewBox=\"0 0 {CANVAS} {CANVAS}\">\n"
    ));
    out.push_str(&format!("<title>{title}</title>\n"));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{CANVAS}\" height=\"{CANVAS}\" fill=\"white\"/>\n"
    ));
    let (x0, y0) = to_screen(0.0, 0.0);
    let (x1, y1) = to_screen(1.0, 1.0);
    out.push_str(&format!(
        "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n\
         <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n\
         <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n</g>\n",
        coord(x0),
        coord(y0),
        coord(x1),
        coord(y0),
        coord(x0),
        coord(y0),
        coord(x0),
        coord(y1)
    ));
}

/// Scatter of `(lhs, n_a_bc)` over the unit square with the diagonal `y = x`.
pub fn render_svg_scatter(records: &[MonogamyRecord]) -> Result<String> {
    require_records(records)?;
    let mut out = String::new();
    svg_open(&mut out, "negativity monogamy: N_A(BC) against sqrt(N_AB^2 + N_AC^2)");
    let (x0, y0) = to_screen(0.0, 0.0);
    let (x1, y1) = to_screen(1.0, 1.0);
    out.push_str(&format!(
        "<line class=\"diagonal\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"blue\" stroke-width=\"1.5\"/>\n",
        coord(x0),
        coord(y0),
        coord(x1),
        coord(y1)
    ));
    out.push_str("<g class=\"points\" fill=\"black\">\n");
    for r in records {
        let (x, y) = to_screen(r.lhs, r.n_a_bc);
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"1.5\"/>\n",
            coord(x),
            coord(y)
        ));
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

pub fn emit_svg_scatter(records: &[MonogamyRecord], path: &Path) -> Result<()> {
    fs::write(path, render_svg_scatter(records)?)?;
    Ok(())
}

/// Residual against `p`: analytic values as a blue polyline, numeric ones as dots.
pub fn render_sweep_svg(records: &[SweepRecord]) -> Result<String> {
    require_records(records)?;
    let mut out = String::new();
    svg_open(&mut out, "monogamy residual against p");
    let (bx, _) = to_screen(crate::lab::OU_BRANCH_POINT, 0.0);
    if records.iter().any(|r| r.branch != Branch::NotApplicable) {
        let (_, top) = to_screen(0.0, 1.0);
        let (_, bottom) = to_screen(0.0, 0.0);
        out.push_str(&format!(
            "<line class=\"branch\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n",
            coord(bx),
            coord(top),
            coord(bx),
            coord(bottom)
        ));
    }
    let points: Vec<String> = records
        .iter()
        .map(|r| {
            let (x, y) = to_screen(r.p, r.analytic_residual);
            format!("{},{}", coord(x), coord(y))
        })
        .collect();
    out.push_str(&format!(
        "<polyline class=\"analytic\" fill=\"none\" stroke=\"blue\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        points.join(" ")
    ));
    out.push_str("<g class=\"numeric\" fill=\"black\">\n");
    for r in records {
        let (x, y) = to_screen(r.p, r.numeric_residual);
        out.push_str(&format!("<circle cx=\"{}\" cy=\"{}\" r=\"2\"/>\n", coord(x), coord(y)));
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

pub fn emit_sweep_svg(records: &[SweepRecord], path: &Path) -> Result<()> {
    fs::write(path, render_sweep_svg(records)?)?;
    Ok(())
}

#[derive(Serialize)]
struct SummaryJson<'a> {
    n: usize,
    min_residual: f64,
    violations: usize,
    sampler: &'a crate::lab::Sampler,
    base_seed: u64,
}

pub fn render_summary_json(summary: &RunSummary) -> Result<String> {
    let view = SummaryJson {
        n: summary.n,
        min_residual: round_sig(summary.min_residual),
        violations: summary.violations,
        sampler: &summary.sampler,
        base_seed: summary.base_seed,
    };
    let mut text = serde_json::to_string_pretty(&view).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn emit_summary_json(summary: &RunSummary, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(render_summary_json(summary)?.as_bytes())?;
    Ok(())
}

/// Circle centres and the diagonal endpoints read back from a scatter SVG.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterGeometry {
    pub diagonal: [(f64, f64); 2],
    pub points: Vec<(f64, f64)>,
}

impl ScatterGeometry {
    /// Screen-space `y` of the diagonal at `x`.
    pub fn diagonal_y(&self, x: f64) -> f64 {
        let [(x0, y0), (x1, y1)] = self.diagonal;
        y0 + (x - x0) * (y1 - y0) / (x1 - x0)
    }
}

fn attr(line: &str, name: &str) -> Option<f64> {
    let key = format!(" {name}=\"");
    let start = line.find(&key)? + key.len();
    let end = start + line[start..].find('"')?;
    line[start..end].parse().ok()
}

/// Parses the subset of SVG that [`render_svg_scatter`] writes.
pub fn parse_svg_scatter(svg: &str) -> Result<ScatterGeometry> {
    let mut diagonal = None;
    let mut points = Vec::new();
    for line in svg.lines() {
        if line.starts_with("<line class=\"diagonal\"") {
            let get = |n| attr(line, n).ok_or_else(|| Error::Parse(format!("diagonal lacks {n}")));
            diagonal = Some([(get("x1")?, get("y1")?), (get("x2")?, get("y2")?)]);
        } else if line.starts_with("<circle") {
            let cx = attr(line, "cx").ok_or_else(|| Error::Parse("circle lacks cx".into()))?;
            let cy = attr(line, "cy").ok_or_else(|| Error::Parse("circle lacks cy".into()))?;
            points.push((cx, cy));
        }
    }
    Ok(ScatterGeometry {
        diagonal: diagonal.ok_or_else(|| Error::Parse("no diagonal line".into()))?,
        points,
    })
}
