//! Line plots of sweep CSV files.
//!
//! Plotting never computes anything: the points drawn are exactly the
//! selected columns of the input, and those columns are written back out
//! verbatim as a sidecar CSV.

use std::fmt::Write as _;

use anyhow::{anyhow, bail};

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub x: String,
    pub y: String,
    pub series: Option<String>,
    pub log_x: bool,
    pub log_y: bool,
}

/// The selected columns: raw text for the sidecar, parsed values for the
/// drawing.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub header: Vec<String>,
    pub raw: Vec<Vec<String>>,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub fn read(text: &str, spec: &PlotSpec) -> anyhow::Result<PlotData> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let mut rows = reader.records();
    let header = match rows.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => bail!("line 1: {e}"),
        None => bail!("input CSV is empty"),
    };
    let column = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| anyhow!("line 1: no column named `{name}`"))
    };
    let mut picks = vec![column(&spec.x)?, column(&spec.y)?];
    if let Some(s) = &spec.series {
        picks.push(column(s)?);
    }

    let mut raw = Vec::new();
    let mut series: Vec<Series> = Vec::new();
    for row in rows {
        let row = row.map_err(|e| match e.position() {
            Some(p) => anyhow!("line {}: {e}", p.line()),
            None => anyhow!("{e}"),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != header.len() {
            bail!("line {line}: expected {} fields, found {}", header.len(), row.len());
        }
        let fields: Vec<String> = picks.iter().map(|&i| row[i].to_string()).collect();
        let value = |i: usize, axis: &str, log: bool| -> anyhow::Result<f64> {
            let v: f64 = fields[i]
                .trim()
                .parse()
                .map_err(|_| anyhow!("line {line}: {axis} value `{}` is not a number", fields[i]))?;
            if log && !(v > 0.0) {
                bail!("line {line}: {axis} value {v} cannot go on a log axis");
            }
            Ok(v)
        };
        let point = (value(0, "x", spec.log_x)?, value(1, "y", spec.log_y)?);
        let name = fields.get(2).cloned().unwrap_or_default();
        match series.iter_mut().find(|s| s.name == name) {
            Some(s) => s.points.push(point),
            None => series.push(Series { name, points: vec![point] }),
        }
        raw.push(fields);
    }
    if raw.is_empty() {
        bail!("input CSV has a header but no data rows");
    }
    Ok(PlotData {
        header: picks.iter().map(|&i| header[i].to_string()).collect(),
        raw,
        series,
    })
}

/// The selected columns, header first, one line per input row.
pub fn sidecar(data: &PlotData) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&data.header)?;
    for row in &data.raw {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#6a4c93", "#555555"];

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Axis {
        let (mut lo, mut hi) = values
            .map(|v| if log { v.log10() } else { v })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            let pad = if log { 0.5 } else { 0.5 * lo.abs().max(1.0) };
            lo -= pad;
            hi += pad;
        }
        Axis { lo, hi, log }
    }

    fn fraction(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            // 1-2-5 ticks when the range spans fewer than two decades
            let mantissas: &[f64] = if self.hi - self.lo < 2.0 { &[1.0, 2.0, 5.0] } else { &[1.0] };
            let (a, b) = (self.lo.floor() as i32, self.hi.ceil() as i32);
            let ticks: Vec<f64> = (a..=b)
                .flat_map(|e| mantissas.iter().map(move |m| m * 10f64.powi(e)))
                .filter(|t| (self.lo - 1e-9..=self.hi + 1e-9).contains(&t.log10()))
                .collect();
            if !ticks.is_empty() {
                return ticks;
            }
            return vec![10f64.powf(self.lo), 10f64.powf(self.hi)];
        }
        let raw = (self.hi - self.lo) / 5.0;
        let magnitude = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * magnitude)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * magnitude);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last).map(|i| i as f64 * step).collect()
    }
}

pub fn svg(data: &PlotData, spec: &PlotSpec) -> String {
    let all = || data.series.iter().flat_map(|s| s.points.iter());
    let xa = Axis::new(all().map(|p| p.0), spec.log_x);
    let ya = Axis::new(all().map(|p| p.1), spec.log_y);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + pw * xa.fraction(x);
    let sy = |y: f64| TOP + ph * (1.0 - ya.fraction(y));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in xa.ticks() {
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            tick_label(t)
        );
    }
    for t in ya.ticks() {
        let y = sy(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        escape(&data.header[0]),
        if spec.log_x { " (log)" } else { "" }
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(20 {:.2}) rotate(-90)" text-anchor="middle">{}{}</text>"#,
        TOP + ph / 2.0,
        escape(&data.header[1]),
        if spec.log_y { " (log)" } else { "" }
    );

    for (i, series) in data.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if series.points.len() > 1 {
            let path: Vec<String> = series.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
        }
        for &(x, y) in &series.points {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y));
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let label = if series.name.is_empty() { &data.header[1] } else { &series.name };
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.0e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
