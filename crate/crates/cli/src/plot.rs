//! Static SVG charts of sweep and front CSV files.
//!
//! Sweep charts get one facet per (train_capacity, train_interval) pair, each
//! with one panel per plotted indicator against β_c and one line per β_τ.
//! Front charts are a scatter in objective space, one `circle.mark` per row.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use modalshift::output::format_sig6;
use thiserror::Error;

/// Indicators drawn for each sweep facet.
pub const SWEEP_PANELS: [&str; 2] = ["avg_congestion_other", "avg_travel_time"];

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 240.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const LEGEND_W: f64 = 130.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("reading CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("input has no `{0}` column")]
    MissingColumn(String),
    #[error("row {row}: `{value}` in column `{column}` is not a number")]
    BadNumber {
        row: usize,
        column: String,
        value: String,
    },
    #[error("input has no data rows")]
    Empty,
    #[error("cannot tell whether this is a sweep or a front file")]
    UnknownKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    Sweep,
    Front,
}

impl PlotKind {
    pub fn detect(csv_text: &str) -> Option<PlotKind> {
        let header: Vec<&str> = csv_text.lines().next()?.split(',').collect();
        if header.contains(&"rer_congestion") && header.contains(&"other_congestion") {
            Some(PlotKind::Front)
        } else if header.contains(&"avg_travel_time_mean") {
            Some(PlotKind::Sweep)
        } else {
            None
        }
    }
}

pub fn render(csv_text: &str, kind: Option<PlotKind>) -> Result<String, PlotError> {
    match kind.or_else(|| PlotKind::detect(csv_text)) {
        Some(PlotKind::Sweep) => render_sweep(csv_text),
        Some(PlotKind::Front) => render_front(csv_text),
        None => Err(PlotError::UnknownKind),
    }
}

/// Numeric columns of a CSV file, by name.
struct Table {
    columns: BTreeMap<String, Vec<f64>>,
    rows: usize,
}

impl Table {
    fn read(csv_text: &str, wanted: &[&str]) -> Result<Table, PlotError> {
        let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
        let headers = reader.headers()?.clone();
        let mut index = Vec::new();
        for &name in wanted {
            let i = headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| PlotError::MissingColumn(name.to_string()))?;
            index.push((name, i));
        }
        let mut columns: BTreeMap<String, Vec<f64>> =
            wanted.iter().map(|&n| (n.to_string(), Vec::new())).collect();
        let mut rows = 0;
        for record in reader.records() {
            let record = record?;
            rows += 1;
            for &(name, i) in &index {
                let raw = record.get(i).unwrap_or("");
                let value = raw.trim().parse().map_err(|_| PlotError::BadNumber {
                    row: rows,
                    column: name.to_string(),
                    value: raw.to_string(),
                })?;
                columns.get_mut(name).expect("wanted column").push(value);
            }
        }
        if rows == 0 {
            return Err(PlotError::Empty);
        }
        Ok(Table { columns, rows })
    }

    fn col(&self, name: &str) -> &[f64] {
        &self.columns[name]
    }
}

#[derive(Debug, Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl IntoIterator<Item = f64>) -> Range {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.into_iter().filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return Range { lo: 0.0, hi: 1.0 };
        }
        if hi - lo < 1e-12 {
            let pad = if lo == 0.0 { 0.5 } else { lo.abs() * 0.05 };
            return Range { lo: lo - pad, hi: hi + pad };
        }
        let pad = (hi - lo) * 0.05;
        Range { lo: lo - pad, hi: hi + pad }
    }

    fn frac(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }
}

/// Plot area of one panel, in SVG pixels.
struct Panel {
    x0: f64,
    y0: f64,
    x: Range,
    y: Range,
}

impl Panel {
    fn px(&self, v: f64) -> f64 {
        self.x0 + MARGIN_L + self.x.frac(v) * (PANEL_W - MARGIN_L - MARGIN_R)
    }

    fn py(&self, v: f64) -> f64 {
        self.y0 + PANEL_H - MARGIN_B - self.y.frac(v) * (PANEL_H - MARGIN_T - MARGIN_B)
    }

    fn draw_axes(&self, out: &mut String, title: &str, x_label: &str, y_label: &str) {
        let (left, right) = (self.x0 + MARGIN_L, self.x0 + PANEL_W - MARGIN_R);
        let (top, bottom) = (self.y0 + MARGIN_T, self.y0 + PANEL_H - MARGIN_B);
        let _ = writeln!(
            out,
            r##"<rect class="frame" x="{left:.1}" y="{top:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#333"/>"##,
            right - left,
            bottom - top
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let xv = self.x.lo + f * (self.x.hi - self.x.lo);
            let yv = self.y.lo + f * (self.y.hi - self.y.lo);
            let (x, y) = (self.px(xv), self.py(yv));
            let _ = writeln!(
                out,
                r##"<line class="tick" x1="{x:.1}" y1="{bottom:.1}" x2="{x:.1}" y2="{:.1}" stroke="#333"/><text class="tick-label" x="{x:.1}" y="{:.1}" font-size="10" text-anchor="middle">{}</text>"##,
                bottom + 4.0,
                bottom + 16.0,
                format_sig6(xv)
            );
            let _ = writeln!(
                out,
                r##"<line class="tick" x1="{:.1}" y1="{y:.1}" x2="{left:.1}" y2="{y:.1}" stroke="#333"/><text class="tick-label" x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"##,
                left - 4.0,
                left - 6.0,
                y + 3.0,
                format_sig6(yv)
            );
        }
        let cx = (left + right) / 2.0;
        let cy = (top + bottom) / 2.0;
        let _ = writeln!(
            out,
            r#"<text class="panel-title" x="{cx:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
            self.y0 + 22.0,
            escape(title)
        );
        let _ = writeln!(
            out,
            r#"<text class="axis-label x-label" x="{cx:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
            bottom + 36.0,
            escape(x_label)
        );
        let lx = self.x0 + 16.0;
        let _ = writeln!(
            out,
            r#"<text class="axis-label y-label" x="{lx:.1}" y="{cy:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 {lx:.1} {cy:.1})">{}</text>"#,
            escape(y_label)
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn svg_open(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

/// Sorted distinct values, comparing exactly.
fn distinct(values: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn render_sweep(csv_text: &str) -> Result<String, PlotError> {
    let mut wanted = vec!["beta_c", "beta_tau", "train_capacity", "train_interval"];
    let means: Vec<String> = SWEEP_PANELS.iter().map(|p| format!("{p}_mean")).collect();
    wanted.extend(means.iter().map(String::as_str));
    let table = Table::read(csv_text, &wanted)?;
    let (bc, bt) = (table.col("beta_c"), table.col("beta_tau"));
    let (cap, int) = (table.col("train_capacity"), table.col("train_interval"));

    let mut facets: Vec<(f64, f64)> = (0..table.rows).map(|i| (cap[i], int[i])).collect();
    facets.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    facets.dedup();
    let taus = distinct(bt);
    let x = Range::of(bc.iter().copied());

    let width = PANEL_W * SWEEP_PANELS.len() as f64 + LEGEND_W;
    let height = PANEL_H * facets.len() as f64;
    let mut out = String::new();
    svg_open(&mut out, width, height);

    for (row, &(c, i)) in facets.iter().enumerate() {
        let rows: Vec<usize> = (0..table.rows)
            .filter(|&k| cap[k] == c && int[k] == i)
            .collect();
        let _ = writeln!(
            out,
            r#"<g class="facet" data-train-capacity="{}" data-train-interval="{}">"#,
            format_sig6(c),
            format_sig6(i)
        );
        for (col, (&indicator, mean)) in SWEEP_PANELS.iter().zip(&means).enumerate() {
            let values = table.col(mean);
            let panel = Panel {
                x0: col as f64 * PANEL_W,
                y0: row as f64 * PANEL_H,
                x,
                y: Range::of(rows.iter().map(|&k| values[k])),
            };
            let _ = writeln!(out, r#"<g class="panel" data-indicator="{indicator}">"#);
            panel.draw_axes(
                &mut out,
                &format!("C = {}, I = {}", format_sig6(c), format_sig6(i)),
                "beta_c",
                indicator,
            );
            for (s, &tau) in taus.iter().enumerate() {
                let mut pts: Vec<(f64, f64)> = rows
                    .iter()
                    .filter(|&&k| bt[k] == tau && values[k].is_finite())
                    .map(|&k| (bc[k], values[k]))
                    .collect();
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                let colour = PALETTE[s % PALETTE.len()];
                let _ = write!(
                    out,
                    r#"<g class="series" data-beta-tau="{}"><polyline fill="none" stroke="{colour}" stroke-width="1.5" points=""#,
                    format_sig6(tau)
                );
                let coords: Vec<String> = pts
                    .iter()
                    .map(|&(a, b)| format!("{:.2},{:.2}", panel.px(a), panel.py(b)))
                    .collect();
                let _ = write!(out, "{}\"/>", coords.join(" "));
                for &(a, b) in &pts {
                    let _ = write!(
                        out,
                        r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="2" fill="{colour}"/>"#,
                        panel.px(a),
                        panel.py(b)
                    );
                }
                let _ = writeln!(out, "</g>");
            }
            let _ = writeln!(out, "</g>");
        }
        let _ = writeln!(out, "</g>");
    }

    let lx = PANEL_W * SWEEP_PANELS.len() as f64 + 10.0;
    let _ = writeln!(
        out,
        r#"<g class="legend"><text x="{lx:.1}" y="{:.1}" font-size="12">beta_tau</text>"#,
        MARGIN_T
    );
    for (s, &tau) in taus.iter().enumerate() {
        let y = MARGIN_T + 16.0 * (s as f64 + 1.0);
        let colour = PALETTE[s % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{colour}" stroke-width="2"/><text x="{:.1}" y="{y:.1}" font-size="11">{}</text>"#,
            y - 4.0,
            lx + 20.0,
            y - 4.0,
            lx + 26.0,
            format_sig6(tau)
        );
    }
    let _ = writeln!(out, "</g>\n</svg>");
    Ok(out)
}

pub fn render_front(csv_text: &str) -> Result<String, PlotError> {
    let table = Table::read(csv_text, &["beta_c", "beta_tau", "rer_congestion", "other_congestion"])?;
    let (f1, f2) = (table.col("rer_congestion"), table.col("other_congestion"));
    let (bc, bt) = (table.col("beta_c"), table.col("beta_tau"));
    let panel = Panel {
        x0: 0.0,
        y0: 0.0,
        x: Range::of(f1.iter().copied()),
        y: Range::of(f2.iter().copied()),
    };
    let mut out = String::new();
    svg_open(&mut out, PANEL_W, PANEL_H);
    panel.draw_axes(&mut out, "Pareto front", "rer_congestion", "other_congestion");
    for k in 0..table.rows {
        let _ = writeln!(
            out,
            r##"<circle class="mark" cx="{:.2}" cy="{:.2}" r="3" fill="#d62728" fill-opacity="0.8"><title>beta_c {}, beta_tau {}</title></circle>"##,
            panel.px(f1[k]),
            panel.py(f2[k]),
            format_sig6(bc[k]),
            format_sig6(bt[k])
        );
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
