//! Self-contained SVG charts drawn from a saved report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};

use crate::config::Kind;
use crate::report::{Report, Value};

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 200.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Style {
    Line,
    Dashed,
    Points,
}

/// `(x, y, whisker)`.
type Point = (f64, f64, Option<(f64, f64)>);

#[derive(Debug, Clone)]
struct Series {
    label: String,
    style: Style,
    points: Vec<Point>,
}

#[derive(Debug, Clone)]
struct Panel {
    title: String,
    x_label: String,
    y_label: String,
    log_x: bool,
    log_y: bool,
    series: Vec<Series>,
    notes: Vec<String>,
}

impl Panel {
    fn new(
        title: impl Into<String>,
        x_label: &str,
        y_label: &str,
        log_x: bool,
        log_y: bool,
    ) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_x,
            log_y,
            series: Vec::new(),
            notes: Vec::new(),
        }
    }
}

/// Column lookup over a report's rows.
struct Rows<'a> {
    report: &'a Report,
}

impl<'a> Rows<'a> {
    fn col(&self, name: &str) -> anyhow::Result<usize> {
        self.report
            .column(name)
            .with_context(|| format!("report has no `{name}` column"))
    }

    fn num(&self, row: usize, col: usize) -> Option<f64> {
        self.report.rows[row]
            .values
            .get(col)
            .and_then(Value::as_f64)
    }

    fn key(&self, row: usize, cols: &[usize]) -> String {
        cols.iter()
            .map(|&c| {
                let name = &self.report.columns[c];
                let v = &self.report.rows[row].values[c];
                match v.as_f64() {
                    Some(x) => format!("{name}={}", short(x)),
                    None => format!("{name}={}", v.as_str().unwrap_or("-")),
                }
            })
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Row indices grouped by the values in `by`, in first-seen order.
    fn groups(&self, by: &[&str]) -> anyhow::Result<Vec<(String, Vec<usize>)>> {
        let cols = by
            .iter()
            .map(|c| self.col(c))
            .collect::<anyhow::Result<Vec<_>>>()?;
        let mut order: Vec<String> = Vec::new();
        let mut map: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for i in 0..self.report.rows.len() {
            let k = self.key(i, &cols);
            if !map.contains_key(&k) {
                order.push(k.clone());
            }
            map.entry(k).or_default().push(i);
        }
        Ok(order
            .into_iter()
            .map(|k| {
                let rows = map.remove(&k).unwrap_or_default();
                (k, rows)
            })
            .collect())
    }

    /// `(x, y)` series over `rows`, sorted by x, skipping missing values.
    fn series(
        &self,
        rows: &[usize],
        x: &str,
        y: &str,
        label: String,
        style: Style,
    ) -> anyhow::Result<Series> {
        let (cx, cy) = (self.col(x)?, self.col(y)?);
        let mut points: Vec<_> = rows
            .iter()
            .filter_map(|&r| Some((self.num(r, cx)?, self.num(r, cy)?, None)))
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Series {
            label,
            style,
            points,
        })
    }

    /// Points with whiskers `[lo, hi]` taken from two columns.
    fn whiskered(
        &self,
        rows: &[usize],
        x: &str,
        y: &str,
        lo: &str,
        hi: &str,
        label: String,
    ) -> anyhow::Result<Series> {
        let (cx, cy, cl, ch) = (self.col(x)?, self.col(y)?, self.col(lo)?, self.col(hi)?);
        let mut points: Vec<_> = rows
            .iter()
            .filter_map(|&r| {
                let w = self.num(r, cl).zip(self.num(r, ch));
                Some((self.num(r, cx)?, self.num(r, cy)?, w))
            })
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Series {
            label,
            style: Style::Points,
            points,
        })
    }

    /// Points with whiskers `y ± k·se`.
    fn with_stderr(
        &self,
        rows: &[usize],
        x: &str,
        y: &str,
        se: &str,
        k: f64,
        label: String,
    ) -> anyhow::Result<Series> {
        let (cx, cy, cs) = (self.col(x)?, self.col(y)?, self.col(se)?);
        let mut points: Vec<_> = rows
            .iter()
            .filter_map(|&r| {
                let y = self.num(r, cy)?;
                let w = self.num(r, cs).map(|s| (y - k * s, y + k * s));
                Some((self.num(r, cx)?, y, w))
            })
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Series {
            label,
            style: Style::Points,
            points,
        })
    }
}

fn short(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e9 {
        format!("{}", x as i64)
    } else {
        format!("{:.4}", x)
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_owned()
    }
}

fn label(group: &str, what: &str) -> String {
    if group.is_empty() {
        what.to_owned()
    } else {
        format!("{what} ({group})")
    }
}

fn panels_for(report: &Report) -> anyhow::Result<Vec<Panel>> {
    let rows = Rows { report };
    let mut panels = Vec::new();
    match report.kind {
        Kind::BoundsTable => {
            let mut p = Panel::new("failure-probability bounds vs D", "D", "bound", true, true);
            let mut off_scale: Option<f64> = None;
            for (g, idx) in rows.groups(&["d", "R", "epsilon"])? {
                for name in [
                    "thm1",
                    "rahimi",
                    "sutherland",
                    "lower_expected",
                    "lower_prob",
                ] {
                    let style = if name.starts_with("lower") {
                        Style::Dashed
                    } else {
                        Style::Line
                    };
                    p.series
                        .push(rows.series(&idx, "D", name, label(&g, name), style)?);
                }
                let c = rows.col("sriperumbudur_log")?;
                for &r in &idx {
                    if let Some(l) = rows.num(r, c) {
                        off_scale = Some(off_scale.map_or(l, |m: f64| m.max(l)));
                    }
                }
            }
            let top = panel_range(&p.series, true).map(|(_, hi)| hi.ln());
            if let (Some(l), Some(top)) = (off_scale, top) {
                if l > top {
                    p.notes.push(format!(
                        "sriperumbudur bound off-scale high: ln value up to {:.2}",
                        l
                    ));
                } else {
                    for (g, idx) in rows.groups(&["d", "R", "epsilon"])? {
                        let mut s = rows.series(
                            &idx,
                            "D",
                            "sriperumbudur_log",
                            label(&g, "sriperumbudur"),
                            Style::Line,
                        )?;
                        s.points.iter_mut().for_each(|pt| pt.1 = pt.1.exp());
                        p.series.push(s);
                    }
                }
            }
            panels.push(p);
            let mut s = Panel::new(
                "lower and upper bounds vs R",
                "R",
                "probability",
                false,
                true,
            );
            for (g, idx) in rows.groups(&["d", "D", "epsilon"])? {
                s.series
                    .push(rows.series(&idx, "R", "thm1", label(&g, "upper"), Style::Line)?);
                s.series.push(rows.series(
                    &idx,
                    "R",
                    "lower_prob",
                    label(&g, "lower"),
                    Style::Dashed,
                )?);
            }
            panels.push(s);
        }
        Kind::ProbabilityEnvelope => {
            let mut p = Panel::new(
                "sup-error failure rate vs D",
                "D",
                "P(sup error >= epsilon)",
                true,
                true,
            );
            for (g, idx) in rows.groups(&["R"])? {
                p.series
                    .push(rows.series(&idx, "D", "bound", label(&g, "bound"), Style::Line)?);
                p.series.push(rows.whiskered(
                    &idx,
                    "D",
                    "p_hat",
                    "ci_low",
                    "ci_high",
                    label(&g, "empirical"),
                )?);
            }
            panels.push(p);
        }
        Kind::ExpectedSup => {
            let mut p = Panel::new("expected sup error vs D", "D", "E sup error", true, true);
            for (g, idx) in rows.groups(&["R"])? {
                p.series
                    .push(rows.series(&idx, "D", "bound", label(&g, "bound"), Style::Line)?);
                p.series.push(rows.with_stderr(
                    &idx,
                    "D",
                    "mean",
                    "stderr",
                    3.0,
                    label(&g, "mean"),
                )?);
            }
            panels.push(p);
        }
        Kind::Lipschitz => {
            let mut p = Panel::new("derivative variance vs D", "D", "max variance", true, true);
            let all: Vec<usize> = (0..report.rows.len()).collect();
            p.series
                .push(rows.series(&all, "D", "cap", "cap 1/D".into(), Style::Line)?);
            p.series.push(rows.with_stderr(
                &all,
                "D",
                "max_variance",
                "stderr",
                3.0,
                "empirical".into(),
            )?);
            panels.push(p);
        }
        Kind::ParameterIdentity => {
            let mut p = Panel::new("mean of cos(sum) vs D", "D", "mean", false, true);
            for (g, idx) in rows.groups(&["r"])? {
                p.series.push(rows.series(
                    &idx,
                    "D",
                    "pre_root_target",
                    label(&g, "target"),
                    Style::Line,
                )?);
                p.series.push(rows.with_stderr(
                    &idx,
                    "D",
                    "pre_root_mean",
                    "stderr",
                    3.0,
                    label(&g, "sampled"),
                )?);
            }
            panels.push(p);
        }
        Kind::Lecam => {
            let mut p = Panel::new("two-point floor vs D", "D", "expected error", false, true);
            for (g, idx) in rows.groups(&["R"])? {
                p.series
                    .push(rows.series(&idx, "D", "floor", label(&g, "floor"), Style::Line)?);
                p.series.push(rows.series(
                    &idx,
                    "D",
                    "intermediate",
                    label(&g, "intermediate"),
                    Style::Dashed,
                )?);
                p.series.push(rows.with_stderr(
                    &idx,
                    "D",
                    "empirical",
                    "stderr",
                    3.0,
                    label(&g, "empirical"),
                )?);
            }
            panels.push(p);
        }
        Kind::Affinity => {
            let mut p = Panel::new("affinity vs D", "D", "affinity", true, false);
            for (g, idx) in rows.groups(&["rho"])? {
                p.series.push(rows.series(
                    &idx,
                    "D",
                    "closed",
                    label(&g, "closed"),
                    Style::Line,
                )?);
                p.series.push(rows.series(
                    &idx,
                    "D",
                    "kl_floor",
                    label(&g, "exp(-KL)/2"),
                    Style::Dashed,
                )?);
                p.series.push(rows.with_stderr(
                    &idx,
                    "D",
                    "mc",
                    "mc_stderr",
                    3.0,
                    label(&g, "sampled"),
                )?);
                p.series.push(rows.with_stderr(
                    &idx,
                    "D",
                    "np",
                    "np_stderr",
                    3.0,
                    label(&g, "test error"),
                )?);
            }
            panels.push(p);
        }
        Kind::KrrGap | Kind::SvmGap => {
            let by = if report.kind == Kind::KrrGap {
                "lambda"
            } else {
                "C0"
            };
            let mut p = Panel::new("prediction gap vs D", "D", "value", true, true);
            for (g, idx) in rows.groups(&[by])? {
                p.series.push(rows.series(
                    &idx,
                    "D",
                    "max_gap",
                    label(&g, "max gap"),
                    Style::Points,
                )?);
                p.series.push(rows.series(
                    &idx,
                    "D",
                    "max_u",
                    label(&g, "max kernel error"),
                    Style::Line,
                )?);
                p.series.push(rows.series(
                    &idx,
                    "D",
                    "max_ratio",
                    label(&g, "max gap/bound"),
                    Style::Dashed,
                )?);
            }
            panels.push(p);
        }
        Kind::CompareInversions => {
            let mut p = Panel::new(
                "epsilon at confidence exp(-tau)",
                "tau",
                "epsilon",
                false,
                true,
            );
            for (g, idx) in rows.groups(&["d", "R", "D"])? {
                p.series.push(rows.series(
                    &idx,
                    "tau",
                    "eps_ours",
                    label(&g, "thm1"),
                    Style::Line,
                )?);
                p.series.push(rows.series(
                    &idx,
                    "tau",
                    "eps_sriperumbudur",
                    label(&g, "sriperumbudur"),
                    Style::Dashed,
                )?);
            }
            panels.push(p);
        }
    }
    Ok(panels)
}

/// Data range over every plotted value, positive values only on a log axis.
fn panel_range(series: &[Series], log: bool) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut take = |v: f64| {
        if v.is_finite() && (!log || v > 0.0) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    };
    for s in series {
        for &(_, y, w) in &s.points {
            take(y);
            if let Some((a, b)) = w {
                take(a);
                take(b);
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

fn x_range(series: &[Series], log: bool) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for &(x, _, _) in &s.points {
            if x.is_finite() && (!log || x > 0.0) {
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Maps data values to pixels along one axis.
struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(range: (f64, f64), log: bool, px_lo: f64, px_hi: f64) -> Self {
        let (mut lo, mut hi) = if log {
            (range.0.log10(), range.1.log10())
        } else {
            range
        };
        if log {
            lo = lo.floor();
            hi = hi.ceil();
        }
        if hi - lo < 1e-12 {
            let pad = if log { 1.0 } else { lo.abs().max(1.0) * 0.1 };
            lo -= pad;
            hi += pad;
        } else if !log {
            let pad = 0.05 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
        Self {
            log,
            lo,
            hi,
            px_lo,
            px_hi,
        }
    }

    /// Pixel position, or `None` for values a log axis cannot show.
    fn map(&self, v: f64) -> Option<f64> {
        let t = if self.log {
            if v <= 0.0 {
                return None;
            }
            v.log10()
        } else {
            v
        };
        t.is_finite()
            .then(|| self.px_lo + (t - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let step = ((self.hi - self.lo) / 8.0).ceil().max(1.0);
            let mut out = Vec::new();
            let mut e = self.lo;
            while e <= self.hi + 1e-9 {
                out.push((10f64.powf(e), format!("1e{}", e as i64)));
                e += step;
            }
            out
        } else {
            let raw = (self.hi - self.lo) / 6.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|m| m * mag)
                .find(|s| *s >= raw)
                .unwrap_or(10.0 * mag);
            let mut v = (self.lo / step).ceil() * step;
            let mut out = Vec::new();
            while v <= self.hi + 1e-12 {
                out.push((v, short(v)));
                v += step;
            }
            out
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn draw_panel(out: &mut String, panel: &Panel, top: f64) {
    let left = MARGIN_LEFT;
    let right = WIDTH - MARGIN_RIGHT;
    let plot_top = top + MARGIN_TOP;
    let bottom = top + PANEL_HEIGHT - MARGIN_BOTTOM;
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="15" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        top + 24.0,
        escape(&panel.title)
    );
    let (xr, yr) = match (
        x_range(&panel.series, panel.log_x),
        panel_range(&panel.series, panel.log_y),
    ) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            let _ = writeln!(
                out,
                r##"<text x="{}" y="{}" font-size="14" text-anchor="middle" fill="#666">no data</text>"##,
                (left + right) / 2.0,
                (plot_top + bottom) / 2.0
            );
            return;
        }
    };
    let xa = Axis::new(xr, panel.log_x, left, right);
    let ya = Axis::new(yr, panel.log_y, bottom, plot_top);
    let _ = writeln!(
        out,
        r##"<rect x="{left}" y="{plot_top}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
        right - left,
        bottom - plot_top
    );
    for (v, text) in xa.ticks() {
        if let Some(px) = xa.map(v) {
            let _ = writeln!(
                out,
                r##"<line x1="{px:.1}" y1="{bottom}" x2="{px:.1}" y2="{:.1}" stroke="#333"/><text x="{px:.1}" y="{:.1}" font-size="11" text-anchor="middle">{text}</text>"##,
                bottom + 5.0,
                bottom + 18.0
            );
        }
    }
    for (v, text) in ya.ticks() {
        if let Some(py) = ya.map(v) {
            let _ = writeln!(
                out,
                r##"<line x1="{:.1}" y1="{py:.1}" x2="{left}" y2="{py:.1}" stroke="#333"/><line x1="{left}" y1="{py:.1}" x2="{right}" y2="{py:.1}" stroke="#eee"/><text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{text}</text>"##,
                left - 5.0,
                left - 8.0,
                py + 4.0
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        bottom + 38.0,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{y}" font-size="12" text-anchor="middle" transform="rotate(-90 18 {y})">{}</text>"#,
        escape(&panel.y_label),
        y = (plot_top + bottom) / 2.0
    );
    let _ = writeln!(
        out,
        r#"<clipPath id="clip{t}"><rect x="{left}" y="{plot_top}" width="{}" height="{}"/></clipPath><g clip-path="url(#clip{t})">"#,
        right - left,
        bottom - plot_top,
        t = top as i64
    );
    let mut hidden = 0usize;
    for (i, s) in panel.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        match s.style {
            Style::Line | Style::Dashed => {
                let pts: Vec<String> = s
                    .points
                    .iter()
                    .filter_map(|&(x, y, _)| Some(format!("{:.1},{:.1}", xa.map(x)?, ya.map(y)?)))
                    .collect();
                hidden += s.points.len() - pts.len();
                if !pts.is_empty() {
                    let dash = if s.style == Style::Dashed {
                        r#" stroke-dasharray="6 4""#
                    } else {
                        ""
                    };
                    let _ = writeln!(
                        out,
                        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"{dash}/>"#,
                        pts.join(" ")
                    );
                }
            }
            Style::Points => {
                for &(x, y, w) in &s.points {
                    let Some(px) = xa.map(x) else {
                        hidden += 1;
                        continue;
                    };
                    if let Some((a, b)) = w {
                        let lo = ya.map(a).unwrap_or(bottom);
                        if let Some(hi) = ya.map(b) {
                            let _ = writeln!(
                                out,
                                r#"<line x1="{px:.1}" y1="{lo:.1}" x2="{px:.1}" y2="{hi:.1}" stroke="{color}"/>"#
                            );
                        }
                    }
                    match ya.map(y) {
                        Some(py) => {
                            let _ = writeln!(
                                out,
                                r#"<circle cx="{px:.1}" cy="{py:.1}" r="3.5" fill="{color}"/>"#
                            );
                        }
                        None => {
                            // Zero on a log axis: an open marker on the floor.
                            let _ = writeln!(
                                out,
                                r#"<circle cx="{px:.1}" cy="{bottom:.1}" r="3.5" fill="white" stroke="{color}"/>"#
                            );
                        }
                    }
                }
            }
        }
    }
    out.push_str("</g>\n");
    let mut notes = panel.notes.clone();
    if hidden > 0 {
        notes.push(format!("{hidden} values not shown on this scale"));
    }
    for (i, n) in notes.iter().enumerate() {
        let _ = writeln!(
            out,
            r##"<text x="{:.1}" y="{:.1}" font-size="11" fill="#a00">{}</text>"##,
            left + 8.0,
            plot_top + 16.0 + 14.0 * i as f64,
            escape(n)
        );
    }
    for (i, s) in panel.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = plot_top + 8.0 + 15.0 * i as f64;
        if y > bottom {
            break;
        }
        let _ = writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{color}"/><text x="{:.1}" y="{:.1}" font-size="10">{}</text>"#,
            right + 10.0,
            y - 8.0,
            right + 24.0,
            y + 1.0,
            escape(&s.label)
        );
    }
}

/// Renders the report as one SVG document.
pub fn render(report: &Report) -> anyhow::Result<String> {
    let panels = if report.rows.is_empty() {
        Vec::new()
    } else {
        panels_for(report)?
    };
    let count = panels.len().max(1);
    let height = PANEL_HEIGHT * count as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(
        out,
        "<title>{} ({})</title>",
        escape(&report.name),
        report.kind
    );
    out.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    out.push('\n');
    if panels.is_empty() {
        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" font-size="16" text-anchor="middle" fill="#666">no data</text>"##,
            WIDTH / 2.0,
            height / 2.0
        );
    }
    for (i, p) in panels.iter().enumerate() {
        draw_panel(&mut out, p, PANEL_HEIGHT * i as f64);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Reads a report JSON and writes its SVG.
pub fn plot_file(report_path: &Path, out_path: &Path) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(report_path)
        .with_context(|| format!("cannot read report {}", report_path.display()))?;
    let raw: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("{} is not JSON", report_path.display()))?;
    if let Some(kind) = raw.get("kind").and_then(|k| k.as_str()) {
        if Kind::parse(kind).is_none() {
            bail!("unknown report kind `{kind}`");
        }
    }
    let report: Report = serde_json::from_value(raw)
        .with_context(|| format!("{} is not a valid report", report_path.display()))?;
    let svg = render(&report)?;
    std::fs::write(out_path, svg).with_context(|| format!("cannot write {}", out_path.display()))
}
