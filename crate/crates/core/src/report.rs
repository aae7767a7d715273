//! CSV, JSON and SVG output.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::{GeneratorPortrait, PointLabel};
use crate::modal::{PsiEstimate, TrajectoryRow};
use crate::resolvent::ResolventSample;
use crate::stability::TableRow;

/// Round-trip exact decimal form of a double (17 significant digits).
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn tri(t: Option<bool>) -> &'static str {
    match t {
        Some(true) => "true",
        Some(false) => "false",
        None => "unknown",
    }
}

pub fn write_portrait_csv<W: Write>(w: W, p: &GeneratorPortrait) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["s_or_ell", "label", "re", "im", "eigenvalue_flag", "regime"])?;
    for pt in &p.points {
        out.write_record([
            fmt17(pt.source),
            pt.label.as_str().to_string(),
            fmt17(pt.value.re),
            fmt17(pt.value.im),
            pt.eigenvalue.to_string(),
            pt.regime.map_or("", |r| r.as_str()).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trajectory_csv<W: Write>(w: W, rows: &[TrajectoryRow]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["t", "energy", "dissipation_rate", "psi", "maximizing_mode"])?;
    for r in rows {
        let (psi, mode) = r.psi.map_or((String::new(), String::new()), |p| {
            (fmt17(p.value), p.argmax_index.to_string())
        });
        out.write_record([fmt17(r.t), fmt17(r.energy), fmt17(r.dissipation_rate), psi, mode])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_psi_csv<W: Write>(w: W, rows: &[PsiEstimate]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["t", "psi", "maximizing_s", "truncated"])?;
    for r in rows {
        out.write_record([fmt17(r.t), fmt17(r.value), fmt17(r.argmax_s), r.truncated.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_resolvent_csv<W: Write>(w: W, rows: &[ResolventSample]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["lambda", "norm", "maximizing_s"])?;
    for r in rows {
        out.write_record([fmt17(r.lambda), fmt17(r.norm), fmt17(r.maximizing_s)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_table_csv<W: Write>(w: W, rows: &[TableRow]) -> Result<()> {
    let mut out = writer(w);
    out.write_record([
        "parameter",
        "verdict",
        "inf_f_positive",
        "sup_ratio_finite",
        "zero_set_empty",
        "zero_set_countable",
        "zero_set_null_measure",
        "spectral_bound",
    ])?;
    for r in rows {
        let c = &r.report.conditions;
        out.write_record([
            fmt17(r.parameter),
            r.verdict.as_str().to_string(),
            tri(c.inf_f_positive).to_string(),
            tri(c.sup_ratio_finite).to_string(),
            tri(c.zero_set_empty).to_string(),
            tri(c.zero_set_countable).to_string(),
            tri(c.zero_set_null_measure).to_string(),
            fmt17(r.report.spectral_bound),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads the named numeric columns of a CSV with a header row. Empty cells
/// become `NaN`.
pub fn read_columns<R: Read>(r: R, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rdr.headers()?.clone();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            header
                .iter()
                .position(|h| h == *n)
                .ok_or_else(|| Error::Parse(format!("missing column '{n}'")))
        })
        .collect::<Result<_>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (c, &i) in idx.iter().enumerate() {
            let cell = rec.get(i).unwrap_or("");
            let v = if cell.is_empty() {
                f64::NAN
            } else {
                cell.parse()
                    .map_err(|_| Error::Parse(format!("row {}: '{cell}' is not a number", line + 2)))?
            };
            cols[c].push(v);
        }
    }
    Ok(cols)
}

/// Pretty JSON in declaration order with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Six significant digits, trailing zeros removed.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { format!("{x}") };
    }
    let e = x.abs().log10().floor() as i32;
    let s = if !(-4..6).contains(&e) {
        let s = format!("{x:.5e}");
        let (m, exp) = s.split_once('e').unwrap_or((&s, "0"));
        let m = if m.contains('.') {
            m.trim_end_matches('0').trim_end_matches('.')
        } else {
            m
        };
        return format!("{m}e{exp}");
    } else {
        format!("{x:.*}", (5 - e).max(0) as usize)
    };
    let t = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        &s
    };
    if t == "-0" {
        "0".into()
    } else {
        t.into()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvgStyle {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub radius: f64,
    pub title: String,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            width: 640.0,
            height: 480.0,
            margin: 56.0,
            radius: 2.0,
            title: String::new(),
        }
    }
}

/// What to draw.
#[derive(Clone, Copy, Debug)]
pub enum Plot<'a> {
    /// Scatter of `σ(𝔄)` in the complex plane.
    Portrait(&'a GeneratorPortrait),
    /// Log-log polyline through positive `(x, y)` pairs.
    LogLogCurve {
        points: &'a [(f64, f64)],
        x_label: &'a str,
        y_label: &'a str,
    },
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
    style: SvgStyle,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone, style: &SvgStyle) -> Self {
        let range = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            if !lo.is_finite() {
                (-1.0, 1.0)
            } else if hi - lo <= 1e-12 * (1.0 + lo.abs()) {
                (lo - 0.5 * (1.0 + lo.abs()), hi + 0.5 * (1.0 + hi.abs()))
            } else {
                let pad = 0.04 * (hi - lo);
                (lo - pad, hi + pad)
            }
        };
        Frame {
            x: range(&mut xs.clone()),
            y: range(&mut ys.clone()),
            style: style.clone(),
        }
    }

    fn px(&self, x: f64) -> f64 {
        let s = &self.style;
        s.margin + (x - self.x.0) / (self.x.1 - self.x.0) * (s.width - 2.0 * s.margin)
    }

    fn py(&self, y: f64) -> f64 {
        let s = &self.style;
        s.height - s.margin - (y - self.y.0) / (self.y.1 - self.y.0) * (s.height - 2.0 * s.margin)
    }
}

const CSS: &str = ".axis{stroke:#333;stroke-width:1}.zero{stroke:#999;stroke-dasharray:4 3}\
text{font-family:sans-serif;font-size:11px;fill:#333}\
.xi_plus{fill:#1f77b4}.xi_minus{fill:#d62728}.lambda_point{fill:#2ca02c}.zero_point{fill:#000}\
.curve{fill:none;stroke:#1f77b4;stroke-width:1.5}";

fn label_class(l: PointLabel) -> &'static str {
    match l {
        PointLabel::Zero => "zero_point",
        other => other.as_str(),
    }
}

/// Deterministic SVG 1.1 document.
pub fn emit_svg(plot: Plot<'_>, style: &SvgStyle) -> String {
    let mut doc = String::new();
    let (w, h) = (style.width, style.height);
    let _ = writeln!(doc, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        doc,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        fmt6(w),
        fmt6(h),
        fmt6(w),
        fmt6(h)
    );
    let _ = writeln!(doc, "<style>{CSS}</style>");
    if !style.title.is_empty() {
        let _ = writeln!(doc, "<title>{}</title>", escape(&style.title));
    }
    match plot {
        Plot::Portrait(p) => {
            let pts: Vec<_> = p
                .points
                .iter()
                .filter(|q| q.value.re.is_finite() && q.value.im.is_finite())
                .collect();
            let frame = Frame::new(
                pts.iter().map(|q| q.value.re).chain([0.0]),
                pts.iter().map(|q| q.value.im),
                style,
            );
            axes(&mut doc, &frame, "Re", "Im");
            if frame.x.0 <= 0.0 && frame.x.1 >= 0.0 {
                let x = fmt6(frame.px(0.0));
                let _ = writeln!(
                    doc,
                    r#"<line class="zero" x1="{x}" y1="{}" x2="{x}" y2="{}"/>"#,
                    fmt6(style.margin),
                    fmt6(h - style.margin)
                );
            }
            for q in pts {
                let _ = writeln!(
                    doc,
                    r#"<circle class="{}" cx="{}" cy="{}" r="{}"/>"#,
                    label_class(q.label),
                    fmt6(frame.px(q.value.re)),
                    fmt6(frame.py(q.value.im)),
                    fmt6(style.radius)
                );
            }
        }
        Plot::LogLogCurve {
            points,
            x_label,
            y_label,
        } => {
            let logs: Vec<(f64, f64)> = points
                .iter()
                .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
                .map(|(x, y)| (x.log10(), y.log10()))
                .collect();
            let frame = Frame::new(logs.iter().map(|p| p.0), logs.iter().map(|p| p.1), style);
            axes(
                &mut doc,
                &frame,
                &format!("log10 {x_label}"),
                &format!("log10 {y_label}"),
            );
            let path: Vec<String> = logs
                .iter()
                .map(|&(x, y)| format!("{},{}", fmt6(frame.px(x)), fmt6(frame.py(y))))
                .collect();
            let _ = writeln!(doc, r#"<polyline class="curve" points="{}"/>"#, path.join(" "));
        }
    }
    doc.push_str("</svg>\n");
    doc
}

fn axes(doc: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let s = &f.style;
    let (l, r, t, b) = (s.margin, s.width - s.margin, s.margin, s.height - s.margin);
    let _ = writeln!(
        doc,
        r#"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        fmt6(l),
        fmt6(b),
        fmt6(r),
        fmt6(b)
    );
    let _ = writeln!(
        doc,
        r#"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        fmt6(l),
        fmt6(b),
        fmt6(l),
        fmt6(t)
    );
    for (x, anchor) in [(f.x.0, "start"), (f.x.1, "end")] {
        let _ = writeln!(
            doc,
            r#"<text x="{}" y="{}" text-anchor="{anchor}">{}</text>"#,
            fmt6(f.px(x)),
            fmt6(b + 16.0),
            fmt6(x)
        );
    }
    for y in [f.y.0, f.y.1] {
        let _ = writeln!(
            doc,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            fmt6(l - 4.0),
            fmt6(f.py(y) + 4.0),
            fmt6(y)
        );
    }
    let _ = writeln!(
        doc,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        fmt6((l + r) / 2.0),
        fmt6(s.height - 12.0),
        escape(x_label)
    );
    let _ = writeln!(
        doc,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        fmt6((t + b) / 2.0),
        fmt6((t + b) / 2.0),
        escape(y_label)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
