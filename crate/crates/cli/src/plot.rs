//! Deterministic SVG plots of probe reports: fixed viewport, fixed number
//! formatting, generic font family only.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hardy_core::calkin_probe::{complex_power, ProbeKind, ProbeReport, SpectralPoint};
use hardy_core::C64;

use crate::error::{Error, Result};
use crate::report::SuiteReport;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 64.0;
const PASS: &str = "#2a8a4a";
const FAIL: &str = "#c0392b";
const NEUTRAL: &str = "#8c8c8c";
/// Ladder values are clamped here before taking logarithms.
const LOG_FLOOR: f64 = 1e-16;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn around(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let span = |v: (f64, f64)| {
            let pad = if v.1 > v.0 { 0.05 * (v.1 - v.0) } else { 0.5 };
            (v.0 - pad, v.1 + pad)
        };
        let range = |it: &mut dyn Iterator<Item = f64>| it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let rx = range(&mut xs.clone());
        let ry = range(&mut ys.clone());
        Frame { x: span(if rx.0.is_finite() { rx } else { (0.0, 1.0) }), y: span(if ry.0.is_finite() { ry } else { (0.0, 1.0) }) }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

struct Svg {
    body: String,
}

impl Svg {
    fn new(title: &str) -> Self {
        let mut body = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"11\">\n"
        );
        let _ = writeln!(body, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
        let _ = writeln!(body, "<text x=\"{MARGIN}\" y=\"24\" font-size=\"13\">{}</text>", escape(title));
        let w = WIDTH - 2.0 * MARGIN;
        let h = HEIGHT - 2.0 * MARGIN;
        let _ = writeln!(body, "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"black\"/>");
        Svg { body }
    }

    fn xtick(&mut self, f: &Frame, x: f64, label: &str) {
        let px = f.px(x);
        let y = HEIGHT - MARGIN;
        let _ = writeln!(self.body, "<line x1=\"{px:.2}\" y1=\"{y:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>", y + 4.0);
        let _ = writeln!(self.body, "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>", y + 16.0, escape(label));
    }

    fn ytick(&mut self, f: &Frame, y: f64, label: &str) {
        let py = f.py(y);
        let _ = writeln!(self.body, "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{MARGIN:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>", MARGIN - 4.0);
        let _ = writeln!(self.body, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>", MARGIN - 6.0, py + 4.0, escape(label));
    }

    fn labels(&mut self, x: &str, y: &str) {
        let _ = writeln!(self.body, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>", WIDTH / 2.0, HEIGHT - 20.0, escape(x));
        let _ = writeln!(
            self.body,
            "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{}</text>",
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(y)
        );
    }

    fn polyline(&mut self, f: &Frame, pts: &[(f64, f64)], stroke: &str, dashed: bool) {
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y))).collect();
        let dash = if dashed { " stroke-dasharray=\"4 3\"" } else { "" };
        let _ = writeln!(self.body, "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.5\"{dash}/>", coords.join(" "));
    }

    fn dot(&mut self, f: &Frame, x: f64, y: f64, fill: &str) {
        let _ = writeln!(self.body, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"{fill}\"/>", f.px(x), f.py(y));
    }

    fn square(&mut self, f: &Frame, x: f64, y: f64, fill: &str) {
        let _ = writeln!(self.body, "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"8\" height=\"8\" fill=\"{fill}\"/>", f.px(x) - 4.0, f.py(y) - 4.0);
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn title(p: &ProbeReport) -> String {
    let mut t = format!("{:?} ({:?}): {}", p.kind, p.verdict, p.provenance);
    if t.chars().count() > 90 {
        t = t.chars().take(87).collect::<String>() + "...";
    }
    t
}

fn point_color(p: &SpectralPoint) -> &'static str {
    match p.pass {
        Some(true) => PASS,
        Some(false) => FAIL,
        None => NEUTRAL,
    }
}

/// Tail ladder on log-log axes, with the `tol_c` threshold dashed when present.
fn ladder_svg(p: &ProbeReport) -> Result<String> {
    if p.ladder.is_empty() {
        return Err(Error::Plot("report has an empty ladder".into()));
    }
    let pts: Vec<(f64, f64)> = p.ladder.iter().map(|l| ((l.size as f64).log2(), l.value.max(LOG_FLOOR).log10())).collect();
    let tol = p.tolerances.get("tol_c").map(|t| t.log10());
    let ys = pts.iter().map(|q| q.1).chain(tol);
    let lo = ys.clone().fold(f64::INFINITY, f64::min).floor();
    let hi = ys.fold(f64::NEG_INFINITY, f64::max).ceil();
    let f = Frame::around(pts.iter().map(|q| q.0), [lo, hi.max(lo + 1.0)].into_iter());
    let mut svg = Svg::new(&title(p));
    for l in &p.ladder {
        svg.xtick(&f, (l.size as f64).log2(), &l.size.to_string());
    }
    let step = ((hi - lo) / 8.0).ceil().max(1.0);
    let mut d = lo;
    while d <= hi {
        svg.ytick(&f, d, &format!("1e{d}"));
        d += step;
    }
    svg.labels("cut", "tail norm");
    if let Some(t) = tol {
        svg.polyline(&f, &[(f.x.0, t), (f.x.1, t)], NEUTRAL, true);
    }
    svg.polyline(&f, &pts, "#1f4e9c", false);
    for &(x, y) in &pts {
        svg.dot(&f, x, y, "#1f4e9c");
    }
    Ok(svg.finish())
}

fn plane_ticks(svg: &mut Svg, f: &Frame) {
    for k in 0..=4 {
        let x = f.x.0 + (f.x.1 - f.x.0) * k as f64 / 4.0;
        svg.xtick(f, x, &format!("{x:.2}"));
        let y = f.y.0 + (f.y.1 - f.y.0) * k as f64 / 4.0;
        svg.ytick(f, y, &format!("{y:.2}"));
    }
    svg.labels("Re lambda", "Im lambda");
}

/// Probed points colored by verdict; grey marks points on the curve.
fn grid_svg(p: &ProbeReport) -> Result<String> {
    if p.points.is_empty() {
        return Err(Error::Plot("Fredholm report has no points".into()));
    }
    let f = Frame::around(p.points.iter().map(|q| q.lambda[0]), p.points.iter().map(|q| q.lambda[1]));
    let mut svg = Svg::new(&title(p));
    plane_ticks(&mut svg, &f);
    for q in &p.points {
        let fill = if q.on_curve { NEUTRAL } else { point_color(q) };
        svg.dot(&f, q.lambda[0], q.lambda[1], fill);
    }
    Ok(svg.finish())
}

/// The curve `x^a` with on-curve probes as dots and far probes as squares.
fn curve_svg(p: &ProbeReport) -> Result<String> {
    let (re, im) = match (p.metrics.get("a_re"), p.metrics.get("a_im")) {
        (Some(&re), Some(&im)) => (re, im),
        _ => return Err(Error::Plot("spectrum report does not record the exponent".into())),
    };
    let a = C64::new(re, im);
    let curve: Vec<(f64, f64)> = (0..=256)
        .map(|k| complex_power(k as f64 / 256.0, a))
        .map(|z| (z.re, z.im))
        .collect();
    let xs = curve.iter().map(|q| q.0).chain(p.points.iter().map(|q| q.lambda[0]));
    let ys = curve.iter().map(|q| q.1).chain(p.points.iter().map(|q| q.lambda[1]));
    let f = Frame::around(xs, ys);
    let mut svg = Svg::new(&title(p));
    plane_ticks(&mut svg, &f);
    svg.polyline(&f, &curve, "#1f4e9c", false);
    for q in &p.points {
        if q.on_curve {
            svg.dot(&f, q.lambda[0], q.lambda[1], point_color(q));
        } else {
            svg.square(&f, q.lambda[0], q.lambda[1], point_color(q));
        }
    }
    Ok(svg.finish())
}

pub fn probe_svg(p: &ProbeReport) -> Result<String> {
    match p.kind {
        ProbeKind::Compactness => ladder_svg(p),
        ProbeKind::Fredholm => grid_svg(p),
        ProbeKind::EssentialSpectrumCurve => curve_svg(p),
        ProbeKind::Irreducibility => Err(Error::Plot("irreducibility reports have nothing to plot".into())),
    }
}

fn slug(s: &str) -> String {
    let mut out = String::new();
    for ch in s.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

/// Plots a suite report (one SVG per plottable check) or a bare probe report.
/// Files go to `out`, or next to the report. Returns the written paths.
pub fn plot_file(report: &Path, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    let text = std::fs::read_to_string(report).map_err(Error::io(report))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(Error::json(report))?;
    let stem = report.file_stem().and_then(|s| s.to_str()).unwrap_or("report").to_string();
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| report.parent().map(Path::to_path_buf).unwrap_or_default());
    let mut plots = Vec::new();
    if value.get("checks").is_some() {
        let suite: SuiteReport = serde_json::from_value(value).map_err(Error::json(report))?;
        for (i, c) in suite.checks.iter().enumerate() {
            if let Some(p) = c.probe.as_ref().filter(|p| p.kind != ProbeKind::Irreducibility) {
                plots.push((format!("{stem}-{i}-{}.svg", slug(&c.name)), probe_svg(p)?));
            }
        }
        if plots.is_empty() {
            return Err(Error::Plot(format!("suite '{}' has no plottable probes", suite.suite.name())));
        }
    } else {
        let p: ProbeReport = serde_json::from_value(value).map_err(Error::json(report))?;
        plots.push((format!("{stem}.svg"), probe_svg(&p)?));
    }
    if !dir.as_os_str().is_empty() {
        std::fs::create_dir_all(&dir).map_err(Error::io(&dir))?;
    }
    let mut paths = Vec::new();
    for (name, svg) in plots {
        let path = dir.join(name);
        std::fs::write(&path, svg).map_err(Error::io(&path))?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use hardy_core::calkin_probe::{LadderPoint, Verdict};

    use super::*;

    fn ladder_report() -> ProbeReport {
        ProbeReport {
            kind: ProbeKind::Compactness,
            ladder: [(32, 0.075), (64, 0.056), (128, 0.042), (256, 0.0)].map(|(size, value)| LadderPoint { size, value }).to_vec(),
            verdict: Verdict::Pass,
            tolerances: BTreeMap::from([("tol_c".to_string(), 0.05)]),
            provenance: "T . C - C <test>".into(),
            points: Vec::new(),
            metrics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    #[test]
    fn ladder_plot_is_a_polyline() {
        let svg = probe_svg(&ladder_report()).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("&lt;test&gt;"));
        assert_eq!(svg.matches("<circle").count(), 4);
        assert_eq!(svg, probe_svg(&ladder_report()).unwrap());
    }

    #[test]
    fn irreducibility_not_plottable() {
        let mut r = ladder_report();
        r.kind = ProbeKind::Irreducibility;
        assert!(probe_svg(&r).is_err());
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("T[power 1] C[rho(1,1)] - f(gamma) C"), "t-power-1-c-rho-1-1-f-gamma-c");
    }
}
