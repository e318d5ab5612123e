//! Semilog-y SVG rendering of sweep rows.
//!
//! One figure per file. Colour encodes the scenario, stroke the method:
//! exact solid, asymptotic dashed, numeric dotted, Monte Carlo as markers.
//! Only `ok` rows with a positive value are drawn; the rest are listed in
//! a note under the axes. Output depends only on the rows.

use std::fmt::Write;

use crate::error::{CliError, CliResult};
use crate::sweep::{Status, SweepRow};

const WIDTH: f64 = 960.0;
const PLOT_LEFT: f64 = 80.0;
const PLOT_TOP: f64 = 50.0;
const PLOT_W: f64 = 560.0;
const PLOT_H: f64 = 420.0;
const LEGEND_X: f64 = 660.0;
const NOTE_LINE: f64 = 14.0;
/// Notes beyond this many lines are summarised.
const MAX_NOTES: usize = 40;

const PALETTE: [&str; 16] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#393b79", "#637939", "#8c6d31", "#843c39", "#7b4173", "#3182bd",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn axis_label(name: &str) -> String {
    match name {
        "eta" => "average SNR η (dB)".to_string(),
        "gamma" => "threshold γ_th (dB)".to_string(),
        other => format!("{other} (dB)"),
    }
}

fn dash(method: &str) -> Option<&'static str> {
    match method {
        "exact" => Some(""),
        "asymptotic" => Some("8 5"),
        "numeric" => Some("2 4"),
        _ => None,
    }
}

struct Series<'a> {
    scenario: &'a str,
    method: &'a str,
    points: Vec<(f64, f64)>,
}

/// Renders `rows` as an SVG document titled `title`.
pub fn render_svg(rows: &[SweepRow], title: &str) -> CliResult<String> {
    if rows.is_empty() {
        return Err(CliError::Config("no rows to plot".to_string()));
    }
    let axes: Vec<&str> = dedup(rows.iter().map(|r| r.x_axis_name.as_str()));
    if axes.len() > 1 {
        return Err(CliError::Config(format!("rows mix sweep axes: {}", axes.join(", "))));
    }
    let scenarios = dedup(rows.iter().map(|r| r.scenario.as_str()));
    let mut series: Vec<Series<'_>> = Vec::new();
    let mut notes = Vec::new();
    for r in rows {
        let value = r.op_value.filter(|v| *v > 0.0 && v.is_finite());
        match (r.status_kind(), value) {
            (Status::Ok, Some(v)) => {
                let idx = match series.iter().position(|s| s.scenario == r.scenario && s.method == r.method) {
                    Some(i) => i,
                    None => {
                        series.push(Series {
                            scenario: &r.scenario,
                            method: &r.method,
                            points: Vec::new(),
                        });
                        series.len() - 1
                    }
                };
                series[idx].points.push((r.x_value_db, v));
            }
            (Status::Ok, None) => notes.push(format!(
                "{} / {} at {} dB: value {} not drawable on a log axis",
                r.scenario,
                r.method,
                r.x_value_db,
                r.op_value.map(|v| format!("{v:e}")).unwrap_or_else(|| "missing".to_string())
            )),
            _ => notes.push(format!("{} / {} at {} dB excluded: {}", r.scenario, r.method, r.x_value_db, r.status)),
        }
    }

    let drawn: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    let (mut x_lo, mut x_hi) = bounds(rows.iter().map(|r| r.x_value_db));
    if x_hi - x_lo < 1e-9 {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    // whole decades up to 1; larger values (asymptotes) are clipped
    let dec_hi = 0.0;
    let dec_lo = if drawn.is_empty() {
        -1.0
    } else {
        bounds(drawn.iter().map(|p| p.1.log10())).0.floor().min(dec_hi - 1.0)
    };
    let sx = |x: f64| PLOT_LEFT + (x - x_lo) / (x_hi - x_lo) * PLOT_W;
    let sy = |v: f64| PLOT_TOP + (dec_hi - v.log10()) / (dec_hi - dec_lo) * PLOT_H;

    let shown_notes = notes.len().min(MAX_NOTES) + usize::from(notes.len() > MAX_NOTES);
    let legend_h = PLOT_TOP + 20.0 * (scenarios.len() + 5) as f64;
    let height = (PLOT_TOP + PLOT_H + 60.0 + NOTE_LINE * shown_notes as f64).max(legend_h);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{height}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="28" font-size="16" text-anchor="middle">{}</text>"#, PLOT_LEFT + PLOT_W / 2.0, escape(title));

    // decade grid and labels
    let mut d = dec_lo;
    while d <= dec_hi + 1e-9 {
        let y = sy(10f64.powf(d));
        let _ = writeln!(s, r##"<line x1="{PLOT_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##, PLOT_LEFT + PLOT_W);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{}</text>"#, PLOT_LEFT - 6.0, y + 4.0, d as i64);
        d += 1.0;
    }
    for x in ticks(x_lo, x_hi) {
        let px = sx(x);
        let _ = writeln!(s, r##"<line x1="{px:.2}" y1="{PLOT_TOP}" x2="{px:.2}" y2="{:.2}" stroke="#eeeeee"/>"##, PLOT_TOP + PLOT_H);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, PLOT_TOP + PLOT_H + 16.0, trim_num(x));
    }
    let _ = writeln!(s, r#"<rect x="{PLOT_LEFT}" y="{PLOT_TOP}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="black"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        PLOT_LEFT + PLOT_W / 2.0,
        PLOT_TOP + PLOT_H + 36.0,
        escape(&axis_label(axes[0]))
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">outage probability</text>"#,
        PLOT_TOP + PLOT_H / 2.0,
        PLOT_TOP + PLOT_H / 2.0
    );

    let _ = writeln!(
        s,
        r#"<clipPath id="plot-area"><rect x="{PLOT_LEFT}" y="{PLOT_TOP}" width="{PLOT_W}" height="{PLOT_H}"/></clipPath>"#
    );
    s.push_str("<g clip-path=\"url(#plot-area)\">\n");
    for srs in &series {
        let ci = scenarios.iter().position(|n| *n == srs.scenario).unwrap_or(0);
        let colour = PALETTE[ci % PALETTE.len()];
        let mut pts = srs.points.clone();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        match dash(srs.method) {
            Some(pattern) if pts.len() > 1 => {
                let path: Vec<String> = pts.iter().map(|&(x, v)| format!("{:.2},{:.2}", sx(x), sy(v))).collect();
                let dasharray = if pattern.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{pattern}""#) };
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"{dasharray}/>"#,
                    path.join(" ")
                );
            }
            Some(_) => {
                let (x, v) = pts[0];
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{colour}"/>"#, sx(x), sy(v));
            }
            None => {
                for &(x, v) in &pts {
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="none" stroke="{colour}" stroke-width="1.2"/>"#,
                        sx(x),
                        sy(v)
                    );
                }
            }
        }
    }

    s.push_str("</g>\n");

    // legend: scenarios by colour, then method styles
    let mut y = PLOT_TOP + 6.0;
    for (i, name) in scenarios.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let _ = writeln!(s, r#"<rect x="{LEGEND_X}" y="{:.2}" width="14" height="10" fill="{colour}"/>"#, y - 9.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, LEGEND_X + 20.0, escape(name));
        y += 20.0;
    }
    y += 10.0;
    for (method, pattern) in [("exact", Some("")), ("asymptotic", Some("8 5")), ("numeric", Some("2 4")), ("montecarlo", None)] {
        match pattern {
            Some(p) => {
                let dasharray = if p.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{p}""#) };
                let _ = writeln!(
                    s,
                    r#"<line x1="{LEGEND_X}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1.5"{dasharray}/>"#,
                    y - 4.0,
                    LEGEND_X + 28.0,
                    y - 4.0
                );
            }
            None => {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="none" stroke="black"/>"#,
                    LEGEND_X + 14.0,
                    y - 4.0
                );
            }
        }
        let _ = writeln!(s, r#"<text x="{:.2}" y="{y:.2}">{method}</text>"#, LEGEND_X + 36.0);
        y += 20.0;
    }

    let mut ny = PLOT_TOP + PLOT_H + 60.0;
    for note in notes.iter().take(MAX_NOTES) {
        let _ = writeln!(s, r#"<text x="{PLOT_LEFT}" y="{ny:.2}" font-size="10">{}</text>"#, escape(note));
        ny += NOTE_LINE;
    }
    if notes.len() > MAX_NOTES {
        let _ = writeln!(
            s,
            r#"<text x="{PLOT_LEFT}" y="{ny:.2}" font-size="10">... and {} more excluded rows</text>"#,
            notes.len() - MAX_NOTES
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn dedup<'a>(items: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for it in items {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    out
}

fn bounds(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

/// Round-valued ticks inside `[lo, hi]`, at most eight intervals apart.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let mag = 10f64.powf((span / 8.0).log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|st| span / st <= 8.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn trim_num(x: f64) -> String {
    let s = format!("{x:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
