//! SVG trajectory plots and reading back run logs.

use std::fmt::Write;

use thiserror::Error;

use crate::planner::Task;
use crate::sim::Event;

const SCALE: f64 = 100.0;
const MARGIN: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marker {
    PlanStart(f64, f64),
    Disturbance(f64, f64),
    Collision(f64, f64),
}

/// Draws world segments, one polyline per trajectory and the markers.
/// World `y` points up in the picture.
pub fn render_svg(title: &str, segments: &[[f64; 4]], paths: &[Vec<(f64, f64)>], markers: &[Marker]) -> String {
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for s in segments {
        xs.extend([s[0], s[2]]);
        ys.extend([s[1], s[3]]);
    }
    for p in paths.iter().flatten() {
        xs.push(p.0);
        ys.push(p.1);
    }
    for m in markers {
        let (Marker::PlanStart(x, y) | Marker::Disturbance(x, y) | Marker::Collision(x, y)) = *m;
        xs.push(x);
        ys.push(y);
    }
    let fold = |v: &[f64], f: fn(f64, f64) -> f64, init: f64| v.iter().copied().filter(|v| v.is_finite()).fold(init, f);
    let (x0, x1) = (fold(&xs, f64::min, 0.0) - MARGIN, fold(&xs, f64::max, 0.0) + MARGIN);
    let (y0, y1) = (fold(&ys, f64::min, 0.0) - MARGIN, fold(&ys, f64::max, 0.0) + MARGIN);
    let px = |x: f64| (x - x0) * SCALE;
    let py = |y: f64| (y1 - y) * SCALE;

    let mut svg = String::new();
    let (w, h) = ((x1 - x0) * SCALE, (y1 - y0) * SCALE);
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#
    )
    .unwrap();
    writeln!(svg, "<title>{}</title>", escape(title)).unwrap();
    writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##).unwrap();
    svg.push_str(r#"<g class="world" stroke="black" stroke-width="3" stroke-linecap="round">"#);
    svg.push('\n');
    for s in segments {
        writeln!(svg, r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, px(s[0]), py(s[1]), px(s[2]), py(s[3]))
            .unwrap();
    }
    svg.push_str("</g>\n");
    for path in paths {
        let pts: Vec<String> = path.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        writeln!(
            svg,
            r##"<polyline class="trajectory" fill="none" stroke="#1f77b4" stroke-width="2" points="{}"/>"##,
            pts.join(" ")
        )
        .unwrap();
    }
    for m in markers {
        match *m {
            Marker::PlanStart(x, y) => writeln!(
                svg,
                r##"<circle class="plan-start" cx="{:.2}" cy="{:.2}" r="6" fill="#d62728"/>"##,
                px(x),
                py(y)
            )
            .unwrap(),
            Marker::Disturbance(x, y) => writeln!(
                svg,
                r##"<polygon class="disturbance" points="{}" fill="#ffbf00" stroke="black" stroke-width="0.5"/>"##,
                star(px(x), py(y), 9.0)
            )
            .unwrap(),
            Marker::Collision(x, y) => {
                let (cx, cy) = (px(x), py(y));
                writeln!(
                    svg,
                    r#"<path class="collision" d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="red" stroke-width="3"/>"#,
                    cx - 7.0, cy - 7.0, cx + 7.0, cy + 7.0, cx - 7.0, cy + 7.0, cx + 7.0, cy - 7.0
                )
                .unwrap()
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn star(cx: f64, cy: f64, r: f64) -> String {
    (0..10)
        .map(|i| {
            let rad = if i % 2 == 0 { r } else { r * 0.45 };
            let a = std::f64::consts::PI * (i as f64) / 5.0 - std::f64::consts::FRAC_PI_2;
            format!("{:.2},{:.2}", cx + rad * a.cos(), cy + rad * a.sin())
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// A parsed line of `run.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub tick: u64,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub task: Task,
    pub events: Vec<Event>,
    pub plan_id: Option<u64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum CsvError {
    #[error("missing or wrong header")]
    Header,
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, CsvError> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(crate::sim::LogRow::<f64>::CSV_HEADER) {
        return Err(CsvError::Header);
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let line_no = i + 2;
        let err = |message: String| CsvError::Row { line: line_no, message };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(err(format!("expected 8 fields, got {}", f.len())));
        }
        let num = |k: usize| f[k].parse::<f64>().map_err(|e| err(format!("field {k}: {e}")));
        let events = f[6]
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| Event::parse(s).ok_or_else(|| err(format!("unknown event {s:?}"))))
            .collect::<Result<_, _>>()?;
        rows.push(CsvRow {
            tick: f[0].parse().map_err(|e| err(format!("tick: {e}")))?,
            t: num(1)?,
            x: num(2)?,
            y: num(3)?,
            theta: num(4)?,
            task: Task::parse(f[5]).ok_or_else(|| err(format!("unknown task {:?}", f[5])))?,
            events,
            plan_id: if f[7].is_empty() { None } else { Some(f[7].parse().map_err(|e| err(format!("plan_id: {e}")))?) },
        });
    }
    Ok(rows)
}

/// Renders a parsed log; `start` is prepended to the trajectory when known.
pub fn render_log(
    title: &str,
    rows: &[CsvRow],
    start: Option<(f64, f64)>,
    segments: &[[f64; 4]],
    disturbances: &[(f64, f64)],
) -> String {
    let path: Vec<(f64, f64)> = start.into_iter().chain(rows.iter().map(|r| (r.x, r.y))).collect();
    let mut markers: Vec<Marker> =
        rows.iter().filter(|r| r.events.contains(&Event::PlanStarted)).map(|r| Marker::PlanStart(r.x, r.y)).collect();
    markers.extend(disturbances.iter().map(|&(x, y)| Marker::Disturbance(x, y)));
    markers.extend(rows.iter().filter(|r| r.events.contains(&Event::Collision)).map(|r| Marker::Collision(r.x, r.y)));
    render_svg(title, segments, &[path], &markers)
}
