//! Static SVG rendering of performance profiles: a two-panel layout with
//! a linear time axis up to a configurable split and a log axis beyond it.

use super::{ProfileCurve, Profiles};
use std::io::Write;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 180.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 60.0;
const GAP: f64 = 18.0;

const PALETTE: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

/// Renders the profile set as a standalone SVG document. Times at or
/// below `split_seconds` land in the left (linear) panel, the rest in the
/// right (logarithmic) panel.
pub fn render_profile_svg(
    profiles: &Profiles,
    split_seconds: f64,
    w: &mut dyn Write,
) -> std::io::Result<()> {
    assert!(split_seconds > 0.0, "split must be positive");
    let curves: Vec<&ProfileCurve> = profiles
        .curves
        .iter()
        .chain([&profiles.virtual_best, &profiles.virtual_worst])
        .collect();
    let total = curves.iter().map(|c| c.total_problems).max().unwrap_or(0).max(1);
    let tmax = curves
        .iter()
        .flat_map(|c| c.points.last().map(|&(t, _)| t))
        .fold(split_seconds, f64::max)
        * 1.05;

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let panel_w = (plot_w - GAP) / 2.0;
    let left_x0 = MARGIN_L;
    let right_x0 = MARGIN_L + panel_w + GAP;
    let y_of = |count: usize| MARGIN_T + plot_h * (1.0 - count as f64 / total as f64);
    // Linear panel: [0, split]; log panel: [split, tmax].
    let x_lin = |t: f64| left_x0 + panel_w * (t / split_seconds).clamp(0.0, 1.0);
    let log_span = (tmax / split_seconds).ln().max(f64::MIN_POSITIVE);
    let x_log = |t: f64| right_x0 + panel_w * ((t / split_seconds).ln() / log_span).clamp(0.0, 1.0);

    writeln!(
        w,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"##
    )?;
    writeln!(w, r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"##)?;

    // Panel frames and axis labels.
    for x0 in [left_x0, right_x0] {
        writeln!(
            w,
            r##"<rect x="{x0}" y="{MARGIN_T}" width="{panel_w}" height="{plot_h}" fill="none" stroke="#444" stroke-width="1"/>"##
        )?;
    }
    let y_axis_ticks = 5usize;
    for i in 0..=y_axis_ticks {
        let count = total * i / y_axis_ticks;
        let y = y_of(count);
        writeln!(
            w,
            r##"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="end" fill="#222">{count}</text>"##,
            MARGIN_L - 8.0,
            y + 4.0
        )?;
        writeln!(
            w,
            r##"<line x1="{left_x0}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd" stroke-width="0.5"/>"##,
            right_x0 + panel_w
        )?;
    }
    for (x, label) in [
        (x_lin(0.0), "0".to_string()),
        (x_lin(split_seconds), format!("{split_seconds}")),
        (x_log(tmax), format!("{tmax:.0}")),
    ] {
        writeln!(
            w,
            r##"<text x="{x:.1}" y="{:.1}" font-size="12" text-anchor="middle" fill="#222">{label}</text>"##,
            MARGIN_T + plot_h + 18.0
        )?;
    }
    writeln!(
        w,
        r##"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle" fill="#222">solve time (s; linear then log beyond {split_seconds})</text>"##,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 18.0
    )?;
    writeln!(
        w,
        r##"<text x="18" y="{:.1}" font-size="13" fill="#222" transform="rotate(-90 18 {:.1})" text-anchor="middle">problems solved</text>"##,
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    )?;

    // Step polylines, split across the two panels.
    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = match c.backend_id.as_str() {
            "virtual_best" => r##" stroke-dasharray="6 3""##,
            "virtual_worst" => r##" stroke-dasharray="2 3""##,
            _ => "",
        };
        let mut path = String::new();
        let mut count = 0usize;
        let mut move_to = true;
        let emit = |path: &mut String, x: f64, y: f64, move_to: &mut bool| {
            let cmd = if *move_to { 'M' } else { 'L' };
            path.push_str(&format!("{cmd}{x:.2} {y:.2} "));
            *move_to = false;
        };
        emit(&mut path, x_lin(0.0), y_of(0), &mut move_to);
        for &(t, n) in &c.points {
            let x = if t <= split_seconds { x_lin(t) } else { x_log(t) };
            // Horizontal run at the previous count, then the riser.
            emit(&mut path, x, y_of(count), &mut move_to);
            emit(&mut path, x, y_of(n), &mut move_to);
            count = n;
        }
        let end = x_log(tmax);
        emit(&mut path, end, y_of(count), &mut move_to);
        writeln!(
            w,
            r##"<path d="{}" fill="none" stroke="{color}" stroke-width="1.8"{dash}/>"##,
            path.trim_end()
        )?;
        // Legend entry.
        let ly = MARGIN_T + 16.0 + 20.0 * i as f64;
        let lx = WIDTH - MARGIN_R + 16.0;
        writeln!(
            w,
            r##"<line x1="{lx}" y1="{ly}" x2="{:.1}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>"##,
            lx + 26.0
        )?;
        writeln!(
            w,
            r##"<text x="{:.1}" y="{:.1}" font-size="12" fill="#222">{}</text>"##,
            lx + 32.0,
            ly + 4.0,
            c.backend_id
        )?;
    }
    writeln!(w, "</svg>")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::performance_profile;
    use crate::bench::RunRecord;
    use crate::ip::SolveStatus;

    fn rec(p: &str, b: &str, t: f64) -> RunRecord {
        RunRecord {
            problem_id: p.into(),
            backend_id: b.into(),
            workers: 1,
            status: SolveStatus::Optimal,
            wall_seconds: t,
            iterations: 1,
            objective: Some(0.0),
            repetition: 0,
        }
    }

    #[test]
    fn svg_is_well_formed_and_lists_every_curve() {
        let recs = vec![
            rec("p1", "sparse", 0.5),
            rec("p2", "sparse", 8.0),
            rec("p1", "dense", 1.5),
            rec("p2", "dense", 30.0),
        ];
        let p = performance_profile(&recs, 2).unwrap();
        let mut buf = Vec::new();
        render_profile_svg(&p, 2.0, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
        for name in ["sparse", "dense", "virtual_best", "virtual_worst"] {
            assert!(text.contains(name), "missing {name}");
        }
        assert_eq!(text.matches("<path").count(), 4);
    }

    #[test]
    fn rendering_is_deterministic() {
        let recs = vec![rec("p1", "sparse", 0.5)];
        let p = performance_profile(&recs, 1).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        render_profile_svg(&p, 2.0, &mut a).unwrap();
        render_profile_svg(&p, 2.0, &mut b).unwrap();
        assert_eq!(a, b);
    }
}
