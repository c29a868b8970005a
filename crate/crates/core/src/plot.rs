//! Minimal SVG rendering for spectra and the response contour.

use std::fmt::Write as _;

use crate::spectrum::{ResponseMatrix, SrsVector};
use crate::ssi::DualSpectra;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 110.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;

/// Upper bound on rendered time bins; wider matrices are max-pooled.
pub const MAX_TIME_BINS: usize = 600;

/// Colour-ramp anchors (dark blue → teal → yellow).
const ANCHORS: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

/// 256-step colour ramp.
pub fn ramp(step: u8) -> (u8, u8, u8) {
    let t = step as f64 / 255.0 * (ANCHORS.len() - 1) as f64;
    let i = (t.floor() as usize).min(ANCHORS.len() - 2);
    let w = t - i as f64;
    let (a, b) = (ANCHORS[i], ANCHORS[i + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * w).round() as u8;
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Ramp index for a magnitude on a log scale between `floor` and `ceiling`;
/// values outside the range are clamped.
pub fn color_index(value: f64, floor: f64, ceiling: f64) -> u8 {
    let v = value.clamp(floor, ceiling);
    let t = (v.log10() - floor.log10()) / (ceiling.log10() - floor.log10());
    (t * 255.0).round().clamp(0.0, 255.0) as u8
}

fn hex(c: (u8, u8, u8)) -> String {
    format!("#{:02x}{:02x}{:02x}", c.0, c.1, c.2)
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    log_x: bool,
    log_y: bool,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let (a, b, v) = if self.log_x {
            (self.x0.log10(), self.x1.log10(), x.log10())
        } else {
            (self.x0, self.x1, x)
        };
        LEFT + (v - a) / (b - a) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let (a, b, v) = if self.log_y {
            (self.y0.log10(), self.y1.log10(), y.log10())
        } else {
            (self.y0, self.y1, y)
        };
        HEIGHT - BOTTOM - (v - a) / (b - a) * (HEIGHT - TOP - BOTTOM)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let mut ticks = Vec::new();
    let mut e = lo.log10().floor() as i32;
    while 10f64.powi(e) <= hi * (1.0 + 1e-12) {
        for m in [1.0, 2.0, 5.0] {
            let t = m * 10f64.powi(e);
            if t >= lo * (1.0 - 1e-12) && t <= hi * (1.0 + 1e-12) {
                ticks.push(t);
            }
        }
        e += 1;
    }
    if ticks.len() < 2 {
        ticks = vec![lo, hi];
    }
    ticks
}

fn lin_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    while t <= hi + 1e-9 * step {
        ticks.push(t);
        t += step;
    }
    ticks
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-2) {
        format!("{v:.0e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        out,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    let xt = if frame.log_x { log_ticks(frame.x0, frame.x1) } else { lin_ticks(frame.x0, frame.x1) };
    for v in xt {
        let x = frame.px(v);
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{}" stroke="black"/>"#, b + 5.0);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, b + 18.0, fmt_tick(v));
    }
    let yt = if frame.log_y { log_ticks(frame.y0, frame.y1) } else { lin_ticks(frame.y0, frame.y1) };
    for v in yt {
        let y = frame.py(v);
        let _ = writeln!(out, r#"<line x1="{}" y1="{y:.2}" x2="{l}" y2="{y:.2}" stroke="black"/>"#, l - 5.0);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, l - 8.0, y + 4.0, fmt_tick(v));
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (l + r) / 2.0, HEIGHT - 25.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="22" y="{}" text-anchor="middle" transform="rotate(-90 22 {})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(y_label)
    );
}

/// Shock response contour: time on the horizontal axis, natural frequency
/// (log) vertically, log-magnitude colour clamped to `floor..ceiling`.
pub fn contour_svg(matrix: &ResponseMatrix, floor: f64, ceiling: f64) -> String {
    let times = matrix.times();
    let freqs = matrix.freqs();
    let n_abs = matrix.n_abs();
    let m = times.len();
    let bins = m.min(MAX_TIME_BINS);
    let t_end = times[m - 1].max(times[0] + f64::EPSILON);

    // Frequency cell edges at geometric midpoints.
    let mut edges = Vec::with_capacity(freqs.len() + 1);
    if freqs.len() == 1 {
        edges.extend([freqs[0] / 2f64.sqrt(), freqs[0] * 2f64.sqrt()]);
    } else {
        edges.push(freqs[0] * (freqs[0] / freqs[1]).sqrt());
        for w in freqs.windows(2) {
            edges.push((w[0] * w[1]).sqrt());
        }
        let k = freqs.len();
        edges.push(freqs[k - 1] * (freqs[k - 1] / freqs[k - 2]).sqrt());
    }
    let frame = Frame {
        x0: times[0],
        x1: t_end,
        y0: edges[0],
        y1: *edges.last().unwrap(),
        log_x: false,
        log_y: true,
    };

    let mut out = String::new();
    header(&mut out, &format!("Shock response contour (Q={})", matrix.q()));
    let _ = writeln!(out, r#"<g shape-rendering="crispEdges">"#);
    for b in 0..bins {
        let i0 = b * m / bins;
        let i1 = ((b + 1) * m / bins).max(i0 + 1);
        let x0 = frame.px(times[i0]);
        let x1 = if i1 < m { frame.px(times[i1]) } else { frame.px(t_end) };
        let w = (x1 - x0).max(0.5);
        for j in 0..freqs.len() {
            let v = (i0..i1).fold(0.0f64, |acc, i| acc.max(n_abs[(i, j)]));
            let c = hex(ramp(color_index(v, floor, ceiling)));
            let y_top = frame.py(edges[j + 1]);
            let y_bot = frame.py(edges[j]);
            let _ = writeln!(
                out,
                r#"<rect x="{x0:.2}" y="{y_top:.2}" width="{w:.2}" height="{:.2}" fill="{c}"/>"#,
                y_bot - y_top
            );
        }
    }
    let _ = writeln!(out, "</g>");
    axes(&mut out, &frame, "t (s)", "f (Hz)");

    // Colour bar.
    let bx = WIDTH - RIGHT + 20.0;
    let (bt, bb) = (TOP, HEIGHT - BOTTOM);
    let step_h = (bb - bt) / 256.0;
    for s in 0..=255u8 {
        let y = bb - (s as f64 + 1.0) * step_h;
        let _ = writeln!(
            out,
            r#"<rect x="{bx}" y="{y:.3}" width="18" height="{:.3}" fill="{}" stroke="none"/>"#,
            step_h + 0.05,
            hex(ramp(s))
        );
    }
    for v in log_ticks(floor, ceiling) {
        let y = bb - (v.log10() - floor.log10()) / (ceiling.log10() - floor.log10()) * (bb - bt);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}">{}</text>"#, bx + 22.0, y + 4.0, fmt_tick(v));
    }
    let _ = writeln!(out, r#"<text x="{bx}" y="{}">m/s²</text>"#, bt - 8.0);
    out.push_str("</svg>\n");
    out
}

fn positive_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| *v > 0.0 && v.is_finite())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (hi > 0.0).then(|| if lo == hi { (lo / 2.0, hi * 2.0) } else { (lo / 1.2, hi * 1.2) })
}

fn polyline(out: &mut String, frame: &Frame, xs: &[f64], ys: &[f64], color: &str, dashed: bool) {
    let mut pts = String::new();
    for (x, y) in xs.iter().zip(ys) {
        let ok = y.is_finite() && (!frame.log_y || *y > 0.0);
        if ok {
            let _ = write!(pts, "{:.2},{:.2} ", frame.px(*x), frame.py(*y));
        } else if !pts.is_empty() {
            write_polyline(out, &pts, color, dashed);
            pts.clear();
        }
    }
    if !pts.is_empty() {
        write_polyline(out, &pts, color, dashed);
    }
}

fn write_polyline(out: &mut String, pts: &str, color: &str, dashed: bool) {
    let dash = if dashed { r#" stroke-dasharray="6,4""# } else { "" };
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"{dash}/>"#,
        pts.trim_end()
    );
}

fn legend(out: &mut String, entries: &[(&str, &str, bool)]) {
    for (i, (name, color, dashed)) in entries.iter().enumerate() {
        let y = TOP + 16.0 + 18.0 * i as f64;
        let x = LEFT + 12.0;
        let dash = if *dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(out, r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"{dash}/>"#, x + 28.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, x + 34.0, y + 4.0, escape(name));
    }
}

/// Log-log SRS plot.
pub fn srs_svg(srs: &SrsVector, title: &str) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let (y0, y1) = positive_range(srs.values.iter().copied()).unwrap_or((1.0, 10.0));
    let frame = Frame {
        x0: srs.freqs[0],
        x1: *srs.freqs.last().unwrap(),
        y0,
        y1,
        log_x: srs.freqs.len() > 1,
        log_y: true,
    };
    let frame = if frame.x0 == frame.x1 {
        Frame { x0: frame.x0 / 2.0, x1: frame.x1 * 2.0, ..frame }
    } else {
        frame
    };
    axes(&mut out, &frame, "f (Hz)", "peak acceleration (m/s²)");
    polyline(&mut out, &frame, &srs.freqs, &srs.values, "#1f4e9c", false);
    legend(&mut out, &[("SRS", "#1f4e9c", false)]);
    out.push_str("</svg>\n");
    out
}

/// SRS and SSI on log-log axes with the margin (dashed) on a right-hand dB
/// axis.
pub fn dual_svg(dual: &DualSpectra, title: &str) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let (y0, y1) = positive_range(dual.srs.iter().chain(&dual.ssi).copied()).unwrap_or((1.0, 10.0));
    let mut frame = Frame {
        x0: dual.freqs[0],
        x1: *dual.freqs.last().unwrap(),
        y0,
        y1,
        log_x: true,
        log_y: true,
    };
    if frame.x0 == frame.x1 {
        frame.x0 /= 2.0;
        frame.x1 *= 2.0;
    }
    axes(&mut out, &frame, "f (Hz)", "peak acceleration (m/s²)");
    polyline(&mut out, &frame, &dual.freqs, &dual.srs, "#1f4e9c", false);
    polyline(&mut out, &frame, &dual.freqs, &dual.ssi, "#c0392b", false);

    let finite: Vec<f64> = dual.margin_db.iter().copied().filter(|v| v.is_finite()).collect();
    let m_hi = finite.iter().fold(1.0f64, |m, v| m.max(*v)) * 1.1;
    let m_lo = finite.iter().fold(0.0f64, |m, v| m.min(*v));
    let right = Frame {
        x0: frame.x0,
        x1: frame.x1,
        y0: m_lo,
        y1: m_hi,
        log_x: true,
        log_y: false,
    };
    polyline(&mut out, &right, &dual.freqs, &dual.margin_db, "#555555", true);
    let rx = WIDTH - RIGHT;
    for v in lin_ticks(m_lo, m_hi) {
        let y = right.py(v);
        let _ = writeln!(out, r#"<line x1="{rx}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="black"/>"#, rx + 5.0);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}">{}</text>"#, rx + 8.0, y + 4.0, fmt_tick(v));
    }
    let mid = (TOP + HEIGHT - BOTTOM) / 2.0;
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{mid}" text-anchor="middle" transform="rotate(90 {} {mid})">margin (dB)</text>"#,
        WIDTH - 40.0,
        WIDTH - 40.0
    );
    legend(
        &mut out,
        &[("SRS", "#1f4e9c", false), ("SSI", "#c0392b", false), ("margin", "#555555", true)],
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn ramp_ends() {
        assert_eq!(ramp(0), (68, 1, 84));
        assert_eq!(ramp(255), (253, 231, 37));
    }

    #[test]
    fn color_index_clamps() {
        assert_eq!(color_index(0.0, 240.0, 2e5), 0);
        assert_eq!(color_index(1e9, 240.0, 2e5), 255);
        assert_eq!(color_index(240.0, 240.0, 2e5), 0);
    }

    #[test]
    fn zero_contour_is_uniform_floor() {
        let rm = ResponseMatrix::from_raw(DMatrix::zeros(10, 4)).unwrap();
        let svg = contour_svg(&rm, 240.0, 2e5);
        let floor = hex(ramp(0));
        let cells = svg.matches("<rect x=").count();
        assert!(svg.contains("f (Hz)") && svg.contains("t (s)"));
        // 40 cells + 256 bar steps + frame, all cells at the floor colour.
        assert_eq!(svg.matches(&format!("fill=\"{floor}\"")).count(), 40 + 1);
        assert!(cells >= 40 + 256);
    }

    #[test]
    fn time_axis_is_pooled() {
        let rm = ResponseMatrix::from_raw(DMatrix::from_element(5000, 2, 1000.0)).unwrap();
        let svg = contour_svg(&rm, 240.0, 2e5);
        assert!(svg.matches("<rect x=").count() <= MAX_TIME_BINS * 2 + 260);
    }
}
