//! Minimal SVG output: polylines with markers, and cell maps for the region
//! plots. The CSV next to each SVG is the authoritative data.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Solid,
    Dashed,
    Squares,
    Circles,
    Crosses,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub color: &'static str,
    pub style: Style,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
pub struct Axis {
    pub label: &'static str,
    pub log: bool,
}

struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
    from: f64,
    to: f64,
}

impl Scale {
    fn new(lo: f64, hi: f64, log: bool, from: f64, to: f64) -> Self {
        let (lo, hi) = if log { (lo.log10(), hi.log10()) } else { (lo, hi) };
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        Self { lo, hi, log, from, to }
    }

    fn map(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            (a..=b).map(|e| (10f64.powi(e), format!("1e{e}"))).collect()
        } else {
            let span = self.hi - self.lo;
            let raw = span / 5.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= 6.0).unwrap_or(raw);
            let decimals = (-step.log10().floor()).max(0.0) as usize;
            let first = (self.lo / step).ceil() as i64;
            let last = (self.hi / step + 1e-9).floor() as i64;
            (first..=last)
                .map(|k| {
                    let v = k as f64 * step;
                    let label = format!("{:.*}", decimals, v + 0.0);
                    (v, if label.trim_start_matches(['-', '0', '.']).is_empty() { "0".into() } else { label })
                })
                .collect()
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, (LEFT + WIDTH - RIGHT) / 2.0, escape(title));
}

fn axes(out: &mut String, xs: &Scale, ys: &Scale, x: Axis, y: Axis) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(out, r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
    for (v, label) in xs.ticks() {
        let px = xs.map(v);
        let _ = writeln!(out, r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(out, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{label}</text>"#, y0 + 18.0);
    }
    for (v, label) in ys.ticks() {
        let py = ys.map(v);
        let _ = writeln!(out, r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#, x0 - 8.0, py + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 20.0, escape(x.label));
    let _ = writeln!(
        out,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (y0 + y1) / 2.0,
        escape(y.label)
    );
}

fn marker(out: &mut String, style: Style, color: &str, px: f64, py: f64) {
    let _ = match style {
        Style::Squares => writeln!(out, r#"<rect x="{:.2}" y="{:.2}" width="7" height="7" fill="none" stroke="{color}"/>"#, px - 3.5, py - 3.5),
        Style::Circles => writeln!(out, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3.5" fill="{color}"/>"#),
        Style::Crosses => writeln!(
            out,
            r#"<path d="M{:.2},{:.2}L{:.2},{:.2}M{:.2},{:.2}L{:.2},{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
            px - 5.0,
            py - 5.0,
            px + 5.0,
            py + 5.0,
            px - 5.0,
            py + 5.0,
            px + 5.0,
            py - 5.0
        ),
        Style::Solid | Style::Dashed => Ok(()),
    };
}

pub fn line_chart(title: &str, x: Axis, y: Axis, series: &[Series]) -> String {
    let pts = || series.iter().flat_map(|s| s.points.iter()).filter(|(a, b)| a.is_finite() && b.is_finite() && (!x.log || *a > 0.0));
    let (mut xl, mut xh, mut yl, mut yh) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(a, b) in pts() {
        xl = xl.min(a);
        xh = xh.max(a);
        yl = yl.min(b);
        yh = yh.max(b);
    }
    if !xl.is_finite() {
        (xl, xh, yl, yh) = (1.0, 10.0, 0.0, 1.0);
    }
    let pad = 0.04 * (yh - yl).max(1e-6);
    let xs = Scale::new(xl, xh, x.log, LEFT, WIDTH - RIGHT);
    let ys = Scale::new(yl - pad, yh + pad, false, HEIGHT - BOTTOM, TOP);

    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &xs, &ys, x, y);
    for (k, s) in series.iter().enumerate() {
        let coords: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|(a, b)| a.is_finite() && b.is_finite() && (!x.log || *a > 0.0))
            .map(|&(a, b)| (xs.map(a), ys.map(b)))
            .collect();
        match s.style {
            Style::Solid | Style::Dashed => {
                let path: Vec<String> = coords.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
                let dash = if s.style == Style::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
                let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.8"{dash}/>"#, path.join(" "), s.color);
            }
            style => coords.iter().for_each(|&(a, b)| marker(&mut out, style, s.color, a, b)),
        }
        let ly = TOP + 14.0 + 20.0 * k as f64;
        let lx = WIDTH - RIGHT + 12.0;
        match s.style {
            Style::Solid | Style::Dashed => {
                let dash = if s.style == Style::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
                let _ = writeln!(out, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="1.8"{dash}/>"#, lx + 24.0, s.color);
            }
            style => marker(&mut out, style, s.color, lx + 12.0, ly),
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 30.0, ly + 4.0, escape(&s.name));
    }
    out.push_str("</svg>\n");
    out
}

/// One coloured rectangle per grid cell; `cells[i][j]` is `(class index, shade ∈ [0, 1])`
/// at `(xs[j], ys[i])`. Both axes are logarithmic.
pub fn region_map(title: &str, x: Axis, y: Axis, xs: &[f64], ys: &[f64], cells: &[Vec<(usize, f64)>], classes: &[(&str, &str)]) -> String {
    let edges = |v: &[f64]| -> Vec<f64> {
        let l: Vec<f64> = v.iter().map(|a| a.log10()).collect();
        if l.len() == 1 {
            return vec![10f64.powf(l[0] - 0.5), 10f64.powf(l[0] + 0.5)];
        }
        let mut e = vec![10f64.powf(l[0] - 0.5 * (l[1] - l[0]))];
        e.extend(l.windows(2).map(|w| 10f64.powf(0.5 * (w[0] + w[1]))));
        e.push(10f64.powf(l[l.len() - 1] + 0.5 * (l[l.len() - 1] - l[l.len() - 2])));
        e
    };
    let (ex, ey) = (edges(xs), edges(ys));
    let sx = Scale::new(ex[0], ex[ex.len() - 1], true, LEFT, WIDTH - RIGHT);
    let sy = Scale::new(ey[0], ey[ey.len() - 1], true, HEIGHT - BOTTOM, TOP);

    let mut out = String::new();
    header(&mut out, title);
    for (i, row) in cells.iter().enumerate() {
        for (j, &(class, shade)) in row.iter().enumerate() {
            let color = classes.get(class).map_or("#ffffff", |c| c.1);
            let (x0, x1) = (sx.map(ex[j]), sx.map(ex[j + 1]));
            let (y0, y1) = (sy.map(ey[i + 1]), sy.map(ey[i]));
            let _ = writeln!(
                out,
                r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="{:.3}"/>"#,
                x1 - x0,
                y1 - y0,
                0.35 + 0.65 * shade.clamp(0.0, 1.0)
            );
        }
    }
    axes(&mut out, &sx, &sy, x, y);
    for (k, (name, color)) in classes.iter().enumerate() {
        let ly = TOP + 14.0 + 20.0 * k as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(out, r#"<rect x="{lx}" y="{}" width="14" height="14" fill="{color}"/>"#, ly - 7.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 20.0, ly + 4.0, escape(name));
    }
    out.push_str("</svg>\n");
    out
}
