//! Minimal SVG output: scatter plots and polylines in data coordinates.

use std::fmt::Write;

const MARGIN: f64 = 48.0;

pub struct Plot {
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
    axes: bool,
    body: String,
}

fn widen(r: (f64, f64)) -> (f64, f64) {
    if r.1 > r.0 {
        r
    } else {
        (r.0 - 0.5, r.0 + 0.5)
    }
}

impl Plot {
    /// Data ranges `x` and `y` fill a `width x height` canvas.
    pub fn new(x: (f64, f64), y: (f64, f64), width: f64, height: f64) -> Self {
        Plot { width, height, x: widen(x), y: widen(y), axes: true, body: String::new() }
    }

    /// Same scale on both axes, no tick labels; for shapes.
    pub fn figure(lo: (f64, f64), hi: (f64, f64), size: f64) -> Self {
        let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-12);
        let (cx, cy) = (0.5 * (lo.0 + hi.0), 0.5 * (lo.1 + hi.1));
        let mut p = Plot::new((cx - 0.5 * span, cx + 0.5 * span), (cy - 0.5 * span, cy + 0.5 * span), size, size);
        p.axes = false;
        p
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let w = self.width - 2.0 * MARGIN;
        let h = self.height - 2.0 * MARGIN;
        (MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * w, self.height - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * h)
    }

    pub fn points(&mut self, pts: &[(f64, f64)], radius: f64, color: &str) {
        for &(x, y) in pts {
            let (a, b) = self.px(x, y);
            let _ = writeln!(self.body, r#"<circle cx="{a:.3}" cy="{b:.3}" r="{radius}" fill="{color}"/>"#);
        }
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], closed: bool, stroke: &str, fill: &str) {
        if pts.is_empty() {
            return;
        }
        let mut d = String::with_capacity(pts.len() * 20);
        for (i, &(x, y)) in pts.iter().enumerate() {
            let (a, b) = self.px(x, y);
            let _ = write!(d, "{}{a:.3} {b:.3}", if i == 0 { "M" } else { " L" });
        }
        if closed {
            d.push_str(" Z");
        }
        let _ = writeln!(self.body, r#"<path d="{d}" stroke="{stroke}" stroke-width="1" fill="{fill}"/>"#);
    }

    /// Vertical reference line at `x`.
    pub fn vline(&mut self, x: f64, color: &str) {
        let (a, top) = self.px(x, self.y.1);
        let (_, bottom) = self.px(x, self.y.0);
        let _ = writeln!(self.body, r#"<line x1="{a:.3}" y1="{top:.3}" x2="{a:.3}" y2="{bottom:.3}" stroke="{color}" stroke-dasharray="4 3"/>"#);
    }

    pub fn finish(self, xlabel: &str, ylabel: &str) -> String {
        let (w, h) = (self.width, self.height);
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        );
        if self.axes {
            let (x0, y0) = self.px(self.x.0, self.y.0);
            let (x1, y1) = self.px(self.x.1, self.y.1);
            let _ = writeln!(s, r#"<rect x="{x0:.3}" y="{y1:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
            let _ = writeln!(s, r#"<text x="{x0:.3}" y="{:.3}" font-size="11">{}</text>"#, y0 + 16.0, fmt_tick(self.x.0));
            let _ = writeln!(s, r#"<text x="{x1:.3}" y="{:.3}" font-size="11" text-anchor="end">{}</text>"#, y0 + 16.0, fmt_tick(self.x.1));
            let _ = writeln!(s, r#"<text x="{:.3}" y="{y0:.3}" font-size="11" text-anchor="end">{}</text>"#, x0 - 4.0, fmt_tick(self.y.0));
            let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" font-size="11" text-anchor="end">{}</text>"#, x0 - 4.0, y1 + 10.0, fmt_tick(self.y.1));
            let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" font-size="12" text-anchor="middle">{}</text>"#, 0.5 * (x0 + x1), h - 8.0, xml(xlabel));
            let _ = writeln!(
                s,
                r#"<text x="14" y="{:.3}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.3})">{}</text>"#,
                0.5 * (y0 + y1),
                0.5 * (y0 + y1),
                xml(ylabel)
            );
        }
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

fn fmt_tick(v: f64) -> String {
    format!("{v:.4}")
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_corners_inside_margins() {
        let p = Plot::new((0.0, 1.0), (0.0, 2.0), 400.0, 300.0);
        assert_eq!(p.px(0.0, 0.0), (MARGIN, 300.0 - MARGIN));
        assert_eq!(p.px(1.0, 2.0), (400.0 - MARGIN, MARGIN));
    }

    #[test]
    fn empty_plot_is_valid_svg() {
        let mut p = Plot::new((0.0, 1.0), (-1.0, 1.0), 200.0, 200.0);
        p.points(&[], 2.0, "red");
        let s = p.finish("Re", "Im");
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(!s.contains("<circle"));
    }
}
