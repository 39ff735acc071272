//! Minimal SVG writer for line plots and disk diagrams.

use std::fmt::Write;

/// Six significant digits.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).clamp(0, 12) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Affine map from data coordinates to a `size × size` canvas with a margin.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Frame {
    pub fn new(width: f64, height: f64, margin: f64, x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |r: (f64, f64)| if r.1 > r.0 { r } else { (r.0 - 1.0, r.0 + 1.0) };
        Self {
            width,
            height,
            margin,
            x: pad(x),
            y: pad(y),
        }
    }

    pub fn px(&self, x: f64) -> f64 {
        self.margin + (x - self.x.0) / (self.x.1 - self.x.0) * (self.width - 2.0 * self.margin)
    }

    pub fn py(&self, y: f64) -> f64 {
        self.height - self.margin - (y - self.y.0) / (self.y.1 - self.y.0) * (self.height - 2.0 * self.margin)
    }
}

pub struct Svg {
    body: String,
    width: f64,
    height: f64,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Self {
            body: String::new(),
            width,
            height,
        }
    }

    pub fn polyline(&mut self, frame: &Frame, pts: impl IntoIterator<Item = (f64, f64)>, stroke: &str, width: f64) {
        let mut d = String::new();
        for (x, y) in pts {
            let _ = write!(d, "{},{} ", fmt6(frame.px(x)), fmt6(frame.py(y)));
        }
        let _ = writeln!(
            self.body,
            r#"<polyline fill="none" stroke="{stroke}" stroke-width="{}" points="{}"/>"#,
            fmt6(width),
            d.trim_end()
        );
    }

    pub fn polygon(&mut self, frame: &Frame, pts: impl IntoIterator<Item = (f64, f64)>, stroke: &str, width: f64) {
        let mut d = String::new();
        for (x, y) in pts {
            let _ = write!(d, "{},{} ", fmt6(frame.px(x)), fmt6(frame.py(y)));
        }
        let _ = writeln!(
            self.body,
            r#"<polygon fill="none" stroke="{stroke}" stroke-width="{}" points="{}"/>"#,
            fmt6(width),
            d.trim_end()
        );
    }

    pub fn dot(&mut self, frame: &Frame, x: f64, y: f64, r: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" fill="{fill}"/>"#,
            fmt6(frame.px(x)),
            fmt6(frame.py(y)),
            fmt6(r)
        );
    }

    /// Circle given in data coordinates (the frame must have equal scales).
    pub fn circle(&mut self, frame: &Frame, x: f64, y: f64, radius: f64, stroke: &str) {
        let r = radius / (frame.x.1 - frame.x.0) * (frame.width - 2.0 * frame.margin);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="{stroke}" stroke-width="1"/>"#,
            fmt6(frame.px(x)),
            fmt6(frame.py(y)),
            fmt6(r)
        );
    }

    pub fn text(&mut self, x: f64, y: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="{anchor}">{s}</text>"#,
            fmt6(x),
            fmt6(y)
        );
    }

    /// Box, ticks and labels for a line plot.
    pub fn axes(&mut self, frame: &Frame, x_label: &str, y_label: &str) {
        let (l, r) = (frame.margin, frame.width - frame.margin);
        let (t, b) = (frame.margin, frame.height - frame.margin);
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="1"/>"#,
            fmt6(l),
            fmt6(t),
            fmt6(r - l),
            fmt6(b - t)
        );
        for k in 0..=4 {
            let fx = frame.x.0 + (frame.x.1 - frame.x.0) * k as f64 / 4.0;
            self.text(frame.px(fx), b + 16.0, "middle", &fmt6(fx));
            let fy = frame.y.0 + (frame.y.1 - frame.y.0) * k as f64 / 4.0;
            self.text(l - 6.0, frame.py(fy) + 4.0, "end", &fmt6(fy));
        }
        self.text(0.5 * (l + r), frame.height - 6.0, "middle", x_label);
        self.text(l, t - 8.0, "start", y_label);
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = fmt6(self.width),
            h = fmt6(self.height)
        )
    }
}
