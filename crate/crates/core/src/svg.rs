//! Minimal self-contained SVG emission (no external assets).

use std::fmt::Write as _;

/// Accumulates shapes in user coordinates and renders a standalone SVG
/// document with a linear mapping onto the canvas (y axis flipped).
pub struct SvgCanvas {
    width: f64,
    height: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    body: String,
}

impl SvgCanvas {
    pub fn new(width: f64, height: f64, x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        SvgCanvas {
            width,
            height,
            x_range,
            y_range,
            body: String::new(),
        }
    }

    fn tx(&self, x: f64) -> f64 {
        (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * self.width
    }

    fn ty(&self, y: f64) -> f64 {
        self.height - (y - self.y_range.0) / (self.y_range.1 - self.y_range.0) * self.height
    }

    pub fn polygon(&mut self, pts: &[(f64, f64)], fill: &str, opacity: f64, attrs: &str) {
        let mut points = String::new();
        for &(x, y) in pts {
            let _ = write!(points, "{:.3},{:.3} ", self.tx(x), self.ty(y));
        }
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="{}" fill-opacity="{}" stroke="none" {}/>"#,
            points.trim_end(),
            fill,
            opacity,
            attrs
        );
    }

    pub fn rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, fill: &str, opacity: f64) {
        let (a, b) = (self.tx(x0), self.tx(x1));
        let (c, d) = (self.ty(y0), self.ty(y1));
        let _ = writeln!(
            self.body,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}" fill-opacity="{}"/>"#,
            a.min(b),
            c.min(d),
            (b - a).abs(),
            (d - c).abs(),
            fill,
            opacity
        );
    }

    pub fn line(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{}" stroke-width="{}"/>"#,
            self.tx(x0),
            self.ty(y0),
            self.tx(x1),
            self.ty(y1),
            stroke,
            width
        );
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, content: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{:.3}" y="{:.3}" font-size="{}" font-family="monospace">{}</text>"#,
            self.tx(x),
            self.ty(y),
            size,
            content
        );
    }

    pub fn render(&self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_self_contained_document() {
        let mut c = SvgCanvas::new(200.0, 100.0, (0.0, 2.0), (0.0, 1.0));
        c.rect(0.0, 0.0, 1.0, 1.0, "grey", 0.5);
        c.polygon(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0)], "blue", 0.2, "");
        c.line(0.0, 0.0, 2.0, 1.0, "black", 1.0);
        c.text(0.1, 0.9, 10.0, "label");
        let s = c.render();
        assert!(s.starts_with("<?xml"));
        assert!(s.contains("<svg"));
        assert!(s.ends_with("</svg>\n"));
        assert!(!s.contains("href")); // no external assets
    }
}
