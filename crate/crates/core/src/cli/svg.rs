//! Minimal SVG 1.1 emission. Plot space is y-up; the viewBox flips it.

use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stroke {
    Solid,
    Dashed,
}

#[derive(Clone, Debug)]
struct Path {
    points: Vec<[f64; 2]>,
    color: String,
    stroke: Stroke,
    width: f64,
}

#[derive(Clone, Debug)]
struct Marker {
    at: [f64; 2],
    color: String,
}

/// Collects polylines and point markers, then fits them into a square canvas.
#[derive(Clone, Debug, Default)]
pub struct Plot {
    title: String,
    paths: Vec<Path>,
    markers: Vec<Marker>,
}

/// Fixed categorical palette so colors depend only on the index.
pub fn palette(i: usize) -> &'static str {
    const P: [&str; 8] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
    ];
    P[i % P.len()]
}

impl Plot {
    pub fn new(title: &str) -> Plot {
        Plot {
            title: title.to_string(),
            ..Plot::default()
        }
    }

    pub fn polyline(&mut self, points: &[[f64; 2]], color: &str, stroke: Stroke) -> &mut Self {
        self.paths.push(Path {
            points: points.iter().copied().filter(|p| p[0].is_finite() && p[1].is_finite()).collect(),
            color: color.to_string(),
            stroke,
            width: 1.0,
        });
        self
    }

    pub fn heavy(&mut self, points: &[[f64; 2]], color: &str) -> &mut Self {
        self.polyline(points, color, Stroke::Solid);
        self.paths.last_mut().unwrap().width = 2.0;
        self
    }

    pub fn marker(&mut self, at: [f64; 2], color: &str) -> &mut Self {
        if at[0].is_finite() && at[1].is_finite() {
            self.markers.push(Marker {
                at,
                color: color.to_string(),
            });
        }
        self
    }

    fn bounds(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        let all = self.paths.iter().flat_map(|p| p.points.iter()).chain(self.markers.iter().map(|m| &m.at));
        for p in all {
            b[0] = b[0].min(p[0]);
            b[1] = b[1].min(p[1]);
            b[2] = b[2].max(p[0]);
            b[3] = b[3].max(p[1]);
        }
        if !b[0].is_finite() {
            return [-1.0, -1.0, 1.0, 1.0];
        }
        b
    }

    pub fn render(&self) -> String {
        let size = 800.0;
        let pad = 20.0;
        let [x0, y0, x1, y1] = self.bounds();
        let span = (x1 - x0).max(y1 - y0).max(1e-12);
        let k = (size - 2.0 * pad) / span;
        // centre the shorter axis
        let ox = pad + 0.5 * (span - (x1 - x0)) * k;
        let oy = pad + 0.5 * (span - (y1 - y0)) * k;
        let map = |p: [f64; 2]| (ox + (p[0] - x0) * k, size - oy - (p[1] - y0) * k);

        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">"
        );
        let _ = writeln!(s, "<title>{}</title>", escape(&self.title));
        let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
        for p in &self.paths {
            if p.points.len() < 2 {
                continue;
            }
            let mut d = String::new();
            for (i, q) in p.points.iter().enumerate() {
                let (x, y) = map(*q);
                let _ = write!(d, "{}{x:.3},{y:.3}", if i == 0 { "M" } else { " L" });
            }
            let dash = match p.stroke {
                Stroke::Solid => "",
                Stroke::Dashed => " stroke-dasharray=\"6,4\"",
            };
            let _ = writeln!(
                s,
                "<path d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"{dash}/>",
                p.color, p.width
            );
        }
        for m in &self.markers {
            let (x, y) = map(m.at);
            let _ = writeln!(
                s,
                "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"none\" stroke=\"{}\"/>",
                m.color
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_paths_and_markers() {
        let mut p = Plot::new("a < b");
        p.polyline(&[[0.0, 0.0], [1.0, 1.0]], "black", Stroke::Dashed)
            .marker([0.5, 0.5], "red");
        let s = p.render();
        assert!(s.contains("version=\"1.1\""));
        assert!(s.contains("stroke-dasharray"));
        assert!(s.contains("<circle cx=\"400.000\" cy=\"400.000\""));
        assert!(s.contains("a &lt; b"));
        // y is flipped: (0, 0) lands at the bottom left
        assert!(s.contains("M20.000,780.000 L780.000,20.000"));
    }

    #[test]
    fn skips_non_finite_points() {
        let mut p = Plot::new("");
        p.polyline(&[[0.0, 0.0], [f64::NAN, 1.0], [1.0, 0.0]], "black", Stroke::Solid);
        assert!(!p.render().contains("NaN"));
    }
}
