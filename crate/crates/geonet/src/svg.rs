//! SVG drawings of nets and families.

use std::fmt::Write as _;

use geonet_core::math::Vec3;
use geonet_core::{CycleFamily, GeodesicNet, Manifold, Point};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// Parallel projection of the embedding along a fixed oblique direction.
    Orthographic,
    /// Chart coordinates: the fundamental domain of a torus, or
    /// longitude/latitude of a sphere-like surface.
    ChartPlane,
}

impl Projection {
    /// Chart plane for tori, orthographic otherwise.
    pub fn default_for(m: &Manifold) -> Self {
        if m.lattice().is_some() { Self::ChartPlane } else { Self::Orthographic }
    }
}

pub enum Drawing<'a> {
    Net(&'a GeodesicNet),
    Family(&'a CycleFamily),
}

struct Canvas {
    m: Manifold,
    projection: Projection,
    view: [Vec3; 3],
    /// Data rectangle `(x0, y0, x1, y1)`.
    rect: (f64, f64, f64, f64),
    body: String,
}

impl Canvas {
    fn new(m: &Manifold, projection: Projection) -> Self {
        let d = Vec3::new(1.0, 0.6, 0.8).normalize();
        let ex = Vec3::new(0.0, 0.0, 1.0).cross(&d).normalize();
        let ey = d.cross(&ex);
        let mut c = Self { m: m.clone(), projection, view: [ex, ey, d], rect: (0.0, 0.0, 1.0, 1.0), body: String::new() };
        c.rect = match (projection, m.lattice()) {
            (Projection::ChartPlane, Some(l)) => {
                let (b1, b2) = l.basis();
                let xs = [0.0, b1[0], b2[0], b1[0] + b2[0]];
                let ys = [0.0, b1[1], b2[1], b1[1] + b2[1]];
                let f = |v: &[f64], g: fn(f64, f64) -> f64, s: f64| v.iter().copied().fold(s, g);
                (f(&xs, f64::min, 0.0), f(&ys, f64::min, 0.0), f(&xs, f64::max, 0.0), f(&ys, f64::max, 0.0))
            }
            (Projection::ChartPlane, None) => (-std::f64::consts::PI, -0.5 * std::f64::consts::PI, std::f64::consts::PI, 0.5 * std::f64::consts::PI),
            (Projection::Orthographic, _) => {
                let r = extent(m);
                (-r, -r, r, r)
            }
        };
        c
    }

    /// Plane coordinates and whether the point faces the viewer.
    fn plane(&self, p: &Point) -> (f64, f64, bool) {
        let x = p.coords;
        match (self.projection, self.m.lattice()) {
            (Projection::ChartPlane, Some(_)) => (x.x, x.y, true),
            (Projection::ChartPlane, None) => {
                let r = x.norm();
                (x.y.atan2(x.x), (x.z / r).clamp(-1.0, 1.0).asin(), true)
            }
            (Projection::Orthographic, _) => {
                if self.m.lattice().is_some() {
                    // tori without an embedding: draw the chart
                    return (x.x, x.y, true);
                }
                (x.dot(&self.view[0]), x.dot(&self.view[1]), x.dot(&self.view[2]) >= 0.0)
            }
        }
    }

    fn pixel(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let (x0, y0, x1, y1) = self.rect;
        let s = (SIZE - 2.0 * MARGIN) / (x1 - x0).max(y1 - y0).max(1e-12);
        let ox = MARGIN + 0.5 * ((SIZE - 2.0 * MARGIN) - s * (x1 - x0));
        let oy = MARGIN + 0.5 * ((SIZE - 2.0 * MARGIN) - s * (y1 - y0));
        (ox + s * (x - x0), SIZE - (oy + s * (y - y0)))
    }

    /// Consecutive points that should not be joined: a wrap across the
    /// fundamental domain or the longitude seam.
    fn breaks(&self, a: &Point, b: &Point) -> bool {
        match (self.projection, self.m.lattice()) {
            (_, Some(_)) => {
                let raw = b.coords - a.coords;
                raw.norm() > self.m.displacement(a, b).norm() + 1e-9
            }
            (Projection::ChartPlane, None) => (self.plane(a).0 - self.plane(b).0).abs() > std::f64::consts::PI,
            _ => false,
        }
    }

    fn polyline(&mut self, pts: &[Point], style: &str) {
        let mut runs: Vec<(bool, Vec<(f64, f64)>)> = Vec::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y, front) = self.plane(p);
            let q = self.pixel((x, y));
            match runs.last_mut() {
                Some(last) if !self.breaks(&pts[i - 1], p) => {
                    last.1.push(q);
                    if last.0 != front {
                        runs.push((front, vec![q]));
                    }
                }
                _ => runs.push((front, vec![q])),
            }
        }
        for (front, run) in runs {
            if run.len() < 2 {
                continue;
            }
            let pts: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let extra = if front { "" } else { " stroke-opacity=\"0.3\" stroke-dasharray=\"4 3\"" };
            writeln!(self.body, "<polyline points=\"{}\" {style}{extra}/>", pts.join(" ")).unwrap();
        }
    }

    fn arrow(&mut self, a: &Point, b: &Point, style: &str) {
        if self.breaks(a, b) {
            return;
        }
        let (ax, ay, _) = self.plane(a);
        let (bx, by, _) = self.plane(b);
        let (p, q) = (self.pixel((ax, ay)), self.pixel((bx, by)));
        let (dx, dy) = (q.0 - p.0, q.1 - p.1);
        let len = dx.hypot(dy);
        if len < 1e-9 {
            return;
        }
        let (ux, uy) = (dx / len, dy / len);
        let tip = (0.5 * (p.0 + q.0) + 4.0 * ux, 0.5 * (p.1 + q.1) + 4.0 * uy);
        let l = (tip.0 - 8.0 * ux - 4.0 * uy, tip.1 - 8.0 * uy + 4.0 * ux);
        let r = (tip.0 - 8.0 * ux + 4.0 * uy, tip.1 - 8.0 * uy - 4.0 * ux);
        writeln!(
            self.body,
            "<polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" {style}/>",
            tip.0, tip.1, l.0, l.1, r.0, r.1
        )
        .unwrap();
    }

    fn frame(&mut self) {
        match (self.projection, self.m.lattice()) {
            (_, Some(l)) => {
                let (b1, b2) = l.basis();
                let corners = [(0.0, 0.0), (b1[0], b1[1]), (b1[0] + b2[0], b1[1] + b2[1]), (b2[0], b2[1])];
                let pts: Vec<String> = corners.iter().map(|&c| self.pixel(c)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                writeln!(self.body, "<polygon points=\"{}\" fill=\"none\" stroke=\"#bbb\"/>", pts.join(" ")).unwrap();
            }
            (Projection::Orthographic, None) => {
                let (cx, cy) = self.pixel((0.0, 0.0));
                let (ex, _) = self.pixel((extent(&self.m), 0.0));
                writeln!(self.body, "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{:.2}\" fill=\"none\" stroke=\"#bbb\"/>", ex - cx).unwrap();
            }
            (Projection::ChartPlane, None) => {
                let (x0, y0) = self.pixel((self.rect.0, self.rect.1));
                let (x1, y1) = self.pixel((self.rect.2, self.rect.3));
                writeln!(
                    self.body,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#bbb\"/>",
                    x0, y1, x1 - x0, y0 - y1
                )
                .unwrap();
            }
        }
    }

    fn finish(self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
        )
        .unwrap();
        writeln!(s, "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>").unwrap();
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

/// Largest ambient coordinate scale of a sphere-like surface.
fn extent(m: &Manifold) -> f64 {
    use geonet_core::ManifoldKind::*;
    match m.kind() {
        RoundSphere { radius } | ConformalSphere { radius, .. } => *radius,
        Ellipsoid { axes } => axes.iter().copied().fold(0.0, f64::max),
        FlatTorus { .. } | TorusOfRevolution { .. } => 1.0,
    }
}

const PALETTE: [&str; 6] = ["#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#117a8b"];

/// Draw a net (edges coloured by multiplicity, vertices sized by degree) or
/// a family (every member's chains with an orientation arrow each). The
/// output only depends on the input.
pub fn render_svg(m: &Manifold, drawing: Drawing<'_>, projection: Projection) -> String {
    let mut c = Canvas::new(m, projection);
    match drawing {
        Drawing::Net(net) => {
            if !net.is_empty() {
                c.frame();
            }
            for e in &net.edges {
                let colour = PALETTE[(e.multiplicity as usize - 1) % PALETTE.len()];
                let width = 1.5 + e.multiplicity as f64;
                c.polyline(&e.polyline(), &format!("fill=\"none\" stroke=\"{colour}\" stroke-width=\"{width}\""));
            }
            for (i, v) in net.vertices.iter().enumerate() {
                let (x, y, front) = c.plane(v);
                let (px, py) = c.pixel((x, y));
                let r = 1.5 + net.degree(i) as f64;
                let op = if front { 1.0 } else { 0.3 };
                writeln!(c.body, "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"{r:.1}\" fill=\"black\" fill-opacity=\"{op}\"/>")
                    .unwrap();
            }
        }
        Drawing::Family(fam) => {
            if !fam.is_empty() {
                c.frame();
            }
            for (i, member) in fam.members.iter().enumerate() {
                for (j, chain) in member.chains().iter().enumerate() {
                    let colour = PALETTE[(i + j) % PALETTE.len()];
                    let style = format!("fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\"");
                    let pts: Vec<Point> = chain
                        .iter()
                        .flat_map(|s| s.samples.iter().copied())
                        .collect();
                    c.polyline(&pts, &style);
                    if let Some(s) = chain.iter().find(|s| s.length > 0.0) {
                        let mid = s.samples.len() / 2;
                        let (a, b) = (s.samples[mid.saturating_sub(1)], s.samples[mid.min(s.samples.len() - 1)]);
                        c.arrow(&a, &b, &format!("fill=\"{colour}\""));
                    }
                }
            }
        }
    }
    c.finish()
}
