//! Planar lattices for torus charts: reduction, wraparound, and the
//! constants (systole, covering radius) derived from them.

use crate::math::{floor, hypot, round, Vec3};

/// A rank-2 lattice in the chart plane, stored with a Lagrange-reduced basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    b1: [f64; 2],
    b2: [f64; 2],
    inv: [[f64; 2]; 2],
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn sub(a: [f64; 2], b: [f64; 2], k: f64) -> [f64; 2] {
    [a[0] - k * b[0], a[1] - k * b[1]]
}

impl Lattice {
    /// Returns `None` for a degenerate basis.
    pub fn new(u: [f64; 2], v: [f64; 2]) -> Option<Self> {
        let det = u[0] * v[1] - u[1] * v[0];
        if !(det.abs() > 1e-300) || !det.is_finite() {
            return None;
        }
        // Lagrange-Gauss reduction: |b1| <= |b2| <= |b2 - k b1| for all k.
        let (mut b1, mut b2) = if dot(u, u) <= dot(v, v) { (u, v) } else { (v, u) };
        loop {
            let k = round(dot(b1, b2) / dot(b1, b1));
            b2 = sub(b2, b1, k);
            if dot(b2, b2) < dot(b1, b1) {
                core::mem::swap(&mut b1, &mut b2);
            } else {
                break;
            }
        }
        // Make the pair acute so the Delaunay triangle is (0, b1, b2).
        if dot(b1, b2) < 0.0 {
            b2 = [-b2[0], -b2[1]];
        }
        let det = b1[0] * b2[1] - b1[1] * b2[0];
        let inv = [[b2[1] / det, -b2[0] / det], [-b1[1] / det, b1[0] / det]];
        Some(Self { b1, b2, inv })
    }

    pub fn basis(&self) -> ([f64; 2], [f64; 2]) {
        (self.b1, self.b2)
    }

    fn coeffs(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.inv[0][0] * x + self.inv[0][1] * y,
            self.inv[1][0] * x + self.inv[1][1] * y,
        )
    }

    /// Length of the shortest nonzero lattice vector.
    pub fn systole(&self) -> f64 {
        hypot(self.b1[0], self.b1[1])
    }

    /// Circumradius of the Voronoi cell, i.e. the diameter of the flat torus.
    pub fn covering_radius(&self) -> f64 {
        let l1 = hypot(self.b1[0], self.b1[1]);
        let l2 = hypot(self.b2[0], self.b2[1]);
        let d = sub(self.b2, self.b1, 1.0);
        let l3 = hypot(d[0], d[1]);
        let area = (self.b1[0] * self.b2[1] - self.b1[1] * self.b2[0]).abs();
        l1 * l2 * l3 / (4.0 * 0.5 * area)
    }

    /// Representative of `p` in the fundamental parallelogram spanned by the
    /// reduced basis.
    pub fn reduce(&self, p: Vec3) -> Vec3 {
        let (c1, c2) = self.coeffs(p.x, p.y);
        let (f1, f2) = (c1 - floor(c1), c2 - floor(c2));
        // floor can leave exactly 1.0 after rounding
        let f1 = if f1 >= 1.0 { 0.0 } else { f1 };
        let f2 = if f2 >= 1.0 { 0.0 } else { f2 };
        Vec3::new(
            f1 * self.b1[0] + f2 * self.b2[0],
            f1 * self.b1[1] + f2 * self.b2[1],
            0.0,
        )
    }

    /// Shortest lattice translate of the chart displacement `d`.
    pub fn wrap(&self, d: Vec3) -> Vec3 {
        let (c1, c2) = self.coeffs(d.x, d.y);
        let (n1, n2) = (round(c1), round(c2));
        let mut best = d;
        let mut best_len = f64::INFINITY;
        for i in -2..=2 {
            for j in -2..=2 {
                let k1 = n1 + i as f64;
                let k2 = n2 + j as f64;
                let x = d.x - k1 * self.b1[0] - k2 * self.b2[0];
                let y = d.y - k1 * self.b1[1] - k2 * self.b2[1];
                let l = x * x + y * y;
                if l < best_len {
                    best_len = l;
                    best = Vec3::new(x, y, 0.0);
                }
            }
        }
        best
    }

    /// Lattice vector `i b1 + j b2` in the reduced basis.
    pub fn vector(&self, i: i64, j: i64) -> Vec3 {
        Vec3::new(
            i as f64 * self.b1[0] + j as f64 * self.b2[0],
            i as f64 * self.b1[1] + j as f64 * self.b2[1],
            0.0,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_constants() {
        let l = Lattice::new([1.0, 0.0], [0.0, 1.0]).unwrap();
        assert!((l.systole() - 1.0).abs() < 1e-15);
        assert!((l.covering_radius() - core::f64::consts::SQRT_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rectangle_constants() {
        let l = Lattice::new([1.0, 0.0], [0.0, 3.0]).unwrap();
        assert!((l.systole() - 1.0).abs() < 1e-15);
        assert!((l.covering_radius() - libm::sqrt(10.0) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn skewed_basis_is_reduced() {
        // Same lattice as the unit square.
        let l = Lattice::new([1.0, 0.0], [7.0, 1.0]).unwrap();
        assert!((l.systole() - 1.0).abs() < 1e-12);
        assert!((l.covering_radius() - core::f64::consts::SQRT_2 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn wrap_picks_shortest_translate() {
        let l = Lattice::new([1.0, 0.0], [0.0, 1.0]).unwrap();
        let d = l.wrap(Vec3::new(0.9, 0.0, 0.0));
        assert!((d.x + 0.1).abs() < 1e-15 && d.y.abs() < 1e-15);
        let p = l.reduce(Vec3::new(-0.25, 2.5, 0.0));
        assert!((p.x - 0.75).abs() < 1e-15 && (p.y - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_basis_rejected() {
        assert!(Lattice::new([1.0, 1.0], [2.0, 2.0]).is_none());
    }
}
