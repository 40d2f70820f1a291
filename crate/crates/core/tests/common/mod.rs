#![allow(dead_code)]

use geonet_core::math::Vec3;
use geonet_core::{build_cycle, CycleType, Manifold, Point, PolygonalCycle};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const CONFORMAL_COEFFS: [f64; 8] = [0.05, -0.03, 0.04, 0.02, 0.0, -0.02, 0.03, 0.01];

pub fn conformal() -> Manifold {
    let (inj, diam) = Manifold::conformal_sphere_estimates(1.0, &CONFORMAL_COEFFS);
    Manifold::conformal_sphere(1.0, CONFORMAL_COEFFS.to_vec(), inj, diam).unwrap()
}

pub fn builtins() -> Vec<Manifold> {
    vec![
        Manifold::round_sphere(1.0).unwrap(),
        Manifold::ellipsoid(1.0, 1.05, 1.1).unwrap(),
        Manifold::flat_torus([1.0, 0.0], [0.0, 1.0]).unwrap(),
        Manifold::torus_of_revolution(2.0, 0.5).unwrap(),
        conformal(),
    ]
}

/// Closed polygon with `n` vertices along the great circle through `p`
/// with unit tangent `dir`, starting and ending at `p`.
pub fn great_circle_through(m: &Manifold, p: Vec3, dir: Vec3, n: usize) -> Vec<Point> {
    (0..=n)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * (j % n) as f64 / n as f64;
            m.point(p * t.cos() + dir * t.sin())
        })
        .collect()
}

/// Two great circles through `p` crossing at angle `theta`, as a
/// figure-eight with one multiple point of degree 4. `kink` rotates the
/// first interior vertex of the second loop about `p`, so the rays of that
/// loop at `p` are no longer opposite.
pub fn sphere_figure_eight(m: &Manifold, p: Vec3, theta: f64, n: usize, kink: f64) -> PolygonalCycle {
    let a = geonet_core::math::orthogonal_unit(&p);
    let b = p.cross(&a);
    let d2 = a * theta.cos() + b * theta.sin();
    let first = great_circle_through(m, p, a, n);
    let mut second = great_circle_through(m, p, d2, n);
    if kink != 0.0 {
        let q = second[1].coords;
        // rotation about the axis p
        let r = q * kink.cos() + p.cross(&q) * kink.sin() + p * p.dot(&q) * (1.0 - kink.cos());
        second[1] = m.point(r);
    }
    build_cycle(m, vec![first, second], &CycleType::single_point(2, n)).unwrap()
}

/// Straight loops along lattice vectors `u` and `w` through `p` on a flat
/// torus, as a figure-eight. `kink` rotates the first interior vertex of the
/// second loop about `p`.
pub fn torus_figure_eight(m: &Manifold, p: Vec3, u: Vec3, w: Vec3, n: usize, kink: f64) -> PolygonalCycle {
    let line = |d: Vec3| -> Vec<Point> { (0..=n).map(|j| m.point(p + d * (j as f64 / n as f64))).collect() };
    let first = line(u);
    let mut second = line(w);
    if kink != 0.0 {
        let d = w / n as f64;
        let r = Vec3::new(d[0] * kink.cos() - d[1] * kink.sin(), d[0] * kink.sin() + d[1] * kink.cos(), 0.0);
        second[1] = m.point(p + r);
    }
    build_cycle(m, vec![first, second], &CycleType::single_point(2, n)).unwrap()
}
