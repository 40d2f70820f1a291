//! Minimizing geodesics between points farther apart than `inj / 2`.

use alloc::vec::Vec;

use super::connect::ShootingOptions;
use super::{GeodesicSegment, Manifold, ManifoldKind, Point};
use crate::error::{Error, Result};
use crate::math::{acos, ceil, cos, norm, orthogonal_unit, sin, Vec3, PI};

/// A long geodesic given as a chain of short minimizing segments.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub vertices: Vec<Point>,
    pub segments: Vec<GeodesicSegment>,
    pub length: f64,
}

impl GeodesicPath {
    pub fn start(&self) -> Point {
        self.vertices[0]
    }

    pub fn end(&self) -> Point {
        *self.vertices.last().unwrap()
    }
}

/// Seed curves for the relaxation, as functions of `s` in `[0, 1]`: great
/// circles through the radial projections (several planes for antipodal
/// pairs, bulged variants otherwise) or chart lines to nearby lattice
/// translates.
fn seeds(m: &Manifold, p: &Point, q: &Point, n: usize) -> Vec<Vec<Point>> {
    let sample = |f: &dyn Fn(f64) -> Point| -> Vec<Point> {
        let mut v: Vec<Point> = (0..=n).map(|i| f(i as f64 / n as f64)).collect();
        v[0] = *p;
        v[n] = *q;
        v
    };
    let mut out = Vec::new();
    if let ManifoldKind::TorusOfRevolution { .. } = m.kind() {
        // the chart metric is far from flat: try every neighbouring
        // translate, straight and bent towards either equator
        let l = m.lattice().unwrap();
        let d = m.displacement(p, q);
        for i in -1..=1 {
            for j in -1..=1 {
                let e = d + l.vector(i, j);
                for beta in [0.0, 0.5 * PI, -0.5 * PI] {
                    out.push(sample(&|s| {
                        let x = p.coords + e * s;
                        m.point(Vec3::new(x.x, x.y + beta * sin(PI * s), 0.0))
                    }));
                }
            }
        }
        return out;
    }
    if let Some(l) = m.lattice() {
        let d = m.displacement(p, q);
        let dn = norm(&d);
        for (i, j) in [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)] {
            let e = d + l.vector(i, j);
            if (i, j) == (0, 0) || norm(&e) <= 1.5 * dn {
                out.push(sample(&|s| m.point(p.coords + e * s)));
            }
        }
        return out;
    }
    let a = p.coords / norm(&p.coords);
    let b = q.coords / norm(&q.coords);
    let theta = acos(a.dot(&b));
    if PI - theta < 1e-3 {
        let e1 = orthogonal_unit(&a);
        let e2 = a.cross(&e1);
        for k in 0..8 {
            let phi = PI * k as f64 / 8.0;
            let e = e1 * cos(phi) + e2 * sin(phi);
            out.push(sample(&|s| {
                let t = PI * s;
                m.point_in_direction(a * cos(t) + e * sin(t))
            }));
        }
        return out;
    }
    let slerp = move |s: f64| {
        if theta < 1e-12 {
            return a + (b - a) * s;
        }
        a * (sin((1.0 - s) * theta) / sin(theta)) + b * (sin(s * theta) / sin(theta))
    };
    let c = a.cross(&b);
    let nrm = if norm(&c) > 0.0 { c / norm(&c) } else { orthogonal_unit(&a) };
    for beta in [0.0, 0.4, -0.4] {
        out.push(sample(&|s| m.point_in_direction(slerp(s) + nrm * (beta * sin(PI * s)))));
    }
    out
}

/// Metric length estimate of a polyline: each coordinate step measured in
/// the metric at its start.
const MAX_RELAXED_SEEDS: usize = 4;

fn polyline_length(m: &Manifold, v: &[Point]) -> f64 {
    v.windows(2).map(|w| m.norm_at(&w[0], &m.displacement(&w[0], &w[1]))).sum()
}

/// Gauss-Seidel midpoint relaxation (the open-chain Birkhoff process).
fn relax(m: &Manifold, v: &mut [Point], sweeps: usize) -> Result<()> {
    let n = v.len() - 1;
    let tol = 1e-4 * m.inj();
    for _ in 0..sweeps {
        let mut moved: f64 = 0.0;
        for i in 1..n {
            let seg = m.geodesic_connect(&v[i - 1], &v[i + 1])?;
            let (mid, _) = m.geodesic_shoot(&seg.initial_velocity, 0.5)?;
            moved = moved.max(m.chord(&v[i], &mid));
            v[i] = mid;
        }
        if moved < tol {
            break;
        }
    }
    Ok(())
}

pub(crate) fn minimizing_path(m: &Manifold, p: &Point, q: &Point) -> Result<GeodesicPath> {
    if p == q {
        return Ok(GeodesicPath {
            vertices: alloc::vec![*p, *q],
            segments: alloc::vec![GeodesicSegment::constant(*p)],
            length: 0.0,
        });
    }
    // finely sampled seeds, so the estimate is close to the seed length
    let probe = seeds(m, p, q, 64);
    let est = 1.5 * probe.iter().map(|v| polyline_length(m, v)).fold(f64::INFINITY, f64::min);
    let n = (ceil(4.0 * est / m.inj()) as usize + 1).max(2);
    let mut best: Option<(f64, Vec<Point>)> = None;
    let mut candidates: Vec<(f64, Vec<Point>)> =
        seeds(m, p, q, n).into_iter().map(|v| (polyline_length(m, &v), v)).collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, mut v) in candidates.into_iter().take(MAX_RELAXED_SEEDS) {
        if relax(m, &mut v, 2 * n).is_err() {
            continue;
        }
        let len = polyline_length(m, &v);
        if best.as_ref().is_none_or(|b| len < b.0) {
            best = Some((len, v));
        }
    }
    let (_, mut v) = best.ok_or(Error::ShootingFailed { miss: f64::INFINITY })?;
    relax(m, &mut v, 4 * n * n)?;
    Ok(shoot_refine(m, p, q, &v)?.map_or_else(|| chain(m, &v), Ok)?)
}

/// Shooting solve of the whole geodesic seeded by the polyline `v`. Kept
/// only when it is not longer than the polyline.
fn shoot_refine(m: &Manifold, p: &Point, q: &Point, v: &[Point]) -> Result<Option<GeodesicPath>> {
    let n = v.len() - 1;
    let relaxed = chain(m, v)?;
    let u0 = relaxed.segments[0].initial_velocity.components * n as f64;
    let opts = ShootingOptions { max_length: None, initial: Some(u0), multistart: 0 };
    let Ok(seg) = m.geodesic_connect_with(p, q, &opts) else { return Ok(None) };
    if seg.length > relaxed.length + 1e-9 * m.diam() {
        return Ok(None);
    }
    let mut w = Vec::with_capacity(n + 1);
    w.push(*p);
    for i in 1..n {
        let (x, _) = m.geodesic_shoot(&seg.initial_velocity, i as f64 / n as f64)?;
        w.push(x);
    }
    w.push(*q);
    Ok(chain(m, &w).ok().map(|mut path| {
        path.length = seg.length;
        path
    }))
}

fn chain(m: &Manifold, v: &[Point]) -> Result<GeodesicPath> {
    let segments = v
        .windows(2)
        .map(|w| m.geodesic_connect(&w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;
    let length = segments.iter().map(|s| s.length).sum();
    if !(length >= 0.0) {
        return Err(Error::IntegrationFailed);
    }
    Ok(GeodesicPath { vertices: v.to_vec(), segments, length })
}

