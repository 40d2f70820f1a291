//! Geodesic and parallel-transport integration.
//!
//! Round spheres and flat tori use closed forms. The other builtins use
//! classical RK4 with a fixed step count, projecting the state back onto the
//! surface after every step and restoring the initial speed and transported
//! norm.

use alloc::vec::Vec;

use super::{Manifold, ManifoldKind, Point, TangentVector};
use crate::error::{Error, Result};
use crate::math::{cos, norm, sin, sqrt, Vec3};

/// RK4 steps per injectivity radius of arclength.
pub(crate) const STEPS_PER_INJ: f64 = 128.0;
pub(crate) const MIN_STEPS: usize = 16;
/// Sample points recorded along a segment (including both ends).
pub(crate) const SAMPLES: usize = 17;

pub(crate) struct Run {
    pub end: Point,
    /// Velocity at the end, for the unit-time parametrization.
    pub end_velocity: Vec3,
    pub transported: Option<Vec3>,
    pub samples: Vec<Point>,
}

pub(crate) fn steps_for(m: &Manifold, length: f64) -> usize {
    let n = crate::math::ceil(STEPS_PER_INJ * length / m.inj());
    if n.is_finite() { (n as usize).max(MIN_STEPS) } else { MIN_STEPS }
}

/// Follow the geodesic with initial velocity `v` for time `t`, optionally
/// transporting `w` along it.
pub(crate) fn shoot(m: &Manifold, v: &TangentVector, t: f64, w: Option<Vec3>, samples: bool) -> Result<Run> {
    let u = v.components * t;
    let n = steps_for(m, m.norm_at(&v.base, &u));
    let mut run = shoot_unit(m, &v.base, u, w, samples, n)?;
    run.end_velocity /= t;
    Ok(run)
}

/// Follow the geodesic with initial velocity `u` for unit time using `n`
/// integration steps (ignored by the closed forms).
pub(crate) fn shoot_unit(
    m: &Manifold,
    p: &Point,
    u: Vec3,
    w: Option<Vec3>,
    samples: bool,
    n: usize,
) -> Result<Run> {
    match m.kind() {
        ManifoldKind::RoundSphere { radius } => Ok(sphere(m, *radius, p, u, w, samples)),
        ManifoldKind::FlatTorus { .. } => Ok(flat(m, p, u, w, samples)),
        _ => rk4(m, p, u, w, samples, n),
    }
}

fn sphere(m: &Manifold, r: f64, p: &Point, u: Vec3, w: Option<Vec3>, samples: bool) -> Run {
    let x0 = p.coords;
    let len = norm(&u);
    if len == 0.0 {
        return Run {
            end: *p,
            end_velocity: u,
            transported: w,
            samples: if samples { alloc::vec![*p; SAMPLES] } else { Vec::new() },
        };
    }
    let e = u / len;
    let at = |s: f64| {
        let a = s * len / r;
        (x0 * cos(a) + e * (r * sin(a)), (e * cos(a) - x0 * (sin(a) / r)) * len)
    };
    let (x1, v1) = at(1.0);
    let end = m.point(x1);
    let transported = w.map(|w| {
        let along = w.dot(&e);
        w - e * along + v1 * (along / len)
    });
    let mut pts = Vec::new();
    if samples {
        pts.push(*p);
        for i in 1..SAMPLES - 1 {
            pts.push(m.point(at(i as f64 / (SAMPLES - 1) as f64).0));
        }
        pts.push(end);
    }
    Run { end, end_velocity: m.project_tangent_at(&end.coords, v1), transported, samples: pts }
}

fn flat(m: &Manifold, p: &Point, u: Vec3, w: Option<Vec3>, samples: bool) -> Run {
    let end = m.point(p.coords + u);
    let mut pts = Vec::new();
    if samples {
        pts.push(*p);
        for i in 1..SAMPLES - 1 {
            pts.push(m.point(p.coords + u * (i as f64 / (SAMPLES - 1) as f64)));
        }
        pts.push(end);
    }
    Run { end, end_velocity: u, transported: w, samples: pts }
}

type State = (Vec3, Vec3, Vec3);

fn deriv(m: &Manifold, s: &State) -> State {
    let (x, v, w) = s;
    (*v, m.acceleration(x, v), m.transport_rate(x, v, w))
}

fn axpy(s: &State, h: f64, d: &State) -> State {
    (s.0 + d.0 * h, s.1 + d.1 * h, s.2 + d.2 * h)
}

fn rk4(m: &Manifold, p: &Point, u: Vec3, w: Option<Vec3>, samples: bool, n: usize) -> Result<Run> {
    let embedded = m.is_sphere_like();
    let speed0 = m.norm_at(p, &u);
    let w0 = w.unwrap_or_else(Vec3::zeros);
    let wn0 = m.norm_at(p, &w0);
    let mut s: State = (p.coords, u, w0);
    let h = 1.0 / n as f64;
    let stride = |i: usize| i * n / (SAMPLES - 1);
    let mut pts = Vec::new();
    let mut next_sample = 1;
    if samples {
        pts.push(*p);
    }
    for step in 1..=n {
        let k1 = deriv(m, &s);
        let k2 = deriv(m, &axpy(&s, 0.5 * h, &k1));
        let k3 = deriv(m, &axpy(&s, 0.5 * h, &k2));
        let k4 = deriv(m, &axpy(&s, h, &k3));
        let mut x = s.0 + (k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0) * (h / 6.0);
        let mut v = s.1 + (k1.1 + k2.1 * 2.0 + k3.1 * 2.0 + k4.1) * (h / 6.0);
        let mut wt = s.2 + (k1.2 + k2.2 * 2.0 + k3.2 * 2.0 + k4.2) * (h / 6.0);
        if embedded {
            x = m.project_coords(x);
        }
        v = m.project_tangent_at(&x, v);
        wt = m.project_tangent_at(&x, wt);
        let sp = sqrt(m.inner_at(&x, &v, &v));
        if sp > 0.0 {
            v *= speed0 / sp;
        }
        let wn = sqrt(m.inner_at(&x, &wt, &wt));
        if wn > 0.0 {
            wt *= wn0 / wn;
        }
        if !(x.iter().chain(v.iter()).all(|c| c.is_finite())) {
            return Err(Error::IntegrationFailed);
        }
        s = (x, v, wt);
        if samples && next_sample < SAMPLES - 1 && step == stride(next_sample) {
            pts.push(m.point(x));
            next_sample += 1;
        }
    }
    let end = m.point(s.0);
    if samples {
        while pts.len() < SAMPLES - 1 {
            pts.push(end);
        }
        pts.push(end);
    }
    Ok(Run { end, end_velocity: s.1, transported: w.map(|_| s.2), samples: pts })
}
