//! Geodesic boundary-value solving by shooting.

use alloc::vec::Vec;

use nalgebra::{Matrix2, Vector2};

use super::integrate::{self, shoot_unit, steps_for};
use super::{GeodesicSegment, Manifold, ManifoldKind, Point, TangentVector};
use crate::error::{Error, Result};
use crate::math::{atan2, cos, norm, sin, Vec3, PI};

/// Options for [`Manifold::geodesic_connect_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct ShootingOptions {
    /// Reject pairs farther apart than this (and solutions longer than it).
    pub max_length: Option<f64>,
    /// Initial velocity guess at `p` (unit-time parametrization).
    pub initial: Option<Vec3>,
    /// Number of rotated restarts tried after the first attempt fails.
    pub multistart: usize,
}

impl ShootingOptions {
    /// The minimizing regime: distance at most `inj / 2`, 8 restarts.
    pub fn minimizing(m: &Manifold) -> Self {
        Self { max_length: Some(0.5 * m.inj()), initial: None, multistart: 8 }
    }

    /// No length limit; starts from `initial` if given.
    pub fn unrestricted(initial: Option<Vec3>) -> Self {
        Self { max_length: None, initial, multistart: 8 }
    }
}

const CONVERGED: f64 = 1e-10;
const TARGET: f64 = 1e-13;
const MAX_NEWTON: usize = 40;

pub(crate) fn connect(m: &Manifold, p: &Point, q: &Point, opts: &ShootingOptions) -> Result<GeodesicSegment> {
    if p == q {
        return Ok(GeodesicSegment::constant(*p));
    }
    let limit = opts.max_length.unwrap_or(f64::INFINITY);
    let lower = m.distance_lower_bound(p, q);
    if lower > limit * (1.0 + 1e-9) {
        return Err(Error::TooFar { distance: lower, limit });
    }
    let slack = limit * (1.0 + 1e-6) + 1e-12 * m.diam();
    match m.kind() {
        ManifoldKind::RoundSphere { radius } => {
            let mut u = sphere_log(*radius, p, q);
            if let (Some(u0), None) = (opts.initial, opts.max_length) {
                // take the long way round when the guess points away from q
                let l = norm(&u);
                let dir = if l > 0.0 { -u / l } else { m.project_tangent_at(&p.coords, u0) };
                let dn = norm(&dir);
                if dn > 0.0 && (l == 0.0 || u.dot(&u0) < 0.0) {
                    u = dir * ((2.0 * PI * radius - l) / dn);
                }
            }
            finish(m, p, q, u, slack)
        }
        ManifoldKind::FlatTorus { .. } => {
            let d = m.displacement(p, q);
            let u = match opts.initial {
                Some(u0) => u0 + m.lattice().unwrap().wrap(d - u0),
                None => d,
            };
            finish(m, p, q, u, slack)
        }
        _ => {
            let guess = match opts.initial {
                Some(u) => m.project_tangent_at(&p.coords, u),
                None => initial_guess(m, p, q),
            };
            let mut starts = Vec::with_capacity(opts.multistart + 1);
            starts.push(guess);
            let [e1, e2] = m.tangent_frame(p);
            let (a, b) = (guess.dot(&e1), guess.dot(&e2));
            for i in 1..=opts.multistart {
                let t = 2.0 * PI * i as f64 / (opts.multistart + 1) as f64;
                let (c, s) = (cos(t), sin(t));
                let r = if i % 2 == 1 { 1.0 } else { 1.2 };
                starts.push((e1 * (c * a - s * b) + e2 * (s * a + c * b)) * r);
            }
            let mut best_miss = f64::INFINITY;
            let mut too_long = None;
            for u0 in starts {
                match newton(m, p, q, u0) {
                    Ok(u) => match finish(m, p, q, u, slack) {
                        Ok(seg) => return Ok(seg),
                        Err(Error::TooFar { distance, .. }) => {
                            too_long = Some(too_long.map_or(distance, |d: f64| d.min(distance)))
                        }
                        Err(e) => return Err(e),
                    },
                    Err(miss) => best_miss = best_miss.min(miss),
                }
            }
            match too_long {
                Some(distance) => Err(Error::TooFar { distance, limit }),
                None => Err(Error::ShootingFailed { miss: best_miss }),
            }
        }
    }
}

fn sphere_log(r: f64, p: &Point, q: &Point) -> Vec3 {
    let a = p.coords / r;
    let b = q.coords / r;
    let c = a.cross(&b);
    let s = norm(&c);
    let theta = atan2(s, a.dot(&b));
    let t = b - a * a.dot(&b);
    let tn = norm(&t);
    if tn == 0.0 {
        return Vec3::zeros();
    }
    t * (theta * r / tn)
}

/// Log-map guess: great-circle direction between the radial projections
/// (embedded surfaces) or the wrapped chart difference (tori).
fn initial_guess(m: &Manifold, p: &Point, q: &Point) -> Vec3 {
    if m.is_torus() {
        return m.displacement(p, q);
    }
    let (rp, rq) = (norm(&p.coords), norm(&q.coords));
    let a = p.coords / rp;
    let b = q.coords / rq;
    let theta = atan2(norm(&a.cross(&b)), a.dot(&b));
    let t = m.project_tangent_at(&p.coords, b - a * a.dot(&b));
    let tn = norm(&t);
    if tn == 0.0 {
        return m.tangent_frame(p)[0] * (theta * rp);
    }
    t * (theta * 0.5 * (rp + rq) / tn)
}

fn residual(m: &Manifold, end: &Point, q: &Point) -> Vec3 {
    m.displacement(end, q)
}

/// Gauss-Newton on the two frame coordinates of the initial velocity.
/// Returns the converged velocity or the best miss reached.
fn newton(m: &Manifold, p: &Point, q: &Point, u0: Vec3) -> core::result::Result<Vec3, f64> {
    let scale = m.diam();
    let [e1, e2] = m.tangent_frame(p);
    let mut ab = Vector2::new(u0.dot(&e1), u0.dot(&e2));
    let vel = |ab: &Vector2<f64>| e1 * ab.x + e2 * ab.y;
    let eval = |ab: &Vector2<f64>, n: usize| -> Option<Vec3> {
        shoot_unit(m, p, vel(ab), None, false, n).ok().map(|r| residual(m, &r.end, q))
    };
    let mut n = steps_for(m, m.norm_at(p, &vel(&ab)));
    let mut r = eval(&ab, n).ok_or(f64::INFINITY)?;
    let mut miss = norm(&r);
    for _ in 0..MAX_NEWTON {
        if miss <= TARGET * scale {
            break;
        }
        let h = 1e-7 * (norm(&vel(&ab)).max(1e-3 * scale));
        let mut jac = [Vec3::zeros(); 2];
        for (i, col) in jac.iter_mut().enumerate() {
            let mut ab2 = ab;
            ab2[i] += h;
            let r2 = eval(&ab2, n).ok_or(miss)?;
            // residual is q - end, so d(end) = -(r2 - r)
            *col = (r - r2) / h;
        }
        let jtj = Matrix2::new(
            jac[0].dot(&jac[0]),
            jac[0].dot(&jac[1]),
            jac[1].dot(&jac[0]),
            jac[1].dot(&jac[1]),
        );
        let jtr = Vector2::new(jac[0].dot(&r), jac[1].dot(&r));
        let Some(delta) = jtj.try_inverse().map(|inv| inv * jtr) else { break };
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let cand = ab + delta * lambda;
            let nc = steps_for(m, m.norm_at(p, &vel(&cand)));
            if let Some(rc) = eval(&cand, nc) {
                let mc = norm(&rc);
                if mc < miss {
                    ab = cand;
                    r = rc;
                    miss = mc;
                    n = nc;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if miss <= CONVERGED * scale {
        Ok(vel(&ab))
    } else {
        Err(miss)
    }
}

/// Integrate the final segment with samples, snap its end onto `q` and
/// check the length limit.
fn finish(m: &Manifold, p: &Point, q: &Point, u: Vec3, slack: f64) -> Result<GeodesicSegment> {
    let length = m.norm_at(p, &u);
    if length > slack {
        return Err(Error::TooFar { distance: length, limit: slack });
    }
    let run = shoot_unit(m, p, u, None, true, steps_for(m, length))?;
    let miss = m.chord(&run.end, q);
    if miss > 1e-9 * m.diam() {
        return Err(Error::ShootingFailed { miss });
    }
    let mut samples = run.samples;
    *samples.last_mut().unwrap() = *q;
    debug_assert_eq!(samples.len(), integrate::SAMPLES);
    Ok(GeodesicSegment {
        start: *p,
        end: *q,
        initial_velocity: TangentVector::new(*p, u),
        final_velocity: m.project_tangent_at(&q.coords, run.end_velocity),
        length,
        samples,
    })
}
