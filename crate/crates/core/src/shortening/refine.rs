//! Newton-type polishing of nearly stationary cycles.
//!
//! Descent alone cannot settle on a saddle (min-max cycles are unstable
//! under the flow). Near one, a damped Gauss-Newton (Levenberg-Marquardt)
//! solve of `v(gamma) = 0` over the unit positions lands on it directly.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::field::{directions, rebuild, Units};
use crate::cycles::PolygonalCycle;
use crate::error::Result;
use crate::manifold::{Manifold, Point};
use crate::math::{solve_dense, Vec3};

/// Options for [`refine_stationary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    /// Stop once `norm_sq` falls below this.
    pub target_norm_sq: f64,
    pub max_iters: usize,
    /// Reject solutions farther than this from the start, measured as the
    /// Hausdorff chord distance between the unit sets (sliding along the
    /// cycle does not count).
    pub max_travel: f64,
}

struct Problem<'a> {
    m: &'a Manifold,
    units: Units,
    base: Vec<Point>,
    frames: Vec<[Vec3; 2]>,
    dims: usize,
}

impl Problem<'_> {
    fn position(&self, u: usize, x: &DVector<f64>) -> Point {
        let [e1, e2] = self.frames[u];
        self.m.point(self.base[u].coords + e1 * x[2 * u] + e2 * x[2 * u + 1])
    }

    fn residual(&self, c: &PolygonalCycle) -> DVector<f64> {
        let comp = super::field::unit_components(c, &self.units);
        let mut r = DVector::zeros(self.dims * comp.len());
        for (u, v) in comp.iter().enumerate() {
            for d in 0..self.dims {
                r[self.dims * u + d] = v[d];
            }
        }
        r
    }
}

fn norm_sq(m: &Manifold, c: &PolygonalCycle, units: &Units) -> f64 {
    let comp = super::field::unit_components(c, units);
    comp.iter()
        .enumerate()
        .map(|(u, v)| m.inner(&units.point(c, u), v, v))
        .sum()
}

/// Solve `v(gamma) = 0` from `c` with the type held fixed. Returns the
/// polished cycle and its `norm_sq`, or `None` when the solve does not reach
/// the target.
pub fn refine_stationary(m: &Manifold, c: &PolygonalCycle, opts: &RefineOptions) -> Result<Option<(PolygonalCycle, f64)>> {
    let units = Units::new(c);
    let nu = units.len();
    let base: Vec<Point> = (0..nu).map(|u| units.point(c, u)).collect();
    let frames = base.iter().map(|p| m.tangent_frame(p)).collect();
    let dims = if m.is_torus() { 2 } else { 3 };
    let prob = Problem { m, units, base, frames, dims };

    let mut x = DVector::zeros(2 * nu);
    let mut cur = c.clone();
    let mut r = prob.residual(&cur);
    let mut cost = r.norm_squared();
    let mut mu = 1e-3;
    let h = 1e-7 * m.diam();
    // segments touching each unit
    let mut touching: Vec<Vec<(usize, usize)>> = alloc::vec![Vec::new(); nu];
    for i in 0..c.k() {
        for j in 0..c.n() {
            let (a, b) = (prob.units.of[i][j], prob.units.of[i][j + 1]);
            touching[a].push((i, j));
            if b != a {
                touching[b].push((i, j));
            }
        }
    }

    for _ in 0..opts.max_iters {
        if norm_sq(m, &cur, &prob.units) <= opts.target_norm_sq {
            break;
        }
        let targets: Vec<Point> = (0..nu).map(|u| prob.position(u, &x)).collect();
        let mut jac = DMatrix::zeros(r.len(), 2 * nu);
        for u in 0..nu {
            for d in 0..2 {
                let mut xp = x.clone();
                xp[2 * u + d] += h;
                let moved = prob.position(u, &xp);
                // only the segments at u change; update their contributions
                let mut delta = alloc::vec![Vec3::zeros(); nu];
                for &(i, j) in &touching[u] {
                    if cur.cycle_type().is_constant(i, j) {
                        continue;
                    }
                    let (ua, ub) = (prob.units.of[i][j], prob.units.of[i][j + 1]);
                    let pa = if ua == u { moved } else { targets[ua] };
                    let pb = if ub == u { moved } else { targets[ub] };
                    let Ok(seg) = m.geodesic_connect(&pa, &pb) else { continue };
                    let old = directions(&cur.chains()[i][j]);
                    if let (Some((a1, b1)), Some((a0, b0))) = (directions(&seg), old) {
                        delta[ua] += a1 - a0;
                        delta[ub] += b1 - b0;
                    }
                }
                for (w, dv) in delta.iter().enumerate() {
                    for k in 0..prob.dims {
                        jac[(prob.dims * w + k, 2 * u + d)] = dv[k] / h;
                    }
                }
            }
        }
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * &r;
        let scale = (0..jtj.nrows()).map(|i| jtj[(i, i)]).fold(0.0, f64::max).max(1e-300);
        let mut accepted = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += mu * scale;
            }
            let Some(step) = solve_dense(a, &(-&g)) else {
                mu *= 10.0;
                continue;
            };
            let xn = &x + step;
            let tn: Vec<Point> = (0..nu).map(|u| prob.position(u, &xn)).collect();
            if let Ok(cand) = rebuild(m, &cur, &prob.units, &tn) {
                let rn = prob.residual(&cand);
                let cn = rn.norm_squared();
                if cn < cost {
                    x = xn;
                    cur = cand;
                    r = rn;
                    cost = cn;
                    mu = (mu / 3.0).max(1e-12);
                    accepted = true;
                    break;
                }
            }
            mu *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    let ns = norm_sq(m, &cur, &prob.units);
    let end: Vec<Point> = (0..nu).map(|u| prob.units.point(&cur, u)).collect();
    let one_way = |a: &[Point], b: &[Point]| {
        a.iter()
            .map(|p| b.iter().map(|q| m.chord(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let travel = one_way(&prob.base, &end).max(one_way(&end, &prob.base));
    if ns <= opts.target_norm_sq && travel <= opts.max_travel {
        Ok(Some((cur, ns)))
    } else {
        Ok(None)
    }
}
