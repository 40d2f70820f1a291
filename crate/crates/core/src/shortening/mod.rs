//! Length shortening of piecewise-geodesic cycles.
//!
//! [`shorten`] alternates the Birkhoff resubdivision [`birkhoff_step`] with
//! batches of line-searched [`flow_step`]s along the deformation vector, and
//! stops when the cycle collapses or becomes stationary.

mod field;
mod refine;

use alloc::vec::Vec;

pub use field::{
    deformation_vector, displaced_length, first_variation, flow_step, DeformationVector, UnitKind,
    VertexField,
};
pub use refine::{refine_stationary, RefineOptions};

use crate::cycles::{classify_type, project_to_net, GeodesicNet, PolygonalCycle, MERGE_TOL_REL};
use crate::error::{Error, Result};
use crate::manifold::{GeodesicSegment, Manifold, Point};
use crate::math::floor;

/// `N = floor(4 x / inj) + 1`: enough segments that a chain of length `x`
/// splits into arcs of length at most `inj / 4`.
pub fn choose_n(x: f64, inj: f64) -> usize {
    floor(4.0 * x / inj) as usize + 1
}

/// Resubdivide each chain at `n - 1` equal-arclength points and replace it
/// by the minimizing geodesics through them. Chain endpoints are kept.
pub fn birkhoff_step(m: &Manifold, c: &PolygonalCycle, n: usize) -> Result<PolygonalCycle> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    let limit = n as f64 * 0.25 * m.inj();
    let mut chains = Vec::with_capacity(c.k());
    let mut mask = Vec::with_capacity(c.k());
    for (i, chain) in c.chains().iter().enumerate() {
        let len = c.chain_length(i);
        if len > limit * (1.0 + 1e-12) {
            return Err(Error::ChainTooLong { chain: i, length: len, limit, suggested_n: choose_n(len, m.inj()) });
        }
        let start = c.vertices()[i][0];
        if len == 0.0 {
            chains.push(alloc::vec![GeodesicSegment::constant(start); n]);
            mask.push(alloc::vec![true; n]);
            continue;
        }
        let points = resample(m, chain, len, n)?;
        let segs = points
            .windows(2)
            .map(|w| m.geodesic_connect(&w[0], &w[1]))
            .collect::<Result<Vec<_>>>()?;
        mask.push(segs.iter().map(|s| s.is_constant()).collect());
        chains.push(segs);
    }
    let ty = c.cycle_type().with_mask(mask);
    PolygonalCycle::from_segments(chains, ty)
}

/// `n + 1` points at equal arclength along a chain of length `len`.
pub(crate) fn resample(m: &Manifold, chain: &[GeodesicSegment], len: f64, n: usize) -> Result<Vec<Point>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(chain[0].start);
    let mut s = 0;
    let mut acc = 0.0;
    for j in 1..n {
        let target = len * j as f64 / n as f64;
        while s + 1 < chain.len() && acc + chain[s].length <= target {
            acc += chain[s].length;
            s += 1;
        }
        let seg = &chain[s];
        let frac = if seg.length > 0.0 { (target - acc) / seg.length } else { 0.0 };
        let p = if frac <= 1e-12 {
            seg.start
        } else if frac >= 1.0 - 1e-12 {
            seg.end
        } else {
            m.geodesic_shoot(&seg.initial_velocity, frac)?.0
        };
        out.push(p);
    }
    out.push(chain.last().unwrap().end);
    Ok(out)
}

/// Parameters of [`shorten`].
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    /// Stationary once `norm_sq < eps_stationary^2`.
    pub eps_stationary: f64,
    /// Collapsed once the length drops below this; default `1e-4 * diam`.
    pub eps_collapse: Option<f64>,
    /// Flow-time budget per batch; default `inj / (16 k)`.
    pub t_star: Option<f64>,
    pub max_outer_iters: usize,
    pub line_search_shrink: f64,
    pub max_line_search: usize,
    /// Flow steps attempted per batch.
    pub steps_per_batch: usize,
    /// Default `1e-6 * diam`.
    pub merge_tol: Option<f64>,
    /// Segments per chain; at least `choose_n` of the longest initial chain.
    pub n: Option<usize>,
    /// Try a Newton polish once `norm_sq` drops below this.
    pub refine_below: Option<f64>,
    /// Keep a copy of the cycle after every outer iteration.
    pub record_snapshots: bool,
    /// On proximity, coarsen the type to the observed coincidences and go on
    /// flowing instead of only reporting it.
    pub merge_and_restart: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            eps_stationary: 1e-5,
            eps_collapse: None,
            t_star: None,
            max_outer_iters: 4000,
            line_search_shrink: 0.5,
            max_line_search: 40,
            steps_per_batch: 4,
            merge_tol: None,
            n: None,
            refine_below: Some(1e-4),
            record_snapshots: false,
            merge_and_restart: false,
        }
    }
}

impl FlowConfig {
    pub fn eps_collapse_for(&self, m: &Manifold) -> f64 {
        self.eps_collapse.unwrap_or(1e-4 * m.diam())
    }

    pub fn t_star_for(&self, m: &Manifold, k: usize) -> f64 {
        self.t_star.unwrap_or(m.inj() / (16.0 * k as f64))
    }

    pub fn merge_tol_for(&self, m: &Manifold) -> f64 {
        self.merge_tol.unwrap_or(MERGE_TOL_REL * m.diam())
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        let ok = pos(self.eps_stationary)
            && self.eps_collapse.is_none_or(pos)
            && self.t_star.is_none_or(pos)
            && self.merge_tol.is_none_or(pos)
            && self.refine_below.is_none_or(pos)
            && self.line_search_shrink > 0.0
            && self.line_search_shrink < 1.0
            && self.max_outer_iters > 0
            && self.steps_per_batch > 0
            && self.n.is_none_or(|n| n > 0);
        if ok { Ok(()) } else { Err(Error::InvalidParameter("invalid flow configuration".into())) }
    }
}

/// What happened at a trace row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    Start,
    Birkhoff,
    Flow,
    /// No step length gave a strict decrease.
    Stalled,
    /// Two distinct units came within the merge tolerance (the type is kept).
    Proximity,
    /// The type was coarsened after a proximity (`merge_and_restart`).
    Merge,
    /// Newton polish onto a nearby stationary cycle.
    Refine,
    Collapsed,
    Stationary,
}

impl TraceEvent {
    pub fn name(self) -> &'static str {
        match self {
            Self::Start => "start",
            Self::Birkhoff => "birkhoff",
            Self::Flow => "flow",
            Self::Stalled => "stalled",
            Self::Proximity => "proximity",
            Self::Merge => "merge",
            Self::Refine => "refine",
            Self::Collapsed => "collapsed",
            Self::Stationary => "stationary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub length: f64,
    pub norm_sq: f64,
    pub step_dt: f64,
    pub event: TraceEvent,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShortenResult {
    Collapsed,
    Stationary(GeodesicNet),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortenOutcome {
    pub result: ShortenResult,
    pub trace: Vec<TraceRow>,
    /// Cycle at termination.
    pub cycle: PolygonalCycle,
    /// Cycle after every outer iteration when requested, starting with the
    /// input.
    pub snapshots: Vec<PolygonalCycle>,
}

impl ShortenOutcome {
    pub fn is_collapsed(&self) -> bool {
        matches!(self.result, ShortenResult::Collapsed)
    }

    pub fn net(&self) -> Option<&GeodesicNet> {
        match &self.result {
            ShortenResult::Stationary(n) => Some(n),
            ShortenResult::Collapsed => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShortenError {
    #[error(transparent)]
    Geometry(#[from] Error),
    #[error("no convergence after {} trace rows", trace.len())]
    NonConvergence { trace: Vec<TraceRow>, cycle: PolygonalCycle, snapshots: Vec<PolygonalCycle> },
}

struct Run<'a> {
    m: &'a Manifold,
    cfg: &'a FlowConfig,
    trace: Vec<TraceRow>,
    snapshots: Vec<PolygonalCycle>,
    iteration: usize,
}

impl Run<'_> {
    fn row(&mut self, c: &PolygonalCycle, norm_sq: f64, step_dt: f64, event: TraceEvent) {
        self.trace.push(TraceRow {
            iteration: self.iteration,
            length: crate::cycles::cycle_length(c),
            norm_sq,
            step_dt,
            event,
        });
    }

    /// One line-searched flow step. `None` when no step length decreases the
    /// length. Separate components (chains linked through shared blocks)
    /// get their own step length, and components shorter than
    /// `eps_collapse / (2 * components)` stay put: a collapsed piece would
    /// otherwise force tiny steps on everything else. With that share, a
    /// cycle whose components are all frozen is already collapsed. The first trial is capped at the component
    /// length.
    fn line_search(&self, c: &PolygonalCycle, v: &DeformationVector, dt0: f64) -> Result<Option<(PolygonalCycle, f64)>> {
        let comps = components(c);
        if comps.len() == 1 {
            return self.search_one(c, v, dt0, crate::cycles::cycle_length(c));
        }
        let freeze = self.cfg.eps_collapse_for(self.m) / (2.0 * comps.len() as f64);
        let mut cur = c.clone();
        let mut dt_max: Option<f64> = None;
        for comp in &comps {
            let len: f64 = comp.iter().map(|&i| c.chain_length(i)).sum();
            if len < freeze {
                continue;
            }
            let w = restrict(v, c, comp);
            if w.norm_sq == 0.0 {
                continue;
            }
            if let Some((next, dt)) = self.search_one(&cur, &w, dt0, len)? {
                cur = next;
                dt_max = Some(dt_max.map_or(dt, |d: f64| d.max(dt)));
            }
        }
        Ok(dt_max.map(|dt| (cur, dt)))
    }

    fn search_one(&self, c: &PolygonalCycle, v: &DeformationVector, dt0: f64, scale: f64) -> Result<Option<(PolygonalCycle, f64)>> {
        let len0 = crate::cycles::cycle_length(c);
        let mut dt = dt0.min(scale);
        for _ in 0..self.cfg.max_line_search {
            match flow_step(self.m, c, v, dt) {
                Ok(next) if crate::cycles::cycle_length(&next) < len0 => return Ok(Some((next, dt))),
                Ok(_) | Err(Error::StepTooLong { .. }) | Err(Error::TooFar { .. }) | Err(Error::ShootingFailed { .. }) => {}
                Err(e) => return Err(e),
            }
            dt *= self.cfg.line_search_shrink;
        }
        Ok(None)
    }

    fn proximity(&self, c: &PolygonalCycle) -> bool {
        let units = field::Units::new(c);
        let tol = self.cfg.merge_tol_for(self.m);
        let pts: Vec<Point> = (0..units.len()).map(|u| units.point(c, u)).collect();
        (0..pts.len()).any(|a| (a + 1..pts.len()).any(|b| self.m.chord(&pts[a], &pts[b]) <= tol))
    }
}

/// Chains grouped into connected pieces (chains sharing a block).
pub(crate) fn components(c: &PolygonalCycle) -> Vec<Vec<usize>> {
    let ty = c.cycle_type();
    let p = ty.partition();
    let label = crate::cycles::union_find_classes(ty.k(), |a, b| {
        [p[2 * a], p[2 * a + 1]].iter().any(|x| *x == p[2 * b] || *x == p[2 * b + 1])
    });
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for (i, &l) in label.iter().enumerate() {
        match seen.iter().position(|&x| x == l) {
            Some(j) => out[j].push(i),
            None => {
                seen.push(l);
                out.push(alloc::vec![i]);
            }
        }
    }
    out
}

/// `v` with everything outside the chains `comp` set to zero.
fn restrict(v: &DeformationVector, c: &PolygonalCycle, comp: &[usize]) -> DeformationVector {
    let mut w = v.clone();
    let ty = c.cycle_type();
    let mut keep_block = alloc::vec![false; ty.num_blocks()];
    for &i in comp {
        keep_block[ty.partition()[2 * i]] = true;
        keep_block[ty.partition()[2 * i + 1]] = true;
    }
    for (i, row) in w.field.vectors.iter_mut().enumerate() {
        if !comp.contains(&i) {
            row.iter_mut().for_each(|x| *x = crate::math::Vec3::zeros());
        }
    }
    for (b, x) in w.blocks.iter_mut().enumerate() {
        if !keep_block[b] {
            *x = crate::math::Vec3::zeros();
        }
    }
    w.clusters.retain(|(k, _)| match k {
        UnitKind::Cluster { chain, .. } => comp.contains(chain),
        UnitKind::Block(b) => keep_block[*b],
    });
    let any = w.field.vectors.iter().flatten().any(|x| *x != crate::math::Vec3::zeros());
    w.norm_sq = if any { v.norm_sq } else { 0.0 };
    w
}

/// One batch of at most `steps_per_batch` line-searched flow steps with
/// total flow time at most `t_star`. Returns the new cycle and the number of
/// accepted steps.
pub fn flow_batch(m: &Manifold, c: &PolygonalCycle, cfg: &FlowConfig, t_star: f64) -> Result<(PolygonalCycle, usize)> {
    let run = Run { m, cfg, trace: Vec::new(), snapshots: Vec::new(), iteration: 0 };
    let mut cur = c.clone();
    let mut remaining = t_star;
    let mut steps = 0;
    for _ in 0..cfg.steps_per_batch {
        let v = deformation_vector(m, &cur);
        if v.norm_sq == 0.0 || remaining <= 1e-12 * t_star {
            break;
        }
        match run.line_search(&cur, &v, remaining)? {
            Some((next, dt)) => {
                remaining -= dt;
                cur = next;
                steps += 1;
            }
            None => break,
        }
    }
    Ok((cur, steps))
}

/// Shorten `c` until it collapses or becomes stationary.
///
/// Each outer iteration runs one batch of up to `steps_per_batch`
/// line-searched flow steps with total time at most `t_star`, then one
/// Birkhoff step. Near a stationary cycle a Newton polish is tried; that row
/// is marked [`TraceEvent::Refine`] and may raise the length by a
/// second-order amount.
pub fn shorten(m: &Manifold, c: &PolygonalCycle, cfg: &FlowConfig) -> Result<ShortenOutcome, ShortenError> {
    cfg.validate()?;
    let n = cfg.n.unwrap_or(0).max(choose_n(c.max_chain_length(), m.inj()));
    let t_star = cfg.t_star_for(m, c.k());
    let eps_collapse = cfg.eps_collapse_for(m);
    let eps_sq = cfg.eps_stationary * cfg.eps_stationary;
    let mut run = Run { m, cfg, trace: Vec::new(), snapshots: Vec::new(), iteration: 0 };
    if cfg.record_snapshots {
        run.snapshots.push(c.clone());
    }
    let mut cur = c.clone();
    let v0 = deformation_vector(m, &cur);
    run.row(&cur, v0.norm_sq, 0.0, TraceEvent::Start);
    if !(cur.n() == n && cur.max_segment_length() <= 0.25 * m.inj()) {
        cur = birkhoff_step(m, &cur, n)?;
        let v = deformation_vector(m, &cur);
        run.row(&cur, v.norm_sq, 0.0, TraceEvent::Birkhoff);
    }
    let mut last_refine_norm = f64::INFINITY;
    let mut proximity_reported = false;
    for it in 1..=cfg.max_outer_iters {
        run.iteration = it;
        let mut remaining = t_star;
        for _ in 0..cfg.steps_per_batch {
            let len = crate::cycles::cycle_length(&cur);
            let v = deformation_vector(m, &cur);
            if len < eps_collapse {
                run.row(&cur, v.norm_sq, 0.0, TraceEvent::Collapsed);
                return Ok(finish(run, ShortenResult::Collapsed, cur));
            }
            if v.norm_sq < eps_sq {
                return stationary(run, cur, v.norm_sq);
            }
            if let Some(limit) = cfg.refine_below {
                if v.norm_sq < limit && v.norm_sq < 0.25 * last_refine_norm {
                    last_refine_norm = v.norm_sq;
                    let opts = RefineOptions {
                        target_norm_sq: 0.01 * eps_sq,
                        max_iters: 30,
                        max_travel: 0.05 * m.inj(),
                    };
                    if let Some((polished, ns)) = refine_stationary(m, &cur, &opts)? {
                        run.row(&polished, ns, 0.0, TraceEvent::Refine);
                        return stationary(run, polished, ns);
                    }
                }
            }
            if remaining <= 1e-12 * t_star {
                break;
            }
            match run.line_search(&cur, &v, remaining)? {
                Some((next, dt)) => {
                    remaining -= dt;
                    cur = next;
                    let ns = deformation_vector(m, &cur).norm_sq;
                    run.row(&cur, ns, dt, TraceEvent::Flow);
                }
                None => {
                    run.row(&cur, v.norm_sq, 0.0, TraceEvent::Stalled);
                    break;
                }
            }
        }
        if (cfg.merge_and_restart || !proximity_reported) && run.proximity(&cur) {
            proximity_reported = true;
            let ns = deformation_vector(m, &cur).norm_sq;
            run.row(&cur, ns, 0.0, TraceEvent::Proximity);
            if cfg.merge_and_restart {
                let tol = cfg.merge_tol_for(m);
                if classify_type(m, &cur, tol) != *cur.cycle_type() {
                    cur = PolygonalCycle::from_vertices(m, cur.vertices().to_vec(), tol)?;
                    let ns = deformation_vector(m, &cur).norm_sq;
                    run.row(&cur, ns, 0.0, TraceEvent::Merge);
                }
            }
        }
        let next = birkhoff_step(m, &cur, n)?;
        if crate::cycles::cycle_length(&next) <= crate::cycles::cycle_length(&cur) + 1e-9 * m.diam() {
            cur = next;
        }
        let ns = deformation_vector(m, &cur).norm_sq;
        run.row(&cur, ns, 0.0, TraceEvent::Birkhoff);
        if cfg.record_snapshots {
            run.snapshots.push(cur.clone());
        }
    }
    let len = crate::cycles::cycle_length(&cur);
    let v = deformation_vector(m, &cur);
    if len < eps_collapse {
        run.row(&cur, v.norm_sq, 0.0, TraceEvent::Collapsed);
        return Ok(finish(run, ShortenResult::Collapsed, cur));
    }
    if v.norm_sq < eps_sq {
        return stationary(run, cur, v.norm_sq);
    }
    Err(ShortenError::NonConvergence { trace: run.trace, cycle: cur, snapshots: run.snapshots })
}

fn stationary(mut run: Run<'_>, c: PolygonalCycle, norm_sq: f64) -> Result<ShortenOutcome, ShortenError> {
    let net = project_to_net(run.m, &c, run.cfg.merge_tol_for(run.m))?;
    run.row(&c, norm_sq, 0.0, TraceEvent::Stationary);
    Ok(finish(run, ShortenResult::Stationary(net), c))
}

fn finish(mut run: Run<'_>, result: ShortenResult, c: PolygonalCycle) -> ShortenOutcome {
    if run.cfg.record_snapshots && run.snapshots.last() != Some(&c) {
        run.snapshots.push(c.clone());
    }
    ShortenOutcome { result, trace: run.trace, cycle: c, snapshots: run.snapshots }
}

#[cfg(test)]
mod tests;
