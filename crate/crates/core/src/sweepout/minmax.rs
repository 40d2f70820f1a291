//! Pull-down of a family and extraction of a stationary candidate.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::families::{farthest_point_vertices, loop_length, two_disc_refined_sweepout};
use super::{
    BoundCheck, BoundaryCondition, CandidateSource, CycleFamily, MemberExecutor, MinMaxReport, Provenance,
    SweepConfig, SweepoutError,
};
use crate::cycles::{cycle_length, project_to_net, PolygonalCycle, MERGE_TOL_REL};
use crate::error::Error;
use crate::manifold::{Manifold, ManifoldKind, Point};
use crate::math::{Vec3, PI};
use crate::shortening::{
    birkhoff_step, choose_n, deformation_vector, flow_batch, refine_stationary, shorten, RefineOptions,
    ShortenError, ShortenOutcome, ShortenResult, TraceEvent, TraceRow,
};

type SResult<T> = core::result::Result<T, SweepoutError>;

/// One pull-down move: a Birkhoff step (kept only if not longer) followed by
/// one flow batch.
fn pull(m: &Manifold, c: &PolygonalCycle, n: usize, cfg: &SweepConfig) -> PolygonalCycle {
    let len = cycle_length(c);
    if len < cfg.flow.eps_collapse_for(m) {
        return c.clone();
    }
    let mut cur = c.clone();
    let b = match birkhoff_step(m, &cur, n) {
        Err(Error::ChainTooLong { suggested_n, .. }) => birkhoff_step(m, &cur, suggested_n),
        b => b,
    };
    if let Ok(b) = b {
        if cycle_length(&b) <= len {
            cur = b;
        }
    }
    let t_star = cfg.flow.t_star_for(m, cur.k());
    match flow_batch(m, &cur, &cfg.flow, t_star) {
        Ok((next, _)) => next,
        Err(_) => cur,
    }
}

/// Run `cfg.rounds` rounds of pull-down on every member, then shorten the
/// longest members to extract a stationary candidate.
///
/// Each round moves every member independently (through `exec`) by one
/// Birkhoff step and one flow batch, so no member gets longer and the
/// longest length per round never increases. The width estimate is the
/// smallest per-round maximum.
pub fn minmax<E: MemberExecutor>(
    m: &Manifold,
    family: &CycleFamily,
    cfg: &SweepConfig,
    exec: &E,
) -> SResult<MinMaxReport> {
    cfg.flow.validate()?;
    if family.is_empty() {
        return Err(Error::InvalidParameter("empty family".into()).into());
    }
    let ns: Vec<usize> = family
        .members
        .iter()
        .map(|c| c.n().max(choose_n(c.max_chain_length(), m.inj())))
        .collect();
    let mut pulled = family.clone();
    let mut max_gap = family.max_gap(m);
    let initial_max = family.max_member().1;
    let mut round_max = vec![initial_max];
    for _ in 0..cfg.rounds {
        let next = exec.map(pulled.len(), |i| pull(m, &pulled.members[i], ns[i], cfg));
        let moved = next.iter().zip(&pulled.members).any(|(a, b)| a != b);
        pulled.members = next;
        round_max.push(pulled.max_member().1);
        max_gap = max_gap.max(pulled.max_gap(m));
        if !moved {
            break;
        }
    }
    let width_estimate = round_max.iter().copied().fold(f64::INFINITY, f64::min);
    let (achiever, _) = pulled.max_member();

    let (candidate, source) = extract(m, &pulled, family, cfg, exec)?;
    Ok(MinMaxReport {
        width_estimate,
        initial_max,
        round_max,
        achiever,
        stationary_candidate: candidate,
        candidate_source: source,
        bound_checked: None,
        bounds: Vec::new(),
        max_gap,
        continuity_bound: cfg.continuity_bound_for(m),
        family: pulled,
    })
}

/// Shorten the longest members (in parallel through `exec`) and keep the
/// first stationary result in length order. Members that do not converge are
/// polished from their nearest-to-stationary snapshot. The pulled family is
/// tried first, then the family before pull-down: pull-down can carry every
/// member past the saddle, after which no flow line passes near it.
fn extract<E: MemberExecutor>(
    m: &Manifold,
    pulled: &CycleFamily,
    initial: &CycleFamily,
    cfg: &SweepConfig,
    exec: &E,
) -> SResult<(Option<ShortenOutcome>, Option<CandidateSource>)> {
    for (fam, is_pulled) in [(pulled, true), (initial, false)] {
        if let Some((out, polished, index)) = extract_from(m, fam, cfg, exec) {
            let src = if polished {
                CandidateSource::Refined { index, pulled: is_pulled }
            } else {
                CandidateSource::Member { index, pulled: is_pulled }
            };
            return Ok((Some(out), Some(src)));
        }
    }
    Ok((None, None))
}

fn extract_from<E: MemberExecutor>(
    m: &Manifold,
    fam: &CycleFamily,
    cfg: &SweepConfig,
    exec: &E,
) -> Option<(ShortenOutcome, bool, usize)> {
    let eps_collapse = cfg.flow.eps_collapse_for(m);
    let mut order: Vec<(usize, f64)> = fam.lengths().into_iter().enumerate().filter(|(_, l)| *l >= eps_collapse).collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1));
    order.truncate(cfg.candidate_attempts.max(1));
    let mut flow = cfg.flow.clone();
    flow.record_snapshots = true;
    let results = exec.map(order.len(), |j| {
        let c = &fam.members[order[j].0];
        match shorten(m, c, &flow) {
            Ok(out) if !out.is_collapsed() => Some((out, false)),
            Ok(out) => polish(m, &out.snapshots, out.trace, cfg).map(|o| (o, true)),
            Err(ShortenError::NonConvergence { trace, snapshots, .. }) => {
                polish(m, &snapshots, trace, cfg).map(|o| (o, true))
            }
            Err(ShortenError::Geometry(_)) => None,
        }
    });
    results.into_iter().enumerate().find_map(|(j, r)| r.map(|(out, polished)| (out, polished, order[j].0)))
}

/// Newton polish from the snapshot with the smallest deformation norm.
fn polish(m: &Manifold, snaps: &[PolygonalCycle], mut trace: Vec<TraceRow>, cfg: &SweepConfig) -> Option<ShortenOutcome> {
    let eps_collapse = cfg.flow.eps_collapse_for(m);
    let best = snaps
        .iter()
        .filter(|c| cycle_length(c) > 10.0 * eps_collapse)
        .map(|c| (c, deformation_vector(m, c).norm_sq))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    let eps_sq = cfg.flow.eps_stationary * cfg.flow.eps_stationary;
    let opts = RefineOptions { target_norm_sq: 0.01 * eps_sq, max_iters: 50, max_travel: 0.5 * m.inj() };
    let (c, ns) = refine_stationary(m, best.0, &opts).ok()??;
    let net = project_to_net(m, &c, cfg.flow.merge_tol_for(m)).ok()?;
    let iteration = trace.last().map_or(0, |r| r.iteration) + 1;
    let length = cycle_length(&c);
    for event in [TraceEvent::Refine, TraceEvent::Stationary] {
        trace.push(TraceRow { iteration, length, norm_sq: ns, step_dt: 0.0, event });
    }
    Some(ShortenOutcome { result: ShortenResult::Stationary(net), trace, cycle: c, snapshots: Vec::new() })
}

fn stationary_mass(rep: &MinMaxReport) -> Option<f64> {
    rep.certificate().map(|n| n.total_mass)
}

/// Check the `q = 2` length bound: build the refined two-disc family on
/// `vertices` (farthest-point vertices when `None`), pull it down and
/// extract a stationary net. The width and the certificate mass are
/// checked against `4 diam`.
pub fn verify_theorem1_q2<R: Rng + ?Sized, E: MemberExecutor>(
    m: &Manifold,
    vertices: Option<[Point; 4]>,
    cfg: &SweepConfig,
    rng: &mut R,
    exec: &E,
) -> SResult<MinMaxReport> {
    if !m.is_sphere_like() {
        return Err(Error::InvalidParameter(format!("needs a sphere-like surface, got {}", m.name())).into());
    }
    let v = vertices.unwrap_or_else(|| farthest_point_vertices(m, rng, cfg.fps_candidates));
    let mut rep = match two_disc_refined_sweepout(m, &v, cfg) {
        Ok(fam) => minmax(m, &fam, cfg, exec)?,
        Err(SweepoutError::ShortCycleFound { outcome, .. }) => {
            let mass = outcome.net().map_or(0.0, |n| n.total_mass);
            MinMaxReport {
                width_estimate: mass,
                initial_max: mass,
                round_max: vec![mass],
                achiever: 0,
                stationary_candidate: Some(outcome),
                candidate_source: Some(CandidateSource::Builder),
                bound_checked: None,
                bounds: Vec::new(),
                max_gap: 0.0,
                continuity_bound: cfg.continuity_bound_for(m),
                family: CycleFamily::new(Vec::new(), BoundaryCondition::ClosedLoopInCycleSpace, Provenance::TwoDiscRefined),
            }
        }
        Err(e) => return Err(e),
    };
    let tol = cfg.tol_bound_rel * m.diam();
    let bound = 4.0 * m.diam();
    let width = BoundCheck::new("4d", bound, rep.width_estimate, tol);
    rep.bounds.push(width.clone());
    if let Some(mass) = stationary_mass(&rep) {
        rep.bounds.push(BoundCheck::new("certificate_4d", bound, mass, tol));
    }
    rep.bound_checked = Some(width);
    Ok(rep)
}

/// Shortest nonzero lattice class (small search).
fn shortest_class(m: &Manifold) -> (i64, i64) {
    let l = m.lattice().unwrap();
    let mut best = ((1, 0), f64::INFINITY);
    for i in -3i64..=3 {
        for j in -3i64..=3 {
            if (i, j) == (0, 0) {
                continue;
            }
            let len = loop_length(m, l.vector(i, j));
            if len < best.1 - 1e-12 {
                best = ((i, j), len);
            }
        }
    }
    best.0
}

/// Shorten a randomly perturbed loop in a nontrivial class `class` (default:
/// the shortest lattice class on a flat torus, the `u` circle on a torus of
/// revolution, started on the top parallel). The result must be a stationary
/// loop of length at most `2 diam`.
pub fn verify_nonsimply_connected<R: Rng + ?Sized>(
    m: &Manifold,
    class: Option<(i64, i64)>,
    cfg: &SweepConfig,
    rng: &mut R,
) -> SResult<MinMaxReport> {
    let l = m
        .lattice()
        .ok_or_else(|| Error::InvalidParameter(format!("needs a torus, got {}", m.name())))?;
    let class = class.unwrap_or_else(|| match m.kind() {
        ManifoldKind::TorusOfRevolution { .. } => (1, 0),
        _ => shortest_class(m),
    });
    if class == (0, 0) {
        return Err(Error::InvalidParameter("class (0, 0) is contractible".into()).into());
    }
    let w = l.vector(class.0, class.1);
    let origin = match m.kind() {
        ManifoldKind::TorusOfRevolution { .. } => Vec3::new(0.0, 0.5 * PI, 0.0),
        _ => m.random_point(rng).coords,
    };
    let n = choose_n(1.5 * loop_length(m, w), m.inj());
    let mut pts: Vec<Point> = (0..n)
        .map(|j| {
            let p = m.point(origin + w * (j as f64 / n as f64));
            let r = 0.02 * m.inj() * rng.gen::<f64>();
            let v = m.random_tangent(rng, &p, r);
            m.point(p.coords + v.components)
        })
        .collect();
    pts.push(pts[0]);
    let start = PolygonalCycle::from_vertices(m, vec![pts], MERGE_TOL_REL * m.diam())?;
    let out = shorten(m, &start, &cfg.flow)?;
    let mass = out.net().map(|n| n.total_mass);
    let len0 = cycle_length(&start);
    let mut rep = MinMaxReport {
        width_estimate: mass.unwrap_or(0.0),
        initial_max: len0,
        round_max: vec![len0],
        achiever: 0,
        candidate_source: mass.map(|_| CandidateSource::Loop),
        stationary_candidate: Some(out),
        bound_checked: None,
        bounds: Vec::new(),
        max_gap: 0.0,
        continuity_bound: cfg.continuity_bound_for(m),
        family: CycleFamily::new(vec![start], BoundaryCondition::Free, Provenance::UserSupplied),
    };
    let check = BoundCheck::new("2d", 2.0 * m.diam(), mass.unwrap_or(f64::INFINITY), cfg.tol_bound_rel * m.diam());
    rep.bounds.push(check.clone());
    rep.bound_checked = Some(check);
    Ok(rep)
}
