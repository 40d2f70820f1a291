//! Family builders.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{BoundaryCondition, CycleFamily, Provenance, SweepConfig, SweepoutError};
use crate::cycles::{PolygonalCycle, MERGE_TOL_REL};
use crate::error::{Error, Result};
use crate::manifold::{GeodesicPath, GeodesicSegment, Manifold, ManifoldKind, Point};
use crate::math::{ceil, cos, ellipse_perimeter, round, sin, sqrt, Vec3, PI};
use crate::shortening::{choose_n, shorten, ShortenError, ShortenResult};

/// Edges `e1..e6` of the tetrahedron as vertex pairs.
pub const TETRA_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Faces as oriented vertex cycles, so that their boundaries are
/// `e1 + e5 - e3`, `-e1 + e2 - e4`, `-e2 + e3 - e6` and `e6 - e5 + e4`.
pub const TETRA_FACES: [[usize; 3]; 4] = [[0, 1, 3], [1, 0, 2], [2, 0, 3], [2, 3, 1]];

/// Coefficient of edge `e` in the boundary of face `i`.
pub fn edge_sign_table() -> [[i8; 6]; 4] {
    let mut t = [[0i8; 6]; 4];
    for (i, f) in TETRA_FACES.iter().enumerate() {
        for j in 0..3 {
            let (a, b) = (f[j], f[(j + 1) % 3]);
            let (e, s) = directed_edge(a, b);
            t[i][e] += s;
        }
    }
    t
}

fn directed_edge(a: usize, b: usize) -> (usize, i8) {
    TETRA_EDGES
        .iter()
        .position(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
        .map(|e| (e, if TETRA_EDGES[e] == (a, b) { 1 } else { -1 }))
        .expect("distinct tetrahedron vertices")
}

/// Four points spread out by greedy farthest-point selection (chord metric)
/// among `candidates` random points.
pub fn farthest_point_vertices<R: Rng + ?Sized>(m: &Manifold, rng: &mut R, candidates: usize) -> [Point; 4] {
    let pool: Vec<Point> = (0..candidates.max(4)).map(|_| m.random_point(rng)).collect();
    let mut chosen = vec![pool[0]];
    while chosen.len() < 4 {
        let far = pool
            .iter()
            .map(|p| chosen.iter().map(|q| m.chord(p, q)).fold(f64::INFINITY, f64::min))
            .enumerate()
            .fold((0, -1.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc })
            .0;
        chosen.push(pool[far]);
    }
    [chosen[0], chosen[1], chosen[2], chosen[3]]
}

fn merge_tol(m: &Manifold, cfg: &SweepConfig) -> f64 {
    cfg.flow.merge_tol.unwrap_or(MERGE_TOL_REL * m.diam())
}

/// Latitude circles `z = c sin(pi (1/2 - t))` of a sphere-like surface, from
/// the north pole (`t = 0`) to the south pole, all with the same `N`.
pub fn latitude_sweepout(m: &Manifold, slices: usize) -> Result<CycleFamily> {
    if slices < 2 {
        return Err(Error::InvalidParameter("a sweepout needs at least 2 members".into()));
    }
    let (a, b, c) = match m.kind() {
        ManifoldKind::RoundSphere { radius } | ManifoldKind::ConformalSphere { radius, .. } => {
            (*radius, *radius, *radius)
        }
        ManifoldKind::Ellipsoid { axes } => (axes[0], axes[1], axes[2]),
        _ => return Err(Error::InvalidParameter(format!("latitude sweepout needs a sphere, got {}", m.name()))),
    };
    let level = |z: f64, theta: f64| {
        let rho = sqrt((1.0 - z * z / (c * c)).max(0.0));
        m.point(Vec3::new(a * rho * cos(theta), b * rho * sin(theta), z))
    };
    let zs: Vec<f64> = (0..slices)
        .map(|i| c * sin(PI * (0.5 - i as f64 / (slices - 1) as f64)))
        .collect();
    let longest = match m.kind() {
        ManifoldKind::ConformalSphere { .. } => {
            let poly = |z: f64| {
                let pts: Vec<Point> = (0..=64).map(|j| level(z, 2.0 * PI * j as f64 / 64.0)).collect();
                pts.windows(2).map(|w| m.distance(&w[0], &w[1])).sum::<f64>()
            };
            zs.iter().map(|&z| poly(z)).fold(0.0, f64::max) * (1.0 + 1e-3)
        }
        _ => ellipse_perimeter(a, b),
    };
    let n = choose_n(longest, m.inj());
    let tol = MERGE_TOL_REL * m.diam();
    let members = zs
        .iter()
        .map(|&z| {
            let mut pts: Vec<Point> = (0..n).map(|j| level(z, 2.0 * PI * j as f64 / n as f64)).collect();
            pts.push(pts[0]);
            PolygonalCycle::from_vertices(m, vec![pts], tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CycleFamily::new(members, BoundaryCondition::ClosedLoopInCycleSpace, Provenance::Latitude))
}

/// Closed geodesic loops of a torus in lattice class `(i, j)`, translated
/// across one period.
pub fn parallel_loop_family(m: &Manifold, class: (i64, i64), members: usize) -> Result<CycleFamily> {
    let l = m
        .lattice()
        .ok_or_else(|| Error::InvalidParameter(format!("loop family needs a torus, got {}", m.name())))?;
    if class == (0, 0) || members < 2 {
        return Err(Error::InvalidParameter("need a nonzero class and at least 2 members".into()));
    }
    let w = l.vector(class.0, class.1);
    let (b1, b2) = l.basis();
    let area = (b1[0] * b2[1] - b1[1] * b2[0]).abs();
    let perp = Vec3::new(-w[1], w[0], 0.0) * (area / w.norm_squared());
    let len = loop_length(m, w);
    let n = choose_n(len, m.inj());
    let tol = MERGE_TOL_REL * m.diam();
    let out = (0..members)
        .map(|t| {
            let o = perp * (t as f64 / (members - 1) as f64);
            let mut pts: Vec<Point> = (0..n).map(|j| m.point(o + w * (j as f64 / n as f64))).collect();
            pts.push(pts[0]);
            PolygonalCycle::from_vertices(m, vec![pts], tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CycleFamily::new(out, BoundaryCondition::Free, Provenance::UserSupplied))
}

/// Upper bound for the length of a chart-straight loop along `w`.
pub(crate) fn loop_length(m: &Manifold, w: Vec3) -> f64 {
    match m.kind() {
        ManifoldKind::TorusOfRevolution { major, minor } => {
            (major + minor) * w[0].abs() + minor * w[1].abs()
        }
        _ => w.norm(),
    }
}

/// The tetrahedron skeleton: vertices, minimizing edges and `E` segments per edge.
struct Skeleton {
    paths: Vec<GeodesicPath>,
    e: usize,
}

impl Skeleton {
    fn new(m: &Manifold, v: &[Point; 4]) -> Result<Self> {
        let paths = TETRA_EDGES
            .iter()
            .map(|&(a, b)| m.minimizing_path(&v[a], &v[b]))
            .collect::<Result<Vec<_>>>()?;
        let longest = paths.iter().map(|p| p.length).fold(0.0, f64::max);
        Ok(Self { paths, e: choose_n(longest, m.inj()) })
    }

    /// `E + 1` points along the directed edge `a -> b` between fractions
    /// `from` and `to` of its length (fractions measured from `a`).
    fn arc(&self, m: &Manifold, a: usize, b: usize, from: f64, to: f64) -> Result<Vec<Point>> {
        let (e, s) = directed_edge(a, b);
        let path = &self.paths[e];
        let (f0, f1) = if s > 0 { (from, to) } else { (1.0 - from, 1.0 - to) };
        (0..=self.e)
            .map(|j| {
                let f = f0 + (f1 - f0) * j as f64 / self.e as f64;
                if f <= 0.0 {
                    Ok(path.start())
                } else if f >= 1.0 {
                    Ok(path.end())
                } else {
                    point_along(m, &path.segments, path.length * f)
                }
            })
            .collect()
    }

    /// Whole directed edge.
    fn edge(&self, m: &Manifold, a: usize, b: usize) -> Result<Vec<Point>> {
        self.arc(m, a, b, 0.0, 1.0)
    }

    /// Face boundary as one closed chain of `3E` segments starting at `f[0]`.
    fn face_loop(&self, m: &Manifold, f: [usize; 3], tol: f64) -> Result<PolygonalCycle> {
        let pts = concat(&[
            self.edge(m, f[0], f[1])?,
            self.edge(m, f[1], f[2])?,
            self.edge(m, f[2], f[0])?,
        ]);
        PolygonalCycle::from_vertices(m, vec![pts], tol)
    }

    /// Face boundary as three chains (its edges).
    fn face_edges(&self, m: &Manifold, f: [usize; 3], tol: f64) -> Result<PolygonalCycle> {
        let chains = (0..3).map(|j| self.edge(m, f[j], f[(j + 1) % 3])).collect::<Result<Vec<_>>>()?;
        PolygonalCycle::from_vertices(m, chains, tol)
    }
}

/// Point at arclength `s` along a chain of segments.
fn point_along(m: &Manifold, chain: &[GeodesicSegment], s: f64) -> Result<Point> {
    let mut acc = 0.0;
    for seg in chain {
        if s <= acc + seg.length || core::ptr::eq(seg, chain.last().unwrap()) {
            let frac = if seg.length > 0.0 { ((s - acc) / seg.length).clamp(0.0, 1.0) } else { 0.0 };
            return Ok(if frac <= 1e-12 {
                seg.start
            } else if frac >= 1.0 - 1e-12 {
                seg.end
            } else {
                m.geodesic_shoot(&seg.initial_velocity, frac)?.0
            });
        }
        acc += seg.length;
    }
    Ok(chain[0].start)
}

/// Join point lists that share their junction points.
fn concat(pieces: &[Vec<Point>]) -> Vec<Point> {
    let mut out = pieces[0].clone();
    for p in &pieces[1..] {
        out.extend_from_slice(&p[1..]);
    }
    out
}

/// Same shape with every vertex at the first vertex.
fn collapsed_copy(m: &Manifold, c: &PolygonalCycle, tol: f64) -> Result<PolygonalCycle> {
    let p = c.vertices()[0][0];
    let chains = vec![vec![p; c.n() + 1]; c.k()];
    PolygonalCycle::from_vertices(m, chains, tol)
}

/// Contract `c` by shortening with fixed `N`. Returns the snapshots from
/// `c` to a zero cycle.
fn contract(
    m: &Manifold,
    c: &PolygonalCycle,
    cfg: &SweepConfig,
    face: usize,
) -> core::result::Result<Vec<PolygonalCycle>, SweepoutError> {
    let mut flow = cfg.flow.clone();
    flow.n = Some(c.n());
    flow.record_snapshots = true;
    match shorten(m, c, &flow) {
        Ok(out) => match out.result {
            ShortenResult::Collapsed => {
                let mut snaps = out.snapshots;
                let last = collapsed_copy(m, snaps.last().unwrap_or(c), merge_tol(m, cfg))?;
                snaps.push(last);
                Ok(snaps)
            }
            ShortenResult::Stationary(_) => Err(SweepoutError::ShortCycleFound { face, outcome: out }),
        },
        Err(ShortenError::Geometry(e)) => Err(e.into()),
        Err(ShortenError::NonConvergence { .. }) => Err(SweepoutError::NonConvergence { face: Some(face) }),
    }
}

/// Snapshot at parameter `s` (0 = fully contracted, 1 = start).
fn pick(snaps: &[PolygonalCycle], s: f64) -> &PolygonalCycle {
    let i = round((1.0 - s) * (snaps.len() - 1) as f64) as usize;
    &snaps[i.min(snaps.len() - 1)]
}

fn union_all(cs: &[&PolygonalCycle]) -> Result<PolygonalCycle> {
    let mut u = cs[0].clone();
    for c in &cs[1..] {
        u = u.union(c)?;
    }
    Ok(u)
}

fn spike_members(m: &Manifold, len: f64) -> usize {
    (ceil(len / (m.inj() / 16.0)) as usize).max(8)
}

/// The tetrahedron family: the four face contractions run backwards from
/// points to the face boundaries (12 chains, 3 per face), followed by the
/// cancellation of the six opposite-orientation edge pairs into their
/// midpoints. Marks `faces_full` and `cancelled`.
pub fn tetrahedron_sweepout(
    m: &Manifold,
    vertices: &[Point; 4],
    cfg: &SweepConfig,
) -> core::result::Result<CycleFamily, SweepoutError> {
    for p in vertices {
        m.check_point(p)?;
    }
    let tol = merge_tol(m, cfg);
    let sk = Skeleton::new(m, vertices)?;
    let mut snaps = Vec::with_capacity(4);
    for (i, f) in TETRA_FACES.iter().enumerate() {
        let tri = sk.face_edges(m, *f, tol)?;
        snaps.push(contract(m, &tri, cfg, i)?);
    }
    let steps = snaps.iter().map(Vec::len).max().unwrap();
    let mut members = Vec::new();
    for j in 0..steps {
        let s = j as f64 / (steps - 1) as f64;
        let parts: Vec<&PolygonalCycle> = snaps.iter().map(|sn| pick(sn, s)).collect();
        members.push(union_all(&parts)?);
    }
    let full = members.len() - 1;
    let longest = sk.paths.iter().map(|p| p.length).fold(0.0, f64::max);
    let phase = spike_members(m, longest);
    for j in 1..=phase {
        let s = j as f64 / phase as f64;
        let mut chains = Vec::with_capacity(12);
        for f in &TETRA_FACES {
            for k in 0..3 {
                chains.push(sk.arc(m, f[k], f[(k + 1) % 3], 0.5 * s, 1.0 - 0.5 * s)?);
            }
        }
        members.push(PolygonalCycle::from_vertices(m, chains, tol)?);
    }
    let mut fam = CycleFamily::new(members, BoundaryCondition::ClosedLoopInCycleSpace, Provenance::TetrahedronFaces);
    fam.marks.push(("faces_full".to_string(), full));
    fam.marks.push(("cancelled".to_string(), fam.members.len() - 1));
    Ok(fam)
}

/// The refined family whose members have at most two closed curves: the
/// contractions of faces 1 and 2 run backwards to their boundaries, the
/// shared edge `e1` is retracted, the edge `e6` is pushed out to split the
/// quadrilateral into the boundaries of faces 3 and 4 (reversed), and those
/// contract forward. Marks `union_12`, `quadrilateral` and `split_34`.
pub fn two_disc_refined_sweepout(
    m: &Manifold,
    vertices: &[Point; 4],
    cfg: &SweepConfig,
) -> core::result::Result<CycleFamily, SweepoutError> {
    for p in vertices {
        m.check_point(p)?;
    }
    let tol = merge_tol(m, cfg);
    let sk = Skeleton::new(m, vertices)?;
    let g1 = sk.face_loop(m, TETRA_FACES[0], tol)?;
    let g2 = sk.face_loop(m, TETRA_FACES[1], tol)?;
    // boundaries of faces 3 and 4 with reversed orientation
    let g3 = sk.face_loop(m, [2, 3, 0], tol)?;
    let g4 = sk.face_loop(m, [2, 1, 3], tol)?;
    let s1 = contract(m, &g1, cfg, 0)?;
    let s2 = contract(m, &g2, cfg, 1)?;
    let s3 = contract(m, &g3, cfg, 2)?;
    let s4 = contract(m, &g4, cfg, 3)?;

    let mut members = Vec::new();
    let steps = s1.len().max(s2.len());
    for j in 0..steps {
        let s = j as f64 / (steps - 1) as f64;
        members.push(pick(&s1, s).union(pick(&s2, s))?);
    }
    let union_12 = members.len() - 1;

    // v1 -> v3 -> v0 -> (out along e1 and back) -> v2 -> v1
    let (e1, _) = directed_edge(0, 1);
    let retract = spike_members(m, sk.paths[e1].length);
    for j in 0..=retract {
        let f = 1.0 - j as f64 / retract as f64;
        let out = sk.arc(m, 0, 1, 0.0, f)?;
        let mut back = out.clone();
        back.reverse();
        let pts = concat(&[sk.edge(m, 1, 3)?, sk.edge(m, 3, 0)?, out, back, sk.edge(m, 0, 2)?, sk.edge(m, 2, 1)?]);
        members.push(PolygonalCycle::from_vertices(m, vec![pts], tol)?);
    }
    let quadrilateral = members.len() - 1;

    // v1 -> v3 -> v0 -> v2 -> (out along e6 and back) -> v1
    let (e6, _) = directed_edge(2, 3);
    let push = spike_members(m, sk.paths[e6].length);
    for j in 1..=push {
        let f = j as f64 / push as f64;
        let out = sk.arc(m, 2, 3, 0.0, f)?;
        let mut back = out.clone();
        back.reverse();
        let pts = concat(&[sk.edge(m, 1, 3)?, sk.edge(m, 3, 0)?, sk.edge(m, 0, 2)?, out, back, sk.edge(m, 2, 1)?]);
        members.push(PolygonalCycle::from_vertices(m, vec![pts], tol)?);
    }
    let split = members.len();

    let steps = s3.len().max(s4.len());
    for j in 0..steps {
        let s = 1.0 - j as f64 / (steps - 1) as f64;
        members.push(pick(&s3, s).union(pick(&s4, s))?);
    }
    let mut fam = CycleFamily::new(members, BoundaryCondition::ClosedLoopInCycleSpace, Provenance::TwoDiscRefined);
    fam.marks.push(("union_12".to_string(), union_12));
    fam.marks.push(("quadrilateral".to_string(), quadrilateral));
    fam.marks.push(("split_34".to_string(), split));
    Ok(fam)
}
