//! Projection of cycles to non-parametrized geodesic nets.

use alloc::vec::Vec;

use super::types::{coincide, union_find_classes};
use super::PolygonalCycle;
use crate::error::{Error, Result};
use crate::manifold::{GeodesicSegment, Manifold, Point};
use crate::math::Vec3;

/// Angle deficit below which a degree-two vertex is treated as a smooth
/// point of a single geodesic edge.
pub const STRAIGHTEN_TOL: f64 = 1e-5;

/// An edge of a net: a chain of geodesic segments from `from` to `to`
/// (equal for loops) carried with a multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct NetEdge {
    pub from: usize,
    pub to: usize,
    pub multiplicity: u32,
    pub length: f64,
    pub segments: Vec<GeodesicSegment>,
}

impl NetEdge {
    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }

    /// Concatenated sample polyline.
    pub fn polyline(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for s in &self.segments {
            let skip = usize::from(!out.is_empty());
            out.extend(s.samples.iter().skip(skip).copied());
        }
        out
    }

    fn start_direction(&self) -> Vec3 {
        self.segments[0].start_direction().unwrap()
    }

    fn end_direction(&self) -> Vec3 {
        self.segments.last().unwrap().end_direction().unwrap()
    }

    fn reversed(&self) -> Self {
        Self {
            from: self.to,
            to: self.from,
            multiplicity: self.multiplicity,
            length: self.length,
            segments: self.segments.iter().rev().map(GeodesicSegment::reversed).collect(),
        }
    }
}

/// Multigraph of geodesic edges with even vertex degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicNet {
    pub vertices: Vec<Point>,
    pub edges: Vec<NetEdge>,
    /// Largest vertex balance `|sum of multiplicity * outward unit tangent|_g`.
    pub residual: f64,
    pub total_mass: f64,
}

impl GeodesicNet {
    /// Degree of vertex `v`, loops counted twice, times multiplicity.
    pub fn degree(&self, v: usize) -> u32 {
        self.edges
            .iter()
            .map(|e| e.multiplicity * (u32::from(e.from == v) + u32::from(e.to == v)))
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Balance vector at each vertex.
fn balances(m: &Manifold, vertices: &[Point], edges: &[NetEdge]) -> Vec<f64> {
    let mut sums = alloc::vec![Vec3::zeros(); vertices.len()];
    for e in edges {
        let w = e.multiplicity as f64;
        sums[e.from] += e.start_direction() * w;
        sums[e.to] += e.end_direction() * w;
    }
    sums.iter().zip(vertices).map(|(s, p)| m.norm_at(p, s)).collect()
}

/// Merge vertices within `merge_tol`, drop segments of length at most
/// `merge_tol`, fuse coincident edges into multiplicities and straighten
/// smooth degree-two vertices. Fails with [`Error::OddDegree`] if a vertex of
/// odd degree remains.
pub fn project_to_net(m: &Manifold, c: &PolygonalCycle, merge_tol: f64) -> Result<GeodesicNet> {
    let pts: Vec<Point> = c.points().copied().collect();
    let class = union_find_classes(pts.len(), |a, b| coincide(m, &pts[a], &pts[b], merge_tol));
    let mut index = alloc::vec![usize::MAX; pts.len()];
    let mut vertices = Vec::new();
    for (i, &r) in class.iter().enumerate() {
        if index[r] == usize::MAX {
            index[r] = vertices.len();
            vertices.push(pts[r]);
        }
        index[i] = index[r];
    }
    let mut edges = Vec::new();
    let mut flat = 0;
    for chain in c.chains() {
        for (j, s) in chain.iter().enumerate() {
            if s.length > merge_tol {
                edges.push(NetEdge {
                    from: index[flat + j],
                    to: index[flat + j + 1],
                    multiplicity: 1,
                    length: s.length,
                    segments: alloc::vec![s.clone()],
                });
            }
        }
        flat += chain.len() + 1;
    }

    fuse_duplicates(m, &mut edges, merge_tol);
    while straighten_one(m, &vertices, &mut edges) {}
    fuse_duplicates(m, &mut edges, merge_tol);

    // drop isolated vertices and renumber
    let mut used = alloc::vec![false; vertices.len()];
    for e in &edges {
        used[e.from] = true;
        used[e.to] = true;
    }
    let mut renumber = alloc::vec![usize::MAX; vertices.len()];
    let mut kept = Vec::new();
    for (i, v) in vertices.iter().enumerate() {
        if used[i] {
            renumber[i] = kept.len();
            kept.push(*v);
        }
    }
    for e in &mut edges {
        e.from = renumber[e.from];
        e.to = renumber[e.to];
    }
    let mut net = GeodesicNet { vertices: kept, edges, residual: 0.0, total_mass: 0.0 };
    for v in 0..net.vertices.len() {
        let d = net.degree(v);
        if d % 2 == 1 {
            return Err(Error::OddDegree { vertex: v, degree: d as usize });
        }
    }
    net.residual = balances(m, &net.vertices, &net.edges).into_iter().fold(0.0, f64::max);
    net.total_mass = net.edges.iter().map(|e| e.multiplicity as f64 * e.length).sum();
    Ok(net)
}

fn same_curve(m: &Manifold, a: &NetEdge, b: &NetEdge, tol: f64) -> Option<bool> {
    let close = |x: &NetEdge, y: &NetEdge| {
        x.from == y.from
            && x.to == y.to
            && (x.length - y.length).abs() <= 10.0 * tol
            && {
                let (px, py) = (x.polyline(), y.polyline());
                let (mx, my) = (px[px.len() / 2], py[py.len() / 2]);
                m.chord(&mx, &my) <= 10.0 * tol + 1e-3 * x.length
            }
    };
    if close(a, b) {
        Some(false)
    } else if close(a, &b.reversed()) {
        Some(true)
    } else {
        None
    }
}

fn fuse_duplicates(m: &Manifold, edges: &mut Vec<NetEdge>, tol: f64) {
    let mut i = 0;
    while i < edges.len() {
        let mut j = i + 1;
        while j < edges.len() {
            if same_curve(m, &edges[i], &edges[j], tol).is_some() {
                let extra = edges.remove(j).multiplicity;
                edges[i].multiplicity += extra;
            } else {
                j += 1;
            }
        }
        i += 1;
    }
}

/// Fuse the two edges at one smooth degree-two vertex. Returns whether
/// anything changed.
fn straighten_one(m: &Manifold, vertices: &[Point], edges: &mut Vec<NetEdge>) -> bool {
    for v in 0..vertices.len() {
        let inc: Vec<(usize, bool)> = edges
            .iter()
            .enumerate()
            .flat_map(|(i, e)| {
                let mut r = Vec::new();
                if e.from == v {
                    r.push((i, true));
                }
                if e.to == v {
                    r.push((i, false));
                }
                r
            })
            .collect();
        if inc.len() != 2 || inc[0].0 == inc[1].0 {
            continue;
        }
        let (a, b) = (&edges[inc[0].0], &edges[inc[1].0]);
        if a.multiplicity != b.multiplicity {
            continue;
        }
        let da = if inc[0].1 { a.start_direction() } else { a.end_direction() };
        let db = if inc[1].1 { b.start_direction() } else { b.end_direction() };
        if m.norm_at(&vertices[v], &(da + db)) >= STRAIGHTEN_TOL {
            continue;
        }
        // orient a to end at v and b to start at v, then concatenate
        let a = if inc[0].1 { a.reversed() } else { a.clone() };
        let b = if inc[1].1 { b.clone() } else { b.reversed() };
        let mut segments = a.segments;
        segments.extend(b.segments);
        let fused = NetEdge {
            from: a.from,
            to: b.to,
            multiplicity: a.multiplicity,
            length: a.length + b.length,
            segments,
        };
        let (hi, lo) = (inc[0].0.max(inc[1].0), inc[0].0.min(inc[1].0));
        edges.remove(hi);
        edges[lo] = fused;
        return true;
    }
    false
}
