//! Piecewise-geodesic 1-cycles, their combinatorial types and geodesic nets.
//!
//! A [`PolygonalCycle`] is `k` chains of `N` geodesic segments each. Chain
//! endpoints are grouped into blocks (multiple points) by the partition of
//! its [`CycleType`]; endpoints of one block are stored as identical points,
//! so moving a block moves all of them together.

mod net;
mod types;

use alloc::string::ToString;
use alloc::vec::Vec;

pub use net::{project_to_net, GeodesicNet, NetEdge};
pub use types::{classify_type, type_higher_than, CycleType, End, VertexRole};
pub(crate) use types::union_find_classes;

use crate::error::{Error, Result};
use crate::manifold::{GeodesicSegment, Manifold, Point};

/// Default merge tolerance relative to the diameter.
pub const MERGE_TOL_REL: f64 = 1e-6;

/// `k` chains of `N` geodesic segments with matched endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalCycle {
    vertices: Vec<Vec<Point>>,
    segments: Vec<Vec<GeodesicSegment>>,
    cycle_type: CycleType,
}

impl PolygonalCycle {
    /// Assemble from already computed segments. Consecutive segments must
    /// share endpoints exactly, and the endpoints of each block must be
    /// identical points.
    pub fn from_segments(segments: Vec<Vec<GeodesicSegment>>, cycle_type: CycleType) -> Result<Self> {
        if segments.len() != cycle_type.k() || segments.iter().any(|c| c.len() != cycle_type.n()) {
            return Err(Error::InvalidCycle("segment layout does not match the cycle type".into()));
        }
        let mut vertices = Vec::with_capacity(segments.len());
        for chain in &segments {
            let mut v = Vec::with_capacity(chain.len() + 1);
            v.push(chain[0].start);
            for (j, s) in chain.iter().enumerate() {
                if s.start != v[j] {
                    return Err(Error::InvalidCycle("chain segments do not join".into()));
                }
                v.push(s.end);
            }
            vertices.push(v);
        }
        for block in cycle_type.blocks() {
            let p = endpoint(&vertices, block[0]);
            if block.iter().any(|&e| endpoint(&vertices, e) != p) {
                return Err(Error::InvalidCycle("block endpoints are not identical".into()));
            }
        }
        Ok(Self { vertices, segments, cycle_type })
    }

    /// Build from vertices, classifying coincidences with `merge_tol`.
    pub fn from_vertices(m: &Manifold, vertex_chains: Vec<Vec<Point>>, merge_tol: f64) -> Result<Self> {
        let ty = types::classify_points(m, &vertex_chains, merge_tol)?;
        build_cycle_with_tol(m, vertex_chains, &ty, merge_tol)
    }

    /// Closed polygon through `points` (`k = 1`, last vertex joined to the first).
    pub fn closed_polygon(m: &Manifold, points: &[Point]) -> Result<Self> {
        let mut v = points.to_vec();
        v.push(points[0]);
        Self::from_vertices(m, alloc::vec![v], MERGE_TOL_REL * m.diam())
    }

    pub fn k(&self) -> usize {
        self.segments.len()
    }

    /// Segments per chain.
    pub fn n(&self) -> usize {
        self.cycle_type.n()
    }

    pub fn cycle_type(&self) -> &CycleType {
        &self.cycle_type
    }

    pub fn vertices(&self) -> &[Vec<Point>] {
        &self.vertices
    }

    pub fn chains(&self) -> &[Vec<GeodesicSegment>] {
        &self.segments
    }

    pub fn chain_length(&self, i: usize) -> f64 {
        self.segments[i].iter().map(|s| s.length).sum()
    }

    pub fn max_chain_length(&self) -> f64 {
        (0..self.k()).map(|i| self.chain_length(i)).fold(0.0, f64::max)
    }

    pub fn max_segment_length(&self) -> f64 {
        self.segments.iter().flatten().map(|s| s.length).fold(0.0, f64::max)
    }

    /// Every chain traversed backwards.
    pub fn reversed(&self) -> Self {
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().rev().copied().collect())
            .collect();
        let segments = self
            .segments
            .iter()
            .map(|c| c.iter().rev().map(GeodesicSegment::reversed).collect())
            .collect();
        Self { vertices, segments, cycle_type: self.cycle_type.reversed() }
    }

    /// Disjoint union (chains of `other` appended). Both need the same `N`.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::InvalidCycle("union of cycles with different N".into()));
        }
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices.iter().cloned());
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        Ok(Self { vertices, segments, cycle_type: self.cycle_type.union(&other.cycle_type) })
    }

    /// All vertex points, flattened.
    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.vertices.iter().flatten()
    }
}

fn endpoint(vertices: &[Vec<Point>], e: usize) -> Point {
    let v = &vertices[e / 2];
    if e % 2 == 0 { v[0] } else { *v.last().unwrap() }
}

/// Sum of all segment lengths (no cancellation).
pub fn cycle_length(c: &PolygonalCycle) -> f64 {
    c.segments.iter().flatten().map(|s| s.length).sum()
}

/// Random cycle of `k` closed chains with `n` segments each, all vertices
/// within `radius` of a random center. Each chain starts at the center with
/// probability 1/2 (so several chains can share a multiple point) and at a
/// point of its own otherwise. Keep `radius <= inj / 8` so every segment is
/// a short minimizer.
pub fn random_cycle<R: rand::Rng + ?Sized>(
    m: &Manifold,
    rng: &mut R,
    k: usize,
    n: usize,
    radius: f64,
) -> Result<PolygonalCycle> {
    if k == 0 || n < 2 || !(radius > 0.0) {
        return Err(Error::InvalidParameter("random cycle needs k >= 1, n >= 2 and radius > 0".into()));
    }
    let center = m.random_point(rng);
    let near = |rng: &mut R| -> Result<Point> {
        let r = radius * rng.gen::<f64>();
        let v = m.random_tangent(rng, &center, r);
        Ok(m.geodesic_shoot(&v, 1.0)?.0)
    };
    let mut chains = Vec::with_capacity(k);
    for _ in 0..k {
        let start = if rng.gen::<bool>() { center } else { near(rng)? };
        let mut v = Vec::with_capacity(n + 1);
        v.push(start);
        for _ in 1..n {
            v.push(near(rng)?);
        }
        v.push(start);
        chains.push(v);
    }
    PolygonalCycle::from_vertices(m, chains, MERGE_TOL_REL * m.diam())
}

/// Build a cycle from `k` vertex chains of `N + 1` points with the given type,
/// using the default merge tolerance.
pub fn build_cycle(m: &Manifold, vertex_chains: Vec<Vec<Point>>, cycle_type: &CycleType) -> Result<PolygonalCycle> {
    build_cycle_with_tol(m, vertex_chains, cycle_type, MERGE_TOL_REL * m.diam())
}

/// [`build_cycle`] with an explicit merge tolerance. Endpoints of a block
/// (and the ends of constant segments) are snapped to one representative
/// point; every other segment comes from `geodesic_connect`.
pub fn build_cycle_with_tol(
    m: &Manifold,
    mut vertex_chains: Vec<Vec<Point>>,
    cycle_type: &CycleType,
    merge_tol: f64,
) -> Result<PolygonalCycle> {
    let (k, n) = (cycle_type.k(), cycle_type.n());
    if vertex_chains.len() != k || vertex_chains.iter().any(|c| c.len() != n + 1) {
        return Err(Error::InvalidCycle("vertex layout does not match the cycle type".into()));
    }
    for v in vertex_chains.iter().flatten() {
        m.check_point(v)?;
    }
    let observed = types::classify_points(m, &vertex_chains, merge_tol)?;
    if observed.partition() != cycle_type.partition() {
        return Err(Error::InvalidCycle(
            "partition inconsistent with endpoint coincidences".to_string(),
        ));
    }
    if observed.constant_mask() != cycle_type.constant_mask() {
        return Err(Error::InvalidCycle(
            "constant-segment mask inconsistent with segment lengths".to_string(),
        ));
    }
    for block in cycle_type.blocks() {
        let p = endpoint(&vertex_chains, block[0]);
        for &e in &block {
            let v = &mut vertex_chains[e / 2];
            if e % 2 == 0 { v[0] = p } else { v[n] = p }
        }
    }
    for (i, v) in vertex_chains.iter_mut().enumerate() {
        snap_constant_runs(v, cycle_type.chain_mask(i));
    }
    let segments = vertex_chains
        .iter()
        .enumerate()
        .map(|(i, v)| {
            (0..n)
                .map(|j| {
                    if cycle_type.is_constant(i, j) {
                        Ok(GeodesicSegment::constant(v[j]))
                    } else {
                        m.geodesic_connect(&v[j], &v[j + 1])
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PolygonalCycle { vertices: vertex_chains, segments, cycle_type: cycle_type.clone() })
}

/// Make the vertices of every maximal run of constant segments identical,
/// preferring a chain endpoint as the representative.
pub(crate) fn snap_constant_runs(v: &mut [Point], mask: &[bool]) {
    let n = mask.len();
    let mut j = 0;
    while j < n {
        if !mask[j] {
            j += 1;
            continue;
        }
        let start = j;
        while j < n && mask[j] {
            j += 1;
        }
        // vertices start..=j form the run
        let rep = if j == n { v[n] } else { v[start] };
        for x in &mut v[start..=j] {
            *x = rep;
        }
    }
}
