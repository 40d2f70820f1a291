//! Deformation vectors, first variation and flow steps.

use alloc::vec::Vec;

use crate::cycles::PolygonalCycle;
use crate::error::{Error, Result};
use crate::manifold::{GeodesicSegment, Manifold, Point, TangentVector};
use crate::math::Vec3;

/// One tangent vector per vertex of a cycle, indexed like
/// [`PolygonalCycle::vertices`].
#[derive(Debug, Clone, PartialEq)]
pub struct VertexField {
    pub vectors: Vec<Vec<Vec3>>,
}

impl VertexField {
    pub fn zeros(c: &PolygonalCycle) -> Self {
        Self { vectors: c.vertices().iter().map(|v| alloc::vec![Vec3::zeros(); v.len()]).collect() }
    }

    pub fn get(&self, chain: usize, j: usize) -> Vec3 {
        self.vectors[chain][j]
    }
}

/// What moves as one piece under the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitKind {
    /// A multiple point (block of the partition).
    Block(usize),
    /// A non-negligible cluster of double points: `chain`, vertex range.
    Cluster { chain: usize, first: usize, last: usize },
}

/// Moving units of a cycle: blocks, then non-negligible clusters. Negligible
/// clusters belong to the unit of their multiple point.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Units {
    pub kinds: Vec<UnitKind>,
    /// Unit index of every vertex.
    pub of: Vec<Vec<usize>>,
    /// Representative vertex `(chain, j)` of every unit.
    pub rep: Vec<(usize, usize)>,
}

impl Units {
    pub fn new(c: &PolygonalCycle) -> Self {
        let ty = c.cycle_type();
        let n = ty.n();
        let mut kinds: Vec<UnitKind> = (0..ty.num_blocks()).map(UnitKind::Block).collect();
        let mut rep = alloc::vec![(usize::MAX, 0); ty.num_blocks()];
        let mut of = alloc::vec![alloc::vec![usize::MAX; n + 1]; ty.k()];
        for i in 0..ty.k() {
            let (bs, be) = (ty.partition()[2 * i], ty.partition()[2 * i + 1]);
            if rep[bs].0 == usize::MAX {
                rep[bs] = (i, 0);
            }
            if rep[be].0 == usize::MAX {
                rep[be] = (i, n);
            }
            let mask = ty.chain_mask(i);
            let mut j = 0;
            while j <= n {
                // run of vertices j..=r joined by constant segments
                let mut r = j;
                while r < n && mask[r] {
                    r += 1;
                }
                let unit = if j == 0 {
                    bs
                } else if r == n {
                    be
                } else {
                    kinds.push(UnitKind::Cluster { chain: i, first: j, last: r });
                    rep.push((i, j));
                    kinds.len() - 1
                };
                for slot in &mut of[i][j..=r] {
                    *slot = unit;
                }
                j = r + 1;
            }
            // the end vertex always belongs to its block, even after a
            // run that started at the chain start
            of[i][n] = be;
        }
        Self { kinds, of, rep }
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn point(&self, c: &PolygonalCycle, u: usize) -> Point {
        let (i, j) = self.rep[u];
        c.vertices()[i][j]
    }
}

/// Steepest-descent field of a cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationVector {
    /// Vector at each vertex (all vertices of a unit share one vector).
    pub field: VertexField,
    /// Vector of each multiple point, by block.
    pub blocks: Vec<Vec3>,
    /// Non-negligible clusters with their vectors.
    pub clusters: Vec<(UnitKind, Vec3)>,
    /// Sum of squared `g`-norms over blocks and non-negligible clusters.
    pub norm_sq: f64,
}

impl DeformationVector {
    pub fn norm(&self) -> f64 {
        crate::math::sqrt(self.norm_sq)
    }
}

/// Unit tangents of a segment pointing into it from its start and its end.
pub(crate) fn directions(s: &GeodesicSegment) -> Option<(Vec3, Vec3)> {
    Some((s.start_direction()?, s.end_direction()?))
}

/// Sum of inward unit tangents at every unit.
pub(crate) fn unit_components(c: &PolygonalCycle, units: &Units) -> Vec<Vec3> {
    let mut comp = alloc::vec![Vec3::zeros(); units.len()];
    for (i, chain) in c.chains().iter().enumerate() {
        for (j, s) in chain.iter().enumerate() {
            if c.cycle_type().is_constant(i, j) {
                continue;
            }
            if let Some((a, b)) = directions(s) {
                comp[units.of[i][j]] += a;
                comp[units.of[i][j + 1]] += b;
            }
        }
    }
    comp
}

/// The deformation vector: at a multiple point the sum of inward unit
/// tangents of all its incident chains (through constant segments to the
/// first non-constant one), at a cluster of double points the sum of its two
/// bounding inward unit tangents.
pub fn deformation_vector(m: &Manifold, c: &PolygonalCycle) -> DeformationVector {
    let units = Units::new(c);
    let comp = unit_components(c, &units);
    let mut field = VertexField::zeros(c);
    for (i, row) in units.of.iter().enumerate() {
        for (j, &u) in row.iter().enumerate() {
            field.vectors[i][j] = comp[u];
        }
    }
    let mut norm_sq = 0.0;
    let mut blocks = Vec::new();
    let mut clusters = Vec::new();
    for (u, kind) in units.kinds.iter().enumerate() {
        let p = units.point(c, u);
        norm_sq += m.inner(&p, &comp[u], &comp[u]);
        match kind {
            UnitKind::Block(_) => blocks.push(comp[u]),
            UnitKind::Cluster { .. } => clusters.push((*kind, comp[u])),
        }
    }
    DeformationVector { field, blocks, clusters, norm_sq }
}

/// First variation of the length when each vertex moves along `w`:
/// `-sum <w, inward unit tangent>_g` over segment ends, plus `|w_end - w_start|_g`
/// for constant segments.
pub fn first_variation(m: &Manifold, c: &PolygonalCycle, w: &VertexField) -> f64 {
    let mut total = 0.0;
    for (i, chain) in c.chains().iter().enumerate() {
        let v = &c.vertices()[i];
        for (j, s) in chain.iter().enumerate() {
            match directions(s) {
                Some((a, b)) => {
                    total -= m.inner(&v[j], &w.vectors[i][j], &a);
                    total -= m.inner(&v[j + 1], &w.vectors[i][j + 1], &b);
                }
                None => total += m.norm_at(&v[j], &(w.vectors[i][j + 1] - w.vectors[i][j])),
            }
        }
    }
    total
}

/// Length of the polygon obtained by moving every vertex to
/// `exp(h * w)` and reconnecting, without regard to the type. Used by
/// finite-difference checks.
pub fn displaced_length(m: &Manifold, c: &PolygonalCycle, w: &VertexField, h: f64) -> Result<f64> {
    let mut total = 0.0;
    for (i, v) in c.vertices().iter().enumerate() {
        let moved = v
            .iter()
            .enumerate()
            .map(|(j, p)| m.geodesic_shoot(&TangentVector::new(*p, w.vectors[i][j] * h), 1.0).map(|r| r.0))
            .collect::<Result<Vec<_>>>()?;
        for s in moved.windows(2) {
            if s[0] != s[1] {
                total += m.geodesic_connect(&s[0], &s[1])?.length;
            }
        }
    }
    Ok(total)
}

/// Move unit `u` of `c` to `targets[u]` and reconnect. Constant segments stay
/// constant; a reconnection longer than `inj / 2` fails with
/// [`Error::StepTooLong`].
pub(crate) fn rebuild(m: &Manifold, c: &PolygonalCycle, units: &Units, targets: &[Point]) -> Result<PolygonalCycle> {
    let ty = c.cycle_type();
    let limit = 0.5 * m.inj();
    let segments = (0..ty.k())
        .map(|i| {
            (0..ty.n())
                .map(|j| {
                    let (a, b) = (targets[units.of[i][j]], targets[units.of[i][j + 1]]);
                    if ty.is_constant(i, j) {
                        return Ok(GeodesicSegment::constant(a));
                    }
                    let reuse = &c.chains()[i][j];
                    if reuse.start == a && reuse.end == b {
                        return Ok(reuse.clone());
                    }
                    m.geodesic_connect(&a, &b).map_err(|e| match e {
                        Error::TooFar { distance, .. } => Error::StepTooLong { length: distance, limit },
                        e => e,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PolygonalCycle::from_segments(segments, ty.clone())
}

/// Move every multiple point and every cluster once along its vector for
/// time `dt` and reconnect. The type is kept exactly.
pub fn flow_step(m: &Manifold, c: &PolygonalCycle, v: &DeformationVector, dt: f64) -> Result<PolygonalCycle> {
    if !(dt >= 0.0) || !v.norm_sq.is_finite() {
        return Err(Error::InvalidParameter("flow step needs dt >= 0 and a finite field".into()));
    }
    let units = Units::new(c);
    let targets = (0..units.len())
        .map(|u| {
            let (i, j) = units.rep[u];
            let p = c.vertices()[i][j];
            let w = v.field.vectors[i][j];
            if w == Vec3::zeros() || dt == 0.0 {
                Ok(p)
            } else {
                m.geodesic_shoot(&TangentVector::new(p, w), dt).map(|r| r.0)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    rebuild(m, c, &units, &targets)
}
