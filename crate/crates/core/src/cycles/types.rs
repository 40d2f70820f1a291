//! Cycle types: endpoint partitions plus constant-segment masks.

use alloc::vec::Vec;

use super::PolygonalCycle;
use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point};

/// Which end of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum End {
    Start,
    End,
}

impl End {
    /// Index of this endpoint of `chain` among the `2k` chain endpoints.
    pub fn index(self, chain: usize) -> usize {
        2 * chain + usize::from(self == End::End)
    }
}

/// The role of a vertex of a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexRole {
    /// A chain endpoint, belonging to the given block.
    Multiple(usize),
    /// An interior junction of a chain.
    Double { chain: usize, junction: usize },
}

/// Partition of the `2k` chain endpoints into blocks and the mask of
/// constant segments.
///
/// Endpoint `2i` is the start of chain `i`, `2i + 1` its end. Block labels
/// are canonical: numbered in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleType {
    partition: Vec<usize>,
    constant: Vec<Vec<bool>>,
    blocks: usize,
}

fn canonical(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map: Vec<(usize, usize)> = Vec::new();
    let out = labels
        .iter()
        .map(|l| match map.iter().find(|(a, _)| a == l) {
            Some((_, b)) => *b,
            None => {
                map.push((*l, map.len()));
                map.len() - 1
            }
        })
        .collect();
    (out, map.len())
}

impl CycleType {
    /// Validate and canonicalize. `partition[e]` is the block label of
    /// endpoint `e`; `constant[i][j]` flags segment `j` of chain `i`.
    pub fn new(partition: Vec<usize>, constant: Vec<Vec<bool>>) -> Result<Self> {
        let k = constant.len();
        if k == 0 || partition.len() != 2 * k {
            return Err(Error::InvalidCycle("partition must label 2k endpoints".into()));
        }
        let n = constant[0].len();
        if n == 0 || constant.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidCycle("every chain needs the same positive N".into()));
        }
        let (partition, blocks) = canonical(&partition);
        let t = Self { partition, constant, blocks };
        for b in t.blocks() {
            let starts = b.iter().filter(|e| *e % 2 == 0).count();
            if 2 * starts != b.len() {
                return Err(Error::InvalidCycle("block with unequal starts and ends".into()));
            }
        }
        for i in 0..k {
            if t.constant[i].iter().all(|&c| c) && t.partition[2 * i] != t.partition[2 * i + 1] {
                return Err(Error::InvalidCycle("constant chain joining two blocks".into()));
            }
        }
        Ok(t)
    }

    /// `k` separate closed chains with no constant segments.
    pub fn closed_loops(k: usize, n: usize) -> Self {
        let partition = (0..2 * k).map(|e| e / 2).collect();
        Self::new(partition, alloc::vec![alloc::vec![false; n]; k]).unwrap()
    }

    /// All `2k` endpoints at one multiple point.
    pub fn single_point(k: usize, n: usize) -> Self {
        Self::new(alloc::vec![0; 2 * k], alloc::vec![alloc::vec![false; n]; k]).unwrap()
    }

    pub fn k(&self) -> usize {
        self.constant.len()
    }

    pub fn n(&self) -> usize {
        self.constant[0].len()
    }

    /// Number of blocks (multiple points).
    pub fn num_blocks(&self) -> usize {
        self.blocks
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    pub fn constant_mask(&self) -> &[Vec<bool>] {
        &self.constant
    }

    pub fn chain_mask(&self, chain: usize) -> &[bool] {
        &self.constant[chain]
    }

    pub fn is_constant(&self, chain: usize, segment: usize) -> bool {
        self.constant[chain][segment]
    }

    pub fn block_of(&self, chain: usize, end: End) -> usize {
        self.partition[end.index(chain)]
    }

    /// Endpoint indices of each block.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = alloc::vec![Vec::new(); self.blocks];
        for (e, &b) in self.partition.iter().enumerate() {
            out[b].push(e);
        }
        out
    }

    /// Role of vertex `j` of chain `i`.
    pub fn role(&self, chain: usize, j: usize) -> VertexRole {
        if j == 0 {
            VertexRole::Multiple(self.block_of(chain, End::Start))
        } else if j == self.n() {
            VertexRole::Multiple(self.block_of(chain, End::End))
        } else {
            VertexRole::Double { chain, junction: j }
        }
    }

    pub(crate) fn reversed(&self) -> Self {
        let mut partition = self.partition.clone();
        for i in 0..self.k() {
            partition.swap(2 * i, 2 * i + 1);
        }
        let constant = self
            .constant
            .iter()
            .map(|c| c.iter().rev().copied().collect())
            .collect();
        let (partition, blocks) = canonical(&partition);
        Self { partition, constant, blocks }
    }

    pub(crate) fn union(&self, other: &Self) -> Self {
        let mut partition = self.partition.clone();
        partition.extend(other.partition.iter().map(|b| b + self.blocks));
        let mut constant = self.constant.clone();
        constant.extend(other.constant.iter().cloned());
        let (partition, blocks) = canonical(&partition);
        Self { partition, constant, blocks }
    }

    /// Same partition, new mask (used after resubdivision).
    pub(crate) fn with_mask(&self, constant: Vec<Vec<bool>>) -> Self {
        Self { partition: self.partition.clone(), constant, blocks: self.blocks }
    }

    /// Every block of `other` lies inside a block of `self`.
    fn coarsens(&self, other: &Self) -> bool {
        let mut image = alloc::vec![usize::MAX; other.blocks];
        for (e, &b) in other.partition.iter().enumerate() {
            let a = self.partition[e];
            if image[b] == usize::MAX {
                image[b] = a;
            } else if image[b] != a {
                return false;
            }
        }
        true
    }
}

/// `a >= b` in the partial order of types: `a`'s partition coarsens `b`'s
/// and every constant segment of `b` is constant in `a`. Reflexive.
pub fn type_higher_than(a: &CycleType, b: &CycleType) -> bool {
    if a.k() != b.k() || a.n() != b.n() {
        return false;
    }
    a.coarsens(b)
        && a.constant
            .iter()
            .flatten()
            .zip(b.constant.iter().flatten())
            .all(|(&ca, &cb)| ca || !cb)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub(crate) fn union_find_classes(n: usize, mut same: impl FnMut(usize, usize) -> bool) -> Vec<usize> {
    let mut uf = UnionFind::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if same(a, b) {
                uf.union(a, b);
            }
        }
    }
    (0..n).map(|x| uf.find(x)).collect()
}

/// Points at distance at most `tol`.
pub(crate) fn coincide(m: &Manifold, p: &Point, q: &Point, tol: f64) -> bool {
    p == q || (m.chord(p, q) <= 2.0 * tol && m.distance(p, q) <= tol)
}

pub(crate) fn classify_points(m: &Manifold, chains: &[Vec<Point>], merge_tol: f64) -> Result<CycleType> {
    if chains.is_empty() || chains[0].len() < 2 {
        return Err(Error::InvalidCycle("empty cycle".into()));
    }
    let ends: Vec<Point> = chains
        .iter()
        .flat_map(|c| [c[0], *c.last().unwrap()])
        .collect();
    let partition = union_find_classes(ends.len(), |a, b| coincide(m, &ends[a], &ends[b], merge_tol));
    let constant = chains
        .iter()
        .map(|c| c.windows(2).map(|w| coincide(m, &w[0], &w[1], merge_tol)).collect())
        .collect();
    CycleType::new(partition, constant)
}

/// Type of `c` read off its geometry: blocks are the classes of endpoints
/// within `merge_tol`, constant segments those of length at most `merge_tol`.
pub fn classify_type(m: &Manifold, c: &PolygonalCycle, merge_tol: f64) -> CycleType {
    let ends: Vec<Point> = c
        .vertices()
        .iter()
        .flat_map(|v| [v[0], *v.last().unwrap()])
        .collect();
    let partition = union_find_classes(ends.len(), |a, b| coincide(m, &ends[a], &ends[b], merge_tol));
    let constant = c
        .chains()
        .iter()
        .map(|ch| ch.iter().map(|s| s.length <= merge_tol).collect())
        .collect();
    let (partition, blocks) = canonical(&partition);
    CycleType { partition, constant, blocks }
}
