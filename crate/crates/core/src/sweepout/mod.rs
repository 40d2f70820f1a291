//! Sweepouts (one-parameter families of cycles) and discrete min-max.

mod families;
mod minmax;

use alloc::string::String;
use alloc::vec::Vec;

pub use families::{
    edge_sign_table, farthest_point_vertices, latitude_sweepout, parallel_loop_family, tetrahedron_sweepout,
    two_disc_refined_sweepout, TETRA_EDGES, TETRA_FACES,
};
pub use minmax::{minmax, verify_nonsimply_connected, verify_theorem1_q2};

use crate::cycles::{GeodesicNet, PolygonalCycle};
use crate::error::Error;
use crate::manifold::Manifold;
use crate::shortening::{FlowConfig, ShortenOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// First and last members are zero cycles.
    ClosedLoopInCycleSpace,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Latitude,
    TetrahedronFaces,
    TwoDiscRefined,
    UserSupplied,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Self::Latitude => "latitude",
            Self::TetrahedronFaces => "tetrahedron_faces",
            Self::TwoDiscRefined => "two_disc_refined",
            Self::UserSupplied => "user_supplied",
        }
    }
}

/// Members at parameters `t_i = i / (m - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleFamily {
    pub members: Vec<PolygonalCycle>,
    pub boundary: BoundaryCondition,
    pub provenance: Provenance,
    /// Named member indices (phase boundaries).
    pub marks: Vec<(String, usize)>,
}

impl CycleFamily {
    pub fn new(members: Vec<PolygonalCycle>, boundary: BoundaryCondition, provenance: Provenance) -> Self {
        Self { members, boundary, provenance, marks: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn parameter(&self, i: usize) -> f64 {
        if self.members.len() < 2 { 0.0 } else { i as f64 / (self.members.len() - 1) as f64 }
    }

    pub fn mark(&self, name: &str) -> Option<usize> {
        self.marks.iter().find(|(n, _)| n == name).map(|(_, i)| *i)
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.members.iter().map(crate::cycles::cycle_length).collect()
    }

    /// Index and length of the longest member (first on ties).
    pub fn max_member(&self) -> (usize, f64) {
        self.lengths()
            .into_iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, l)| if l > acc.1 { (i, l) } else { acc })
    }

    /// Largest Hausdorff distance between the vertex sets of consecutive
    /// members (chord metric).
    pub fn max_gap(&self, m: &Manifold) -> f64 {
        self.members
            .windows(2)
            .map(|w| hausdorff(m, &w[0], &w[1]))
            .fold(0.0, f64::max)
    }
}

/// Hausdorff distance between vertex sets, in the chord metric.
pub fn hausdorff(m: &Manifold, a: &PolygonalCycle, b: &PolygonalCycle) -> f64 {
    let one_way = |x: &PolygonalCycle, y: &PolygonalCycle| {
        x.points()
            .map(|p| y.points().map(|q| m.chord(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Runs independent per-member work; implementations decide on threads.
/// Results must come back in index order.
pub trait MemberExecutor {
    fn map<R: Send, F: Fn(usize) -> R + Sync>(&self, n: usize, f: F) -> Vec<R>;
}

/// Runs members one after another.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl MemberExecutor for Sequential {
    fn map<R: Send, F: Fn(usize) -> R + Sync>(&self, n: usize, f: F) -> Vec<R> {
        (0..n).map(f).collect()
    }
}

/// Parameters of the family builders and of [`minmax`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub flow: FlowConfig,
    /// Pull-down rounds.
    pub rounds: usize,
    /// Default `inj / 8`.
    pub continuity_bound: Option<f64>,
    /// Bound-check tolerance relative to the diameter.
    pub tol_bound_rel: f64,
    /// Members tried (longest first) when extracting a stationary candidate.
    pub candidate_attempts: usize,
    /// Random candidates for farthest-point vertex selection.
    pub fps_candidates: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            flow: FlowConfig::default(),
            rounds: 20,
            continuity_bound: None,
            tol_bound_rel: 1e-2,
            candidate_attempts: 3,
            fps_candidates: 512,
        }
    }
}

impl SweepConfig {
    pub fn continuity_bound_for(&self, m: &Manifold) -> f64 {
        self.continuity_bound.unwrap_or(m.inj() / 8.0)
    }
}

/// A bound of the form `measured <= bound + tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub bound: f64,
    pub measured: f64,
    pub tol: f64,
    pub satisfied: bool,
}

impl BoundCheck {
    pub fn new(name: &str, bound: f64, measured: f64, tol: f64) -> Self {
        Self { name: name.into(), bound, measured, tol, satisfied: measured <= bound + tol }
    }
}

/// Where the stationary candidate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateSource {
    /// `shorten` of the given member converged. `pulled` is false when the
    /// member was taken from the family before pull-down.
    Member { index: usize, pulled: bool },
    /// Newton polish from the nearest-to-stationary snapshot of the member.
    Refined { index: usize, pulled: bool },
    /// A contraction inside the family builder stopped at a stationary cycle.
    Builder,
    /// The shortened starting loop (non-simply-connected check).
    Loop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxReport {
    /// Minimum over rounds (including the initial family) of the longest member.
    pub width_estimate: f64,
    pub initial_max: f64,
    /// Longest member length before round 1 and after every round.
    pub round_max: Vec<f64>,
    /// Index of the longest member of the final family.
    pub achiever: usize,
    pub stationary_candidate: Option<ShortenOutcome>,
    pub candidate_source: Option<CandidateSource>,
    /// Primary bound check.
    pub bound_checked: Option<BoundCheck>,
    /// Every bound checked.
    pub bounds: Vec<BoundCheck>,
    pub max_gap: f64,
    pub continuity_bound: f64,
    /// Final family.
    pub family: CycleFamily,
}

impl MinMaxReport {
    pub fn certificate(&self) -> Option<&GeodesicNet> {
        self.stationary_candidate.as_ref().and_then(ShortenOutcome::net)
    }

    /// Round maxima never increase by more than `tol`.
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.round_max.windows(2).all(|w| w[1] <= w[0] + tol)
    }
}

/// Failures of the sweepout layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SweepoutError {
    #[error(transparent)]
    Geometry(#[from] Error),
    /// A face contraction stopped at a stationary cycle instead of collapsing.
    #[error("face {face} contracted to a stationary cycle of mass {}", outcome.net().map_or(0.0, |n| n.total_mass))]
    ShortCycleFound { face: usize, outcome: ShortenOutcome },
    #[error("shortening did not converge (face {face:?})")]
    NonConvergence { face: Option<usize> },
}

impl From<crate::shortening::ShortenError> for SweepoutError {
    fn from(e: crate::shortening::ShortenError) -> Self {
        match e {
            crate::shortening::ShortenError::Geometry(g) => Self::Geometry(g),
            crate::shortening::ShortenError::NonConvergence { .. } => Self::NonConvergence { face: None },
        }
    }
}

#[cfg(test)]
mod tests;
