//! JSON and CSV output formats. Field names are stable; see README.md.

use std::fmt::Write as _;

use geonet_core::shortening::TraceRow;
use geonet_core::sweepout::CandidateSource;
use geonet_core::{CycleFamily, GeodesicNet, Manifold, MinMaxReport, Point, PolygonalCycle, ShortenOutcome};
use serde::Serialize;

use crate::config::ExperimentConfig;

/// Coordinates as written to files: chart `(x, y)` on tori, ambient
/// `(x, y, z)` otherwise.
pub fn coords(m: &Manifold, p: &Point) -> Vec<f64> {
    let c = p.coords;
    if m.lattice().is_some() { vec![c.x, c.y] } else { vec![c.x, c.y, c.z] }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeJson {
    pub v_from: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_to: Option<usize>,
    #[serde(rename = "loop", skip_serializing_if = "std::ops::Not::not")]
    pub is_loop: bool,
    pub multiplicity: u32,
    pub length: f64,
    pub polyline: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetJson {
    pub manifold: String,
    pub vertices: Vec<Vec<f64>>,
    pub edges: Vec<EdgeJson>,
    pub residual: f64,
    pub total_mass: f64,
}

impl NetJson {
    pub fn new(m: &Manifold, net: &GeodesicNet) -> Self {
        Self {
            manifold: m.name().into(),
            vertices: net.vertices.iter().map(|p| coords(m, p)).collect(),
            edges: net
                .edges
                .iter()
                .map(|e| EdgeJson {
                    v_from: e.from,
                    v_to: (!e.is_loop()).then_some(e.to),
                    is_loop: e.is_loop(),
                    multiplicity: e.multiplicity,
                    length: e.length,
                    polyline: e.polyline().iter().map(|p| coords(m, p)).collect(),
                })
                .collect(),
            residual: net.residual,
            total_mass: net.total_mass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifoldJson {
    pub name: String,
    pub inj: f64,
    pub diam: f64,
}

impl ManifoldJson {
    pub fn new(m: &Manifold) -> Self {
        Self { name: m.name().into(), inj: m.inj(), diam: m.diam() }
    }
}

/// Result of one `shorten` run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShortenJson {
    /// `stationary`, `collapsed` or `non_convergence`.
    pub result: String,
    pub initial_length: f64,
    pub final_length: f64,
    pub final_norm_sq: f64,
    pub chains: usize,
    pub segments_per_chain: usize,
    pub blocks: usize,
    pub trace_rows: usize,
    pub net: Option<NetJson>,
    pub trace_ref: String,
}

impl ShortenJson {
    pub fn new(m: &Manifold, initial: &PolygonalCycle, out: Result<&ShortenOutcome, (&[TraceRow], &PolygonalCycle)>) -> Self {
        let (result, trace, cycle, net) = match out {
            Ok(o) => {
                let r = if o.is_collapsed() { "collapsed" } else { "stationary" };
                (r, o.trace.as_slice(), &o.cycle, o.net().map(|n| NetJson::new(m, n)))
            }
            Err((trace, cycle)) => ("non_convergence", trace, cycle, None),
        };
        Self {
            result: result.into(),
            initial_length: geonet_core::cycle_length(initial),
            final_length: geonet_core::cycle_length(cycle),
            final_norm_sq: trace.last().map_or(f64::NAN, |r| r.norm_sq),
            chains: cycle.k(),
            segments_per_chain: cycle.n(),
            blocks: cycle.cycle_type().num_blocks(),
            trace_rows: trace.len(),
            net,
            trace_ref: "trace.csv".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateJson {
    /// `member`, `refined`, `builder` or `loop`.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    /// Whether the member came from the pulled-down family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulled: Option<bool>,
}

impl From<CandidateSource> for CandidateJson {
    fn from(s: CandidateSource) -> Self {
        let (kind, index, pulled) = match s {
            CandidateSource::Member { index, pulled } => ("member", Some(index), Some(pulled)),
            CandidateSource::Refined { index, pulled } => ("refined", Some(index), Some(pulled)),
            CandidateSource::Builder => ("builder", None, None),
            CandidateSource::Loop => ("loop", None, None),
        };
        Self { kind: kind.into(), index, pulled }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundJson {
    pub name: String,
    pub bound: f64,
    pub measured: f64,
    pub tol: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinMaxJson {
    pub provenance: String,
    pub members: usize,
    pub marks: Vec<(String, usize)>,
    pub width_estimate: f64,
    pub initial_max: f64,
    pub round_max: Vec<f64>,
    pub achiever: usize,
    pub max_gap: f64,
    pub continuity_bound: f64,
    pub bound_checked: Option<BoundJson>,
    pub candidate_source: Option<CandidateJson>,
    /// `stationary`, `collapsed` or absent.
    pub candidate_result: Option<String>,
    pub stationary_candidate: Option<NetJson>,
    pub trace_ref: String,
    pub family_ref: String,
}

impl MinMaxJson {
    pub fn new(m: &Manifold, rep: &MinMaxReport) -> Self {
        let fam = &rep.family;
        Self {
            provenance: fam.provenance.name().into(),
            members: fam.len(),
            marks: fam.marks.clone(),
            width_estimate: rep.width_estimate,
            initial_max: rep.initial_max,
            round_max: rep.round_max.clone(),
            achiever: rep.achiever,
            max_gap: rep.max_gap,
            continuity_bound: rep.continuity_bound,
            bound_checked: rep.bound_checked.as_ref().map(|b| BoundJson {
                name: b.name.clone(),
                bound: b.bound,
                measured: b.measured,
                tol: b.tol,
                satisfied: b.satisfied,
            }),
            candidate_source: rep.candidate_source.map(Into::into),
            candidate_result: rep
                .stationary_candidate
                .as_ref()
                .map(|o| if o.is_collapsed() { "collapsed".into() } else { "stationary".into() }),
            stationary_candidate: rep.certificate().map(|n| NetJson::new(m, n)),
            trace_ref: "trace.csv".into(),
            family_ref: "family.json".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradcheckJson {
    pub cycles: usize,
    pub max_identity_error: f64,
    pub max_fd_error: f64,
    pub min_norm_sq: f64,
    /// Step sizes tried, relative to `inj / |v|`; the best one counts.
    pub fd_steps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Shorten(ShortenJson),
    Minmax(MinMaxJson),
    Gradcheck(GradcheckJson),
}

/// One row of the bound table: `measured <= bound + tol`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub name: String,
    /// The bound with the manifold's constants substituted.
    pub formula: String,
    pub bound: f64,
    pub measured: f64,
    pub tol: f64,
    pub pass: bool,
}

impl BoundRow {
    pub fn new(name: &str, formula: String, bound: f64, measured: f64, tol: f64) -> Self {
        Self { name: name.into(), formula, bound, measured, tol, pass: measured <= bound + tol }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    BoundFailure,
    NonConvergence,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Pass => 0,
            Self::BoundFailure => 1,
            Self::NonConvergence => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub config: ExperimentConfig,
    pub manifold: ManifoldJson,
    pub outcome: Outcome,
    pub bounds: Vec<BoundRow>,
    pub status: Status,
    /// Seconds; the only field that varies between identical runs.
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The report with the wall time zeroed, for reproducibility checks.
    pub fn to_json_untimed(&self) -> String {
        Self { wall_time_s: 0.0, ..self.clone() }.to_json()
    }
}

pub fn trace_csv(trace: &[TraceRow]) -> String {
    let mut s = String::from("iteration,length,norm_sq,step_dt,event\n");
    for r in trace {
        writeln!(s, "{},{},{},{},{}", r.iteration, r.length, r.norm_sq, r.step_dt, r.event.name()).unwrap();
    }
    s
}

#[derive(Serialize)]
struct MemberJson {
    t: f64,
    length: f64,
    chains: Vec<Vec<Vec<f64>>>,
}

/// Family export: one entry per member with its parameter and chains.
pub fn family_json(m: &Manifold, fam: &CycleFamily) -> String {
    let members: Vec<MemberJson> = fam
        .members
        .iter()
        .enumerate()
        .map(|(i, c)| MemberJson {
            t: fam.parameter(i),
            length: geonet_core::cycle_length(c),
            chains: c.vertices().iter().map(|v| v.iter().map(|p| coords(m, p)).collect()).collect(),
        })
        .collect();
    let mut s = serde_json::to_string(&members).expect("family serializes");
    s.push('\n');
    s
}

pub fn net_json(m: &Manifold, net: &GeodesicNet) -> String {
    let mut s = serde_json::to_string_pretty(&NetJson::new(m, net)).expect("net serializes");
    s.push('\n');
    s
}
