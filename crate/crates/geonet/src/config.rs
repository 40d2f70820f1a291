//! Experiment configuration: one TOML file, versioned, unknown keys rejected.
//!
//! ```toml
//! schema_version = 1
//! command = "verify-t1q2"
//! seed = 7
//!
//! [manifold]
//! kind = "ellipsoid"
//! axes = [1.0, 1.05, 1.1]
//!
//! [tolerances]
//! eps_stationary = 1e-5
//! ```

use std::path::{Path, PathBuf};

use geonet_core::{FlowConfig, Manifold, SweepConfig};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("schema_version {found} is not supported (expected {SCHEMA_VERSION})")]
    Schema { found: u32 },
    #[error("{field}: {message}")]
    Field { field: &'static str, message: String },
}

fn field(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Shorten,
    Minmax,
    VerifyT1q2,
    VerifyPi1,
    Gradcheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Shorten => "shorten",
            Self::Minmax => "minmax",
            Self::VerifyT1q2 => "verify-t1q2",
            Self::VerifyPi1 => "verify-pi1",
            Self::Gradcheck => "gradcheck",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManifoldSpec {
    RoundSphere {
        #[serde(default = "one")]
        radius: f64,
        inj: Option<f64>,
        diam: Option<f64>,
    },
    Ellipsoid {
        axes: [f64; 3],
        inj: Option<f64>,
        diam: Option<f64>,
    },
    FlatTorus {
        #[serde(default = "unit_x")]
        b1: [f64; 2],
        #[serde(default = "unit_y")]
        b2: [f64; 2],
        inj: Option<f64>,
        diam: Option<f64>,
    },
    TorusOfRevolution {
        major: f64,
        minor: f64,
        inj: Option<f64>,
        diam: Option<f64>,
    },
    /// `inj` and `diam` default to a curvature-scan estimate.
    ConformalSphere {
        #[serde(default = "one")]
        radius: f64,
        coefficients: Vec<f64>,
        inj: Option<f64>,
        diam: Option<f64>,
    },
}

fn one() -> f64 {
    1.0
}

fn unit_x() -> [f64; 2] {
    [1.0, 0.0]
}

fn unit_y() -> [f64; 2] {
    [0.0, 1.0]
}

impl Default for ManifoldSpec {
    fn default() -> Self {
        Self::RoundSphere { radius: 1.0, inj: None, diam: None }
    }
}

impl ManifoldSpec {
    pub fn build(&self) -> Result<Manifold, ConfigError> {
        let bad = |e: geonet_core::Error| field("manifold", e.to_string());
        let (m, inj, diam) = match self {
            Self::RoundSphere { radius, inj, diam } => (Manifold::round_sphere(*radius), inj, diam),
            Self::Ellipsoid { axes, inj, diam } => (Manifold::ellipsoid(axes[0], axes[1], axes[2]), inj, diam),
            Self::FlatTorus { b1, b2, inj, diam } => (Manifold::flat_torus(*b1, *b2), inj, diam),
            Self::TorusOfRevolution { major, minor, inj, diam } => {
                (Manifold::torus_of_revolution(*major, *minor), inj, diam)
            }
            Self::ConformalSphere { radius, coefficients, inj, diam } => {
                let (ei, ed) = Manifold::conformal_sphere_estimates(*radius, coefficients);
                let m = Manifold::conformal_sphere(*radius, coefficients.clone(), inj.unwrap_or(ei), diam.unwrap_or(ed))
                    .map_err(bad)?;
                return Ok(m);
            }
        };
        let m = m.map_err(bad)?;
        if inj.is_none() && diam.is_none() {
            return Ok(m);
        }
        let (i, d) = (inj.unwrap_or(m.inj()), diam.unwrap_or(m.diam()));
        m.with_constants(i, d).map_err(bad)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub eps_stationary: f64,
    /// Absolute; default `1e-4 * diam`.
    pub eps_collapse: Option<f64>,
    /// Absolute; default `1e-6 * diam`.
    pub merge_tol: Option<f64>,
    /// Bound-check slack relative to the diameter.
    pub tol_bound: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { eps_stationary: 1e-5, eps_collapse: None, merge_tol: None, tol_bound: 1e-2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowSection {
    pub t_star: Option<f64>,
    pub max_outer_iters: usize,
    pub steps_per_batch: usize,
    /// Segments per chain; `None` means `choose_n`.
    pub n: Option<usize>,
    pub refine_below: Option<f64>,
    pub merge_and_restart: bool,
}

impl Default for FlowSection {
    fn default() -> Self {
        let f = FlowConfig::default();
        Self {
            t_star: f.t_star,
            max_outer_iters: f.max_outer_iters,
            steps_per_batch: f.steps_per_batch,
            n: f.n,
            refine_below: f.refine_below,
            merge_and_restart: f.merge_and_restart,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Latitude,
    Tetrahedron,
    TwoDisc,
    ParallelLoop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilySection {
    pub kind: FamilyKind,
    /// Members of a latitude or loop family.
    pub slices: usize,
    pub rounds: usize,
    pub candidate_attempts: usize,
    pub fps_candidates: usize,
    /// Absolute; default `inj / 8`.
    pub continuity_bound: Option<f64>,
    /// Tetrahedron vertices (ambient coordinates); farthest-point sampling when absent.
    pub vertices: Option<[[f64; 3]; 4]>,
    /// Lattice class of a loop family or of the `verify-pi1` loop.
    pub class: Option<[i64; 2]>,
}

impl Default for FamilySection {
    fn default() -> Self {
        let s = SweepConfig::default();
        Self {
            kind: FamilyKind::Latitude,
            slices: 65,
            rounds: s.rounds,
            candidate_attempts: s.candidate_attempts,
            fps_candidates: s.fps_candidates,
            continuity_bound: None,
            vertices: None,
            class: None,
        }
    }
}

/// Input of `shorten`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum CycleSpec {
    /// Explicit chains of points (3 ambient or 2 chart coordinates). The
    /// type is read off the coincidences at `merge_tol`.
    Points { chains: Vec<Vec<Vec<f64>>> },
    /// A closed loop along the lattice vector of `class` with `n` vertices,
    /// each displaced by a random amount up to `perturb * inj`.
    Wrap {
        class: [i64; 2],
        n: usize,
        #[serde(default)]
        perturb: f64,
    },
    /// `random_cycle` with `k` chains of `n` segments within `radius * inj`.
    Random { k: usize, n: usize, radius: f64 },
}

impl Default for CycleSpec {
    fn default() -> Self {
        Self::Wrap { class: [1, 0], n: 5, perturb: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradcheckSection {
    pub cycles: usize,
    pub max_k: usize,
    pub max_n: usize,
    /// Cycle radius relative to `inj`.
    pub radius: f64,
}

impl Default for GradcheckSection {
    fn default() -> Self {
        Self { cycles: 50, max_k: 3, max_n: 6, radius: 0.125 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    Auto,
    Orthographic,
    ChartPlane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub svg: bool,
    pub projection: Projection,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), svg: false, projection: Projection::Auto }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub manifold: ManifoldSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub flow: FlowSection,
    #[serde(default)]
    pub family: FamilySection,
    #[serde(default)]
    pub cycle: CycleSpec,
    #[serde(default)]
    pub gradcheck: GradcheckSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: None,
            seed: 0,
            manifold: ManifoldSpec::default(),
            tolerances: Tolerances::default(),
            flow: FlowSection::default(),
            family: FamilySection::default(),
            cycle: CycleSpec::default(),
            gradcheck: GradcheckSection::default(),
            output: OutputSection::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Schema { found: self.schema_version });
        }
        let pos = |x: f64| x.is_finite() && x > 0.0;
        let t = &self.tolerances;
        if !pos(t.eps_stationary) {
            return Err(field("tolerances.eps_stationary", "must be positive"));
        }
        if !t.eps_collapse.is_none_or(pos) {
            return Err(field("tolerances.eps_collapse", "must be positive"));
        }
        if !t.merge_tol.is_none_or(pos) {
            return Err(field("tolerances.merge_tol", "must be positive"));
        }
        if !pos(t.tol_bound) {
            return Err(field("tolerances.tol_bound", "must be positive"));
        }
        let f = &self.flow;
        if !f.t_star.is_none_or(pos) {
            return Err(field("flow.t_star", "must be positive"));
        }
        if !f.refine_below.is_none_or(pos) {
            return Err(field("flow.refine_below", "must be positive"));
        }
        if f.max_outer_iters == 0 || f.steps_per_batch == 0 || f.n == Some(0) {
            return Err(field("flow", "max_outer_iters, steps_per_batch and n must be positive"));
        }
        let fam = &self.family;
        if fam.slices < 2 {
            return Err(field("family.slices", "needs at least 2 members"));
        }
        if fam.candidate_attempts == 0 || fam.fps_candidates < 4 {
            return Err(field("family", "candidate_attempts must be positive and fps_candidates at least 4"));
        }
        if !fam.continuity_bound.is_none_or(pos) {
            return Err(field("family.continuity_bound", "must be positive"));
        }
        if fam.class == Some([0, 0]) {
            return Err(field("family.class", "must be a nonzero lattice class"));
        }
        match &self.cycle {
            CycleSpec::Points { chains } => {
                if chains.is_empty() || chains.iter().any(|c| c.len() < 2) {
                    return Err(field("cycle.chains", "needs at least one chain of two or more points"));
                }
                if chains.iter().flatten().any(|p| p.len() != 2 && p.len() != 3) {
                    return Err(field("cycle.chains", "points have 2 (chart) or 3 (ambient) coordinates"));
                }
            }
            CycleSpec::Wrap { class, n, perturb } => {
                if *class == [0, 0] || *n < 2 || !(*perturb >= 0.0) {
                    return Err(field("cycle", "wrap needs a nonzero class, n >= 2 and perturb >= 0"));
                }
            }
            CycleSpec::Random { k, n, radius } => {
                if *k == 0 || *n < 2 || !pos(*radius) {
                    return Err(field("cycle", "random needs k >= 1, n >= 2 and radius > 0"));
                }
            }
        }
        let g = &self.gradcheck;
        if g.cycles == 0 || g.max_k == 0 || g.max_n < 2 || !pos(g.radius) {
            return Err(field("gradcheck", "cycles and max_k positive, max_n >= 2, radius positive"));
        }
        self.manifold.build()?;
        Ok(())
    }

    pub fn flow_config(&self) -> FlowConfig {
        FlowConfig {
            eps_stationary: self.tolerances.eps_stationary,
            eps_collapse: self.tolerances.eps_collapse,
            merge_tol: self.tolerances.merge_tol,
            t_star: self.flow.t_star,
            max_outer_iters: self.flow.max_outer_iters,
            steps_per_batch: self.flow.steps_per_batch,
            n: self.flow.n,
            refine_below: self.flow.refine_below,
            merge_and_restart: self.flow.merge_and_restart,
            ..FlowConfig::default()
        }
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            flow: self.flow_config(),
            rounds: self.family.rounds,
            continuity_bound: self.family.continuity_bound,
            tol_bound_rel: self.tolerances.tol_bound,
            candidate_attempts: self.family.candidate_attempts,
            fps_candidates: self.family.fps_candidates,
        }
    }
}
