//! Experiment dispatch and output files.

use std::path::Path;
use std::time::Instant;

use geonet_core::math::Vec3;
use geonet_core::shortening::{displaced_length, TraceRow};
use geonet_core::sweepout::{farthest_point_vertices, parallel_loop_family};
use geonet_core::{
    deformation_vector, first_variation, latitude_sweepout, minmax, random_cycle, shorten,
    tetrahedron_sweepout, two_disc_refined_sweepout, verify_nonsimply_connected, verify_theorem1_q2, CycleFamily,
    GeodesicNet, Manifold, MinMaxReport, Point, PolygonalCycle, ShortenError, SweepoutError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Command, ConfigError, CycleSpec, ExperimentConfig, FamilyKind};
use crate::exec::Rayon;
use crate::report::{
    family_json, net_json, trace_csv, BoundRow, GradcheckJson, ManifoldJson, MinMaxJson, Outcome, RunReport,
    ShortenJson, Status,
};
use crate::svg::{render_svg, Drawing, Projection};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// Bad configuration or a command that does not fit the manifold.
    #[error("invalid configuration: {0}")]
    Usage(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Numeric(_) => 3,
            Self::Io(_) => 4,
        }
    }
}

fn usage(field: &'static str, message: impl Into<String>) -> RunError {
    RunError::Usage(ConfigError::Field { field, message: message.into() })
}

fn numeric(e: impl std::fmt::Display) -> RunError {
    RunError::Numeric(e.to_string())
}

/// Everything a run produces besides the report.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub manifold: Manifold,
    pub trace: Vec<TraceRow>,
    pub net: Option<GeodesicNet>,
    pub family: Option<CycleFamily>,
}

#[derive(Debug, Clone)]
pub struct Run {
    pub report: RunReport,
    pub artifacts: Artifacts,
}

impl Run {
    /// Write `report.json`, `trace.csv`, `net.json` (when a net exists),
    /// `family.json` (min-max runs) and optionally `net.svg` into `dir`.
    pub fn write(&self, dir: &Path, svg: Option<Projection>) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let a = &self.artifacts;
        std::fs::write(dir.join("report.json"), self.report.to_json())?;
        std::fs::write(dir.join("trace.csv"), trace_csv(&a.trace))?;
        if let Some(net) = &a.net {
            std::fs::write(dir.join("net.json"), net_json(&a.manifold, net))?;
        }
        if let Some(fam) = &a.family {
            std::fs::write(dir.join("family.json"), family_json(&a.manifold, fam))?;
        }
        if let Some(p) = svg {
            let empty = GeodesicNet { vertices: Vec::new(), edges: Vec::new(), residual: 0.0, total_mass: 0.0 };
            let net = a.net.as_ref().unwrap_or(&empty);
            std::fs::write(dir.join("net.svg"), render_svg(&a.manifold, Drawing::Net(net), p))?;
        }
        Ok(())
    }
}

/// Run `command` (or the config's own command) without touching the file
/// system. All randomness comes from `cfg.seed`.
pub fn execute(cfg: &ExperimentConfig, command: Option<Command>) -> Result<Run, RunError> {
    cfg.validate()?;
    let command = command
        .or(cfg.command)
        .ok_or_else(|| usage("command", "no command given on the command line or in the config"))?;
    let mut cfg = cfg.clone();
    cfg.command = Some(command);
    let m = cfg.manifold.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let start = Instant::now();
    let (outcome, bounds, status, artifacts) = match command {
        Command::Shorten => run_shorten(&cfg, &m, &mut rng)?,
        Command::Minmax => run_minmax(&cfg, &m, &mut rng)?,
        Command::VerifyT1q2 => run_t1q2(&cfg, &m, &mut rng)?,
        Command::VerifyPi1 => run_pi1(&cfg, &m, &mut rng)?,
        Command::Gradcheck => run_gradcheck(&cfg, &m, &mut rng)?,
    };
    let status = if status != Status::Pass {
        status
    } else if bounds.iter().all(|b| b.pass) {
        Status::Pass
    } else {
        Status::BoundFailure
    };
    let report = RunReport {
        schema_version: crate::config::SCHEMA_VERSION,
        command: command.name().into(),
        config: cfg,
        manifold: ManifoldJson::new(&m),
        outcome,
        bounds,
        status,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(Run { report, artifacts })
}

/// [`execute`] and write the outputs to `cfg.output.dir`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    let r = execute(cfg, None)?;
    let svg = cfg.output.svg.then(|| projection(cfg, &r.artifacts.manifold));
    r.write(&cfg.output.dir, svg)?;
    Ok(r.report)
}

pub fn projection(cfg: &ExperimentConfig, m: &Manifold) -> Projection {
    match cfg.output.projection {
        crate::config::Projection::Auto => Projection::default_for(m),
        crate::config::Projection::Orthographic => Projection::Orthographic,
        crate::config::Projection::ChartPlane => Projection::ChartPlane,
    }
}

type Parts = (Outcome, Vec<BoundRow>, Status, Artifacts);

fn tol(cfg: &ExperimentConfig, m: &Manifold) -> f64 {
    cfg.tolerances.tol_bound * m.diam()
}

fn bound_2d(cfg: &ExperimentConfig, m: &Manifold, measured: f64) -> BoundRow {
    BoundRow::new("2d", format!("2 * d = 2 * {}", m.diam()), 2.0 * m.diam(), measured, tol(cfg, m))
}

fn bound_4d(cfg: &ExperimentConfig, m: &Manifold, name: &str, measured: f64) -> BoundRow {
    BoundRow::new(name, format!("4 * d = 4 * {}", m.diam()), 4.0 * m.diam(), measured, tol(cfg, m))
}

fn input_point(m: &Manifold, c: &[f64]) -> Result<Point, RunError> {
    let torus = m.lattice().is_some();
    match (torus, c.len()) {
        (true, 2) => Ok(m.point(Vec3::new(c[0], c[1], 0.0))),
        (false, 3) => Ok(m.point_in_direction(Vec3::new(c[0], c[1], c[2]))),
        _ => Err(usage("cycle.chains", format!("{} points need {} coordinates", m.name(), if torus { 2 } else { 3 }))),
    }
}

fn input_cycle(cfg: &ExperimentConfig, m: &Manifold, rng: &mut ChaCha8Rng) -> Result<PolygonalCycle, RunError> {
    let merge_tol = cfg.flow_config().merge_tol_for(m);
    match &cfg.cycle {
        CycleSpec::Points { chains } => {
            let chains = chains
                .iter()
                .map(|c| c.iter().map(|p| input_point(m, p)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let lens: Vec<usize> = chains.iter().map(Vec::len).collect();
            if lens.iter().any(|&l| l != lens[0]) {
                return Err(usage("cycle.chains", "every chain needs the same number of points"));
            }
            PolygonalCycle::from_vertices(m, chains, merge_tol).map_err(|e| usage("cycle.chains", e.to_string()))
        }
        CycleSpec::Wrap { class, n, perturb } => {
            let l = m.lattice().ok_or_else(|| usage("cycle", "a wrap loop needs a torus"))?;
            let w = l.vector(class[0], class[1]);
            let origin = m.random_point(rng).coords;
            let mut pts: Vec<Point> = (0..*n)
                .map(|j| {
                    let p = m.point(origin + w * (j as f64 / *n as f64));
                    let r = perturb * m.inj() * rng.gen::<f64>();
                    let v = m.random_tangent(rng, &p, r);
                    m.point(p.coords + v.components)
                })
                .collect();
            pts.push(pts[0]);
            PolygonalCycle::from_vertices(m, vec![pts], merge_tol).map_err(numeric)
        }
        CycleSpec::Random { k, n, radius } => random_cycle(m, rng, *k, *n, radius * m.inj()).map_err(numeric),
    }
}

fn run_shorten(cfg: &ExperimentConfig, m: &Manifold, rng: &mut ChaCha8Rng) -> Result<Parts, RunError> {
    let c = input_cycle(cfg, m, rng)?;
    let flow = cfg.flow_config();
    let wraps = matches!(cfg.cycle, CycleSpec::Wrap { .. });
    match shorten(m, &c, &flow) {
        Ok(out) => {
            let json = ShortenJson::new(m, &c, Ok(&out));
            let mut bounds = Vec::new();
            if let (true, Some(net)) = (wraps, out.net()) {
                bounds.push(bound_2d(cfg, m, net.total_mass));
            }
            let status = if wraps && out.is_collapsed() { Status::NonConvergence } else { Status::Pass };
            let artifacts = Artifacts { manifold: m.clone(), trace: out.trace.clone(), net: out.net().cloned(), family: None };
            Ok((Outcome::Shorten(json), bounds, status, artifacts))
        }
        Err(ShortenError::NonConvergence { trace, cycle, .. }) => {
            let json = ShortenJson::new(m, &c, Err((&trace, &cycle)));
            let artifacts = Artifacts { manifold: m.clone(), trace, net: None, family: None };
            Ok((Outcome::Shorten(json), Vec::new(), Status::NonConvergence, artifacts))
        }
        Err(ShortenError::Geometry(e)) => Err(numeric(e)),
    }
}

fn vertices(cfg: &ExperimentConfig, m: &Manifold, rng: &mut ChaCha8Rng) -> Result<[Point; 4], RunError> {
    match cfg.family.vertices {
        Some(v) => {
            let pts = v.map(|c| if m.lattice().is_some() { m.point(Vec3::new(c[0], c[1], 0.0)) } else { m.point_in_direction(Vec3::from(c)) });
            Ok(pts)
        }
        None => Ok(farthest_point_vertices(m, rng, cfg.family.fps_candidates)),
    }
}

fn sweep_err(e: SweepoutError) -> RunError {
    match e {
        SweepoutError::Geometry(geonet_core::Error::InvalidParameter(s)) => usage("family", s),
        e => numeric(e),
    }
}

/// Report parts shared by the min-max commands. Without a certificate the
/// run only passes when the family swept out nothing.
fn minmax_parts(cfg: &ExperimentConfig, m: &Manifold, rep: MinMaxReport, mut bounds: Vec<BoundRow>) -> Parts {
    let json = MinMaxJson::new(m, &rep);
    let rise = rep.round_max.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    bounds.push(BoundRow::new("round_max_monotone", "max rise of the per-round maximum <= 0".into(), 0.0, rise, 1e-9 * m.diam()));
    let eps = cfg.flow_config().eps_collapse_for(m);
    let status = if rep.certificate().is_none() && rep.width_estimate > eps {
        Status::NonConvergence
    } else {
        Status::Pass
    };
    let cand = rep.stationary_candidate.as_ref();
    let artifacts = Artifacts {
        manifold: m.clone(),
        trace: cand.map(|o| o.trace.clone()).unwrap_or_default(),
        net: rep.certificate().cloned(),
        family: Some(rep.family),
    };
    (Outcome::Minmax(json), bounds, status, artifacts)
}

fn run_minmax(cfg: &ExperimentConfig, m: &Manifold, rng: &mut ChaCha8Rng) -> Result<Parts, RunError> {
    let sweep = cfg.sweep_config();
    let fam = match cfg.family.kind {
        FamilyKind::Latitude => latitude_sweepout(m, cfg.family.slices).map_err(|e| usage("family.kind", e.to_string()))?,
        FamilyKind::ParallelLoop => {
            let c = cfg.family.class.unwrap_or([1, 0]);
            parallel_loop_family(m, (c[0], c[1]), cfg.family.slices).map_err(|e| usage("family.kind", e.to_string()))?
        }
        FamilyKind::Tetrahedron => tetrahedron_sweepout(m, &vertices(cfg, m, rng)?, &sweep).map_err(sweep_err)?,
        FamilyKind::TwoDisc => two_disc_refined_sweepout(m, &vertices(cfg, m, rng)?, &sweep).map_err(sweep_err)?,
    };
    let rep = minmax(m, &fam, &sweep, &Rayon).map_err(sweep_err)?;
    let mut bounds = Vec::new();
    if cfg.family.kind == FamilyKind::Tetrahedron {
        bounds.push(BoundRow::new("8d", format!("8 * d = 8 * {}", m.diam()), 8.0 * m.diam(), rep.initial_max, tol(cfg, m)));
    }
    // the plain four-face family only carries the 8d bound
    if m.is_sphere_like() && cfg.family.kind != FamilyKind::Tetrahedron {
        bounds.push(bound_4d(cfg, m, "4d", rep.width_estimate));
        if let Some(net) = rep.certificate() {
            bounds.push(bound_4d(cfg, m, "certificate_4d", net.total_mass));
        }
    } else if cfg.family.kind == FamilyKind::ParallelLoop {
        bounds.push(bound_2d(cfg, m, rep.width_estimate));
    }
    Ok(minmax_parts(cfg, m, rep, bounds))
}

fn run_t1q2(cfg: &ExperimentConfig, m: &Manifold, rng: &mut ChaCha8Rng) -> Result<Parts, RunError> {
    if !m.is_sphere_like() {
        return Err(usage("manifold.kind", format!("verify-t1q2 needs a sphere-like surface, got {}", m.name())));
    }
    let v = match cfg.family.vertices {
        Some(_) => Some(vertices(cfg, m, rng)?),
        None => None,
    };
    let rep = verify_theorem1_q2(m, v, &cfg.sweep_config(), rng, &Rayon).map_err(sweep_err)?;
    let mut bounds = vec![bound_4d(cfg, m, "4d", rep.width_estimate)];
    if let Some(net) = rep.certificate() {
        bounds.push(bound_4d(cfg, m, "certificate_4d", net.total_mass));
    }
    Ok(minmax_parts(cfg, m, rep, bounds))
}

fn run_pi1(cfg: &ExperimentConfig, m: &Manifold, rng: &mut ChaCha8Rng) -> Result<Parts, RunError> {
    if m.lattice().is_none() {
        return Err(usage("manifold.kind", format!("verify-pi1 needs a torus, got {}", m.name())));
    }
    let class = cfg.family.class.map(|c| (c[0], c[1]));
    let rep = verify_nonsimply_connected(m, class, &cfg.sweep_config(), rng).map_err(sweep_err)?;
    let bounds = match rep.certificate() {
        Some(net) => vec![bound_2d(cfg, m, net.total_mass)],
        None => Vec::new(),
    };
    let found = !bounds.is_empty();
    let mut parts = minmax_parts(cfg, m, rep, bounds);
    // the loop is nontrivial, so collapsing means the check failed
    if !found {
        parts.2 = Status::NonConvergence;
    }
    Ok(parts)
}

/// Step sizes of the central differences, relative to `inj / |v|`.
pub const FD_STEPS: [f64; 4] = [1e-3, 1e-4, 1e-5, 1e-6];

/// Relative errors of the first-variation identity and of the best central
/// difference for one cycle, plus `|v|^2`.
pub fn gradcheck_cycle(m: &Manifold, c: &PolygonalCycle) -> Result<(f64, f64, f64), RunError> {
    let v = deformation_vector(m, c);
    let ns = v.norm_sq;
    if !(ns > 0.0) {
        return Ok((0.0, 0.0, ns));
    }
    let identity = (first_variation(m, c, &v.field) + ns).abs() / ns;
    let mut fd = f64::INFINITY;
    for h in FD_STEPS {
        let h = h * m.inj() / v.norm();
        let plus = displaced_length(m, c, &v.field, h).map_err(numeric)?;
        let minus = displaced_length(m, c, &v.field, -h).map_err(numeric)?;
        fd = fd.min(((plus - minus) / (2.0 * h) + ns).abs() / ns);
    }
    Ok((identity, fd, ns))
}

fn run_gradcheck(cfg: &ExperimentConfig, m: &Manifold, rng: &mut ChaCha8Rng) -> Result<Parts, RunError> {
    let g = &cfg.gradcheck;
    let (mut id_max, mut fd_max, mut ns_min) = (0.0f64, 0.0f64, f64::INFINITY);
    for _ in 0..g.cycles {
        let k = rng.gen_range(1..=g.max_k);
        let n = rng.gen_range(2..=g.max_n);
        let c = random_cycle(m, rng, k, n, g.radius * m.inj()).map_err(numeric)?;
        let (id, fd, ns) = gradcheck_cycle(m, &c)?;
        id_max = id_max.max(id);
        fd_max = fd_max.max(fd);
        ns_min = ns_min.min(ns);
    }
    let json = GradcheckJson {
        cycles: g.cycles,
        max_identity_error: id_max,
        max_fd_error: fd_max,
        min_norm_sq: ns_min,
        fd_steps: FD_STEPS.to_vec(),
    };
    let bounds = vec![
        BoundRow::new("first_variation_identity", "|dL(v) + |v|^2| / |v|^2 <= 1e-6".into(), 1e-6, id_max, 0.0),
        BoundRow::new("finite_difference", "|fd - (-|v|^2)| / |v|^2 <= 1e-4".into(), 1e-4, fd_max, 0.0),
    ];
    let artifacts = Artifacts { manifold: m.clone(), trace: Vec::new(), net: None, family: None };
    Ok((Outcome::Gradcheck(json), bounds, Status::Pass, artifacts))
}
