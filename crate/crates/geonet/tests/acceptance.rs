//! One line per acceptance criterion; exits nonzero if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use geonet::config::{CycleSpec, FamilyKind, ManifoldSpec};
use geonet::report::Outcome;
use geonet::run::gradcheck_cycle;
use geonet::{execute, Command, ExperimentConfig, Status};
use geonet_core::math::{orthogonal_unit, Vec3};
use geonet_core::sweepout::{edge_sign_table, farthest_point_vertices};
use geonet_core::{
    birkhoff_step, build_cycle, choose_n, cycle_length, deformation_vector, random_cycle, shorten,
    tetrahedron_sweepout, CycleType, FlowConfig, Manifold, Point, PolygonalCycle, SweepConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Check {
    if ok { Ok(msg) } else { Err(msg) }
}

const CONFORMAL: [f64; 8] = [0.05, -0.03, 0.04, 0.02, 0.0, -0.02, 0.03, 0.01];

fn specs() -> Vec<ManifoldSpec> {
    vec![
        ManifoldSpec::RoundSphere { radius: 1.0, inj: None, diam: None },
        ManifoldSpec::Ellipsoid { axes: [1.0, 1.05, 1.1], inj: None, diam: None },
        ManifoldSpec::FlatTorus { b1: [1.0, 0.0], b2: [0.0, 1.0], inj: None, diam: None },
        ManifoldSpec::TorusOfRevolution { major: 2.0, minor: 0.5, inj: None, diam: None },
        ManifoldSpec::ConformalSphere { radius: 1.0, coefficients: CONFORMAL.to_vec(), inj: None, diam: None },
    ]
}

fn config(manifold: ManifoldSpec, seed: u64) -> ExperimentConfig {
    ExperimentConfig { manifold, seed, ..Default::default() }
}

fn t1q2(spec: ManifoldSpec) -> Result<(f64, f64, f64, f64, f64), String> {
    let t = Instant::now();
    let run = execute(&config(spec, 7), Some(Command::VerifyT1q2)).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let Outcome::Minmax(o) = &run.report.outcome else { return Err("wrong outcome".into()) };
    let net = o.stationary_candidate.as_ref().ok_or("no certificate")?;
    if run.report.status != Status::Pass {
        return Err(format!("status {:?}", run.report.status));
    }
    Ok((net.total_mass, net.residual, run.report.manifold.diam, o.width_estimate, secs))
}

fn c1() -> Check {
    let (mass, _, d, _, secs) = t1q2(specs()[0].clone())?;
    ensure(
        (mass - 2.0 * PI).abs() <= 0.01 * 2.0 * PI && mass <= 4.0 * d && secs <= 120.0,
        format!("round sphere certificate mass {mass:.6} (2pi = {:.6}), 4d = {:.6}, {secs:.1} s", 2.0 * PI, 4.0 * d),
    )
}

fn c2() -> Check {
    let mut msgs = Vec::new();
    let mut ok = true;
    for spec in [specs()[1].clone(), specs()[4].clone()] {
        let name = match &spec {
            ManifoldSpec::Ellipsoid { .. } => "ellipsoid(1,1.05,1.1)",
            _ => "conformal sphere",
        };
        let (mass, res, d, _, secs) = t1q2(spec)?;
        ok &= res <= 1e-4 && mass <= 4.0 * d + 1e-2 * d;
        msgs.push(format!("{name}: mass {mass:.5} <= {:.5}, residual {res:.1e}, {secs:.1} s", 4.0 * d + 1e-2 * d));
    }
    ensure(ok, msgs.join("; "))
}

fn c3() -> Check {
    let mut cfg = config(specs()[2].clone(), 3);
    cfg.cycle = CycleSpec::Wrap { class: [1, 0], n: 5, perturb: 0.05 };
    let t = Instant::now();
    let run = execute(&cfg, Some(Command::Shorten)).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let Outcome::Shorten(o) = &run.report.outcome else { return Err("wrong outcome".into()) };
    let net = o.net.as_ref().ok_or("no stationary net")?;
    let len = net.total_mass;
    ensure(
        net.edges.len() == 1 && (len - 1.0).abs() <= 1e-4 && len <= 2f64.sqrt() && secs <= 10.0,
        format!("flat torus wrap loop length {len:.9}, {} edge, 2d = {:.6}, {secs:.2} s", net.edges.len(), 2f64.sqrt()),
    )
}

fn c4() -> Check {
    let (mut n, mut id, mut fd) = (0, 0.0f64, 0.0f64);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for spec in specs() {
        let m = spec.build().map_err(|e| e.to_string())?;
        for _ in 0..45 {
            let (k, segs) = (rng.gen_range(1..4), rng.gen_range(2..7));
            let c = random_cycle(&m, &mut rng, k, segs, m.inj() / 8.0).map_err(|e| e.to_string())?;
            let (a, b, _) = gradcheck_cycle(&m, &c).map_err(|e| e.to_string())?;
            id = id.max(a);
            fd = fd.max(b);
            n += 1;
        }
    }
    ensure(
        n >= 200 && id <= 1e-6 && fd <= 1e-4,
        format!("{n} random cycles on 5 surfaces: identity error {id:.1e}, finite-difference error {fd:.1e}"),
    )
}

fn great_circle(m: &Manifold, p: Vec3, n: usize) -> PolygonalCycle {
    let dir = orthogonal_unit(&p);
    let pts: Vec<Point> = (0..=n)
        .map(|j| {
            let t = 2.0 * PI * (j % n) as f64 / n as f64;
            m.point(p * t.cos() + dir * t.sin())
        })
        .collect();
    build_cycle(m, vec![pts], &CycleType::closed_loops(1, n)).unwrap()
}

fn c5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut n, mut worst) = (0, f64::NEG_INFINITY);
    for spec in specs() {
        let m = spec.build().map_err(|e| e.to_string())?;
        for _ in 0..110 {
            let (k, segs) = (rng.gen_range(1..4), rng.gen_range(2..9));
            let c = random_cycle(&m, &mut rng, k, segs, m.inj() / 8.0).map_err(|e| e.to_string())?;
            let target = rng.gen_range(1..9).max(choose_n(c.max_chain_length(), m.inj()));
            let b = birkhoff_step(&m, &c, target).map_err(|e| e.to_string())?;
            worst = worst.max((cycle_length(&b) - cycle_length(&c)) / m.diam());
            n += 1;
        }
    }
    let s = Manifold::round_sphere(1.0).unwrap();
    let mut fixed = 0.0f64;
    for _ in 0..20 {
        let p = s.random_point(&mut rng).coords;
        let c = great_circle(&s, p, rng.gen_range(9..16));
        let b = birkhoff_step(&s, &c, c.n()).map_err(|e| e.to_string())?;
        for (x, y) in c.points().zip(b.points()) {
            fixed = fixed.max(s.chord(x, y));
        }
    }
    ensure(
        n >= 500 && worst <= 1e-9 && fixed <= 1e-8,
        format!("{n} Birkhoff steps, largest increase {worst:.1e} diam; great-circle drift {fixed:.1e}"),
    )
}

fn sphere_eight(m: &Manifold, p: Vec3, theta: f64, kink: f64) -> PolygonalCycle {
    let n = 8;
    let a = orthogonal_unit(&p);
    let b = p.cross(&a);
    let loop_through = |d: Vec3| -> Vec<Point> {
        (0..=n).map(|j| {
            let t = 2.0 * PI * (j % n) as f64 / n as f64;
            m.point(p * t.cos() + d * t.sin())
        })
        .collect()
    };
    let first = loop_through(a);
    let mut second = loop_through(a * theta.cos() + b * theta.sin());
    let q = second[1].coords;
    second[1] = m.point(q * kink.cos() + p.cross(&q) * kink.sin() + p * p.dot(&q) * (1.0 - kink.cos()));
    build_cycle(m, vec![first, second], &CycleType::single_point(2, n)).unwrap()
}

fn torus_eight(m: &Manifold, p: Vec3, kink: f64) -> PolygonalCycle {
    let n = 6;
    let line = |d: Vec3| -> Vec<Point> { (0..=n).map(|j| m.point(p + d * (j as f64 / n as f64))).collect() };
    let (u, w) = (Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 0.0));
    let mut second = line(w);
    let d = w / n as f64;
    second[1] = m.point(p + Vec3::new(d.x * kink.cos() - d.y * kink.sin(), d.x * kink.sin() + d.y * kink.cos(), 0.0));
    build_cycle(m, vec![line(u), second], &CycleType::single_point(2, n)).unwrap()
}

fn c6() -> Check {
    let s = Manifold::round_sphere(1.0).unwrap();
    let t = Manifold::flat_torus([1.0, 0.0], [0.0, 1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let (mut balanced, mut kinked) = (0.0f64, f64::INFINITY);
    for _ in 0..10 {
        let p = s.random_point(&mut rng).coords;
        let theta = rng.gen_range(0.3..PI - 0.3);
        balanced = balanced.max(deformation_vector(&s, &sphere_eight(&s, p, theta, 0.0)).norm());
        kinked = kinked.min(deformation_vector(&s, &sphere_eight(&s, p, theta, 1e-2)).norm());
        let q = t.random_point(&mut rng).coords;
        balanced = balanced.max(deformation_vector(&t, &torus_eight(&t, q, 0.0)).norm());
        kinked = kinked.min(deformation_vector(&t, &torus_eight(&t, q, 1e-2)).norm());
    }
    ensure(
        balanced <= 1e-8 && kinked >= 1e-3,
        format!("figure-eights: balanced |v| <= {balanced:.1e}, 1e-2 rad kink |v| >= {kinked:.1e}"),
    )
}

fn c7() -> Check {
    let mut cfg = config(specs()[0].clone(), 1);
    cfg.family.kind = FamilyKind::Latitude;
    cfg.family.slices = 65;
    cfg.family.rounds = 10;
    let run = execute(&cfg, Some(Command::Minmax)).map_err(|e| e.to_string())?;
    let Outcome::Minmax(o) = &run.report.outcome else { return Err("wrong outcome".into()) };
    let monotone = o.round_max.windows(2).all(|w| w[1] <= w[0]);
    let w = o.width_estimate;
    ensure(
        o.members == 65 && (w - 2.0 * PI).abs() <= 0.01 * 2.0 * PI && monotone,
        format!("latitude family of {} members: width {w:.6}, {} rounds, per-round max non-increasing: {monotone}", o.members, o.round_max.len() - 1),
    )
}

fn c8() -> Check {
    let t = edge_sign_table();
    let pairs = (0..6)
        .filter(|&e| {
            let s: Vec<i8> = (0..4).map(|i| t[i][e]).filter(|&x| x != 0).collect();
            s.len() == 2 && s[0] == -s[1]
        })
        .count();
    let m = Manifold::round_sphere(1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = SweepConfig::default();
    let v = farthest_point_vertices(&m, &mut rng, cfg.fps_candidates);
    let fam = tetrahedron_sweepout(&m, &v, &cfg).map_err(|e| e.to_string())?;
    let full = &fam.members[fam.mark("faces_full").ok_or("no faces_full mark")?];
    // geometric check of the same cancellation at t = 1
    let opposite = (0..full.k())
        .filter(|&a| {
            (0..full.k()).any(|b| {
                b != a
                    && full.vertices()[a].iter().zip(full.vertices()[b].iter().rev()).all(|(x, y)| m.chord(x, y) < 1e-9)
            })
        })
        .count();
    let max = fam.max_member().1;
    let bound = 8.0 * m.diam() + 1e-2 * m.diam();
    ensure(
        pairs == 6 && full.k() == 12 && opposite == 12 && max <= bound,
        format!("{pairs} cancelling edge pairs, {opposite}/12 chains with an opposite partner, longest of {} members {max:.5} <= 8d + tol = {bound:.5}", fam.len()),
    )
}

fn c9() -> Check {
    let m = Manifold::flat_torus([10.0, 0.0], [0.0, 10.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut collapsed = 0;
    let total = 120;
    for _ in 0..total {
        let (k, n) = (rng.gen_range(1..4), rng.gen_range(2..7));
        let c = random_cycle(&m, &mut rng, k, n, 0.2 * m.inj()).map_err(|e| e.to_string())?;
        if shorten(&m, &c, &FlowConfig::default()).is_ok_and(|o| o.is_collapsed()) {
            collapsed += 1;
        }
    }
    ensure(collapsed == total, format!("{collapsed}/{total} small cycles on a 10 x 10 flat torus collapsed"))
}

fn c10() -> Check {
    let mut cases = vec![(config(specs()[0].clone(), 7), Command::VerifyT1q2)];
    let mut wrap = config(specs()[2].clone(), 3);
    wrap.cycle = CycleSpec::Wrap { class: [1, 0], n: 5, perturb: 0.05 };
    cases.push((wrap, Command::Shorten));
    let mut same = 0;
    for (cfg, cmd) in &cases {
        let mut outs = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let run = execute(cfg, Some(*cmd)).map_err(|e| e.to_string())?;
            run.write(dir.path(), Some(geonet::Projection::default_for(&run.artifacts.manifold)))
                .map_err(|e| e.to_string())?;
            let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap_or_default();
            outs.push((run.report.to_json_untimed(), read("trace.csv"), read("net.json"), read("net.svg")));
        }
        same += usize::from(outs[0] == outs[1]);
    }
    ensure(same == cases.len(), format!("{same}/{} commands gave byte-identical reports, traces, nets and SVGs", cases.len()))
}

fn main() {
    let checks: [(&str, fn() -> Check); 10] = [
        ("4d bound on the round sphere", c1),
        ("4d bound on perturbed metrics", c2),
        ("closed geodesic on the flat torus", c3),
        ("first-variation identity", c4),
        ("Birkhoff monotonicity", c5),
        ("figure-eight stationarity", c6),
        ("latitude min-max width", c7),
        ("tetrahedron sweepout structure", c8),
        ("no stationary cycles in flat space", c9),
        ("determinism", c10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, msg) = match res {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("criterion {:>2} {tag}  {name}: {msg} [{:.1} s]", i + 1, t.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
