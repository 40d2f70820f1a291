use super::*;
use crate::cycles::{build_cycle, cycle_length, CycleType};
use crate::math::Vec3;
use approx::assert_relative_eq;
use core::f64::consts::PI;

fn sphere() -> Manifold {
    Manifold::round_sphere(1.0).unwrap()
}

fn torus() -> Manifold {
    Manifold::flat_torus([1.0, 0.0], [0.0, 1.0]).unwrap()
}

fn circle(m: &Manifold, z: f64, n: usize, wobble: f64) -> PolygonalCycle {
    let r = (1.0 - z * z).sqrt();
    let mut v: Vec<Point> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            let dz = if i % 2 == 1 { wobble } else { 0.0 };
            m.point(Vec3::new(r * t.cos(), r * t.sin(), z + dz))
        })
        .collect();
    v.push(v[0]);
    build_cycle(m, alloc::vec![v], &CycleType::closed_loops(1, n)).unwrap()
}

fn chart(m: &Manifold, pts: &[(f64, f64)]) -> PolygonalCycle {
    let mut v: Vec<Point> = pts.iter().map(|&(x, y)| m.point(Vec3::new(x, y, 0.0))).collect();
    v.push(v[0]);
    let n = pts.len();
    build_cycle(m, alloc::vec![v], &CycleType::closed_loops(1, n)).unwrap()
}

#[test]
fn choose_n_examples() {
    assert_eq!(choose_n(4.0 * PI, PI), 17);
    assert_eq!(choose_n(PI / 8.0, PI), 1);
    assert_eq!(choose_n(PI, PI), 5);
}

#[test]
fn birkhoff_fixes_equal_great_circle() {
    let m = sphere();
    let c = circle(&m, 0.0, 8, 0.0);
    let b = birkhoff_step(&m, &c, 8).unwrap();
    for (p, q) in c.points().zip(b.points()) {
        assert_relative_eq!(p.coords, q.coords, epsilon = 1e-8);
    }
}

#[test]
fn birkhoff_constant_cycle() {
    let m = sphere();
    let p = m.point(Vec3::new(0.0, 0.6, 0.8));
    let c = PolygonalCycle::from_vertices(&m, alloc::vec![alloc::vec![p; 4]], 1e-9).unwrap();
    let b = birkhoff_step(&m, &c, 5).unwrap();
    assert_eq!(cycle_length(&b), 0.0);
    assert!(b.points().all(|q| *q == p));
}

#[test]
fn birkhoff_shortens_zigzag() {
    let m = sphere();
    let c = circle(&m, 0.0, 16, 0.05);
    let b = birkhoff_step(&m, &c, 9).unwrap();
    assert!(cycle_length(&b) < cycle_length(&c) - 1e-3);
    assert_eq!(b.vertices()[0][0], c.vertices()[0][0]);
}

#[test]
fn birkhoff_rejects_small_n() {
    let m = sphere();
    let c = circle(&m, 0.0, 8, 0.0);
    assert!(matches!(birkhoff_step(&m, &c, 4), Err(Error::ChainTooLong { suggested_n: 9, .. })));
}

#[test]
fn deformation_vector_examples() {
    let m = sphere();
    let v = deformation_vector(&m, &circle(&m, 0.0, 8, 0.0));
    assert!(v.norm_sq < 1e-12);

    let t = torus();
    let c = chart(&t, &[(0.1, 0.1), (0.2, 0.1), (0.1, 0.2)]);
    let v = deformation_vector(&t, &c);
    assert_relative_eq!(v.blocks[0].norm(), 2.0_f64.sqrt(), epsilon = 1e-12);
}

#[test]
fn first_variation_examples() {
    let m = sphere();
    let c = circle(&m, 0.3, 10, 0.04);
    let v = deformation_vector(&m, &c);
    assert_relative_eq!(first_variation(&m, &c, &v.field), -v.norm_sq, max_relative = 1e-12);
    assert_eq!(first_variation(&m, &c, &VertexField::zeros(&c)), 0.0);
    let h = 1e-5;
    let fd = (displaced_length(&m, &c, &v.field, h).unwrap() - displaced_length(&m, &c, &v.field, -h).unwrap())
        / (2.0 * h);
    assert_relative_eq!(fd, -v.norm_sq, max_relative = 1e-4);
}

#[test]
fn flow_step_examples() {
    let m = sphere();
    let c = circle(&m, 0.0, 8, 0.0);
    let v = deformation_vector(&m, &c);
    let d = flow_step(&m, &c, &v, 0.1).unwrap();
    for (p, q) in c.points().zip(d.points()) {
        assert_relative_eq!(p.coords, q.coords, epsilon = 1e-8);
    }

    let t = torus();
    let c = chart(&t, &[(0.1, 0.1), (0.2, 0.1), (0.1, 0.2)]);
    let v = deformation_vector(&t, &c);
    let dt = 1e-5;
    let d = flow_step(&t, &c, &v, dt).unwrap();
    let drop = cycle_length(&c) - cycle_length(&d);
    assert_relative_eq!(drop, dt * v.norm_sq, max_relative = 1e-3);
    assert_eq!(d.cycle_type(), c.cycle_type());

    assert!(matches!(flow_step(&t, &c, &v, 1.0), Err(Error::StepTooLong { .. })));
}

#[test]
fn shorten_small_cap_collapses() {
    let m = sphere();
    let z = (80.0_f64).to_radians().sin();
    let out = shorten(&m, &circle(&m, z, 6, 0.0), &FlowConfig::default()).unwrap();
    assert!(out.is_collapsed());
    for w in out.trace.windows(2) {
        assert!(w[1].length <= w[0].length + 1e-9 * m.diam());
    }
}

#[test]
fn shorten_torus_wrap_loop() {
    let t = torus();
    let pts: Vec<Point> = (0..=5)
        .map(|i| {
            let s = i as f64 / 5.0;
            t.point(Vec3::new(s, 0.3 + 0.05 * (2.0 * PI * s).sin(), 0.0))
        })
        .collect();
    let ty = CycleType::closed_loops(1, 5);
    let c = build_cycle(&t, alloc::vec![pts], &ty).unwrap();
    let out = shorten(&t, &c, &FlowConfig::default()).unwrap();
    let net = out.net().expect("stationary");
    assert_eq!(net.edges.len(), 1);
    assert_relative_eq!(net.total_mass, 1.0, epsilon = 1e-4);
}

#[test]
fn shorten_perturbed_ellipsoid_equator() {
    let m = Manifold::ellipsoid(1.0, 1.0, 1.2).unwrap();
    let mut v: Vec<Point> = (0..12)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / 12.0;
            m.point_in_direction(Vec3::new(t.cos(), t.sin(), 0.01 * (3.0 * t).sin() + 0.004 * (i % 2) as f64))
        })
        .collect();
    v.push(v[0]);
    let c = build_cycle(&m, alloc::vec![v], &CycleType::closed_loops(1, 12)).unwrap();
    let out = shorten(&m, &c, &FlowConfig::default()).unwrap();
    let net = out.net().expect("stationary");
    assert_relative_eq!(net.total_mass, 2.0 * PI, epsilon = 1e-3);
    assert!(net.residual <= 2e-5);
}

/// A small loop split into two chains: the two junctions approach each
/// other as it shrinks.
fn split_loop(m: &Manifold) -> PolygonalCycle {
    let p = |a: f64| m.point_in_direction(Vec3::new(0.05 * a.cos(), 0.07 * a.sin(), 1.0));
    let a: Vec<Point> = (0..=4).map(|j| p(PI * j as f64 / 4.0)).collect();
    let b: Vec<Point> = (0..=4).map(|j| p(PI + PI * j as f64 / 4.0)).collect();
    PolygonalCycle::from_vertices(m, alloc::vec![a, b], 1e-6).unwrap()
}

#[test]
fn merge_and_restart_coarsens_the_type() {
    let t = sphere();
    let c = split_loop(&t);
    assert_eq!(c.cycle_type().num_blocks(), 2);
    let cfg = FlowConfig { eps_collapse: Some(1e-9), n: Some(4), ..Default::default() };
    let kept = shorten(&t, &c, &cfg).unwrap();
    assert!(kept.is_collapsed());
    assert!(kept.trace.iter().all(|r| r.event != TraceEvent::Merge));
    assert_eq!(kept.cycle.cycle_type().num_blocks(), 2);

    let merged = shorten(&t, &c, &FlowConfig { merge_and_restart: true, ..cfg }).unwrap();
    assert!(merged.is_collapsed());
    assert!(merged.trace.iter().any(|r| r.event == TraceEvent::Merge));
    assert_eq!(merged.cycle.cycle_type().num_blocks(), 1);
}

#[test]
fn separate_small_loops_collapse_together() {
    let t = Manifold::flat_torus([10.0, 0.0], [0.0, 10.0]).unwrap();
    let eps = FlowConfig::default().eps_collapse_for(&t);
    // each loop is below eps_collapse, the pair is not
    let tri = |x: f64| {
        let s = 0.2 * eps;
        let mut v: Vec<Point> =
            [(x, 1.0), (x + s, 1.0), (x, 1.0 + s)].iter().map(|&(a, b)| t.point(Vec3::new(a, b, 0.0))).collect();
        v.push(v[0]);
        v
    };
    let c = PolygonalCycle::from_vertices(&t, alloc::vec![tri(1.0), tri(3.0)], 1e-12).unwrap();
    assert!(cycle_length(&c) > eps);
    let out = shorten(&t, &c, &FlowConfig { n: Some(3), ..Default::default() }).unwrap();
    assert!(out.is_collapsed());
}
