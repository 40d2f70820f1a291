mod common;

use std::f64::consts::PI;

use common::{builtins, great_circle_through, rng, sphere_figure_eight, torus_figure_eight};
use geonet_core::math::Vec3;
use geonet_core::shortening::{displaced_length, TraceEvent};
use geonet_core::{
    birkhoff_step, build_cycle, choose_n, cycle_length, deformation_vector, first_variation, flow_step,
    random_cycle, shorten, CycleType, FlowConfig, Manifold, ShortenError, ShortenResult,
};
use proptest::prelude::*;
use rand::Rng;

/// Best central-difference relative error over a sweep of step sizes.
fn fd_error(m: &Manifold, c: &geonet_core::PolygonalCycle) -> f64 {
    let v = deformation_vector(m, c);
    let scale = v.norm().max(1e-300);
    [1e-3, 1e-4, 1e-5, 1e-6]
        .iter()
        .map(|&h| {
            let h = h * m.inj() / scale;
            let plus = displaced_length(m, c, &v.field, h).unwrap();
            let minus = displaced_length(m, c, &v.field, -h).unwrap();
            let fd = (plus - minus) / (2.0 * h);
            (fd + v.norm_sq).abs() / v.norm_sq
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn first_variation_identity_and_finite_differences() {
    let mut r = rng(11);
    let mut count = 0;
    for m in builtins() {
        for _ in 0..45 {
            let (k, n) = (r.gen_range(1..4), r.gen_range(2..7));
            let c = random_cycle(&m, &mut r, k, n, m.inj() / 8.0).unwrap();
            let v = deformation_vector(&m, &c);
            assert!(v.norm_sq > 0.0);
            let fv = first_variation(&m, &c, &v.field);
            assert!((fv + v.norm_sq).abs() <= 1e-6 * v.norm_sq, "{}: {fv} vs {}", m.name(), -v.norm_sq);
            let err = fd_error(&m, &c);
            assert!(err <= 1e-4, "{}: finite-difference error {err}", m.name());
            count += 1;
        }
    }
    assert!(count >= 200);
}

#[test]
fn birkhoff_never_lengthens() {
    let mut r = rng(12);
    let mut count = 0;
    for m in builtins() {
        for _ in 0..110 {
            let (k, n) = (r.gen_range(1..4), r.gen_range(2..9));
            let c = random_cycle(&m, &mut r, k, n, m.inj() / 8.0).unwrap();
            let target = r.gen_range(1..9).max(choose_n(c.max_chain_length(), m.inj()));
            let b = birkhoff_step(&m, &c, target).unwrap();
            assert!(
                cycle_length(&b) <= cycle_length(&c) + 1e-9 * m.diam(),
                "{}: {} -> {}",
                m.name(),
                cycle_length(&c),
                cycle_length(&b)
            );
            assert_eq!(b.cycle_type().partition(), c.cycle_type().partition());
            count += 1;
        }
    }
    assert!(count >= 500);
}

#[test]
fn great_circles_are_birkhoff_fixed_points() {
    let m = Manifold::round_sphere(1.0).unwrap();
    let mut r = rng(13);
    for _ in 0..20 {
        let p = m.random_point(&mut r).coords;
        let dir = geonet_core::math::orthogonal_unit(&p);
        let n = r.gen_range(9..16);
        let c = build_cycle(&m, vec![great_circle_through(&m, p, dir, n)], &CycleType::closed_loops(1, n)).unwrap();
        let b = birkhoff_step(&m, &c, n).unwrap();
        for (x, y) in c.points().zip(b.points()) {
            assert!(m.chord(x, y) <= 1e-8);
        }
        assert!((cycle_length(&b) - 2.0 * PI).abs() <= 1e-8);
    }
}

#[test]
fn balanced_figure_eights_are_stationary() {
    let s = Manifold::round_sphere(1.0).unwrap();
    let t = Manifold::flat_torus([1.0, 0.0], [0.0, 1.0]).unwrap();
    let mut r = rng(14);
    for _ in 0..10 {
        let p = s.random_point(&mut r).coords;
        let theta = r.gen_range(0.3..PI - 0.3);
        let c = sphere_figure_eight(&s, p, theta, 8, 0.0);
        assert!(deformation_vector(&s, &c).norm() <= 1e-8);
        let kinked = sphere_figure_eight(&s, p, theta, 8, 1e-2);
        assert!(deformation_vector(&s, &kinked).norm() >= 1e-3);

        let q = t.random_point(&mut r).coords;
        let (u, w) = (Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 0.0));
        let c = torus_figure_eight(&t, q, u, w, 6, 0.0);
        assert!(deformation_vector(&t, &c).norm() <= 1e-8);
        let kinked = torus_figure_eight(&t, q, u, w, 6, 1e-2);
        assert!(deformation_vector(&t, &kinked).norm() >= 1e-3);
    }
}

#[test]
fn small_cycles_on_a_large_flat_torus_collapse() {
    let m = Manifold::flat_torus([10.0, 0.0], [0.0, 10.0]).unwrap();
    let mut r = rng(15);
    for i in 0..100 {
        let (k, n) = (r.gen_range(1..4), r.gen_range(2..7));
        let c = random_cycle(&m, &mut r, k, n, 0.2 * m.inj()).unwrap();
        let out = shorten(&m, &c, &FlowConfig::default()).unwrap_or_else(|e| panic!("input {i}: {e}"));
        assert!(out.is_collapsed(), "input {i} stopped at length {}", cycle_length(&out.cycle));
    }
}

fn monotone(trace: &[geonet_core::shortening::TraceRow], tol: f64) -> bool {
    trace
        .windows(2)
        .filter(|w| !matches!(w[1].event, TraceEvent::Refine | TraceEvent::Merge))
        .all(|w| w[1].length <= w[0].length + tol)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn flow_step_keeps_the_type(seed in any::<u64>(), k in 1usize..4, n in 2usize..7) {
        let mut r = rng(seed);
        for m in builtins() {
            let c = random_cycle(&m, &mut r, k, n, m.inj() / 8.0).unwrap();
            let v = deformation_vector(&m, &c);
            let dt = 1e-3 * m.inj() / v.norm().max(1.0);
            let d = flow_step(&m, &c, &v, dt).unwrap();
            prop_assert_eq!(d.cycle_type(), c.cycle_type());
            prop_assert!(cycle_length(&d) < cycle_length(&c));
        }
    }

    #[test]
    fn shorten_traces_are_monotone(seed in any::<u64>(), k in 1usize..3, n in 2usize..5) {
        let mut r = rng(seed);
        for m in builtins() {
            let c = random_cycle(&m, &mut r, k, n, m.inj() / 8.0).unwrap();
            let cfg = FlowConfig::default();
            let (trace, result) = match shorten(&m, &c, &cfg) {
                Ok(out) => (out.trace, Some(out.result)),
                Err(ShortenError::NonConvergence { trace, .. }) => (trace, None),
                Err(e) => return Err(TestCaseError::fail(format!("{}: {e}", m.name()))),
            };
            prop_assert!(monotone(&trace, 1e-9 * m.diam()), "{}", m.name());
            if let Some(ShortenResult::Stationary(net)) = result {
                prop_assert!(net.residual <= 2.0 * cfg.eps_stationary, "{}: {}", m.name(), net.residual);
            }
        }
    }
}
