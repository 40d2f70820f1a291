use super::*;
use approx::assert_relative_eq;
use core::f64::consts::{FRAC_PI_2, PI, SQRT_2};

fn sphere() -> Manifold {
    Manifold::round_sphere(1.0).unwrap()
}

fn unit_torus() -> Manifold {
    Manifold::flat_torus([1.0, 0.0], [0.0, 1.0]).unwrap()
}

fn p3(x: f64, y: f64, z: f64) -> Point {
    Point::new(Vec3::new(x, y, z))
}

#[test]
fn builtin_constants() {
    let s = sphere();
    assert_eq!((s.inj(), s.diam(), s.dim()), (PI, PI, 2));
    let t = unit_torus();
    assert_relative_eq!(t.inj(), 0.5, epsilon = 1e-15);
    assert_relative_eq!(t.diam(), SQRT_2 / 2.0, epsilon = 1e-15);
    let e = Manifold::ellipsoid(1.0, 1.1, 1.2).unwrap();
    assert_relative_eq!(e.inj(), PI * 1.1 / 1.2, epsilon = 1e-14);
    assert!(Manifold::round_sphere(-1.0).is_err());
    assert!(Manifold::torus_of_revolution(1.0, 2.0).is_err());
}

#[test]
fn ellipsoid_diameter_bounds_sampled_distances() {
    // Diameter candidate: half the a-c principal ellipse. Any sampled pair
    // must be no farther apart.
    let m = Manifold::ellipsoid(1.0, 1.05, 1.1).unwrap();
    let poles = [p3(0.0, 0.0, 1.1), p3(0.0, 0.0, -1.1)];
    let d = m.distance(&poles[0], &poles[1]);
    assert!(d <= m.diam() + 1e-6, "{d} vs {}", m.diam());
    let ends = [p3(1.0, 0.0, 0.0), p3(-1.0, 0.0, 0.0)];
    assert!(m.distance(&ends[0], &ends[1]) <= m.diam() + 1e-6);
}

#[test]
fn metric_flat_and_round_identity() {
    let t = unit_torus();
    assert_eq!(t.metric_at(&t.point(Vec3::new(0.3, 0.7, 0.0))).unwrap(), Matrix2::identity());
    let s = sphere();
    let p = s.point(Vec3::new(0.3, -0.4, 0.8));
    let g = s.metric_at(&p).unwrap();
    assert_relative_eq!(g, Matrix2::identity(), epsilon = 1e-14);
}

#[test]
fn metric_ellipsoid_first_fundamental_form() {
    // At (a,0,0) with the radial chart u -> u / rho(u), the chart frame built
    // from f1, f2 (orthonormal on the unit sphere) satisfies
    // dp = f / rho - u <grad rho, f> / rho^2; on the x-axis grad rho is
    // parallel to u so dp = a f and g = a^2 I restricted to the y-z plane.
    let m = Manifold::ellipsoid(1.0, 1.1, 1.2).unwrap();
    let p = p3(1.0, 0.0, 0.0);
    let g = m.metric_at(&p).unwrap();
    assert_relative_eq!(g, Matrix2::identity(), epsilon = 1e-14);
    // Off-axis point: compare with finite differences of the chart.
    let u = Vec3::new(0.5, 0.6, 0.62).normalize();
    let p = m.point_in_direction(u);
    let g = m.metric_at(&p).unwrap();
    let f1 = orthogonal_unit(&u);
    let f2 = u.cross(&f1);
    let h = 1e-6;
    let chart = |du: Vec3| m.point_in_direction(u + du).coords;
    let d1 = (chart(f1 * h) - chart(f1 * -h)) / (2.0 * h);
    let d2 = (chart(f2 * h) - chart(f2 * -h)) / (2.0 * h);
    assert_relative_eq!(g[(0, 0)], d1.dot(&d1), epsilon = 1e-8);
    assert_relative_eq!(g[(0, 1)], d1.dot(&d2), epsilon = 1e-8);
    assert_relative_eq!(g[(1, 1)], d2.dot(&d2), epsilon = 1e-8);
    assert!(g.symmetric_eigenvalues().iter().all(|&l| l > 0.0));
}

#[test]
fn metric_rejects_off_manifold() {
    let s = sphere();
    assert!(matches!(s.metric_at(&p3(2.0, 0.0, 0.0)), Err(Error::OffManifold { .. })));
}

#[test]
fn shoot_north_pole_to_antipode() {
    let s = sphere();
    let n = p3(0.0, 0.0, 1.0);
    let v = TangentVector::new(n, Vec3::new(1.0, 0.0, 0.0));
    let (q, w) = s.geodesic_shoot(&v, PI).unwrap();
    assert_relative_eq!(q.coords, Vec3::new(0.0, 0.0, -1.0), epsilon = 1e-14);
    assert_relative_eq!(w.components, Vec3::new(-1.0, 0.0, 0.0), epsilon = 1e-14);
}

#[test]
fn shoot_zero_time_is_identity() {
    for m in all_builtins() {
        let p = m.random_point(&mut rng(1));
        let v = m.random_tangent(&mut rng(2), &p, 0.3);
        let (q, w) = m.geodesic_shoot(&v, 0.0).unwrap();
        assert_eq!((q, w), (p, v));
    }
}

#[test]
fn shoot_flat_torus_straight() {
    let t = unit_torus();
    let o = t.point(Vec3::zeros());
    let (q, w) = t.geodesic_shoot(&TangentVector::new(o, Vec3::new(1.0, 0.0, 0.0)), 0.25).unwrap();
    assert_relative_eq!(q.coords, Vec3::new(0.25, 0.0, 0.0), epsilon = 1e-15);
    assert_eq!(w.components, Vec3::new(1.0, 0.0, 0.0));
}

#[test]
fn numeric_sphere_matches_closed_form() {
    // A conformal sphere with no coefficients is the round sphere, but goes
    // through the RK4 path.
    let c = Manifold::conformal_sphere(1.0, alloc::vec![], PI, PI).unwrap();
    let n = p3(0.0, 0.0, 1.0);
    let v = TangentVector::new(n, Vec3::new(0.6, 0.8, 0.0));
    let (q, w) = c.geodesic_shoot(&v, 2.0).unwrap();
    let (q0, w0) = sphere().geodesic_shoot(&v, 2.0).unwrap();
    assert_relative_eq!(q.coords, q0.coords, epsilon = 1e-8);
    assert_relative_eq!(w.components, w0.components, epsilon = 1e-8);
}

#[test]
fn connect_quarter_circle() {
    let s = sphere();
    let seg = s.geodesic_connect(&p3(1.0, 0.0, 0.0), &p3(0.0, 1.0, 0.0)).unwrap();
    assert_relative_eq!(seg.length, FRAC_PI_2, epsilon = 1e-14);
    assert_relative_eq!(seg.samples[8].coords, Vec3::new(0.5_f64.sqrt(), 0.5_f64.sqrt(), 0.0), epsilon = 1e-14);
}

#[test]
fn connect_identical_points() {
    for m in all_builtins() {
        let p = m.random_point(&mut rng(3));
        let seg = m.geodesic_connect(&p, &p).unwrap();
        assert_eq!(seg.length, 0.0);
        assert!(seg.is_constant());
    }
}

#[test]
fn connect_flat_torus_straight_segment() {
    let t = unit_torus();
    let seg = t.geodesic_connect(&t.point(Vec3::new(0.1, 0.1, 0.0)), &t.point(Vec3::new(0.2, 0.1, 0.0))).unwrap();
    assert_relative_eq!(seg.length, 0.1, epsilon = 1e-15);
}

#[test]
fn connect_rejects_far_points() {
    let s = sphere();
    let r = s.geodesic_connect(&p3(0.0, 0.0, 1.0), &p3(0.0, 0.0, -1.0));
    assert!(matches!(r, Err(Error::TooFar { .. })));
    let e = Manifold::ellipsoid(1.0, 1.05, 1.1).unwrap();
    let r = e.geodesic_connect(&p3(1.0, 0.0, 0.0), &p3(-1.0, 0.0, 0.0));
    assert!(matches!(r, Err(Error::TooFar { .. })));
}

#[test]
fn transport_identities() {
    let s = sphere();
    let p = p3(1.0, 0.0, 0.0);
    let zero = GeodesicSegment::constant(p);
    let v = TangentVector::new(p, Vec3::new(0.0, 0.3, 0.4));
    assert_eq!(s.parallel_transport(&v, &zero).unwrap().components, v.components);

    let seg = s.geodesic_connect(&p, &s.point(Vec3::new(0.2, 0.9, 0.3))).unwrap();
    let w = s.parallel_transport(&seg.initial_velocity, &seg).unwrap();
    assert_relative_eq!(w.components, seg.final_velocity, epsilon = 1e-12);

    let bad = TangentVector::new(p3(0.0, 1.0, 0.0), Vec3::new(1.0, 0.0, 0.0));
    assert!(matches!(s.parallel_transport(&bad, &seg), Err(Error::BaseMismatch { .. })));
}

#[test]
fn transport_holonomy_octant() {
    // Octant triangle with three right angles encloses area pi/2.
    for m in [sphere(), Manifold::conformal_sphere(1.0, alloc::vec![], PI, PI).unwrap()] {
        let a = p3(1.0, 0.0, 0.0);
        let b = p3(0.0, 1.0, 0.0);
        let c = p3(0.0, 0.0, 1.0);
        let mut v = TangentVector::new(a, Vec3::new(0.0, 1.0, 0.0));
        for (x, y) in [(a, b), (b, c), (c, a)] {
            let seg = m.geodesic_connect(&x, &y).unwrap();
            v = m.parallel_transport(&v, &seg).unwrap();
        }
        // (0,1,0) rotated by a quarter turn about the x axis.
        let rotated = v.components;
        assert_relative_eq!(rotated.norm(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(rotated.y.abs(), 0.0, epsilon = 1e-9);
        assert_relative_eq!(rotated.z.abs(), 1.0, epsilon = 1e-9);
    }
}

#[test]
fn distance_examples() {
    let s = sphere();
    let n = p3(0.0, 0.0, 1.0);
    assert_eq!(s.distance(&n, &n), 0.0);
    assert_relative_eq!(s.distance(&n, &p3(0.0, 0.0, -1.0)), PI, epsilon = 1e-15);
    let t = unit_torus();
    let d = t.distance(&t.point(Vec3::new(0.05, 0.0, 0.0)), &t.point(Vec3::new(0.95, 0.0, 0.0)));
    assert_relative_eq!(d, 0.1, epsilon = 1e-14);
}

#[test]
fn far_distance_on_ellipsoid_principal_ellipse() {
    // x-y section of Ellipsoid(1,1,1.2) is the unit circle; antipodal points
    // on it are pi apart along the equator (shorter than over the poles).
    let m = Manifold::ellipsoid(1.0, 1.0, 1.2).unwrap();
    let d = m.distance(&p3(1.0, 0.0, 0.0), &p3(-1.0, 0.0, 0.0));
    assert_relative_eq!(d, PI, epsilon = 1e-6);
}

#[test]
fn torus_of_revolution_inner_equator_is_geodesic() {
    let m = Manifold::torus_of_revolution(2.0, 0.5).unwrap();
    let p = m.point(Vec3::new(0.0, PI, 0.0));
    let v = TangentVector::new(p, Vec3::new(1.0, 0.0, 0.0));
    let (q, w) = m.geodesic_shoot(&v, PI).unwrap();
    assert_relative_eq!(q.coords, m.point(Vec3::new(PI, PI, 0.0)).coords, epsilon = 1e-9);
    assert_relative_eq!(w.components, v.components, epsilon = 1e-9);
    assert_relative_eq!(m.norm_at(&p, &v.components), 1.5, epsilon = 1e-15);
}

pub(crate) fn all_builtins() -> alloc::vec::Vec<Manifold> {
    let coeffs = alloc::vec![0.05, -0.03, 0.04, 0.02, 0.0, -0.02, 0.03, 0.01];
    let (inj, diam) = Manifold::conformal_sphere_estimates(1.0, &coeffs);
    alloc::vec![
        sphere(),
        Manifold::ellipsoid(1.0, 1.05, 1.1).unwrap(),
        unit_torus(),
        Manifold::flat_torus([1.0, 0.2], [0.1, 1.3]).unwrap(),
        Manifold::torus_of_revolution(2.0, 0.5).unwrap(),
        Manifold::conformal_sphere(1.0, coeffs, inj, diam).unwrap(),
    ]
}

pub(crate) fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn conformal_estimates_are_sane() {
    let (inj, diam) = Manifold::conformal_sphere_estimates(1.0, &[]);
    assert_relative_eq!(inj, 0.9 * PI, epsilon = 1e-3);
    assert_relative_eq!(diam, PI, epsilon = 1e-12);
}

#[test]
fn segment_samples_reproduce_length() {
    for m in all_builtins() {
        let mut r = rng(9);
        for _ in 0..5 {
            let p = m.random_point(&mut r);
            let v = m.random_tangent(&mut r, &p, 0.4 * m.inj());
            let (q, _) = m.geodesic_shoot(&v, 1.0).unwrap();
            let seg = m.geodesic_connect(&p, &q).unwrap();
            let pieces: f64 = seg.samples.windows(2).map(|w| m.distance(&w[0], &w[1])).sum();
            assert_relative_eq!(pieces, seg.length, max_relative = 1e-8);
            assert_eq!(seg.samples[0], p);
            assert_eq!(*seg.samples.last().unwrap(), q);
        }
    }
}
