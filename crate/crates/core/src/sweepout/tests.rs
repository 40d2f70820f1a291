use super::*;
use crate::cycles::cycle_length;
use crate::manifold::tests::rng;
use crate::math::PI;

fn sphere() -> Manifold {
    Manifold::round_sphere(1.0).unwrap()
}

fn regular_vertices(m: &Manifold) -> [crate::manifold::Point; 4] {
    let s = 1.0 / 3f64.sqrt();
    [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
        .map(|c| m.point(crate::math::Vec3::new(c[0] * s, c[1] * s, c[2] * s)))
}

#[test]
fn edge_signs_cancel_in_pairs() {
    let t = edge_sign_table();
    assert_eq!(t[0], [1, 0, -1, 0, 1, 0]);
    assert_eq!(t[1], [-1, 1, 0, -1, 0, 0]);
    assert_eq!(t[2], [0, -1, 1, 0, 0, -1]);
    assert_eq!(t[3], [0, 0, 0, 1, -1, 1]);
    for e in 0..6 {
        assert_eq!((0..4).map(|i| t[i][e]).sum::<i8>(), 0);
        assert_eq!((0..4).filter(|&i| t[i][e] != 0).count(), 2);
    }
}

#[test]
fn latitude_family_on_sphere() {
    let m = sphere();
    let fam = latitude_sweepout(&m, 3).unwrap();
    assert_eq!(fam.len(), 3);
    assert!(fam.members.iter().all(|c| c.n() == 9));
    let l = fam.lengths();
    assert!(l[0] == 0.0 && l[2] == 0.0);
    assert!((l[1] - 2.0 * PI).abs() < 1e-9);
    assert!(latitude_sweepout(&m, 1).is_err());
    assert!(latitude_sweepout(&Manifold::flat_torus([1.0, 0.0], [0.0, 1.0]).unwrap(), 5).is_err());
}

#[test]
fn tetrahedron_family_cancels_edges() {
    let m = sphere();
    let v = regular_vertices(&m);
    let fam = tetrahedron_sweepout(&m, &v, &SweepConfig::default()).unwrap();
    let full = fam.mark("faces_full").unwrap();
    let g = &fam.members[full];
    assert_eq!(g.k(), 12);
    // every chain has a partner traversing the same points backwards
    let tol = 1e-9;
    for a in 0..12 {
        let pa = &g.vertices()[a];
        let partner = (0..12).filter(|&b| b != a).find(|&b| {
            let pb = &g.vertices()[b];
            pa.iter().zip(pb.iter().rev()).all(|(x, y)| m.chord(x, y) < tol)
        });
        assert!(partner.is_some(), "chain {a} has no opposite partner");
    }
    let edges = 6.0 * (-1.0f64 / 3.0).acos();
    assert!((cycle_length(g) - 2.0 * edges).abs() < 1e-6);
    let l = fam.lengths();
    assert!(l[0] < 1e-3 && *l.last().unwrap() < 1e-9);
    assert!(fam.max_member().1 <= 8.0 * PI);
    assert!(fam.max_gap(&m) <= m.inj() / 8.0, "gap {}", fam.max_gap(&m));
}

#[test]
fn two_disc_family_has_at_most_two_curves() {
    let m = sphere();
    let v = regular_vertices(&m);
    let fam = two_disc_refined_sweepout(&m, &v, &SweepConfig::default()).unwrap();
    assert!(fam.members.iter().all(|c| c.k() <= 2));
    let l = fam.lengths();
    assert!(l[0] < 1e-3 && *l.last().unwrap() < 1e-3);
    let face = 3.0 * (-1.0f64 / 3.0).acos();
    let u = fam.mark("union_12").unwrap();
    assert!((l[u] - 2.0 * face).abs() < 1e-6);
    let q = fam.mark("quadrilateral").unwrap();
    assert!((l[q] - 4.0 * (-1.0f64 / 3.0).acos()).abs() < 1e-6);
    assert!(fam.max_member().1 <= 4.0 * m.diam());
    assert!(fam.max_gap(&m) <= m.inj() / 8.0, "gap {}", fam.max_gap(&m));
}

#[test]
fn minmax_on_latitudes_finds_the_equator() {
    let m = sphere();
    let fam = latitude_sweepout(&m, 17).unwrap();
    let cfg = SweepConfig { rounds: 10, ..Default::default() };
    let rep = minmax(&m, &fam, &cfg, &Sequential).unwrap();
    assert!((rep.width_estimate - 2.0 * PI).abs() < 0.01 * 2.0 * PI);
    assert!(rep.is_monotone(1e-12));
    let mass = rep.certificate().unwrap().total_mass;
    assert!((mass - 2.0 * PI).abs() < 1e-6, "{mass}");
}

#[test]
fn loop_family_on_flat_torus() {
    let m = Manifold::flat_torus([1.0, 0.0], [0.0, 1.0]).unwrap();
    let fam = parallel_loop_family(&m, (0, 1), 9).unwrap();
    assert!(fam.lengths().iter().all(|l| (l - 1.0).abs() < 1e-12));
    let rep = minmax(&m, &fam, &SweepConfig { rounds: 2, ..Default::default() }, &Sequential).unwrap();
    assert!((rep.width_estimate - 1.0).abs() < 1e-9);
    assert!((rep.certificate().unwrap().total_mass - 1.0).abs() < 1e-9);
}

#[test]
fn nonsimply_connected_loops() {
    let flat = Manifold::flat_torus([1.0, 0.0], [0.0, 1.0]).unwrap();
    let rep = verify_nonsimply_connected(&flat, None, &SweepConfig::default(), &mut rng(3)).unwrap();
    let mass = rep.certificate().unwrap().total_mass;
    assert!((mass - 1.0).abs() < 1e-4, "{mass}");
    assert!(rep.bound_checked.unwrap().satisfied);

    let rev = Manifold::torus_of_revolution(2.0, 0.5).unwrap();
    let rep = verify_nonsimply_connected(&rev, None, &SweepConfig::default(), &mut rng(4)).unwrap();
    let mass = rep.certificate().unwrap().total_mass;
    assert!((mass - 3.0 * PI).abs() < 1e-3, "{mass}");
    assert!(rep.bound_checked.unwrap().satisfied);

    assert!(verify_nonsimply_connected(&sphere(), None, &SweepConfig::default(), &mut rng(1)).is_err());
}

#[test]
fn theorem1_q2_on_round_sphere() {
    let m = sphere();
    let rep = verify_theorem1_q2(&m, None, &SweepConfig::default(), &mut rng(7), &Sequential).unwrap();
    let mass = rep.certificate().expect("certificate").total_mass;
    assert!((mass - 2.0 * PI).abs() < 0.01 * 2.0 * PI, "{mass}");
    assert!(rep.bounds.iter().all(|b| b.satisfied));
}

#[test]
fn latitude_family_on_oblate_ellipsoid() {
    let m = Manifold::ellipsoid(1.0, 1.0, 1.2).unwrap();
    let fam = latitude_sweepout(&m, 65).unwrap();
    let (i, max) = fam.max_member();
    assert_eq!(i, 32);
    assert!((max - 2.0 * PI).abs() < 1e-2, "{max}");
}

#[test]
fn equal_vertices_give_zero_families() {
    let m = sphere();
    let p = m.point(crate::math::Vec3::new(0.0, 0.0, 1.0));
    let v = [p; 4];
    for fam in [
        tetrahedron_sweepout(&m, &v, &SweepConfig::default()).unwrap(),
        two_disc_refined_sweepout(&m, &v, &SweepConfig::default()).unwrap(),
    ] {
        assert!(!fam.is_empty());
        assert!(fam.lengths().iter().all(|&l| l == 0.0));
    }
}

#[test]
fn flat_tetrahedron_peaks_at_the_face_perimeters() {
    let m = Manifold::flat_torus([1.0, 0.0], [0.0, 1.0]).unwrap();
    let xy = [(0.5, 0.5), (0.6, 0.5), (0.5, 0.62), (0.43, 0.44)];
    let v = xy.map(|(x, y)| m.point(crate::math::Vec3::new(x, y, 0.0)));
    let fam = tetrahedron_sweepout(&m, &v, &SweepConfig::default()).unwrap();
    let edges: f64 = TETRA_EDGES
        .iter()
        .map(|&(a, b)| ((xy[a].0 - xy[b].0).powi(2) + (xy[a].1 - xy[b].1).powi(2)).sqrt())
        .sum();
    let (i, max) = fam.max_member();
    assert_eq!(i, fam.mark("faces_full").unwrap());
    assert!((max - 2.0 * edges).abs() < 1e-9, "{max} vs {}", 2.0 * edges);
    assert!(fam.lengths()[0] < 1e-9);
    assert!(*fam.lengths().last().unwrap() < 1e-9);
}

#[test]
fn tiny_circles_have_no_candidate() {
    let m = sphere();
    let members = (0..5)
        .map(|i| {
            let r = 1e-3 * (1.0 + i as f64);
            let mut pts: Vec<_> = (0..6)
                .map(|j| {
                    let a = 2.0 * PI * j as f64 / 6.0;
                    m.point_in_direction(crate::math::Vec3::new(r * a.cos(), r * a.sin(), 1.0))
                })
                .collect();
            pts.push(pts[0]);
            PolygonalCycle::from_vertices(&m, alloc::vec![pts], 1e-9).unwrap()
        })
        .collect();
    let fam = CycleFamily::new(members, BoundaryCondition::Free, Provenance::UserSupplied);
    let rep = minmax(&m, &fam, &SweepConfig { rounds: 30, ..Default::default() }, &Sequential).unwrap();
    let eps = SweepConfig::default().flow.eps_collapse_for(&m);
    assert!(rep.width_estimate <= eps, "{}", rep.width_estimate);
    assert!(rep.is_monotone(1e-9 * m.diam()));
    assert!(rep.stationary_candidate.is_none());
    assert!(rep.certificate().is_none());
}

#[test]
fn elongated_flat_torus_loop() {
    let m = Manifold::flat_torus([1.0, 0.0], [0.0, 3.0]).unwrap();
    let rep = verify_nonsimply_connected(&m, None, &SweepConfig::default(), &mut rng(5)).unwrap();
    let mass = rep.certificate().unwrap().total_mass;
    assert!((mass - 1.0).abs() < 1e-4, "{mass}");
    assert!((m.diam() - 10f64.sqrt() / 2.0).abs() < 1e-12);
    assert!(rep.bound_checked.unwrap().satisfied);
}

#[test]
fn pull_down_keeps_count_and_chains() {
    let m = sphere();
    let fam = latitude_sweepout(&m, 9).unwrap();
    let rep = minmax(&m, &fam, &SweepConfig { rounds: 3, ..Default::default() }, &Sequential).unwrap();
    assert_eq!(rep.family.len(), fam.len());
    assert!(rep.family.members.iter().zip(&fam.members).all(|(a, b)| a.k() == b.k()));
    let eps = SweepConfig::default().flow.eps_collapse_for(&m);
    assert!(cycle_length(&rep.family.members[0]) <= eps);
    assert!(cycle_length(rep.family.members.last().unwrap()) <= eps);
    assert!(rep.width_estimate <= rep.initial_max);
}
