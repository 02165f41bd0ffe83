use invmetric::geometry::io::{domain_to_json, parse_domain};
use invmetric::geometry::{asymptotic_cone_dirs, DomainSpec, Exactness, Point as P};
use invmetric::{AffineMap, Domain, Domain32, Error, Point};
use num_complex::Complex;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn half_plane_re_lt_1() -> Domain {
    Domain::halfspaces(1, vec![Point::from_f64(&[1.0, 0.0])], vec![1.0]).unwrap()
}

#[test]
fn disk_ray_from_centre() {
    let d = Domain::unit_ball(1);
    let hit = d.ray_boundary(&Point::zeros(2), &Point::from_f64(&[1.0, 0.0])).unwrap();
    assert!((hit.t - 1.0).abs() < 1e-15);
    assert!(hit.point.unwrap().dist(&Point::from_f64(&[1.0, 0.0])) < 1e-15);
}

#[test]
fn half_plane_ray_parallel_to_boundary_is_infinite() {
    let d = half_plane_re_lt_1();
    let i_e1 = Point::from_f64(&[1.0, 0.0]).mul_i();
    let hit = d.ray_boundary(&Point::zeros(2), &i_e1).unwrap();
    assert!(hit.t.is_infinite() && hit.point.is_none());
}

#[test]
fn ray_rejects_exterior_and_zero_direction() {
    let d = Domain::unit_ball(1);
    assert_eq!(d.ray_boundary(&Point::from_f64(&[2.0, 0.0]), &Point::from_f64(&[1.0, 0.0])).unwrap_err(), Error::NotInterior);
    assert_eq!(d.ray_boundary(&Point::zeros(2), &Point::zeros(2)).unwrap_err(), Error::ZeroDirection);
}

#[test]
fn ball_delta_is_exact() {
    let d = Domain::unit_ball(2);
    let r = d.delta(&Point::from_f64(&[0.5, 0.0, 0.0, 0.0])).unwrap();
    assert_eq!(r.exactness, Exactness::Exact);
    assert!((r.value - 0.5).abs() < 1e-15);
}

/// Distance from z to the boundary of {|z1|^2 + |z2|^4 < 1}. The domain is invariant under
/// independent phase rotations, so the nearest boundary point shares the phases of z and the
/// problem reduces to a dense scan over |z1|^2 = s.
fn ellipsoid_distance_bruteforce(z: &Point) -> f64 {
    let (a1, a2) = (z.complex(0).norm(), z.complex(1).norm());
    let n = 2_000_000;
    (0..=n)
        .map(|i| {
            let s = i as f64 / n as f64;
            let (r1, r2) = (s.sqrt(), (1.0 - s).powf(0.25));
            ((a1 - r1).powi(2) + (a2 - r2).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn ellipsoid_delta_matches_bruteforce() {
    let d = Domain::ellipsoid(vec![1.0, 2.0]).unwrap();
    for z in [[0.3, 0.1, 0.2, -0.1], [0.0, 0.0, 0.6, 0.0], [0.7, 0.0, 0.1, 0.1]] {
        let z = Point::from_f64(&z);
        let r = d.delta(&z).unwrap();
        assert_eq!(r.exactness, Exactness::Refined);
        let brute = ellipsoid_distance_bruteforce(&z);
        assert!(r.value <= brute + 1e-7, "{} vs {}", r.value, brute);
        assert!(r.value >= brute - 1e-7, "{} vs {}", r.value, brute);
    }
}

#[test]
fn directional_distance_closed_forms() {
    let ball = Domain::unit_ball(2);
    let z0 = Point::zeros(4);
    let e2 = Point::complex_unit(2, 1);
    assert!((ball.delta_dir(&z0, &e2).unwrap().value - 1.0).abs() < 1e-15);
    // off-centre slice: z = 0.6 e1, direction e2 -> sqrt(1 - 0.36)
    let z = Point::from_f64(&[0.6, 0.0, 0.0, 0.0]);
    assert!((ball.delta_dir(&z, &e2).unwrap().value - 0.8).abs() < 1e-14);
    let poly = Domain::polydisk(vec![1.0, 1.0]).unwrap();
    let z = Point::from_f64(&[0.9, 0.0, 0.1, 0.0]);
    assert!((poly.delta_dir(&z, &e2).unwrap().value - 0.9).abs() < 1e-14);
    let line = Point::from_f64(&[1.0, 0.0, 1.0, 0.0]);
    let want = 0.1 * 2f64.sqrt();
    assert!((poly.delta_dir(&z, &line).unwrap().value - want).abs() < 1e-14);
}

#[test]
fn directional_distance_numeric_agrees_with_angle_sweep() {
    let e = Domain::ellipsoid(vec![1.0, 2.0]).unwrap();
    let z = Point::from_f64(&[0.2, 0.1, 0.5, -0.2]);
    let v = Point::from_f64(&[0.3, 0.4, 1.0, 0.2]).normalized().unwrap();
    let got = e.delta_dir(&z, &v).unwrap();
    assert_eq!(got.exactness, Exactness::Refined);
    let iv = v.mul_i();
    let mut sweep = f64::INFINITY;
    for k in 0..20000 {
        let th = std::f64::consts::TAU * k as f64 / 20000.0;
        let u = v.scale(th.cos()).along(&iv, th.sin());
        sweep = sweep.min(e.ray(&z, &u));
    }
    assert!((got.value - sweep).abs() < 1e-6, "{} vs {}", got.value, sweep);
}

#[test]
fn one_dimensional_line_distance_is_boundary_distance() {
    let sq = Domain::halfspaces(
        1,
        vec![Point::from_f64(&[1.0, 0.0]), Point::from_f64(&[-1.0, 0.0]), Point::from_f64(&[0.0, 1.0]), Point::from_f64(&[0.0, -1.0])],
        vec![1.0; 4],
    )
    .unwrap();
    let z = Point::from_f64(&[0.5, 0.2]);
    let a = sq.delta(&z).unwrap().value;
    let b = sq.delta_dir(&z, &Point::from_f64(&[0.0, 1.0])).unwrap().value;
    assert!((a - 0.5).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
}

#[test]
fn supporting_functional_smooth_and_corner() {
    let d = Domain::unit_ball(1);
    let s = d.supporting_functional(&Point::from_f64(&[1.0, 0.0])).unwrap();
    assert!(s.normal.dist(&Point::from_f64(&[1.0, 0.0])) < 1e-15);
    assert!((s.nu[0] - c(1.0, 0.0)).norm() < 1e-15);

    let sq = Domain::real_halfspaces(
        2,
        vec![Point::from_f64(&[1.0, 0.0]), Point::from_f64(&[-1.0, 0.0]), Point::from_f64(&[0.0, 1.0]), Point::from_f64(&[0.0, -1.0])],
        vec![1.0; 4],
    )
    .unwrap();
    let s = sq.supporting_functional(&Point::from_f64(&[1.0, 1.0])).unwrap();
    let h = 0.5f64.sqrt();
    assert!(s.normal.dist(&Point::from_f64(&[h, h])) < 1e-12);

    // two disks meeting at a corner: normal lies in the cone of the face normals
    let d1 = Domain::ball(Point::from_f64(&[1.0, 0.0]), 2f64.sqrt()).unwrap();
    let d2 = Domain::ball(Point::from_f64(&[-1.0, 0.0]), 2f64.sqrt()).unwrap();
    let lens = Domain::intersection(vec![d1, d2]).unwrap();
    let s = lens.supporting_functional(&Point::from_f64(&[0.0, 1.0])).unwrap();
    assert!(s.normal.dist(&Point::from_f64(&[0.0, 1.0])) < 1e-12);

    assert!(matches!(d.supporting_functional(&Point::from_f64(&[0.5, 0.0])), Err(Error::NotBoundary(_))));
}

#[test]
fn scaling_map_doubles_the_disk() {
    let d = Domain::unit_ball(1);
    let img = Domain::affine_image(AffineMap::scaling(1, 2.0), d).unwrap();
    let t = img.ray(&Point::zeros(2), &Point::from_f64(&[0.0, 1.0]));
    assert!((t - 2.0).abs() < 1e-14);
    assert_eq!(img.delta(&Point::zeros(2)).unwrap().exactness, Exactness::Exact);
    assert!((img.delta(&Point::zeros(2)).unwrap().value - 2.0).abs() < 1e-14);
}

#[test]
fn singular_map_rejected() {
    let m = AffineMap::new(2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)], vec![c(0.0, 0.0); 2]).unwrap();
    assert!(matches!(Domain::affine_image(m, Domain::unit_ball(2)), Err(Error::Singular(_))));
}

#[test]
fn tube_is_unbounded_in_imaginary_directions() {
    let base = Domain::real_halfspaces(1, vec![Point::from_f64(&[1.0]), Point::from_f64(&[-1.0])], vec![1.0, 1.0]).unwrap();
    let t = Domain::tube(base).unwrap();
    assert!(!t.is_bounded());
    let dirs = vec![Point::from_f64(&[0.0, 1.0]), Point::from_f64(&[0.0, -1.0]), Point::from_f64(&[1.0, 0.0])];
    assert_eq!(asymptotic_cone_dirs(&t, &dirs).len(), 2);
    assert!(Domain::polydisk(vec![1.0, 2.0]).unwrap().is_bounded());
    assert!(!half_plane_re_lt_1().is_bounded());
}

#[test]
fn halfspace_witness_found_off_origin() {
    // strip 2 < Re z < 3 does not contain the origin
    let d = Domain::halfspaces(1, vec![Point::from_f64(&[1.0, 0.0]), Point::from_f64(&[-1.0, 0.0])], vec![3.0, -2.0]).unwrap();
    assert!(d.contains(d.witness()));
}

#[test]
fn json_roundtrip_nested() {
    let m = AffineMap::new(2, vec![c(1.0, 0.5), c(0.1, 0.0), c(0.0, -0.3), c(2.0, 0.0)], vec![c(0.1, 0.2), c(-0.3, 0.0)]).unwrap();
    let inner = Domain::intersection(vec![Domain::polydisk(vec![1.0, 0.7]).unwrap(), Domain::ellipsoid(vec![1.0, 2.0]).unwrap()]).unwrap();
    let d = Domain::affine_image(m, inner).unwrap();
    let text = domain_to_json(&d);
    let back = parse_domain(&text).unwrap();
    assert_eq!(domain_to_json(&back), text);
}

#[test]
fn single_precision_instantiation() {
    let d = Domain32::unit_ball(1);
    let t = d.ray(&P::<f32>::zeros(2), &P::<f32>::from_f64(&[0.0, 1.0]));
    assert!((t - 1.0).abs() < 1e-6);
    let d64: DomainSpec<f64> = d.cast();
    assert!(d64.contains(&Point::from_f64(&[0.5, 0.5])));
}

fn arb_domain() -> impl Strategy<Value = Domain> {
    prop_oneof![
        (0.5f64..2.0).prop_map(|r| Domain::ball(Point::zeros(4), r).unwrap()),
        (0.5f64..2.0, 0.5f64..2.0).prop_map(|(a, b)| Domain::polydisk(vec![a, b]).unwrap()),
        (1.0f64..3.0, 1.0f64..3.0).prop_map(|(a, b)| Domain::ellipsoid(vec![a, b]).unwrap()),
        prop::collection::vec(-1.0f64..1.0, 8).prop_map(|m| {
            let mat = vec![c(1.0 + m[0] * 0.3, m[1] * 0.3), c(m[2] * 0.3, m[3] * 0.3), c(m[4] * 0.3, m[5] * 0.3), c(1.0 + m[6] * 0.3, m[7] * 0.3)];
            let map = AffineMap::new(2, mat, vec![c(m[1], m[2]), c(m[3], m[0])]).unwrap();
            Domain::affine_image(map, Domain::polydisk(vec![1.0, 0.8]).unwrap()).unwrap()
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ray_hits_lie_on_the_boundary(d in arb_domain(), dir in prop::collection::vec(-1.0f64..1.0, 4), s in 0.0f64..0.9) {
        let u = match Point::new(dir).normalized() { Some(u) => u, None => return Ok(()) };
        let w = d.witness().clone();
        let t0 = d.ray(&w, &Point::from_f64(&[1.0, 0.0, 0.0, 0.0]));
        let z = w.along(&Point::from_f64(&[1.0, 0.0, 0.0, 0.0]), s * t0.min(1.0));
        let hit = d.ray_boundary(&z, &u).unwrap();
        prop_assert!(hit.t.is_finite());
        let p = hit.point.unwrap();
        prop_assert!(d.signed_defect(&p).abs() < 1e-8);
        prop_assert!(d.contains(&z.along(&u, hit.t * (1.0 - 1e-6))));
        prop_assert!(!d.contains(&z.along(&u, hit.t * (1.0 + 1e-6) + 1e-9)));
    }

    #[test]
    fn delta_bounds_rays_and_line_distance(d in arb_domain(), dir in prop::collection::vec(-1.0f64..1.0, 4)) {
        let v = match Point::new(dir).normalized() { Some(v) => v, None => return Ok(()) };
        let z = d.witness().clone();
        let delta = d.delta(&z).unwrap().value;
        let line = d.delta_dir(&z, &v).unwrap().value;
        prop_assert!(delta <= d.ray(&z, &v) + 1e-9);
        prop_assert!(delta <= line + 1e-7);
    }

    #[test]
    fn json_roundtrip_is_lossless(d in arb_domain()) {
        let text = domain_to_json(&d);
        let back = parse_domain(&text).unwrap();
        prop_assert_eq!(domain_to_json(&back), text);
    }
}
