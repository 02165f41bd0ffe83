use invmetric::kobayashi::*;
use invmetric::numerics::sampling::{ball_point, seeded};
use invmetric::{AffineMap, Domain, Error, Point};
use num_complex::Complex;
use proptest::prelude::*;
use rand::Rng;

fn c1(x: f64, y: f64) -> Point {
    Point::from_f64(&[x, y])
}

fn disk_graph(pitch: f64) -> FinslerGraph {
    let d = Domain::unit_ball(1);
    build_finsler_graph(&d, &Slice::full(Point::zeros(2), 1.0), pitch, 16).unwrap()
}

#[test]
fn infinitesimal_bounds_on_disk_and_polydisk() {
    let d = Domain::unit_ball(1);
    let (lo, up) = kob_inf_bounds(&d, &Point::zeros(2), &c1(1.0, 0.0)).unwrap();
    assert_eq!((lo, up), (0.5, 1.0));
    for r in [0.1, 0.5, 0.9] {
        let (lo, up) = kob_inf_bounds(&d, &c1(r, 0.0), &c1(1.0, 0.0)).unwrap();
        assert!((lo - 0.5 / (1.0 - r)).abs() < 1e-12 && (up - 1.0 / (1.0 - r)).abs() < 1e-12);
        let k = 1.0 / (1.0 - r * r);
        assert!(lo <= k && k <= up);
    }
    let p = Domain::polydisk(vec![1.0, 1.0]).unwrap();
    let (lo, up) = kob_inf_bounds(&p, &Point::zeros(4), &Point::complex_unit(2, 0)).unwrap();
    assert!((lo - 0.5).abs() < 1e-12 && (up - 1.0).abs() < 1e-12);
    assert_eq!(kob_inf_bounds(&d, &Point::zeros(2), &Point::zeros(2)).unwrap_err(), Error::ZeroDirection);
}

#[test]
fn lower_bound_examples() {
    let d = Domain::unit_ball(1);
    for r in [0.2, 0.6, 0.95] {
        let lb = kob_lower_bounds(&d, &Point::zeros(2), &c1(r, 0.0)).unwrap();
        assert!(lb.value >= 0.5 * (1.0 / (1.0 - r)).ln() - 1e-12);
        assert!(lb.value <= r.atanh() + 1e-12);
    }
    assert_eq!(kob_lower_bounds(&d, &c1(0.3, 0.1), &c1(0.3, 0.1)).unwrap().value, 0.0);
    let h = Domain::halfspaces(1, vec![c1(1.0, 0.0)], vec![1.0]).unwrap();
    let lb = kob_lower_bounds(&h, &Point::zeros(2), &c1(1.0 - 1e-3, 0.0)).unwrap();
    assert!((lb.value - 0.5 * 1e3f64.ln()).abs() < 1e-9);
    assert_eq!(lb.provenance, LowerProvenance::Hyperplane);
}

#[test]
fn disk_node_count_matches_area() {
    let h = 0.05;
    let g = disk_graph(h);
    let expected = std::f64::consts::PI * (1.0 - h / 2.0).powi(2) / (h * h);
    let n = g.node_count() as f64;
    assert!((n - expected).abs() < 0.05 * expected, "{n} {expected}");
}

#[test]
fn weights_positive_and_symmetric() {
    let g = disk_graph(0.1);
    let edges = g.edges();
    assert!(!edges.is_empty());
    assert!(edges.iter().all(|e| e.2 > 0.0 && e.2.is_finite()));
    let text = g.to_text();
    let back = FinslerGraph::from_text(&text).unwrap();
    assert_eq!(back.to_text(), text);
    assert_eq!(back.edges(), edges);
    assert!(FinslerGraph::from_text("finsler-graph 1\npitch x").is_err());
}

#[test]
fn refinement_does_not_lengthen_paths() {
    let d = Domain::unit_ball(1);
    // endpoints on every lattice, so each coarse path is also a fine path
    let (z1, z2) = (c1(-0.32, 0.24), c1(0.56, -0.4));
    let mut prev = f64::INFINITY;
    for h in [0.08, 0.04, 0.02] {
        let g = build_finsler_graph(&d, &Slice::full(Point::zeros(2), 1.0), h, 16).unwrap();
        let b = kob_dist_bracket(&d, &z1, &z2, &g).unwrap();
        assert!(b.path_upper <= prev + 1e-6, "{h}: {} > {prev}", b.path_upper);
        prev = b.path_upper;
    }
}

#[test]
fn disk_brackets_contain_poincare_distance() {
    let d = Domain::unit_ball(1);
    let g = disk_graph(0.01);
    for k in 1..10 {
        let r = k as f64 / 10.0;
        let b = kob_dist_bracket(&d, &Point::zeros(2), &c1(r, 0.0), &g).unwrap();
        assert!(b.contains(r.atanh(), 0.0), "{r}: {b:?}");
        assert!(b.upper <= 2.0 * b.lower * (1.0 + 1e-9));
    }
    let b = kob_dist_bracket(&d, &Point::zeros(2), &c1(0.9, 0.0), &g).unwrap();
    let q = (1.0f64 / 0.1).ln();
    assert!((b.path_upper - q).abs() < 0.03 * q);
    let z = c1(0.2, -0.1);
    let b = kob_dist_bracket(&d, &z, &z, &g).unwrap();
    assert_eq!((b.lower, b.upper), (0.0, 0.0));
}

#[test]
fn off_grid_pairs_bracket_the_truth() {
    let d = Domain::unit_ball(1);
    let g = disk_graph(0.02);
    let mut rng = seeded(3);
    for _ in 0..40 {
        let a = Point::new(ball_point::<f64>(&mut rng, 2)).scale(0.95);
        let b = Point::new(ball_point::<f64>(&mut rng, 2)).scale(0.95);
        let (za, zb) = (Complex::new(a[0], a[1]), Complex::new(b[0], b[1]));
        let truth = ((za - zb) / (Complex::new(1.0, 0.0) - za.conj() * zb)).norm().atanh();
        let br = kob_dist_bracket(&d, &a, &b, &g).unwrap();
        assert!(br.contains(truth, 1e-9), "{truth} {br:?}");
        assert!(br.finsler_upper <= 2.0 * br.lower * (1.0 + 1e-9));
    }
}

#[test]
fn radial_path_hugs_the_radius() {
    let d = Domain::unit_ball(1);
    let h = 0.02;
    let g = disk_graph(h);
    let (z1, z2) = (Point::zeros(2), c1(0.0, 0.8));
    let path = kob_geodesic_path(&d, &z1, &z2, &g).unwrap();
    assert!(path.iter().all(|p| p[0].abs() <= 2.0 * h));
    let raw = kob_dist_bracket(&d, &z1, &z2, &g).unwrap();
    assert!(polyline_length(&d, &path) <= polyline_length(&d, raw.path.as_ref().unwrap()) + 1e-12);
}

#[test]
fn smoothing_never_lengthens() {
    let d = Domain::affine_image(
        AffineMap::new(1, vec![Complex::new(1.5, 0.4)], vec![Complex::new(0.2, 0.0)]).unwrap(),
        Domain::polydisk(vec![1.0]).unwrap(),
    )
    .unwrap();
    let s = Slice::full(d.witness().clone(), 3.0);
    let g = build_finsler_graph(&d, &s, 0.05, 16).unwrap();
    let mut rng = seeded(8);
    for _ in 0..10 {
        let pick = |rng: &mut rand_chacha::ChaCha8Rng| loop {
            let p = Point::new(vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]);
            if d.contains(&p) && d.delta(&p).unwrap().value > 0.05 {
                return p;
            }
        };
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        let raw = kob_dist_bracket(&d, &a, &b, &g).unwrap();
        let smooth = kob_geodesic_path(&d, &a, &b, &g).unwrap();
        assert!(polyline_length(&d, &smooth) <= polyline_length(&d, raw.path.as_ref().unwrap()) * (1.0 + 1e-9));
    }
}

#[test]
fn central_pair_in_ball_follows_the_segment() {
    let d = Domain::unit_ball(2);
    let z2 = Point::from_f64(&[0.3, 0.2, -0.4, 0.1]);
    let g = build_finsler_graph(&d, &Slice::through(&Point::zeros(4), &z2, 1.0).unwrap(), 0.02, 16).unwrap();
    let path = kob_geodesic_path(&d, &Point::zeros(4), &z2, &g).unwrap();
    let e = z2.normalized().unwrap();
    for p in &path {
        let along = p.dot(&e);
        assert!(p.dist(&e.scale(along)) < 0.04);
    }
}

#[test]
fn nested_disks_order_the_uppers() {
    let small = Domain::unit_ball(1);
    let big = Domain::ball(Point::zeros(2), 1.5).unwrap();
    let (z1, z2) = (c1(-0.4, 0.3), c1(0.6, 0.1));
    let bs = kob_dist_bracket(&small, &z1, &z2, &build_finsler_graph(&small, &Slice::full(Point::zeros(2), 1.5), 0.03, 16).unwrap()).unwrap();
    let bb = kob_dist_bracket(&big, &z1, &z2, &build_finsler_graph(&big, &Slice::full(Point::zeros(2), 1.5), 0.03, 16).unwrap()).unwrap();
    assert!(bb.upper <= bs.upper && bb.finsler_upper <= bs.finsler_upper);
}

#[test]
fn affine_images_give_matching_finsler_uppers() {
    let mut rng = seeded(21);
    for (d, dim) in [(Domain::unit_ball(1), 1), (Domain::unit_ball(2), 2)] {
        for _ in 0..3 {
            let m: Vec<Complex<f64>> = (0..dim * dim)
                .map(|k| Complex::new(if k % (dim + 1) == 0 { 1.2 } else { 0.0 } + rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4)))
                .collect();
            let t: Vec<Complex<f64>> = (0..dim).map(|_| Complex::new(rng.gen_range(-1.0..1.0), 0.3)).collect();
            let a = AffineMap::new(dim, m, t).unwrap();
            let ad = Domain::affine_image(a.clone(), d.clone()).unwrap();
            let z1 = Point::new(ball_point::<f64>(&mut rng, 2 * dim)).scale(0.5);
            let z2 = Point::new(ball_point::<f64>(&mut rng, 2 * dim)).scale(0.8);
            let h = 0.04;
            let s = Slice::through(&z1, &z2, 2.0).unwrap();
            let e = s.basis[0].clone();
            let scale = a.apply_linear(&e).norm();
            let s2 = Slice::through(&a.apply(&z1), &a.apply(&z2), 2.0 * scale).unwrap();
            let g1 = build_finsler_graph(&d, &s, h, 16).unwrap();
            let g2 = build_finsler_graph(&ad, &s2, h * scale, 16).unwrap();
            assert_eq!(g1.node_count(), g2.node_count());
            let b1 = kob_dist_bracket(&d, &z1, &z2, &g1).unwrap();
            let b2 = kob_dist_bracket(&ad, &a.apply(&z1), &a.apply(&z2), &g2).unwrap();
            assert!((b1.finsler_upper - b2.finsler_upper).abs() < 1e-6, "{} {}", b1.finsler_upper, b2.finsler_upper);
            assert!(b1.lower <= b2.upper + 1e-9 && b2.lower <= b1.upper + 1e-9);
        }
    }
}

#[test]
fn tube_over_interval_sandwiches_hilbert() {
    let base = Domain::real_ball(Point::zeros(1), 1.0).unwrap();
    let tube = Domain::tube(base.clone()).unwrap();
    let g = build_finsler_graph(&tube, &Slice::full(Point::zeros(2), 6.0), 0.04, 16).unwrap();
    for (a, b) in [(-0.5, 0.5), (0.1, 0.9), (-0.95, 0.2)] {
        let hc = invmetric::hilbert::hilbert_dist(&base, &Point::from_f64(&[a]), &Point::from_f64(&[b])).unwrap().value;
        let br = kob_dist_bracket(&tube, &c1(a, 0.0), &c1(b, 0.0), &g).unwrap();
        assert!(br.lower <= hc && hc <= 2.0 * br.upper, "{hc} {br:?}");
        assert!(!br.windowed);
    }
}

#[test]
fn query_errors() {
    let d = Domain::unit_ball(1);
    let g = disk_graph(0.1);
    assert_eq!(kob_dist_bracket(&d, &Point::zeros(2), &c1(1.2, 0.0), &g).unwrap_err(), Error::NotInterior);
    let d2 = Domain::unit_ball(2);
    let g2 = build_finsler_graph(&d2, &Slice::through(&Point::zeros(4), &Point::complex_unit(2, 0), 1.0).unwrap(), 0.1, 8).unwrap();
    let off = Point::from_f64(&[0.0, 0.0, 0.3, 0.0]);
    assert_eq!(kob_dist_bracket(&d2, &Point::zeros(4), &off, &g2).unwrap_err(), Error::OutOfWindow);
    let tiny = build_finsler_graph(&d, &Slice::full(Point::zeros(2), 1.0), 5.0, 8);
    assert_eq!(tiny.unwrap_err(), Error::EmptyGraph);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn graham_sandwich_on_ellipsoid(x in -0.6f64..0.6, y in -0.6f64..0.6, u in -0.6f64..0.6, w in -0.6f64..0.6,
                                    vr in -1.0f64..1.0, vi in -1.0f64..1.0, wr in -1.0f64..1.0, wi in -1.0f64..1.0) {
        let d = Domain::ellipsoid(vec![1.0, 2.0]).unwrap();
        let z = Point::from_f64(&[x, y, u * 0.5, w * 0.5]);
        prop_assume!(d.contains(&z));
        let v = Point::from_f64(&[vr, vi, wr, wi]);
        prop_assume!(v.norm() > 1e-3);
        let (lo, up) = kob_inf_bounds(&d, &z, &v).unwrap();
        prop_assert!(lo > 0.0 && (up - 2.0 * lo).abs() < 1e-12 * up);
    }
}
