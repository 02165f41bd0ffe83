use invmetric::geometry::DomainSpec;
use invmetric::hilbert::*;
use invmetric::numerics::sampling::{ball_point, seeded};
use invmetric::{AffineMap, Domain, Domain32, Error, Point, Point32};
use num_complex::Complex;
use proptest::prelude::*;
use rand::Rng;

fn interval() -> Domain {
    Domain::real_ball(Point::zeros(1), 1.0).unwrap()
}

fn square() -> Domain {
    let n = |a: f64, b: f64| Point::from_f64(&[a, b]);
    Domain::halfspaces(1, vec![n(1.0, 0.0), n(-1.0, 0.0), n(0.0, 1.0), n(0.0, -1.0)], vec![1.0; 4]).unwrap()
}

fn random_map(rng: &mut impl Rng, d: usize) -> AffineMap {
    let m: Vec<Complex<f64>> = (0..d * d)
        .map(|k| {
            let diag = if k % (d + 1) == 0 { 1.5 } else { 0.0 };
            Complex::new(diag + rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
        })
        .collect();
    let t: Vec<Complex<f64>> = (0..d).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    AffineMap::new(d, m, t).unwrap()
}

fn interior_pair(rng: &mut impl Rng, d: &Domain, shrink: f64) -> (Point, Point) {
    let n = d.real_dim();
    let w = d.witness().clone();
    let pick = |rng: &mut _| loop {
        let p = &w + &Point::new(ball_point::<f64>(rng, n)).scale(shrink);
        if d.contains(&p) {
            return p;
        }
    };
    (pick(rng), pick(rng))
}

#[test]
fn interval_matches_closed_form() {
    let d = interval();
    for k in 1..10 {
        let r = k as f64 / 10.0;
        let v = hilbert_dist(&d, &Point::zeros(1), &Point::from_f64(&[r])).unwrap();
        assert!((v.value - 0.5 * ((1.0 + r) / (1.0 - r)).ln()).abs() < 1e-12, "r={r}");
        assert!(v.a.unwrap().dist(&Point::from_f64(&[-1.0])) < 1e-15);
        assert!(v.b.unwrap().dist(&Point::from_f64(&[1.0])) < 1e-15);
    }
}

#[test]
fn complex_ball_radius_matches_interval() {
    let d = Domain::unit_ball(3);
    let u = Point::new(vec![0.3, -0.1, 0.5, 0.2, -0.4, 0.6]).normalized().unwrap();
    for k in 1..10 {
        let r = k as f64 / 10.0;
        let v = hilbert_dist(&d, &Point::zeros(6), &u.scale(r)).unwrap();
        assert!((v.value - r.atanh()).abs() < 1e-12);
    }
}

#[test]
fn square_cross_ratio() {
    let v = hilbert_dist(&square(), &Point::zeros(2), &Point::from_f64(&[0.5, 0.0])).unwrap();
    assert!((v.value - 0.5 * 3f64.ln()).abs() < 1e-14);
}

#[test]
fn coincident_points_give_zero() {
    let p = Point::from_f64(&[0.2, -0.3]);
    assert_eq!(hilbert_dist(&square(), &p, &p).unwrap().value, 0.0);
}

#[test]
fn line_inside_half_plane_warns() {
    let d = Domain::halfspaces(1, vec![Point::from_f64(&[1.0, 0.0])], vec![1.0]).unwrap();
    let v = hilbert_dist(&d, &Point::zeros(2), &Point::from_f64(&[0.0, 3.0])).unwrap();
    assert_eq!(v.value, 0.0);
    assert_eq!(v.warning, Some(HilbertWarning::NotProperlyConvex));
}

#[test]
fn exterior_point_rejected() {
    assert_eq!(hilbert_dist(&interval(), &Point::zeros(1), &Point::from_f64(&[1.5])).unwrap_err(), Error::NotInterior);
}

#[test]
fn norm_examples() {
    let d = interval();
    let one = Point::from_f64(&[1.0]);
    assert!((hilbert_norm(&d, &Point::zeros(1), &one).unwrap() - 1.0).abs() < 1e-15);
    let r = 0.6;
    let want = 0.5 * (1.0 / (1.0 - r) + 1.0 / (1.0 + r));
    assert!((hilbert_norm(&d, &Point::from_f64(&[r]), &one).unwrap() - want).abs() < 1e-14);
    let half_line = Domain::real_halfspaces(1, vec![Point::from_f64(&[-1.0])], vec![0.0])
        .unwrap()
        .with_witness(Point::from_f64(&[1.0]))
        .unwrap();
    assert!((hilbert_norm(&half_line, &one, &one).unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(hilbert_norm(&d, &Point::zeros(1), &Point::zeros(1)).unwrap_err(), Error::ZeroDirection);
}

#[test]
fn geodesic_midpoint_and_additivity() {
    let d = interval();
    let g = hilbert_geodesic(&d, &Point::from_f64(&[-0.5]), &Point::from_f64(&[0.5]), 3).unwrap();
    assert!(g[1][0].abs() < 1e-15);

    let d = square();
    let (x, y) = (Point::from_f64(&[-0.7, 0.2]), Point::from_f64(&[0.9, -0.6]));
    let g = hilbert_geodesic(&d, &x, &y, 17).unwrap();
    let total = hilbert_dist(&d, &x, &y).unwrap().value;
    let sum: f64 = g.windows(2).map(|w| hilbert_dist(&d, &w[0], &w[1]).unwrap().value).sum();
    assert!((sum - total).abs() < 1e-9);
    for w in g.windows(2) {
        assert!((hilbert_dist(&d, &w[0], &w[1]).unwrap().value - total / 16.0).abs() < 1e-9);
    }
}

#[test]
fn klein_disk_half_distance_point() {
    let d = Domain::unit_ball(1);
    let g = hilbert_geodesic(&d, &Point::zeros(2), &Point::from_f64(&[0.9, 0.0]), 3).unwrap();
    assert!((g[1].norm() - (0.9f64.atanh() / 2.0).tanh()).abs() < 1e-12);
}

#[test]
fn geodesic_with_one_endpoint_at_infinity() {
    let d = Domain::halfspaces(1, vec![Point::from_f64(&[1.0, 0.0])], vec![1.0]).unwrap();
    let (x, y) = (Point::from_f64(&[0.5, 0.0]), Point::from_f64(&[-4.0, 0.0]));
    let g = hilbert_geodesic(&d, &x, &y, 9).unwrap();
    let total = hilbert_dist(&d, &x, &y).unwrap().value;
    for w in g.windows(2) {
        assert!((hilbert_dist(&d, &w[0], &w[1]).unwrap().value - total / 8.0).abs() < 1e-12);
    }
}

#[test]
fn affine_invariance() {
    let mut rng = seeded(11);
    let domains = [Domain::unit_ball(2), square(), Domain::ellipsoid(vec![1.0, 2.0]).unwrap(), Domain::polydisk(vec![1.0, 0.5]).unwrap()];
    for d in &domains {
        for _ in 0..40 {
            let a = random_map(&mut rng, d.dim());
            let ad = Domain::affine_image(a.clone(), d.clone()).unwrap();
            let (x, y) = interior_pair(&mut rng, d, 0.6);
            let h0 = hilbert_dist(d, &x, &y).unwrap().value;
            let h1 = hilbert_dist(&ad, &a.apply(&x), &a.apply(&y)).unwrap().value;
            assert!((h0 - h1).abs() < 1e-9 * (1.0 + h0), "{} {h0} {h1}", d.kind_name());
        }
    }
}

#[test]
fn slice_invariance_ball_and_polytope() {
    let mut rng = seeded(12);
    // ball in C^2 = R^4 sliced by the real plane x + span{e, f}
    let ball = Domain::unit_ball(2);
    let cube = Domain::halfspaces(
        2,
        (0..4).flat_map(|k| [Point::unit(4, k), Point::unit(4, k).scale(-1.0)]).collect(),
        vec![1.0; 8],
    )
    .unwrap();
    for _ in 0..30 {
        let (x, y) = interior_pair(&mut rng, &ball, 0.9);
        let e = (&y - &x).normalized().unwrap();
        let g = Point::new(ball_point::<f64>(&mut rng, 4));
        let f = (&g - &e.scale(g.dot(&e))).normalized().unwrap();
        let to2 = |p: &Point| Point::from_f64(&[(p - &x).dot(&e), (p - &x).dot(&f)]);
        // disk: centre is the projection of 0, radius from Pythagoras
        let c = to2(&Point::zeros(4));
        let off = &Point::zeros(4) - &(&x + &(&e.scale(c[0]) + &f.scale(c[1])));
        let disk = Domain::real_ball(c, (1.0 - off.dot(&off)).sqrt()).unwrap();
        let h0 = hilbert_dist(&ball, &x, &y).unwrap().value;
        let h1 = hilbert_dist(&disk, &to2(&x), &to2(&y)).unwrap().value;
        assert!((h0 - h1).abs() < 1e-9 * (1.0 + h0));

        let (x, y) = interior_pair(&mut rng, &cube, 0.9);
        let e = (&y - &x).normalized().unwrap();
        let f = (&g - &e.scale(g.dot(&e))).normalized().unwrap();
        let (mut normals, mut offsets) = (vec![], vec![]);
        for k in 0..4 {
            for s in [1.0, -1.0] {
                let n = Point::unit(4, k).scale(s);
                normals.push(Point::from_f64(&[n.dot(&e), n.dot(&f)]));
                offsets.push(1.0 - n.dot(&x));
            }
        }
        let keep: Vec<usize> = (0..8).filter(|&i| normals[i].norm() > 1e-12).collect();
        let slice = Domain::real_halfspaces(2, keep.iter().map(|&i| normals[i].clone()).collect(), keep.iter().map(|&i| offsets[i]).collect()).unwrap();
        let p2 = |p: &Point| Point::from_f64(&[(p - &x).dot(&e), (p - &x).dot(&f)]);
        let h0 = hilbert_dist(&cube, &x, &y).unwrap().value;
        let h1 = hilbert_dist(&slice, &p2(&x), &p2(&y)).unwrap().value;
        assert!((h0 - h1).abs() < 1e-9 * (1.0 + h0));
    }
}

#[test]
fn norm_integrates_to_distance() {
    for d in [square(), Domain::ellipsoid(vec![1.0, 3.0]).unwrap()] {
        let (x, y) = if d.dim() == 1 {
            (Point::from_f64(&[-0.8, 0.5]), Point::from_f64(&[0.7, -0.9]))
        } else {
            (Point::from_f64(&[0.1, 0.2, -0.5, 0.1]), Point::from_f64(&[-0.6, 0.1, 0.4, -0.3]))
        };
        let g = hilbert_geodesic(&d, &x, &y, 2).unwrap();
        assert!(g[1].dist(&y) < 1e-15);
        let v = &y - &x;
        let n = 1000;
        let mut s = 0.0;
        for k in 0..=n {
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * hilbert_norm(&d, &x.lerp(&y, k as f64 / n as f64), &v).unwrap();
        }
        s /= 3.0 * n as f64;
        let h = hilbert_dist(&d, &x, &y).unwrap().value;
        assert!((s - h).abs() < 1e-6, "{s} {h}");
    }
}

#[test]
fn single_precision_instantiation() {
    let d = Domain32::real_ball(Point32::zeros(1), 1.0).unwrap();
    let v = hilbert_dist(&d, &Point32::zeros(1), &Point32::new(vec![0.5])).unwrap();
    assert!((v.value - 0.5 * 3f32.ln()).abs() < 1e-6);
}

fn grid(f: impl Fn(f64) -> f64, df: Option<&dyn Fn(f64) -> f64>, n: usize) -> GridSamples<f64> {
    let step = 2.0 / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| -1.0 + step * i as f64).collect();
    GridSamples { x0: -1.0, step, values: xs.iter().map(|&x| f(x)).collect(), derivatives: df.map(|g| xs.iter().map(|&x| g(x)).collect()) }
}

const WINDOW: ProbeWindow<f64> = ProbeWindow { x_max: 0.5, h_max: 0.5 };

#[test]
fn parabola_is_symmetric() {
    let q = quasi_symmetry_estimate(&grid(|x| x * x, None, 201), &WINDOW).unwrap();
    assert!((q.h_hat - 1.0).abs() < 1e-9 && !q.divergent && q.pairs > 0);
}

#[test]
fn quartic_matches_brute_force() {
    let n = 401;
    let s = grid(|x| x.powi(4), Some(&|x| 4.0 * x.powi(3)), n);
    let q = quasi_symmetry_estimate(&s, &WINDOW).unwrap();
    // exhaustive scan written from the definition
    let mut best: f64 = 1.0;
    for i in 0..n {
        for j in 0..n {
            let x = s.x0 + s.step * i as f64;
            let h = s.step * j as f64 - s.step * i as f64;
            if x.abs() > 0.5 + 1e-12 || h == 0.0 || h.abs() > 0.5 + 1e-12 || i < j.abs_diff(i) || (2 * i).checked_sub(j).map_or(true, |m| m >= n) {
                continue;
            }
            let dd = |h: f64| (x + h).powi(4) - x.powi(4) - 4.0 * x.powi(3) * h;
            if dd(h) < 1e-12 && dd(-h) < 1e-12 {
                continue;
            }
            best = best.max(dd(h) / dd(-h));
        }
    }
    assert!((q.h_hat - best).abs() < 1e-9 * best, "{} {best}", q.h_hat);
    let sup = (3.0 + 6f64.sqrt()) / (3.0 - 6f64.sqrt());
    assert!(q.h_hat <= sup * (1.0 + 1e-9) && q.h_hat > 0.99 * sup);
    assert!(!q.divergent);
}

#[test]
fn one_sided_flat_diverges() {
    let f = |x: f64| x.max(0.0).powi(2);
    let mut last = 0.0;
    for n in [51, 101, 201] {
        let q = quasi_symmetry_estimate(&grid(f, Some(&|x: f64| 2.0 * x.max(0.0)), n), &WINDOW).unwrap();
        assert!(q.divergent && q.h_hat.is_infinite());
        let (x, h) = q.worst.unwrap();
        assert!(x <= 0.0 && h > 0.0);
        last = q.step;
    }
    assert!(last < 0.011);
}

#[test]
fn concave_samples_rejected() {
    let err = quasi_symmetry_estimate(&grid(|x| -x * x, None, 41), &WINDOW).unwrap_err();
    assert!(matches!(err, Error::NonconvexSamples(_)));
}

#[test]
fn refinement_does_not_decrease_estimate() {
    let f = |x: f64| x.powi(4) + 0.3 * x * x * x.abs();
    let df = |x: f64| 4.0 * x.powi(3) + 0.9 * x * x.abs();
    let mut prev = 1.0;
    for n in [21, 41, 81, 161] {
        let q = quasi_symmetry_estimate(&grid(f, Some(&df), n), &WINDOW).unwrap();
        assert!(q.h_hat >= prev - 1e-12);
        prev = q.h_hat;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triangle_inequality(seed in any::<u64>(), which in 0usize..3) {
        let d = [square(), Domain::unit_ball(2), Domain::ellipsoid(vec![1.0, 2.0]).unwrap()][which].clone();
        let mut rng = seeded(seed);
        let (x, y) = interior_pair(&mut rng, &d, 0.95);
        let (z, _) = interior_pair(&mut rng, &d, 0.95);
        let h = |a: &Point, b: &Point| hilbert_dist(&d, a, b).unwrap().value;
        prop_assert!(h(&x, &y) <= h(&x, &z) + h(&z, &y) + 1e-9);
        prop_assert!((h(&x, &y) - h(&y, &x)).abs() < 1e-9 * (1.0 + h(&x, &y)));
        prop_assert!(h(&x, &y) >= 0.0);
    }
}

#[allow(dead_code)]
fn _generic_over_scalar<S: invmetric::Real>(d: &DomainSpec<S>, x: &invmetric::geometry::Point<S>) -> S {
    hilbert_dist(d, x, x).unwrap().value
}
