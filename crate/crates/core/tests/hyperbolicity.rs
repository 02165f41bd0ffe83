use invmetric::hilbert::hilbert_dist;
use invmetric::hyperbolicity::*;
use invmetric::numerics::sampling::seeded;
use invmetric::{Domain, Error, Point};
use proptest::prelude::*;
use rand::Rng;

fn random_tree(n: usize, seed: u64) -> FiniteMetric {
    let mut rng = seeded(seed);
    let parent: Vec<(usize, f64)> = (1..n).map(|i| (rng.gen_range(0..i), rng.gen_range(0.1..2.0))).collect();
    let depth_path = |mut i: usize| {
        let mut out = vec![(i, 0.0)];
        let mut acc = 0.0;
        while i > 0 {
            let (p, w) = parent[i - 1];
            acc += w;
            i = p;
            out.push((i, acc));
        }
        out
    };
    FiniteMetric::from_fn(n, |i, j| {
        let a = depth_path(i);
        let b = depth_path(j);
        for (x, da) in &a {
            if let Some((_, db)) = b.iter().find(|(y, _)| y == x) {
                return da + db;
            }
        }
        unreachable!()
    })
    .unwrap()
}

fn literal_delta(m: &FiniteMetric) -> f64 {
    let n = m.len();
    let mut best: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    let v = gromov_product(m, x, y, w).min(gromov_product(m, y, z, w)) - gromov_product(m, x, z, w);
                    best = best.max(v);
                }
            }
        }
    }
    best
}

fn euclidean(pts: &[[f64; 2]]) -> FiniteMetric {
    FiniteMetric::from_fn(pts.len(), |i, j| ((pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2)).sqrt()).unwrap()
}

#[test]
fn gromov_product_examples() {
    let m = FiniteMetric::from_fn(3, |i, j| (i as f64 - j as f64).abs()).unwrap();
    assert_eq!(gromov_product(&m, 0, 2, 1), 0.0);
    assert_eq!(gromov_product(&m, 0, 0, 2), m.d(0, 2));
    assert_eq!(gromov_product(&m, 0, 1, 0), 0.0);
}

#[test]
fn trees_have_zero_delta() {
    for seed in 0..5 {
        let m = random_tree(30, seed);
        let r = four_point_delta(&m, seed).unwrap();
        assert!(r.exhaustive && r.quadruples == 27405);
        assert!(r.delta <= 1e-12, "{}", r.delta);
    }
}

#[test]
fn pair_sum_formula_matches_literal_definition() {
    let mut rng = seeded(4);
    for _ in 0..10 {
        let pts: Vec<[f64; 2]> = (0..9).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let m = euclidean(&pts);
        let fast = four_point_delta(&m, 0).unwrap().delta;
        assert!((fast - literal_delta(&m)).abs() < 1e-12);
    }
}

#[test]
fn euclidean_square_grows_linearly() {
    let d1 = four_point_delta(&euclidean(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]), 0).unwrap().delta;
    let d5 = four_point_delta(&euclidean(&[[0.0, 0.0], [5.0, 0.0], [5.0, 5.0], [0.0, 5.0]]), 0).unwrap().delta;
    assert!((d1 - (2f64.sqrt() - 1.0)).abs() < 1e-12);
    assert!((d5 - 5.0 * d1).abs() < 1e-12);
}

#[test]
fn klein_disk_samples_are_uniformly_thin() {
    let d = Domain::real_ball(Point::zeros(2), 1.0).unwrap();
    let mut rng = seeded(9);
    let pts: Vec<Point> = (0..200)
        .map(|_| {
            let (r, th) = (0.99 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
            Point::from_f64(&[r * th.cos(), r * th.sin()])
        })
        .collect();
    let m = FiniteMetric::from_fn(200, |i, j| hilbert_dist(&d, &pts[i], &pts[j]).unwrap().value).unwrap();
    let r = four_point_delta(&m, 1).unwrap();
    assert!(!r.exhaustive && r.quadruples == SAMPLED_QUADRUPLES);
    assert!(r.delta <= 3f64.ln() + 0.1, "{}", r.delta);
}

#[test]
fn too_few_points() {
    let m = FiniteMetric::from_fn(3, |_, _| 1.0).unwrap();
    assert_eq!(four_point_delta(&m, 0).unwrap_err(), Error::TooFewPoints { need: 4, got: 3 });
}

#[test]
fn invalid_metrics_rejected() {
    let labels = || vec!["a".to_string(), "b".to_string(), "c".to_string()];
    assert!(FiniteMetric::new(labels(), vec![0.0, 1.0, 5.0, 1.0, 0.0, 1.0, 5.0, 1.0, 0.0]).is_err());
    assert!(FiniteMetric::new(labels(), vec![0.0, 1.0, 1.0, 2.0, 0.0, 1.0, 1.0, 1.0, 0.0]).is_err());
    assert!(FiniteMetric::new(labels(), vec![0.0; 4]).is_err());
}

#[test]
fn csv_round_trip() {
    let m = random_tree(7, 3);
    let text = m.to_csv();
    assert!(text.starts_with("0,1,2,3,4,5,6\n"));
    assert_eq!(FiniteMetric::from_csv(&text).unwrap(), m);
    let named = FiniteMetric::new(vec!["x,1".into(), "y".into()], vec![0.0, 0.1, 0.1, 0.0]).unwrap();
    assert_eq!(FiniteMetric::from_csv(&named.to_csv()).unwrap(), named);
}

#[test]
fn bracket_metrics_keep_widths() {
    let lo = vec![0.0, 1.0, 1.0, 0.0];
    let up = vec![0.0, 2.0, 2.0, 0.0];
    let m = FiniteMetric::from_brackets(vec!["p".into(), "q".into()], &lo, &up).unwrap();
    assert_eq!(m.d(0, 1), 1.5);
    assert_eq!(m.uncertainty().unwrap()[1], 1.0);
}

#[test]
fn thin_triangles() {
    let line: Vec<Point> = (0..5).map(|k| Point::from_f64(&[k as f64])).collect();
    let rev: Vec<Point> = line.iter().rev().cloned().collect();
    let e = |a: &Point, b: &Point| a.dist(b);
    let single = [line[0].clone()];
    assert_eq!(thin_triangle_measure([&line, &rev, &single], e).unwrap(), 0.0);
    // tripod: legs of a star, measured with the tree metric
    let leg = |k: usize| -> Vec<Point> { (0..4).map(|s| Point::from_f64(&[k as f64, s as f64])).collect() };
    let tree = |a: &Point, b: &Point| if a[0] == b[0] { (a[1] - b[1]).abs() } else { a[1] + b[1] };
    let side = |i: usize, j: usize| -> Vec<Point> {
        let mut s: Vec<Point> = leg(i).into_iter().rev().collect();
        s.extend(leg(j).into_iter().skip(1));
        s
    };
    let (ab, bc, ca) = (side(0, 1), side(1, 2), side(2, 0));
    // the centre is shared, so every vertex sits on another side
    let centre_fixed = |a: &Point, b: &Point| if a[1] == 0.0 && b[1] == 0.0 { 0.0 } else { tree(a, b) };
    assert_eq!(thin_triangle_measure([&ab, &bc, &ca], centre_fixed).unwrap(), 0.0);
    let far = [Point::from_f64(&[9.0])];
    assert_eq!(thin_triangle_measure([&line, &rev, &far], e).unwrap_err(), Error::MismatchedEndpoints);
}

#[test]
fn visual_metric_on_trees_is_rho() {
    let m = random_tree(25, 7);
    for lambda in [0.2, 1.0, 3.0] {
        let v = visual_metric(&m, 0, lambda).unwrap();
        for i in 0..25 {
            for j in 0..25 {
                assert!((v.d_vis(i, j) - v.rho(i, j)).abs() <= 1e-12);
            }
        }
    }
    let two = FiniteMetric::from_fn(2, |_, _| 1.3).unwrap();
    let v = visual_metric(&two, 0, 0.7).unwrap();
    assert_eq!(v.d_vis, v.rho);
}

#[test]
fn default_lambda_floor() {
    assert!((default_lambda(0.0f64) - 2f64.ln() / 0.4).abs() < 1e-15);
    assert!((default_lambda(1.0f64) - 2f64.ln() / 4.0).abs() < 1e-15);
}

#[test]
fn gromov_product_tracks_geodesic_distance_in_trees() {
    // in a tree (x|y)_z equals the distance from z to the geodesic [x, y]
    let n = 20;
    let m = random_tree(n, 11);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let on_geodesic: Vec<usize> = (0..n).filter(|&w| (m.d(x, w) + m.d(w, y) - m.d(x, y)).abs() < 1e-12).collect();
                let dist = on_geodesic.iter().map(|&w| m.d(z, w)).fold(f64::INFINITY, f64::min);
                let g = gromov_product(&m, x, y, z);
                assert!(g <= dist + 1e-12 && g >= dist - 1e-12);
            }
        }
    }
}

#[test]
fn quasigeodesic_samples() {
    let d = Domain::unit_ball(1);
    let xi = Point::from_f64(&[1.0, 0.0]);
    let s = sample_quasigeodesic(&d, &Point::zeros(2), &xi, &[0.0, 1.0, 2f64.ln() / 2.0]).unwrap();
    assert_eq!(s[0], Point::zeros(2));
    assert!((s[1][0] - (1.0 - (-2f64).exp())).abs() < 1e-15);
    assert!((s[2].dist(&xi) - 0.5).abs() < 1e-15);
    let e = sample_quasigeodesic(&d, &Point::zeros(2), &Point::from_f64(&[0.5, 0.0]), &[0.0]).unwrap_err();
    assert!(matches!(e, Error::NotBoundary(_)));
}

#[test]
fn alpha_fit_of_exact_linear_metric() {
    let (a, b) = fit_alpha_from_probes(&[(1.0, 1.0)], 0.25, 0.05).unwrap();
    assert_eq!((a, b), (1.0, 0.0));
    let probes: Vec<(f64, f64)> = (1..=12).map(|k| (k as f64 * 0.5, 2.0 * k as f64 * 0.5 + 0.3)).collect();
    let (a, b) = fit_alpha_from_probes(&probes, 0.25, 0.05).unwrap();
    assert!((a - 2.0).abs() < 0.02 && (b - 0.3).abs() < 0.1, "{a} {b}");
}

#[test]
fn disk_is_one_regular() {
    let d = Domain::unit_ball(1);
    let t: Vec<f64> = (0..9).map(|k| 0.25 * k as f64).collect();
    let opts = AlphaFitOptions { pitch: 0.02, ..Default::default() };
    let fit = fit_alpha_regularity(&d, &Point::zeros(2), &[Point::from_f64(&[1.0, 0.0])], &t, &opts).unwrap();
    assert!(fit.alpha_hat <= 1.1, "{}", fit.alpha_hat);
    for p in &fit.probes {
        assert!(p.upper >= (p.t - p.s) - 0.2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn delta_invariances(seed in any::<u64>(), c in 0.1f64..10.0) {
        let mut rng = seeded(seed);
        let pts: Vec<[f64; 2]> = (0..10).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let m = euclidean(&pts);
        let base = four_point_delta(&m, 0).unwrap().delta;
        let scaled = four_point_delta(&m.scaled(c), 0).unwrap().delta;
        prop_assert!((scaled - c * base).abs() < 1e-12 * (1.0 + c));
        let mut perm: Vec<usize> = (0..10).collect();
        for i in (1..10).rev() { perm.swap(i, rng.gen_range(0..=i)); }
        prop_assert!((four_point_delta(&m.permuted(&perm), 0).unwrap().delta - base).abs() < 1e-12);
        let mut dup = pts.clone();
        dup.push(pts[rng.gen_range(0..10)]);
        prop_assert!((four_point_delta(&euclidean(&dup), 0).unwrap().delta - base).abs() < 1e-12);
    }

    #[test]
    fn visual_metric_is_a_metric_below_rho(seed in any::<u64>(), l1 in 0.1f64..2.0, dl in 0.0f64..2.0) {
        let mut rng = seeded(seed);
        let pts: Vec<[f64; 2]> = (0..12).map(|_| [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]).collect();
        let m = euclidean(&pts);
        let v = visual_metric(&m, 0, l1).unwrap();
        let w = visual_metric(&m, 0, l1 + dl).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                prop_assert!(v.d_vis(i, j) <= v.rho(i, j));
                prop_assert_eq!(v.d_vis(i, j), v.d_vis(j, i));
                prop_assert!(w.rho(i, j) <= v.rho(i, j));
                for k in 0..12 {
                    prop_assert!(v.d_vis(i, k) <= v.d_vis(i, j) + v.d_vis(j, k) + 1e-15);
                }
            }
        }
    }
}
