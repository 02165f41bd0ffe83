use num_complex::Complex;
use serde_json::json;

use crate::geometry::{DomainSpec, Point};
use crate::numerics::linalg::complex_complement;
use crate::numerics::sampling::{seeded, unit_vector};

type Domain = DomainSpec<f64>;

const LAMBDA_ANGLES: usize = 32;
const LAMBDA_RADII: usize = 8;
const DIRECTIONS_PER_POINT: usize = 8;

#[derive(Clone, Debug)]
pub struct DiskOptions {
    pub tol: f64,
    /// Number of boundary points probed.
    pub budget: usize,
    pub s_min: f64,
    pub s_max: f64,
    /// Ray-casting origin; the domain witness when None.
    pub center: Option<Point>,
    pub seed: u64,
}

impl Default for DiskOptions {
    fn default() -> Self {
        Self { tol: 1e-3, budget: 200, s_min: 0.05, s_max: 1.0, center: None, seed: 0xd15c }
    }
}

#[derive(Clone, Debug)]
pub struct DiskDetection {
    pub center: Point,
    pub direction: Point,
    pub radius: f64,
    /// max over the sampled closed disk of |signed boundary defect|.
    pub violation: f64,
}

impl DiskDetection {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "center": self.center.coords,
            "direction": self.direction.coords,
            "radius": self.radius,
            "violation": self.violation,
        })
    }
}

fn violation(d: &Domain, x: &Point, v: &Point, s: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..LAMBDA_ANGLES {
        let th = std::f64::consts::TAU * a as f64 / LAMBDA_ANGLES as f64;
        for k in 1..=LAMBDA_RADII {
            let lam = Complex::from_polar(s * k as f64 / LAMBDA_RADII as f64, th);
            let p = x + &v.cscale(lam);
            worst = worst.max(d.signed_defect(&p).abs());
        }
    }
    worst
}

/// Largest s in [0, s_max] with violation below tol, or 0 when even s_min fails.
fn disk_radius(d: &Domain, x: &Point, v: &Point, o: &DiskOptions) -> f64 {
    if violation(d, x, v, o.s_min) >= o.tol {
        return 0.0;
    }
    if violation(d, x, v, o.s_max) < o.tol {
        return o.s_max;
    }
    let (mut lo, mut hi) = (o.s_min, o.s_max);
    while hi - lo > 1e-4 * o.s_max {
        let mid = 0.5 * (lo + hi);
        if violation(d, x, v, mid) < o.tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Search for a complex affine disk x + lambda v (|lambda| <= s) inside the boundary, over boundary
/// points found by ray casting and directions in the complex tangent hyperplane.
pub fn detect_boundary_disk(d: &Domain, o: &DiskOptions) -> Option<DiskDetection> {
    if !d.is_complex() || d.dim() < 2 {
        return None;
    }
    let dim = d.dim();
    let n = 2 * dim;
    let c = o.center.clone().unwrap_or_else(|| d.witness().clone());
    if !d.contains(&c) {
        return None;
    }
    let mut rng = seeded(o.seed);
    let mut dirs: Vec<Point> = (0..n).flat_map(|i| [Point::unit(n, i), Point::unit(n, i).scale(-1.0)]).collect();
    while dirs.len() < o.budget.max(2 * n) {
        dirs.push(Point::new(unit_vector(&mut rng, n)));
    }
    let mut best: Option<DiskDetection> = None;
    for u in &dirs {
        let t = d.ray(&c, u);
        if !t.is_finite() {
            continue;
        }
        let x = c.along(u, t);
        let Ok(sup) = d.supporting_functional(&x) else { continue };
        let tangent: Vec<Point> = complex_complement(&[sup.nu.clone()], dim).iter().map(|v| Point::from_complex(v)).collect();
        let mut cands = tangent.clone();
        for _ in 0..DIRECTIONS_PER_POINT {
            let w: Vec<f64> = unit_vector(&mut rng, 2 * tangent.len());
            let v = tangent.iter().enumerate().fold(Point::zeros(n), |p, (k, b)| {
                &p + &b.cscale(Complex::new(w[2 * k], w[2 * k + 1]))
            });
            if let Some(v) = v.normalized() {
                cands.push(v);
            }
        }
        for v in cands {
            let s = disk_radius(d, &x, &v, o);
            if s > best.as_ref().map_or(0.0, |b| b.radius) {
                let viol = violation(d, &x, &v, s);
                best = Some(DiskDetection { center: x.clone(), direction: v, radius: s, violation: viol });
            }
        }
    }
    best.filter(|b| b.radius >= o.s_min)
}
