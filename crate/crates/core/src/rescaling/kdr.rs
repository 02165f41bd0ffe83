use serde_json::json;

use crate::geometry::support::polyhedral_rows;
use crate::geometry::{DomainSpec, Point};
use crate::numerics::lp::{self, LpOutcome};
use crate::numerics::optim::{golden_section, nelder_mead, NelderMeadOptions};
use crate::numerics::sampling::{seeded, unit_vector};

type Domain = DomainSpec<f64>;

const DISK_ANGLES: usize = 64;
/// Radius of the sampled search on the separating affine subspaces.
const SEPARATION_RADIUS: f64 = 8.0;
const SEPARATION_DIRS: usize = 32;
const SEPARATION_RADII: usize = 12;

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct KdrCondition {
    /// 1-based coordinate index.
    pub j: usize,
    pub pass: bool,
    /// Signed slack of the condition; negative values are violations.
    pub margin: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct KdrCheck {
    pub r: f64,
    pub tol: f64,
    /// r D e_1 and D e_j inside the domain.
    pub disks: Vec<KdrCondition>,
    /// e_j on the boundary.
    pub boundary: Vec<KdrCondition>,
    /// (e_j + span{e_{j+1}, ...}) disjoint from the domain.
    pub separation: Vec<KdrCondition>,
    pub passed: bool,
}

impl KdrCheck {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or_else(|_| json!(null))
    }

    pub fn first_failure(&self) -> Option<String> {
        for (name, list) in [("disk", &self.disks), ("boundary", &self.boundary), ("separation", &self.separation)] {
            if let Some(c) = list.iter().find(|c| !c.pass) {
                return Some(format!("{name} condition at e_{} (margin {:e})", c.j, c.margin));
            }
        }
        None
    }
}

pub fn kdr_check(d: &Domain, r: f64, tol: f64) -> KdrCheck {
    kdr_check_upto(d, r, tol, d.dim())
}

/// The conditions for the slice by span{e_1..e_m}.
pub fn kdr_check_upto(d: &Domain, r: f64, tol: f64, m: usize) -> KdrCheck {
    let dim = d.dim();
    let m = m.min(dim);
    let origin = Point::zeros(2 * dim);
    let inside0 = d.contains(&origin);
    let mut disks = Vec::new();
    let mut boundary = Vec::new();
    let mut separation = Vec::new();
    for j in 0..m {
        let e = Point::complex_unit(dim, j);
        let radius = if j == 0 { r } else { 1.0 };
        let margin = if inside0 { disk_margin(d, &e, radius) } else { f64::NEG_INFINITY };
        disks.push(KdrCondition { j: j + 1, pass: margin >= -tol, margin });

        let pass = d.contains(&e.scale(1.0 - tol)) && !d.contains(&e.scale(1.0 + tol));
        let margin = if inside0 { d.ray(&origin, &e) - 1.0 } else { f64::NEG_INFINITY };
        boundary.push(KdrCondition { j: j + 1, pass, margin });

        let span: Vec<Point> = (j + 1..m).map(|k| Point::complex_unit(dim, k)).collect();
        let (pass, margin) = separation_test(d, &e, &span, tol, j as u64);
        separation.push(KdrCondition { j: j + 1, pass, margin });
    }
    let passed = disks.iter().chain(&boundary).chain(&separation).all(|c| c.pass);
    KdrCheck { r, tol, disks, boundary, separation, passed }
}

/// min over the circle of ray(0, e^{i theta} e) / radius, minus one.
fn disk_margin(d: &Domain, e: &Point, radius: f64) -> f64 {
    let origin = Point::zeros(e.len());
    let ie = e.mul_i();
    let ray = |t: f64| d.ray(&origin, &e.scale(t.cos()).along(&ie, t.sin()));
    let step = std::f64::consts::TAU / DISK_ANGLES as f64;
    let (mut imin, mut best) = (0, f64::INFINITY);
    for i in 0..DISK_ANGLES {
        let v = ray(step * i as f64);
        if v < best {
            best = v;
            imin = i;
        }
    }
    let c = step * imin as f64;
    let (_, refined) = golden_section(ray, c - step, c + step, 1e-12);
    best.min(refined) / radius - 1.0
}

fn real_span(span: &[Point]) -> Vec<Point> {
    span.iter().flat_map(|b| [b.clone(), b.mul_i()]).collect()
}

/// Pass when no point of e + span lies in the domain with depth above tol. The margin is minus
/// the deepest depth found (a lower bound for polyhedra, a sampled estimate otherwise).
fn separation_test(d: &Domain, e: &Point, span: &[Point], tol: f64, salt: u64) -> (bool, f64) {
    let rb = real_span(span);
    if let Some((rows, rhs)) = polyhedral_rows(d) {
        // maximise s subject to <e + W w, n_i> + s |n_i| <= c_i
        let k = rb.len();
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        let lp_rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|n| {
                let n = Point::new(n.clone());
                let mut row: Vec<f64> = rb.iter().map(|b| b.dot(&n)).collect();
                row.push(n.norm());
                row
            })
            .collect();
        let b: Vec<f64> = rows.iter().zip(&rhs).map(|(n, ci)| ci - Point::new(n.clone()).dot(e)).collect();
        return match lp::maximize(&c, &lp_rows, &b, Some(1e6)) {
            Ok(LpOutcome::Optimal { value, .. }) => (value <= tol, -value),
            Ok(LpOutcome::Infeasible) => (true, f64::INFINITY),
            _ => (false, f64::NEG_INFINITY),
        };
    }
    let point = |w: &[f64]| rb.iter().zip(w).fold(e.clone(), |p, (b, c)| p.along(b, *c));
    let depth = |w: &[f64]| -d.signed_defect(&point(w));
    let k = rb.len();
    let mut best_w = vec![0.0; k];
    let mut best = depth(&best_w);
    if k > 0 {
        let mut rng = seeded(0x5e9a ^ salt);
        let mut cands: Vec<(f64, Vec<f64>)> = Vec::new();
        for i in 0..SEPARATION_RADII {
            let rad = 1e-3 * (SEPARATION_RADIUS / 1e-3).powf(i as f64 / (SEPARATION_RADII - 1) as f64);
            for _ in 0..SEPARATION_DIRS {
                let w: Vec<f64> = unit_vector::<f64>(&mut rng, k).into_iter().map(|x| x * rad).collect();
                cands.push((depth(&w), w));
            }
        }
        cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
        for (v, w) in cands.into_iter().take(3).chain(std::iter::once((best, best_w.clone()))) {
            if v > best {
                best = v;
                best_w = w.clone();
            }
            let m = nelder_mead(|x: &[f64]| -depth(x), &w, &NelderMeadOptions { initial_step: 0.05, max_iter: 1500, ..Default::default() });
            if -m.value > best {
                best = -m.value;
                best_w = m.x;
            }
        }
    }
    // the cross-polytope of radius tol around the deepest point must not fit inside
    let p = point(&best_w);
    let n = p.len();
    let fits = (0..n).all(|i| {
        let u = Point::unit(n, i);
        d.contains(&p.along(&u, tol)) && d.contains(&p.along(&u, -tol))
    });
    (!fits, -best)
}
