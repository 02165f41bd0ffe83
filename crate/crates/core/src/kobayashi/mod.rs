//! Two-sided bounds on the Kobayashi metric and distance of convex domains.

mod graph;

pub use graph::{build_finsler_graph, stencil, FinslerGraph, Slice};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::Piece;
use crate::geometry::{DomainSpec, Exactness, Point};
use crate::numerics::optim::{golden_section, nelder_mead, NelderMeadOptions};
use graph::{chord_length, line_delta};

type Domain = DomainSpec<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LowerProvenance {
    Hyperplane,
    Line,
    HalfFinsler,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum UpperProvenance {
    SegmentIntegral,
    PathIntegral,
    /// Poincare distance in a round disk inside the complex line through the two points.
    InscribedDisk,
}

#[derive(Clone, Debug)]
pub struct MetricBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_provenance: LowerProvenance,
    pub upper_provenance: UpperProvenance,
    /// Upper-density length of the best explicit curve (graph path or segment).
    pub finsler_upper: f64,
    /// Upper-density length of the graph path alone.
    pub path_upper: f64,
    pub path: Option<Vec<Point<f64>>>,
    /// The graph path runs close to the edge of the sampling window of an unbounded domain.
    pub windowed: bool,
}

impl MetricBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, k: f64, slack: f64) -> bool {
        self.lower <= k + slack && k <= self.upper + slack
    }
}

/// |v| / (2 delta(z; v)) <= k(z; v) <= |v| / delta(z; v).
pub fn kob_inf_bounds(d: &Domain, z: &Point<f64>, v: &Point<f64>) -> Result<(f64, f64)> {
    if !d.is_complex() {
        return Err(Error::NotComplex);
    }
    d.require_interior(z)?;
    if v.norm() == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let t = line_delta(d, z, v)?;
    Ok((v.norm() / (2.0 * t), v.norm() / t))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    pub provenance: LowerProvenance,
}

fn nu_of(n: &Point<f64>) -> Vec<Complex<f64>> {
    n.to_complex()
}

fn hyperplane_bound(z1: &Point<f64>, z2: &Point<f64>, xi: &Point<f64>, nu: &[Complex<f64>]) -> f64 {
    let f = |z: &Point<f64>| {
        let w = (z - xi).to_complex();
        w.iter().zip(nu).fold(Complex::new(0.0, 0.0), |a, (x, y)| a + x * y.conj()).norm()
    };
    let (a, b) = (f(z1), f(z2));
    if a > 0.0 && b > 0.0 {
        0.5 * (a / b).ln().abs()
    } else {
        0.0
    }
}

/// Lower bounds from complex hyperplanes missing the domain and from boundary points of the
/// complex line through z1, z2.
pub fn kob_lower_bounds(d: &Domain, z1: &Point<f64>, z2: &Point<f64>) -> Result<LowerBound> {
    if !d.is_complex() {
        return Err(Error::NotComplex);
    }
    d.require_interior(z1)?;
    d.require_interior(z2)?;
    let mut best = LowerBound { value: 0.0, provenance: LowerProvenance::Hyperplane };
    let diff = z2 - z1;
    if diff.norm() == 0.0 {
        return Ok(best);
    }
    let offer = |v: f64, p: LowerProvenance, best: &mut LowerBound| {
        if v > best.value {
            *best = LowerBound { value: v, provenance: p };
        }
    };
    for p in d.pieces() {
        if let Piece::Half { normal, offset } = p {
            let nu = nu_of(normal);
            let nn = normal.dot(normal);
            if nn > 0.0 {
                // the complex hyperplane <z, nu> = c lies in the real one <z, n> = c
                let xi = normal.scale(offset / nn);
                offer(hyperplane_bound(z1, z2, &xi, &nu), LowerProvenance::Hyperplane, &mut best);
            }
        }
    }
    let e = diff.normalized().unwrap();
    let ie = e.mul_i();
    let m = z1.lerp(z2, 0.5);
    let boundary = |theta: f64| -> Option<Point<f64>> {
        let u = e.scale(theta.cos()).along(&ie, theta.sin());
        let t = d.ray(&m, &u);
        t.is_finite().then(|| m.along(&u, t))
    };
    let line = |xi: &Point<f64>| 0.5 * (z1.dist(xi) / z2.dist(xi)).ln().abs();
    let plane = |xi: &Point<f64>| match d.supporting_functional(xi) {
        Ok(s) => hyperplane_bound(z1, z2, xi, &s.nu),
        Err(_) => 0.0,
    };
    let n = 64;
    let step = std::f64::consts::TAU / n as f64;
    let mut best_line = (0.0, None);
    let mut best_plane = (0.0, None);
    for k in 0..n {
        let th = step * k as f64;
        if let Some(xi) = boundary(th) {
            let (l, h) = (line(&xi), plane(&xi));
            if l > best_line.0 {
                best_line = (l, Some(th));
            }
            if h > best_plane.0 {
                best_plane = (h, Some(th));
            }
        }
    }
    let refine = |f: &dyn Fn(&Point<f64>) -> f64, th: f64| -> f64 {
        let g = |t: f64| boundary(t).map_or(f64::INFINITY, |xi| -f(&xi));
        let (_, v) = golden_section(g, th - step, th + step, 1e-12);
        (-v).max(0.0)
    };
    if let (v, Some(th)) = best_line {
        offer(v.max(refine(&line, th)), LowerProvenance::Line, &mut best);
    }
    if let (v, Some(th)) = best_plane {
        offer(v.max(refine(&plane, th)), LowerProvenance::Hyperplane, &mut best);
    }
    Ok(best)
}

/// Poincare distance of z1, z2 in the best round disk centred on their complex line and contained
/// in the domain.
pub fn inscribed_disk_upper(d: &Domain, z1: &Point<f64>, z2: &Point<f64>) -> f64 {
    let diff = z2 - z1;
    let ell = diff.norm();
    if ell == 0.0 {
        return 0.0;
    }
    let e = diff.normalized().unwrap();
    let ie = e.mul_i();
    let f = |mu: &[f64]| -> f64 {
        let c = z1.along(&e, mu[0]).along(&ie, mu[1]);
        if !d.contains(&c) {
            return f64::INFINITY;
        }
        let rho = match if d.dim() == 1 { d.delta(&c) } else { d.delta_dir(&c, &e) } {
            Ok(r) if r.exactness == Exactness::Exact => r.value * (1.0 - 1e-12),
            Ok(r) => r.value * (1.0 - 1e-7),
            Err(_) => return f64::INFINITY,
        };
        let a = Complex::new(-mu[0], -mu[1]) / rho;
        let b = Complex::new(ell - mu[0], -mu[1]) / rho;
        if a.norm() >= 1.0 || b.norm() >= 1.0 {
            return f64::INFINITY;
        }
        let q = (a - b).norm() / (Complex::new(1.0, 0.0) - a.conj() * b).norm();
        if q >= 1.0 {
            f64::INFINITY
        } else {
            q.atanh()
        }
    };
    let starts = [[0.0, 0.0], [0.5 * ell, 0.0], [ell, 0.0]];
    let mut best = f64::INFINITY;
    for s in &starts {
        let v = f(s);
        if !v.is_finite() {
            continue;
        }
        let opts = NelderMeadOptions { initial_step: 0.1 * ell.max(1e-3), max_iter: 600, ..Default::default() };
        let m = nelder_mead(f, s, &opts);
        best = best.min(m.value.min(v));
    }
    best * (1.0 + 1e-12)
}

fn upper_and_path(d: &Domain, z1: &Point<f64>, z2: &Point<f64>, g: &FinslerGraph) -> Result<(graph::GraphPath, f64)> {
    let gp = g.shortest(d, z1, z2)?;
    let seg = chord_length(d, z1, z2);
    Ok((gp, seg))
}

/// Bracket for K(z1, z2): upper from the graph path, the straight segment and an inscribed disk;
/// lower from half the Finsler length (full-dimensional graphs only), hyperplanes and the line bound.
pub fn kob_dist_bracket(d: &Domain, z1: &Point<f64>, z2: &Point<f64>, g: &FinslerGraph) -> Result<MetricBracket> {
    d.require_interior(z1)?;
    d.require_interior(z2)?;
    if z1.dist(z2) == 0.0 {
        return Ok(MetricBracket {
            lower: 0.0,
            upper: 0.0,
            lower_provenance: LowerProvenance::HalfFinsler,
            upper_provenance: UpperProvenance::SegmentIntegral,
            finsler_upper: 0.0,
            path_upper: 0.0,
            path: Some(vec![z1.clone(), z2.clone()]),
            windowed: false,
        });
    }
    let (gp, seg) = upper_and_path(d, z1, z2, g)?;
    let (finsler_upper, mut upper_provenance) =
        if gp.value <= seg { (gp.value, UpperProvenance::PathIntegral) } else { (seg, UpperProvenance::SegmentIntegral) };
    let disk = inscribed_disk_upper(d, z1, z2);
    let mut upper = finsler_upper;
    if disk < upper {
        upper = disk;
        upper_provenance = UpperProvenance::InscribedDisk;
    }
    let lb = kob_lower_bounds(d, z1, z2)?;
    let (mut lower, mut lower_provenance) = (lb.value, lb.provenance);
    if g.slice().is_full() && 0.5 * finsler_upper > lower {
        lower = 0.5 * finsler_upper;
        lower_provenance = LowerProvenance::HalfFinsler;
    }
    let lower = lower.min(upper);
    let windowed = gp.near_window && !d.is_bounded();
    Ok(MetricBracket {
        lower,
        upper,
        lower_provenance,
        upper_provenance,
        finsler_upper,
        path_upper: gp.value,
        path: Some(gp.points),
        windowed,
    })
}

/// Bracket without a graph: upper from the segment and the inscribed disk, lower from hyperplanes
/// and the line bound.
pub fn kob_quick_bracket(d: &Domain, z1: &Point<f64>, z2: &Point<f64>) -> Result<MetricBracket> {
    let lb = kob_lower_bounds(d, z1, z2)?;
    let seg = chord_length(d, z1, z2);
    let disk = inscribed_disk_upper(d, z1, z2);
    let (upper, upper_provenance) =
        if disk < seg { (disk, UpperProvenance::InscribedDisk) } else { (seg, UpperProvenance::SegmentIntegral) };
    Ok(MetricBracket {
        lower: lb.value.min(upper),
        upper,
        lower_provenance: lb.provenance,
        upper_provenance,
        finsler_upper: seg,
        path_upper: f64::INFINITY,
        path: None,
        windowed: false,
    })
}

/// Dijkstra path shortened by chord shortcuts that do not increase its upper-density length.
pub fn kob_geodesic_path(d: &Domain, z1: &Point<f64>, z2: &Point<f64>, g: &FinslerGraph) -> Result<Vec<Point<f64>>> {
    d.require_interior(z1)?;
    d.require_interior(z2)?;
    if z1.dist(z2) == 0.0 {
        return Ok(vec![z1.clone(), z2.clone()]);
    }
    let gp = g.shortest(d, z1, z2)?;
    let pts = gp.points;
    let w = gp.weights;
    let mut prefix = vec![0.0];
    for x in &w {
        prefix.push(prefix.last().unwrap() + x);
    }
    let mut out = vec![pts[0].clone()];
    let mut i = 0;
    let last = pts.len() - 1;
    while i < last {
        let mut next = i + 1;
        for j in (i + 2..=last).rev() {
            if chord_length(d, &pts[i], &pts[j]) <= prefix[j] - prefix[i] {
                next = j;
                break;
            }
        }
        out.push(pts[next].clone());
        i = next;
    }
    Ok(out)
}

/// Upper-density length of a polyline.
pub fn polyline_length(d: &Domain, path: &[Point<f64>]) -> f64 {
    path.windows(2).map(|w| chord_length(d, &w[0], &w[1])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_in_the_plane() {
        let s = stencil(2, 16);
        assert_eq!(s.len(), 16);
        assert!(s.contains(&vec![2, 1]) && s.contains(&vec![-1, -2]));
        assert_eq!(stencil(2, 8).len(), 8);
    }

    #[test]
    fn slice_coordinates_round_trip() {
        let s = Slice::through(&Point::from_f64(&[0.1, 0.0, 0.0, 0.2]), &Point::from_f64(&[0.3, 0.1, -0.2, 0.2]), 2.0).unwrap();
        let p = s.embed(&[0.3, -0.7]);
        let c = s.coords(&p).unwrap();
        assert!((c[0] - 0.3).abs() < 1e-14 && (c[1] + 0.7).abs() < 1e-14);
        assert!(s.coords(&Point::from_f64(&[0.0, 0.0, 1.0, 0.0])).is_none());
    }
}
