//! Hausdorff distance between closed domains truncated to a ball around the origin.

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::numerics::optim::{nelder_mead, NelderMeadOptions};
use crate::numerics::sampling::{ball_point, seeded, unit_vector};

type Domain = DomainSpec<f64>;

struct Truncated<'a> {
    d: &'a Domain,
    radius: f64,
    inner: Point<f64>,
    samples: Vec<Point<f64>>,
}

impl Truncated<'_> {
    fn contains_closed(&self, p: &Point<f64>) -> bool {
        p.norm() <= self.radius * (1.0 + 1e-12) && (self.d.contains(p) || self.d.signed_defect(p) <= 1e-12)
    }

    fn boundary_point(&self, u: &Point<f64>) -> Point<f64> {
        let t_dom = self.d.ray(&self.inner, u);
        let b = self.inner.dot(u);
        let c = self.inner.dot(&self.inner) - self.radius * self.radius;
        let t_ball = -b + (b * b - c).max(0.0).sqrt();
        self.inner.along(u, t_dom.min(t_ball))
    }

    /// Distance from an outside point to the truncated set, by radial parametrisation of its boundary.
    fn distance(&self, p: &Point<f64>, start: &Point<f64>) -> f64 {
        let f = |x: &[f64]| -> f64 {
            match Point::new(x.to_vec()).normalized() {
                Some(u) => p.dist(&self.boundary_point(&u)),
                None => f64::INFINITY,
            }
        };
        let x0 = (start - &self.inner).normalized().unwrap_or_else(|| Point::unit(p.len(), 0));
        let mut best = f(&x0.coords);
        let mut x = x0.coords;
        for step in [0.2, 0.02] {
            let m = nelder_mead(f, &x, &NelderMeadOptions { initial_step: step, max_iter: 600, f_tol: 1e-14, x_tol: 1e-11 });
            if m.value < best {
                best = m.value;
                x = m.x;
            }
        }
        best
    }
}

fn truncate(d: &Domain, radius: f64, n: usize, seed: u64) -> Option<Truncated<'_>> {
    let dim = d.real_dim();
    let mut rng = seeded(seed);
    let origin = Point::zeros(dim);
    let inner = if d.contains(&origin) {
        Some(origin)
    } else if d.witness().norm() < radius {
        Some(d.witness().clone())
    } else {
        None
    };
    let mut volume: Vec<Point<f64>> = Vec::new();
    for _ in 0..n {
        let p = Point::new(ball_point::<f64>(&mut rng, dim)).scale(radius);
        if d.contains(&p) {
            volume.push(p);
        }
    }
    let inner = inner.or_else(|| volume.first().cloned())?;
    let mut t = Truncated { d, radius, inner, samples: volume };
    for _ in 0..n {
        let u = Point::new(unit_vector(&mut rng, dim));
        let b = t.boundary_point(&u);
        t.samples.push(b);
    }
    Some(t)
}

fn one_sided(a: &Truncated, b: &Truncated) -> f64 {
    let mut crude: Vec<(f64, usize, usize)> = Vec::with_capacity(a.samples.len());
    for (i, p) in a.samples.iter().enumerate() {
        if b.contains_closed(p) {
            continue;
        }
        let (j, dmin) = b
            .samples
            .iter()
            .enumerate()
            .map(|(j, s)| (j, p.dist(s)))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        crude.push((dmin, i, j));
    }
    crude.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let mut best: f64 = 0.0;
    for (c, i, j) in crude {
        if c <= best {
            break;
        }
        let refined = b.distance(&a.samples[i], &b.samples[j]).min(c);
        best = best.max(refined);
    }
    best
}

/// Estimate of d_H(cl D1 ∩ B(0,R), cl D2 ∩ B(0,R)) from n samples per set.
pub fn local_hausdorff(d1: &Domain, d2: &Domain, radius: f64, n: usize, seed: u64) -> Result<f64> {
    if d1.real_dim() != d2.real_dim() {
        return Err(Error::DimensionMismatch { expected: d1.real_dim(), got: d2.real_dim() });
    }
    let t1 = truncate(d1, radius, n, seed);
    let t2 = truncate(d2, radius, n, seed.wrapping_add(1));
    match (t1, t2) {
        (None, None) => Err(Error::EmptyIntersection),
        (Some(_), None) | (None, Some(_)) => Ok(f64::INFINITY),
        (Some(a), Some(b)) => Ok(one_sided(&a, &b).max(one_sided(&b, &a))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_nested_disks() {
        let a = Domain::unit_ball(1);
        assert!(local_hausdorff(&a, &a, 2.0, 400, 3).unwrap() < 1e-9);
        let b = Domain::ball(Point::zeros(2), 1.1).unwrap();
        let h = local_hausdorff(&a, &b, 2.0, 400, 3).unwrap();
        assert!((h - 0.1).abs() < 1e-6, "{h}");
    }
}
