use std::collections::HashMap;

use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::kobayashi::FinslerGraph;
use crate::numerics::sampling::{seeded, unit_vector};
use crate::rescaling::bracket_to;

type Domain = DomainSpec<f64>;

#[derive(Clone, Debug)]
pub struct CoverOptions {
    /// Multiplicative constant of the visual metric proxy.
    pub c_v: f64,
    /// Cover sets have radius eps / c1.
    pub c1: f64,
    /// Offset of the proxy points from the boundary, as a fraction of the sample diameter.
    pub offset: f64,
}

impl Default for CoverOptions {
    fn default() -> Self {
        Self { c_v: 1.0, c1: 0.5, offset: 1e-3 }
    }
}

/// Boundary points hit by rays from `center` in `n` seeded directions (finite hits only).
pub fn boundary_samples(d: &Domain, center: &Point, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = seeded(seed);
    (0..n)
        .filter_map(|_| {
            let u = Point::new(unit_vector(&mut rng, center.len()));
            let t = d.ray(center, &u);
            t.is_finite().then(|| center.along(&u, t))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct BoundaryCover {
    /// Indices into the samples.
    pub centers: Vec<usize>,
    pub center_points: Vec<Point>,
    pub eps: f64,
    pub c1: f64,
    /// Largest number of cover sets of radius eps / c1 containing one sample.
    pub m_hat: usize,
}

impl BoundaryCover {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "centers": self.centers,
            "center_points": self.center_points.iter().map(|p| p.coords.clone()).collect::<Vec<_>>(),
            "eps": self.eps,
            "c1": self.c1,
            "m_hat": self.m_hat,
            "statistical": true,
        })
    }
}

struct Proxy<'a> {
    d: &'a Domain,
    graph: Option<&'a FinslerGraph>,
    lambda: f64,
    c_v: f64,
    offset_pts: Vec<Point>,
    from_base: Vec<f64>,
    cache: HashMap<(usize, usize), f64>,
}

impl Proxy<'_> {
    /// c_v exp(-lambda (p_i | p_j)_z0) on the offset points, Gromov product from bracket midpoints.
    fn dist(&mut self, i: usize, j: usize) -> Result<f64> {
        if i == j {
            return Ok(0.0);
        }
        let key = (i.min(j), i.max(j));
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let k = bracket_to(self.d, &self.offset_pts[i], &self.offset_pts[j], self.graph)?.midpoint();
        let gp = (0.5 * (self.from_base[i] + self.from_base[j] - k)).max(0.0);
        let v = self.c_v * (-self.lambda * gp).exp();
        self.cache.insert(key, v);
        Ok(v)
    }
}

/// Farthest-first packing of the samples in the proxy visual metric: centers are pairwise at
/// least eps apart and every sample is within eps of one. Shrinking eps only extends the list.
pub fn boundary_cover(
    d: &Domain,
    z0: &Point,
    samples: &[Point],
    eps: f64,
    lambda: f64,
    graph: Option<&FinslerGraph>,
    opts: &CoverOptions,
) -> Result<BoundaryCover> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    if !(eps > 0.0 && lambda > 0.0 && opts.c1 > 0.0) {
        return Err(Error::InvalidInput(format!("eps {eps}, lambda {lambda}, c1 {} must be positive", opts.c1)));
    }
    d.require_interior(z0)?;
    let mut diam: f64 = 0.0;
    for a in samples {
        for b in samples {
            diam = diam.max(a.dist(b));
        }
    }
    let off = opts.offset * diam;
    let offset_pts: Vec<Point> = samples
        .iter()
        .map(|x| {
            let u = (z0 - x).normalized().ok_or(Error::ZeroDirection)?;
            let p = x.along(&u, off.min(0.5 * x.dist(z0)));
            d.require_interior(&p)?;
            Ok(p)
        })
        .collect::<Result<_>>()?;
    let from_base = offset_pts.iter().map(|p| Ok(bracket_to(d, z0, p, graph)?.midpoint())).collect::<Result<Vec<f64>>>()?;
    let mut px = Proxy { d, graph, lambda, c_v: opts.c_v, offset_pts, from_base, cache: HashMap::new() };

    let n = samples.len();
    let mut centers = vec![0];
    let mut mind: Vec<f64> = (0..n).map(|i| px.dist(0, i)).collect::<Result<_>>()?;
    loop {
        let (far, dmax) = mind.iter().enumerate().fold((0, -1.0), |b, (i, v)| if *v > b.1 { (i, *v) } else { b });
        if dmax < eps {
            break;
        }
        centers.push(far);
        for i in 0..n {
            mind[i] = mind[i].min(px.dist(far, i)?);
        }
    }
    let radius = eps / opts.c1;
    let mut m_hat = 0;
    for i in 0..n {
        let mut count = 0;
        for &c in &centers {
            if px.dist(i, c)? < radius {
                count += 1;
            }
        }
        m_hat = m_hat.max(count);
    }
    let center_points = centers.iter().map(|&i| samples[i].clone()).collect();
    Ok(BoundaryCover { centers, center_points, eps, c1: opts.c1, m_hat })
}
