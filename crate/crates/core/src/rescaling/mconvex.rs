use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::numerics::optim::{nelder_mead, NelderMeadOptions};
use crate::numerics::sampling::{seeded, unit_vector};

type Domain = DomainSpec<f64>;

/// Sampled max of delta(z; v) over unit v in span_C(basis): 2 dim * per_dim random directions plus
/// the basis itself, the best three refined by a simplex search.
pub fn max_directional_delta(d: &Domain, z: &Point, basis: &[Point], per_dim: usize, seed: u64) -> Result<f64> {
    d.require_interior(z)?;
    if basis.is_empty() {
        return Ok(0.0);
    }
    let k = 2 * basis.len();
    let rb: Vec<Point> = basis.iter().flat_map(|b| [b.clone(), b.mul_i()]).collect();
    let f = |c: &[f64]| -> f64 {
        let v = rb.iter().zip(c).fold(Point::zeros(z.len()), |p, (b, x)| p.along(b, *x));
        match d.delta_dir(z, &v) {
            Ok(t) if t.value.is_finite() => t.value,
            Ok(_) => f64::INFINITY,
            Err(_) => 0.0,
        }
    };
    let mut rng = seeded(seed);
    let mut cands: Vec<(f64, Vec<f64>)> = (0..basis.len())
        .map(|i| {
            let mut c = vec![0.0; k];
            c[2 * i] = 1.0;
            c
        })
        .chain((0..2 * d.dim() * per_dim).map(|_| unit_vector(&mut rng, k)))
        .map(|c| (f(&c), c))
        .collect();
    cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut best = cands[0].0;
    if best.is_infinite() {
        return Ok(best);
    }
    for (_, c) in cands.iter().take(3) {
        let m = nelder_mead(|x: &[f64]| -f(x), c, &NelderMeadOptions { initial_step: 0.1, max_iter: 600, ..Default::default() });
        best = best.max(-m.value);
    }
    Ok(best)
}

#[derive(Clone, Debug)]
pub struct MConvexOptions {
    pub directions_per_dim: usize,
    pub seed: u64,
    /// Below this delta, a max directional distance above half its initial value means DIVERGENT.
    pub divergence_delta: f64,
}

impl Default for MConvexOptions {
    fn default() -> Self {
        Self { directions_per_dim: 16, seed: 0x3c0, divergence_delta: 1e-3 }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct MConvexSample {
    pub xi: usize,
    pub delta_z: f64,
    pub max_dir_delta: f64,
}

#[derive(Clone, Debug)]
pub struct MConvexFit {
    /// None when the directional distances do not decay (DIVERGENT).
    pub m_hat: Option<f64>,
    pub c_hat: f64,
    /// Fitted exponent per boundary point (None where that ray diverges).
    pub per_xi: Vec<Option<f64>>,
    pub samples: Vec<MConvexSample>,
}

impl MConvexFit {
    pub fn is_divergent(&self) -> bool {
        self.m_hat.is_none()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "m_hat": self.m_hat.map_or(json!("DIVERGENT"), |m| json!(m)),
            "c_hat": self.c_hat,
            "per_xi": self.per_xi,
            "samples": self.samples,
        })
    }

    /// Rows delta_z, max_dir_delta, fit_m, fit_C.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let m = self.m_hat.map_or("DIVERGENT".to_string(), |m| format!("{m:.16e}"));
        let _ = w.write_record(["delta_z", "max_dir_delta", "fit_m", "fit_C"]);
        for s in &self.samples {
            let _ = w.write_record([format!("{:.16e}", s.delta_z), format!("{:.16e}", s.max_dir_delta), m.clone(), format!("{:.16e}", self.c_hat)]);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }
}

/// Point on [z0, xi) with delta equal to target, by bisection on the segment parameter.
pub(crate) fn point_at_depth(d: &Domain, z0: &Point, xi: &Point, target: f64) -> Result<Point> {
    let f = |s: f64| -> f64 {
        let z = z0.lerp(xi, s);
        d.delta(&z).map(|t| t.value).unwrap_or(0.0)
    };
    if f(0.0) < target {
        return Err(Error::FitFailed(format!("delta(z0) below the target {target:e}")));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(z0.lerp(xi, lo))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Least-squares fit of log max_v delta(z; v) against log delta(z) along each ray [z0, xi).
/// m_hat is the largest fitted exponent; C_hat the smallest constant covering every sample.
pub fn m_convexity_fit(d: &Domain, z0: &Point, xis: &[Point], delta_grid: &[f64], opts: &MConvexOptions) -> Result<MConvexFit> {
    if !d.is_complex() {
        return Err(Error::NotComplex);
    }
    if delta_grid.len() < 2 {
        return Err(Error::TooFewPoints { need: 2, got: delta_grid.len() });
    }
    let mut grid = delta_grid.to_vec();
    grid.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let dim = d.dim();
    let units: Vec<Point> = (0..dim).map(|j| Point::complex_unit(dim, j)).collect();
    let mut samples = Vec::new();
    let mut per_xi = Vec::new();
    for (k, xi) in xis.iter().enumerate() {
        let mut row = Vec::new();
        for (i, &target) in grid.iter().enumerate() {
            let z = point_at_depth(d, z0, xi, target)?;
            let dz = d.delta(&z)?.value;
            let md = max_directional_delta(d, &z, &units, opts.directions_per_dim, opts.seed ^ ((k * 1000 + i) as u64))?;
            row.push(MConvexSample { xi: k, delta_z: dz, max_dir_delta: md });
        }
        let initial = row[0].max_dir_delta;
        let small: Vec<&MConvexSample> = row.iter().filter(|s| s.delta_z < opts.divergence_delta).collect();
        let stuck = !small.is_empty() && small.iter().all(|s| s.max_dir_delta > 0.5 * initial);
        let xs: Vec<f64> = row.iter().map(|s| s.delta_z.ln()).collect();
        let ys: Vec<f64> = row.iter().map(|s| s.max_dir_delta.ln()).collect();
        let b = slope(&xs, &ys);
        per_xi.push(if stuck || !(b > 0.0) || !b.is_finite() { None } else { Some((1.0 / b).max(1.0)) });
        samples.extend(row);
    }
    let m_hat = if per_xi.iter().any(|m| m.is_none()) {
        None
    } else {
        per_xi.iter().flatten().copied().reduce(f64::max)
    };
    let c_hat = match m_hat {
        Some(m) => samples.iter().map(|s| s.max_dir_delta / s.delta_z.powf(1.0 / m)).fold(0.0, f64::max),
        None => f64::INFINITY,
    };
    Ok(MConvexFit { m_hat, c_hat, per_xi, samples })
}
