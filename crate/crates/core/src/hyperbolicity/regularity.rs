use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::hyperbolicity::VisualMetricResult;
use crate::kobayashi::{build_finsler_graph, kob_dist_bracket, kob_quick_bracket, MetricBracket, Slice};

type Domain = DomainSpec<f64>;

/// sigma(t) = xi + exp(-2t) (z0 - xi).
pub fn sample_quasigeodesic(d: &Domain, z0: &Point<f64>, xi: &Point<f64>, t_grid: &[f64]) -> Result<Vec<Point<f64>>> {
    d.require_interior(z0)?;
    if xi.len() != z0.len() {
        return Err(Error::DimensionMismatch { expected: z0.len(), got: xi.len() });
    }
    let defect = d.signed_defect(xi);
    if defect.abs() > 1e-8 {
        return Err(Error::NotBoundary(defect));
    }
    Ok(t_grid.iter().map(|&t| xi.lerp(z0, (-2.0 * t).exp())).collect())
}

#[derive(Clone, Debug)]
pub struct AlphaFitOptions {
    pub pitch: f64,
    pub knn: usize,
    /// Graph window radius as a multiple of |xi - z0|.
    pub window: f64,
    /// Probes with |t - s| up to this fraction of the t-range fix the additive constant.
    pub short_fraction: f64,
    pub slack: f64,
}

impl Default for AlphaFitOptions {
    fn default() -> Self {
        Self { pitch: 0.01, knn: 16, window: 1.25, short_fraction: 0.25, slack: 0.05 }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct AlphaProbe {
    pub xi: usize,
    pub s: f64,
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct AlphaRegularityFit {
    pub alpha_hat: f64,
    pub b_hat: f64,
    pub probes: Vec<AlphaProbe>,
}

/// Least alpha >= 1 for which the worst residual upper - alpha |t-s| over all probes is within
/// `slack` of the worst residual over short probes; B is that worst residual.
pub fn fit_alpha_from_probes(probes: &[(f64, f64)], short_fraction: f64, slack: f64) -> Result<(f64, f64)> {
    if probes.is_empty() {
        return Err(Error::TooFewPoints { need: 1, got: 0 });
    }
    let range = probes.iter().fold(0.0f64, |m, p| m.max(p.0));
    let min_gap = probes.iter().fold(f64::INFINITY, |m, p| m.min(p.0));
    let cut = (short_fraction * range).max(min_gap);
    let worst = |alpha: f64, short: bool| {
        probes.iter().filter(|p| !short || p.0 <= cut + 1e-12).fold(f64::NEG_INFINITY, |m, p| m.max(p.1 - alpha * p.0))
    };
    let excess = |alpha: f64| worst(alpha, false) - worst(alpha, true) - slack;
    let alpha = if excess(1.0) <= 0.0 {
        1.0
    } else {
        let mut hi = 2.0;
        while excess(hi) > 0.0 {
            hi *= 2.0;
            if hi > 1e9 {
                return Err(Error::FitFailed("alpha search diverged".into()));
            }
        }
        // excess is nonincreasing in alpha; keep the feasible end
        let mut lo = 1.0;
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if excess(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    Ok((alpha, worst(alpha, false).max(0.0)))
}

/// Upper Kobayashi brackets along sigma_xi for each xi, then the alpha fit.
pub fn fit_alpha_regularity(
    d: &Domain,
    z0: &Point<f64>,
    xis: &[Point<f64>],
    t_grid: &[f64],
    opts: &AlphaFitOptions,
) -> Result<AlphaRegularityFit> {
    let mut probes = Vec::new();
    for (k, xi) in xis.iter().enumerate() {
        let pts = sample_quasigeodesic(d, z0, xi, t_grid)?;
        let slice = Slice::through(z0, xi, opts.window * xi.dist(z0))?;
        let graph = build_finsler_graph(d, &slice, opts.pitch, opts.knn)?;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let b: MetricBracket = match kob_dist_bracket(d, &pts[i], &pts[j], &graph) {
                    Ok(b) => b,
                    Err(Error::Disconnected) => kob_quick_bracket(d, &pts[i], &pts[j])?,
                    Err(e) => return Err(e),
                };
                probes.push(AlphaProbe { xi: k, s: t_grid[i], t: t_grid[j], lower: b.lower, upper: b.upper });
            }
        }
    }
    let table: Vec<(f64, f64)> = probes.iter().map(|p| ((p.t - p.s).abs(), p.upper)).collect();
    let (alpha_hat, b_hat) = fit_alpha_from_probes(&table, opts.short_fraction, opts.slack)?;
    Ok(AlphaRegularityFit { alpha_hat, b_hat, probes })
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct VisualFit {
    /// Least C with (1/C) exp(-lambda D) <= d_vis <= C exp(-lambda D) on all pairs.
    pub c: f64,
    pub min_log_ratio: f64,
    pub max_log_ratio: f64,
    pub pairs: usize,
}

/// `geodesic_distance[i*n+j]` is the distance from the basepoint to a geodesic joining i and j.
pub fn fit_visual_constant(v: &VisualMetricResult<f64>, geodesic_distance: &[f64]) -> Result<VisualFit> {
    let n = v.n;
    if geodesic_distance.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, got: geodesic_distance.len() });
    }
    let (mut lo, mut hi, mut pairs) = (f64::INFINITY, f64::NEG_INFINITY, 0);
    for i in 0..n {
        for j in i + 1..n {
            if i == v.basepoint || j == v.basepoint {
                continue;
            }
            let r = v.d_vis(i, j).ln() + v.lambda * geodesic_distance[i * n + j];
            lo = lo.min(r);
            hi = hi.max(r);
            pairs += 1;
        }
    }
    if pairs == 0 {
        return Err(Error::TooFewPoints { need: 3, got: n });
    }
    Ok(VisualFit { c: lo.abs().max(hi.abs()).exp(), min_log_ratio: lo, max_log_ratio: hi, pairs })
}
