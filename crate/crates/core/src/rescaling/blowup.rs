use crate::error::{Error, Result};
use crate::geometry::hausdorff::local_hausdorff;
use crate::geometry::{DomainSpec, Point};
use crate::kobayashi::{build_finsler_graph, kob_dist_bracket, kob_quick_bracket, FinslerGraph, MetricBracket, Slice};
use crate::rescaling::{normalize_at_with, NormalizationReport, NormalizeOptions};

type Domain = DomainSpec<f64>;

/// Distance tolerance of the bisection against the target Kobayashi distance.
const TARGET_TOL: f64 = 0.05;
const MAX_BRACKET_WIDTH: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct QxiEps {
    pub point: Point,
    /// Segment parameter: point = z0 + s (xi - z0).
    pub s: f64,
    pub target: f64,
    pub bracket: MetricBracket,
}

pub(crate) fn bracket_to(d: &Domain, z0: &Point, z: &Point, g: Option<&FinslerGraph>) -> Result<MetricBracket> {
    match g {
        Some(g) => match kob_dist_bracket(d, z0, z, g) {
            Err(Error::Disconnected | Error::OutOfWindow | Error::EmptyGraph) => kob_quick_bracket(d, z0, z),
            other => other,
        },
        None => kob_quick_bracket(d, z0, z),
    }
}

/// Point on [z0, xi) whose bracket midpoint to z0 is (1/lambda) log(1/eps) within 0.05. Without a
/// graph the bracket uses the segment and inscribed-disk upper bounds only.
pub fn q_xi_eps(d: &Domain, z0: &Point, xi: &Point, eps: f64, lambda: f64, graph: Option<&FinslerGraph>) -> Result<QxiEps> {
    if !(eps > 0.0 && eps < 1.0) || !(lambda > 0.0) {
        return Err(Error::InvalidInput(format!("eps {eps} must be in (0,1) and lambda {lambda} positive")));
    }
    d.require_interior(z0)?;
    let target = (1.0 / eps).ln() / lambda;
    let at = |s: f64| -> Result<(Point, MetricBracket)> {
        let z = z0.lerp(xi, s);
        let b = bracket_to(d, z0, &z, graph)?;
        Ok((z, b))
    };
    let done = |s: f64, z: Point, b: MetricBracket| -> Result<QxiEps> {
        if b.width() > MAX_BRACKET_WIDTH {
            return Err(Error::BracketTooWide(b.width()));
        }
        Ok(QxiEps { point: z, s, target, bracket: b })
    };
    if target < TARGET_TOL {
        let (z, b) = at(0.0)?;
        return done(0.0, z, b);
    }
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=52 {
        let s = 1.0 - 0.5f64.powi(k);
        let (z, b) = at(s)?;
        let m = b.midpoint();
        if (m - target).abs() < TARGET_TOL {
            return done(s, z, b);
        }
        if m > target {
            hi = Some(s);
            break;
        }
        lo = s;
    }
    let mut hi = hi.ok_or_else(|| Error::FitFailed("target distance not reached along the segment".into()))?;
    for _ in 0..200 {
        let s = 0.5 * (lo + hi);
        let (z, b) = at(s)?;
        let m = b.midpoint();
        if (m - target).abs() < TARGET_TOL {
            return done(s, z, b);
        }
        if m > target {
            hi = s;
        } else {
            lo = s;
        }
    }
    Err(Error::FitFailed("bisection on the segment parameter did not meet the target".into()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BlowupRule {
    /// q at Kobayashi distance (1/lambda) log(1/eps) from z0.
    Kobayashi { lambda: f64 },
    /// q = xi + eps (z0 - xi).
    Euclidean,
}

#[derive(Clone, Debug)]
pub struct BlowupOptions {
    pub rule: BlowupRule,
    pub pitch: f64,
    pub knn: usize,
    /// Graph window radius as a multiple of |xi - z0|.
    pub window: f64,
    pub hausdorff_radius: f64,
    pub hausdorff_samples: usize,
    pub drift_threshold: f64,
    pub seed: u64,
    pub normalize: NormalizeOptions,
}

impl Default for BlowupOptions {
    fn default() -> Self {
        Self {
            rule: BlowupRule::Kobayashi { lambda: 1.0 },
            pitch: 0.02,
            knn: 16,
            window: 1.25,
            hausdorff_radius: 2.0,
            hausdorff_samples: 300,
            drift_threshold: 0.05,
            seed: 0xb10,
            normalize: NormalizeOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BlowupStep {
    pub k: usize,
    pub eps: f64,
    pub q: Point,
    pub bracket_width: Option<f64>,
    pub report: NormalizationReport,
}

#[derive(Clone, Debug)]
pub struct BlowupSequence {
    pub steps: Vec<BlowupStep>,
    /// drift[k] = local Hausdorff distance between the normalized domains k and k+1.
    pub drift: Vec<f64>,
    /// Drift stayed below the threshold for three consecutive steps.
    pub converged: bool,
}

impl BlowupSequence {
    pub fn image(&self, d: &Domain, k: usize) -> Result<Domain> {
        Domain::affine_image(self.steps[k].report.map.clone(), d.clone())
    }

    /// Rows k, eps, drift, r, tau_1..tau_d; drift is empty on the last row.
    pub fn to_csv(&self) -> String {
        let dim = self.steps.first().map_or(0, |s| s.report.tau.len());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = ["k", "eps", "drift", "r"].iter().map(|s| s.to_string()).collect();
        header.extend((1..=dim).map(|j| format!("tau_{j}")));
        let _ = w.write_record(&header);
        for (i, s) in self.steps.iter().enumerate() {
            let mut row = vec![s.k.to_string(), format!("{:.16e}", s.eps)];
            row.push(self.drift.get(i).map_or(String::new(), |x| format!("{x:.16e}")));
            row.push(format!("{:.16e}", s.report.r));
            row.extend(s.report.tau.iter().map(|t| format!("{t:.16e}")));
            let _ = w.write_record(&row);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }
}

pub fn blowup_sequence(d: &Domain, z0: &Point, xi: &Point, eps_schedule: &[f64], opts: &BlowupOptions) -> Result<BlowupSequence> {
    if eps_schedule.iter().any(|e| !(*e > 0.0 && *e < 1.0)) || eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("eps schedule must decrease inside (0,1)".into()));
    }
    d.require_interior(z0)?;
    let sup = d.supporting_functional(xi)?;
    let graph = match opts.rule {
        BlowupRule::Kobayashi { .. } => {
            let slice = Slice::through(z0, xi, opts.window * xi.dist(z0))?;
            match build_finsler_graph(d, &slice, opts.pitch, opts.knn) {
                Ok(g) => Some(g),
                Err(Error::EmptyGraph) => None,
                Err(e) => return Err(e),
            }
        }
        BlowupRule::Euclidean => None,
    };
    let mut steps = Vec::new();
    for (k, &eps) in eps_schedule.iter().enumerate() {
        let (q, width) = match opts.rule {
            BlowupRule::Kobayashi { lambda } => {
                let h = q_xi_eps(d, z0, xi, eps, lambda, graph.as_ref())?;
                (h.point, Some(h.bracket.width()))
            }
            BlowupRule::Euclidean => (xi.lerp(z0, eps), None),
        };
        let report = normalize_at_with(d, z0, xi, Some(&q), Some(&sup), &opts.normalize)?;
        steps.push(BlowupStep { k, eps, q, bracket_width: width, report });
    }
    let mut drift = Vec::new();
    for k in 1..steps.len() {
        let a = Domain::affine_image(steps[k - 1].report.map.clone(), d.clone())?;
        let b = Domain::affine_image(steps[k].report.map.clone(), d.clone())?;
        drift.push(local_hausdorff(&a, &b, opts.hausdorff_radius, opts.hausdorff_samples, opts.seed)?);
    }
    let converged = drift.windows(3).any(|w| w.iter().all(|x| *x < opts.drift_threshold));
    Ok(BlowupSequence { steps, drift, converged })
}
