use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use super::{boundary_cover, estimate_alpha, levi_matrix_fd, supporting_vectors, Chi, CoverOptions, LeviRecord, PeakFunction, PeakOptions};
use crate::error::{Error, Result};
use crate::geometry::io::affine_to_value;
use crate::geometry::{AffineMap, DomainSpec, Point};
use crate::kobayashi::FinslerGraph;
use crate::rescaling::{normalize_at_with, point_at_depth, q_xi_eps, BlowupRule, NormalizeOptions};

type Domain = DomainSpec<f64>;

#[derive(Clone, Debug)]
pub struct CertificateConfig {
    /// Visual-metric exponent.
    pub lambda: f64,
    /// Quasi-geodesic multiplicative constant.
    pub alpha_qg: f64,
    /// Convexity exponent of the domain.
    pub m0: f64,
    pub m2: f64,
    pub k0: u32,
    /// Last dyadic index; k0 + 12 when None.
    pub k_max: Option<u32>,
    /// How the base point of each normalization is placed on [z0, xi).
    pub rule: BlowupRule,
    pub peak: PeakOptions,
    pub normalize: NormalizeOptions,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            alpha_qg: 1.0,
            m0: 2.0,
            m2: 2.5,
            k0: 1,
            k_max: None,
            rule: BlowupRule::Kobayashi { lambda: 1.0 },
            peak: PeakOptions::default(),
            normalize: NormalizeOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateParameters {
    pub alpha_psh: f64,
    pub b: f64,
    pub kappa: f64,
    pub a: f64,
    pub lambda: f64,
    pub alpha_qg: f64,
    pub m0: f64,
    /// alpha_qg lambda m0 / 2.
    pub m1: f64,
    /// 2 m1 / lambda.
    pub ell: f64,
    pub m2: f64,
    pub k0: u32,
    pub k_max: u32,
}

impl CertificateParameters {
    /// Exponent-only parameters; alpha_psh, b and kappa are filled in by the construction.
    pub fn from_config(cfg: &CertificateConfig) -> Result<Self> {
        if !(cfg.lambda > 0.0 && cfg.alpha_qg > 0.0 && cfg.m0 > 0.0) {
            return Err(Error::InvalidInput("lambda, alpha_qg and m0 must be positive".into()));
        }
        let m1 = cfg.alpha_qg * cfg.lambda * cfg.m0 / 2.0;
        let ell = 2.0 * m1 / cfg.lambda;
        if !(cfg.m2 > ell) {
            return Err(Error::InvalidInput(format!("m2 = {} must exceed ell = {ell}", cfg.m2)));
        }
        if cfg.k0 == 0 {
            return Err(Error::InvalidInput("k0 must be at least 1".into()));
        }
        let k_max = cfg.k_max.unwrap_or(cfg.k0 + 12);
        if k_max < cfg.k0 {
            return Err(Error::InvalidInput("k_max below k0".into()));
        }
        Ok(Self {
            alpha_psh: f64::NAN,
            b: f64::NAN,
            kappa: f64::NAN,
            a: cfg.peak.a,
            lambda: cfg.lambda,
            alpha_qg: cfg.alpha_qg,
            m0: cfg.m0,
            m1,
            ell,
            m2: cfg.m2,
            k0: cfg.k0,
            k_max,
        })
    }

    fn rate(&self) -> f64 {
        2.0 * (1.0 / self.ell - 1.0 / self.m2)
    }

    /// 2^{-2k(1/ell - 1/m2)}.
    pub fn weight(&self, k: u32) -> f64 {
        (-(k as f64) * self.rate() * std::f64::consts::LN_2).exp()
    }

    /// Scale of the k-th term: the neighbourhood size (2^-k)^{lambda/2} of depth 2^-k.
    pub fn eps(&self, k: u32) -> f64 {
        (-(k as f64) * self.lambda / 2.0 * std::f64::consts::LN_2).exp()
    }

    /// Sum of the omitted weights k > k_max.
    pub fn tail_bound(&self) -> f64 {
        self.weight(self.k_max + 1) / (1.0 - (-self.rate() * std::f64::consts::LN_2).exp())
    }

    pub fn weight_sum(&self) -> f64 {
        (self.k0..=self.k_max).map(|k| self.weight(k)).sum()
    }
}

/// F_{xi,eps} = F o A_{xi,eps}, with F the peak function of the normalized domain.
#[derive(Clone, Debug)]
pub struct LocalCertificate {
    pub xi: Point,
    pub eps: f64,
    pub q: Point,
    pub map: AffineMap,
    pub r: f64,
    pub kdr_passed: bool,
    pub peak: PeakFunction,
}

impl LocalCertificate {
    pub fn eval(&self, z: &Point) -> Result<f64> {
        self.peak.eval(&self.map.apply(z))
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "xi": self.xi.coords,
            "eps": self.eps,
            "q": self.q.coords,
            "map": affine_to_value(&self.map),
            "r": self.r,
            "kdr_passed": self.kdr_passed,
            "alpha_psh": self.peak.alpha,
            "b": self.peak.b,
            "b_fallback": self.peak.b_fallback,
            "supporting_vectors": self.peak.sv.to_json(),
        })
    }
}

struct Normalized {
    xi: Point,
    eps: f64,
    q: Point,
    map: AffineMap,
    image: Domain,
    r: f64,
    kdr_passed: bool,
    sv: super::SupportingVectors,
    alpha: f64,
}

fn normalized(d: &Domain, z0: &Point, xi: &Point, eps: f64, cfg: &CertificateConfig) -> Result<Normalized> {
    let q = match cfg.rule {
        BlowupRule::Kobayashi { lambda } => q_xi_eps(d, z0, xi, eps, lambda, None)?.point,
        BlowupRule::Euclidean => xi.lerp(z0, eps),
    };
    let rep = normalize_at_with(d, z0, xi, Some(&q), None, &cfg.normalize)?;
    let image = Domain::affine_image(rep.map.clone(), d.clone())?;
    let sv = supporting_vectors(&image, rep.r)?;
    let alpha = estimate_alpha(&image, &sv, &cfg.peak)?;
    Ok(Normalized { xi: xi.clone(), eps, q, map: rep.map, image, r: rep.r, kdr_passed: rep.kdr.passed, sv, alpha })
}

fn finish(n: Normalized, chi: &Arc<Chi>, cfg: &CertificateConfig) -> Result<LocalCertificate> {
    let peak = PeakFunction::with_chi(&n.image, n.sv, chi.clone(), &cfg.peak)?;
    Ok(LocalCertificate { xi: n.xi, eps: n.eps, q: n.q, map: n.map, r: n.r, kdr_passed: n.kdr_passed, peak })
}

pub fn f_xi_eps(d: &Domain, z0: &Point, xi: &Point, eps: f64, cfg: &CertificateConfig) -> Result<LocalCertificate> {
    let n = normalized(d, z0, xi, eps, cfg)?;
    let chi = Arc::new(Chi::new(n.alpha));
    finish(n, &chi, cfg)
}

pub fn f_xi_eps_eval(d: &Domain, z0: &Point, xi: &Point, eps: f64, z: &Point, cfg: &CertificateConfig) -> Result<f64> {
    f_xi_eps(d, z0, xi, eps, cfg)?.eval(z)
}

#[derive(Clone, Debug)]
pub struct DyadicTerm {
    pub k: u32,
    pub eps: f64,
    pub weight: f64,
    /// 1 for a single boundary point, 1 / M_hat for a cover.
    pub scale: f64,
    pub m_hat: Option<usize>,
    pub parts: Vec<LocalCertificate>,
}

/// G = sum_k w_k F_{2^-k}, truncated at k_max. One chi (hence one alpha) is shared by every part.
#[derive(Clone, Debug)]
pub struct DyadicCertificate {
    pub params: CertificateParameters,
    pub terms: Vec<DyadicTerm>,
}

impl DyadicCertificate {
    pub fn eval(&self, z: &Point) -> Result<f64> {
        let mut s = 0.0;
        for t in &self.terms {
            let mut inner = 0.0;
            for p in &t.parts {
                inner += p.eval(z)?;
            }
            s += t.weight * t.scale * inner;
        }
        Ok(s)
    }

    pub fn terms_json(&self) -> serde_json::Value {
        json!(self
            .terms
            .iter()
            .map(|t| json!({
                "k": t.k,
                "eps": t.eps,
                "weight": t.weight,
                "scale": t.scale,
                "m_hat": t.m_hat,
                "parts": t.parts.iter().map(|p| json!({
                    "xi": p.xi.coords, "q": p.q.coords, "r": p.r, "kdr_passed": p.kdr_passed,
                    "b": p.peak.b, "b_fallback": p.peak.b_fallback,
                    "min_margin": p.peak.sv.margins.min(),
                })).collect::<Vec<_>>(),
            }))
            .collect::<Vec<_>>())
    }
}

fn assemble(mut params: CertificateParameters, groups: Vec<(u32, Option<usize>, Vec<Normalized>)>, cfg: &CertificateConfig) -> Result<DyadicCertificate> {
    let alpha = groups.iter().flat_map(|g| g.2.iter().map(|n| n.alpha)).fold(0.0, f64::max);
    let chi = Arc::new(Chi::new(alpha));
    let mut terms = Vec::new();
    let mut b: f64 = 0.0;
    for (k, m_hat, parts) in groups {
        let parts: Vec<LocalCertificate> = parts.into_iter().map(|n| finish(n, &chi, cfg)).collect::<Result<_>>()?;
        b = parts.iter().fold(b, |m, p| m.max(p.peak.b));
        let scale = m_hat.map_or(1.0, |m| 1.0 / m.max(1) as f64);
        terms.push(DyadicTerm { k, eps: params.eps(k), weight: params.weight(k), scale, m_hat, parts });
    }
    params.alpha_psh = alpha;
    params.b = b;
    params.kappa = chi.kappa();
    Ok(DyadicCertificate { params, terms })
}

/// Single-point mode: every term is F_{xi, eps_k}.
pub fn dyadic_certificate(d: &Domain, z0: &Point, xi: &Point, cfg: &CertificateConfig) -> Result<DyadicCertificate> {
    let params = CertificateParameters::from_config(cfg)?;
    let groups = (params.k0..=params.k_max)
        .map(|k| Ok((k, None, vec![normalized(d, z0, xi, params.eps(k), cfg)?])))
        .collect::<Result<Vec<_>>>()?;
    assemble(params, groups, cfg)
}

/// Cover mode: term k sums F_{xi_j, eps_k} over a packing of the boundary samples at scale eps_k,
/// divided by the measured multiplicity.
pub fn dyadic_certificate_cover(
    d: &Domain,
    z0: &Point,
    samples: &[Point],
    cfg: &CertificateConfig,
    cover: &CoverOptions,
    graph: Option<&FinslerGraph>,
) -> Result<DyadicCertificate> {
    let params = CertificateParameters::from_config(cfg)?;
    let mut groups = Vec::new();
    for k in params.k0..=params.k_max {
        let eps = params.eps(k);
        let c = boundary_cover(d, z0, samples, eps, params.lambda, graph, cover)?;
        let parts = c.center_points.iter().map(|xi| normalized(d, z0, xi, eps, cfg)).collect::<Result<Vec<_>>>()?;
        groups.push((k, Some(c.m_hat), parts));
    }
    assemble(params, groups, cfg)
}

#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub certificate: DyadicCertificate,
    /// delta(z) at each probe.
    pub deltas: Vec<f64>,
    /// Smallest eigenvalue of the finite-difference Levi matrix of G at each probe.
    pub levi_floor: Vec<f64>,
    pub records: Vec<LeviRecord>,
    /// Largest C with floor >= C delta^{-2/m2} at every probe.
    pub fitted_c: f64,
    /// max / min of floor delta^{2/m2} across probes.
    pub c_spread: f64,
    /// Least-squares slope of log floor against log delta.
    pub slope: f64,
    pub expected_slope: f64,
    pub tail_bound: f64,
}

impl CertificateReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "params": self.certificate.params,
            "terms": self.certificate.terms_json(),
            "deltas": self.deltas,
            "levi_floor": self.levi_floor,
            "levi_records": self.records,
            "fitted_c": self.fitted_c,
            "c_spread": self.c_spread,
            "slope": self.slope,
            "expected_slope": self.expected_slope,
            "tail_bound": self.tail_bound,
            "weight_sum": self.certificate.params.weight_sum(),
            "statistical": true,
        })
    }
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Finite-difference Levi floors of the single-point G at points of [z0, xi) with the given
/// boundary distances, and the fitted delta^{-2/m2} law.
pub fn certify(d: &Domain, z0: &Point, xi: &Point, cfg: &CertificateConfig, deltas: &[f64]) -> Result<CertificateReport> {
    if deltas.len() < 2 {
        return Err(Error::TooFewPoints { need: 2, got: deltas.len() });
    }
    let g = dyadic_certificate(d, z0, xi, cfg)?;
    let m2 = g.params.m2;
    let mut ds = Vec::new();
    let mut floors = Vec::new();
    let mut raw = Vec::new();
    for &target in deltas {
        let z = point_at_depth(d, z0, xi, target)?;
        let dz = d.delta(&z)?.value;
        let step = dz / 16.0;
        let m = levi_matrix_fd(&|p: &Point| g.eval(p), &z, step)?;
        let (lam, dir) = m.min_eigen();
        ds.push(dz);
        floors.push(lam);
        raw.push((z, dir, lam, step, m.budget));
    }
    let scaled: Vec<f64> = floors.iter().zip(&ds).map(|(f, d)| f * d.powf(2.0 / m2)).collect();
    let fitted_c = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let c_spread = scaled.iter().copied().fold(0.0, f64::max) / fitted_c;
    let slope = if floors.iter().all(|f| *f > 0.0) {
        ls_slope(&ds.iter().map(|x| x.ln()).collect::<Vec<_>>(), &floors.iter().map(|x| x.ln()).collect::<Vec<_>>())
    } else {
        f64::NAN
    };
    let records = raw
        .iter()
        .zip(&ds)
        .map(|((z, dir, lam, step, budget), dz)| LeviRecord::new(z, dir, *lam, fitted_c * dz.powf(-2.0 / m2), *step, *budget))
        .collect();
    let tail_bound = g.params.tail_bound();
    Ok(CertificateReport {
        certificate: g,
        deltas: ds,
        levi_floor: floors,
        records,
        fitted_c,
        c_spread,
        slope,
        expected_slope: -2.0 / m2,
        tail_bound,
    })
}
