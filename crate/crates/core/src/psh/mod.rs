//! Plurisubharmonic peak functions on normalized domains, their pullbacks near boundary points,
//! dyadic sums with blowing-up Levi forms, and finite-difference verification (f64).

mod certificate;
mod chi;
mod cover;
mod levi;

pub use certificate::{
    certify, dyadic_certificate, dyadic_certificate_cover, f_xi_eps, f_xi_eps_eval, CertificateConfig, CertificateParameters,
    CertificateReport, DyadicCertificate, DyadicTerm, LocalCertificate,
};
pub use chi::{Chi, ChiValue};
pub use cover::{boundary_cover, boundary_samples, BoundaryCover, CoverOptions};
pub use levi::{levi_form_fd, levi_matrix_fd, LeviEstimate, LeviMatrix, LeviRecord};

use std::sync::Arc;

use num_complex::Complex;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::support::min_support_real;
use crate::geometry::{DomainSpec, Exactness, Point};
use crate::numerics::sampling::{ball_point, seeded, unit_vector};

type Domain = DomainSpec<f64>;

/// Slack of each structural constraint on supporting vectors; negative entries are violations.
#[derive(Clone, Debug, Serialize)]
pub struct StructuralMargins {
    /// 1 - sup Re<z, v_j> over the domain (zero up to solver error).
    pub support: f64,
    /// min over sampled interior points of 1 - Re<z, v_j>.
    pub sampled: f64,
    /// -|Re<e_j + w, v_j> - 1| over sampled w in span{e_(j+1)..e_d}.
    pub hyperplane: f64,
    /// -max |v_(j,l)| for l > j.
    pub triangular: f64,
    /// -max |v_(j,j) - 1| for j > 1.
    pub diagonal: f64,
    /// min(|v_(1,1)| - 1, 1/r - |v_(1,1)|).
    pub leading: f64,
    /// min over j of 1/r - |v_(j,1)|.
    pub first_column: f64,
    /// min of 1 - |v_(j,l)| for 1 < l <= j.
    pub entries: f64,
    /// min over j of sqrt(r^-2 + j - 1) - |v_j|.
    pub norms: f64,
}

impl StructuralMargins {
    pub fn min(&self) -> f64 {
        [
            self.support,
            self.sampled,
            self.hyperplane,
            self.triangular,
            self.diagonal,
            self.leading,
            self.first_column,
            self.entries,
            self.norms,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug)]
pub struct SupportingVectors {
    /// v[j][l] is the l-th coordinate of v_(j+1).
    pub v: Vec<Vec<Complex<f64>>>,
    pub r: f64,
    pub margins: StructuralMargins,
    pub exactness: Exactness,
}

impl SupportingVectors {
    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// <z, v_j> = sum_l z_l conj(v_(j,l)).
    pub fn pairing(&self, z: &Point, j: usize) -> Complex<f64> {
        let c = z.to_complex();
        c.iter().zip(&self.v[j]).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "v": self.v.iter().map(|v| v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "r": self.r,
            "margins": self.margins,
            "min_margin": self.margins.min(),
        })
    }
}

const SEPARATION_TOL: f64 = 1e-6;
const MARGIN_SAMPLES: usize = 256;
/// Cap on ray lengths when sampling unbounded domains.
const SAMPLE_WINDOW: f64 = 64.0;

/// Random points of the domain along rays from `center`, rays capped at `window`.
fn interior_samples(d: &Domain, center: &Point, n: usize, window: f64, rng: &mut impl Rng) -> Vec<Point> {
    let dim = center.len();
    (0..n)
        .filter_map(|_| {
            let u = Point::new(unit_vector(rng, dim));
            let t = d.ray(center, &u).min(window);
            let z = center.along(&u, rng.gen::<f64>() * t);
            d.contains(&z).then_some(z)
        })
        .collect()
}

/// Functionals v_1..v_d with Re<z, v_j> < 1 on D and = 1 on e_j + span{e_(j+1)..e_d}, in the
/// triangular form v_(j,l) = 0 (l > j), v_(j,j) = 1 (j > 1), Re v_(1,1) = 1. Each minimises the
/// support function under those pins (exact by linear programming on polytopes). The domain is
/// expected to lie in K_d(r); a minimum above 1 means it does not.
pub fn supporting_vectors(d: &Domain, r: f64) -> Result<SupportingVectors> {
    if !d.is_complex() {
        return Err(Error::NotComplex);
    }
    let dim = d.dim();
    let mut v = Vec::with_capacity(dim);
    let mut support: f64 = f64::INFINITY;
    let mut exactness = Exactness::Exact;
    for j in 0..dim {
        let pins: Vec<Option<f64>> = (0..2 * dim)
            .map(|p| {
                let (l, im) = (p / 2, p % 2 == 1);
                match l {
                    l if l > j => Some(0.0),
                    l if l == j && (!im || j > 0) => Some(if im { 0.0 } else { 1.0 }),
                    _ => None,
                }
            })
            .collect();
        let best = min_support_real(d, &pins);
        if !(best.value <= 1.0 + SEPARATION_TOL) {
            return Err(Error::InfeasibleSeparation(best.value - 1.0));
        }
        if best.exactness != Exactness::Exact {
            exactness = best.exactness;
        }
        support = support.min(1.0 - best.value);
        let mut nu = best.nu;
        // pinned entries are exact by construction
        for (l, c) in nu.iter_mut().enumerate() {
            if l > j {
                *c = Complex::new(0.0, 0.0);
            } else if l == j {
                c.re = 1.0;
                if j > 0 {
                    c.im = 0.0;
                }
            }
        }
        v.push(nu);
    }
    let mut sv = SupportingVectors {
        v,
        r,
        margins: StructuralMargins {
            support,
            sampled: f64::INFINITY,
            hyperplane: 0.0,
            triangular: 0.0,
            diagonal: 0.0,
            leading: 0.0,
            first_column: 0.0,
            entries: 0.0,
            norms: 0.0,
        },
        exactness,
    };
    sv.margins = structural_margins(d, &sv, support);
    Ok(sv)
}

fn structural_margins(d: &Domain, sv: &SupportingVectors, support: f64) -> StructuralMargins {
    let dim = sv.dim();
    let r = sv.r;
    let mut rng = seeded(0x5e_c7);
    let mut m = StructuralMargins {
        support,
        sampled: f64::INFINITY,
        hyperplane: 0.0,
        triangular: 0.0,
        diagonal: 0.0,
        leading: f64::INFINITY,
        first_column: f64::INFINITY,
        entries: f64::INFINITY,
        norms: f64::INFINITY,
    };
    let origin = Point::zeros(2 * dim);
    let center = if d.contains(&origin) { origin } else { d.witness().clone() };
    for z in interior_samples(d, &center, MARGIN_SAMPLES, SAMPLE_WINDOW, &mut rng) {
        for j in 0..dim {
            m.sampled = m.sampled.min(1.0 - sv.pairing(&z, j).re);
        }
    }
    for j in 0..dim {
        let vj = &sv.v[j];
        for _ in 0..16 {
            let mut w = Point::complex_unit(dim, j);
            let g = ball_point::<f64>(&mut rng, 2 * dim);
            for l in j + 1..dim {
                w.coords[2 * l] = 8.0 * g[2 * l];
                w.coords[2 * l + 1] = 8.0 * g[2 * l + 1];
            }
            m.hyperplane = m.hyperplane.min(-(sv.pairing(&w, j).re - 1.0).abs());
        }
        for (l, c) in vj.iter().enumerate() {
            if l > j {
                m.triangular = m.triangular.min(-c.norm());
            }
            if l > 0 && l <= j {
                m.entries = m.entries.min(1.0 - c.norm());
            }
        }
        if j > 0 {
            m.diagonal = m.diagonal.min(-(vj[j] - 1.0).norm());
        }
        m.first_column = m.first_column.min(1.0 / r - vj[0].norm());
        let norm = vj.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        m.norms = m.norms.min((1.0 / (r * r) + j as f64).sqrt() - norm);
    }
    let v11 = sv.v[0][0].norm();
    m.leading = (v11 - 1.0).min(1.0 / r - v11);
    m
}

/// h(z) = sum_j exp(2 Re<z, v_j> - 2) + sum_j ln |1 / (2 - <z, v_j>)|. Points with
/// Re<z, v_j> > 1 lie outside every domain the vectors support and are rejected.
pub fn h_eval(z: &Point, sv: &SupportingVectors) -> Result<f64> {
    if z.len() != 2 * sv.dim() {
        return Err(Error::DimensionMismatch { expected: 2 * sv.dim(), got: z.len() });
    }
    let mut s = 0.0;
    for j in 0..sv.dim() {
        let w = sv.pairing(z, j);
        if !(w.re <= 1.0 + 1e-12) {
            return Err(Error::DomainViolation);
        }
        s += (2.0 * w.re - 2.0).exp() - (Complex::new(2.0, 0.0) - w).norm().ln();
    }
    Ok(s)
}

/// Closed-form Levi form of h in direction x: sum_j exp(2 Re<z, v_j> - 2) |<x, v_j>|^2 (the
/// logarithmic terms are pluriharmonic).
pub fn h_levi_exact(z: &Point, x: &Point, sv: &SupportingVectors) -> f64 {
    (0..sv.dim()).map(|j| (2.0 * sv.pairing(z, j).re - 2.0).exp() * sv.pairing(x, j).norm_sqr()).sum()
}

/// The lower bound exp(2 Re<z, v_l> - 2) |x_l|^2 with l the first nonzero coordinate of x.
pub fn h_levi_floor(z: &Point, x: &Point, sv: &SupportingVectors) -> f64 {
    let c = x.to_complex();
    match c.iter().position(|a| a.norm() > 0.0) {
        Some(l) => (2.0 * sv.pairing(z, l).re - 2.0).exp() * c[l].norm_sqr(),
        None => 0.0,
    }
}

#[derive(Clone, Debug)]
pub struct PeakOptions {
    /// Radius of the ball around e_1 on which h is bounded by alpha.
    pub a: f64,
    pub samples: usize,
    pub seed: u64,
    /// Ray cap when sampling for the support radius.
    pub window: f64,
    pub fallback_b: f64,
}

impl Default for PeakOptions {
    fn default() -> Self {
        Self { a: 1.0, samples: 2000, seed: 0x9e4c, window: SAMPLE_WINDOW, fallback_b: 8.0 }
    }
}

/// max(sampled max |h| on B(e_1; a) with D, d). The floor d keeps h <= alpha on all of D.
pub fn estimate_alpha(d: &Domain, sv: &SupportingVectors, opts: &PeakOptions) -> Result<f64> {
    let dim = sv.dim();
    let e1 = Point::complex_unit(dim, 0);
    let mut rng = seeded(opts.seed);
    let mut best = dim as f64;
    let mut got = 0;
    let mut tries = 0;
    while got < opts.samples && tries < 50 * opts.samples {
        tries += 1;
        let z = &e1 + &Point::new(ball_point(&mut rng, 2 * dim)).scale(opts.a);
        if d.contains(&z) {
            got += 1;
            best = best.max(h_eval(&z, sv)?.abs());
        }
    }
    if got == 0 {
        return Err(Error::TooFewSamples(0));
    }
    Ok(best)
}

/// Smallest sampled radius around e_1 outside of which h < -2 alpha, padded by 5% and kept above
/// a. Returns (b, true) with the fallback radius when h stays above -2 alpha out to the window.
pub fn estimate_b(d: &Domain, sv: &SupportingVectors, alpha: f64, opts: &PeakOptions) -> Result<(f64, bool)> {
    let dim = sv.dim();
    let e1 = Point::complex_unit(dim, 0);
    let origin = Point::zeros(2 * dim);
    let mut rng = seeded(opts.seed ^ 0xb);
    let mut far: f64 = 0.0;
    for _ in 0..opts.samples {
        let u = Point::new(unit_vector(&mut rng, 2 * dim));
        let ray = d.ray(&origin, &u);
        let t = ray.min(opts.window);
        // half the samples sit at the far end of the ray, where the support is decided
        let s = if rng.gen_bool(0.5) { 1.0 - 1e-9 } else { rng.gen::<f64>() };
        let z = origin.along(&u, s * t);
        let h = h_eval(&z, sv)?;
        if h >= -2.0 * alpha {
            if ray > opts.window && s > 0.5 {
                return Ok((opts.fallback_b, true));
            }
            far = far.max(z.dist(&e1));
        }
    }
    Ok(((1.05 * far).max(1.05 * opts.a), false))
}

/// F = chi o h on a normalized domain, with its constants.
#[derive(Clone, Debug)]
pub struct PeakFunction {
    pub sv: SupportingVectors,
    pub chi: Arc<Chi>,
    pub alpha: f64,
    pub b: f64,
    pub b_fallback: bool,
    pub a: f64,
}

impl PeakFunction {
    /// Build on D in K_d(r); alpha is estimated when not given.
    pub fn new(d: &Domain, r: f64, alpha: Option<f64>, opts: &PeakOptions) -> Result<Self> {
        let sv = supporting_vectors(d, r)?;
        let alpha = match alpha {
            Some(a) => a,
            None => estimate_alpha(d, &sv, opts)?,
        };
        Self::with_chi(d, sv, Arc::new(Chi::new(alpha)), opts)
    }

    pub fn with_chi(d: &Domain, sv: SupportingVectors, chi: Arc<Chi>, opts: &PeakOptions) -> Result<Self> {
        let alpha = chi.alpha();
        let (b, b_fallback) = estimate_b(d, &sv, alpha, opts)?;
        Ok(Self { sv, chi, alpha, b, b_fallback, a: opts.a })
    }

    pub fn h(&self, z: &Point) -> Result<f64> {
        h_eval(z, &self.sv)
    }

    pub fn eval(&self, z: &Point) -> Result<f64> {
        Ok(self.chi.value(self.h(z)?))
    }

    pub fn kappa(&self) -> f64 {
        self.chi.kappa()
    }
}
