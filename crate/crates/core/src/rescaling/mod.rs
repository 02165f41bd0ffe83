//! Affine normalization at boundary points, membership in the normalized family K_d(r),
//! blow-up sequences, boundary disks and m-convexity exponents (f64).

mod blowup;
mod disk;
mod kdr;
mod mconvex;

pub use blowup::{blowup_sequence, q_xi_eps, BlowupOptions, BlowupRule, BlowupSequence, BlowupStep, QxiEps};
pub use disk::{detect_boundary_disk, DiskDetection, DiskOptions};
pub use kdr::{kdr_check, kdr_check_upto, KdrCheck, KdrCondition};
pub(crate) use blowup::bracket_to;
pub(crate) use mconvex::point_at_depth;
pub use mconvex::{m_convexity_fit, max_directional_delta, MConvexFit, MConvexOptions, MConvexSample};

use num_complex::Complex;
use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry::io::affine_to_value;
use crate::geometry::support::{closest_boundary_in_subspace, min_support};
use crate::geometry::{AffineMap, DomainSpec, Exactness, Point, Supporting};
use crate::numerics::linalg::complex_gram_schmidt;

type Domain = DomainSpec<f64>;

#[derive(Clone, Debug)]
pub struct NormalizeOptions {
    /// Multistart count per complex dimension for the closest-point searches.
    pub starts_per_dim: usize,
    pub seed: u64,
    /// Allowed spread between two independently seeded closest-point searches.
    pub repeat_tol: f64,
    pub kdr_tol: f64,
    /// Directions per complex dimension when sampling the maximum of delta(q; v) over P_1.
    pub directions_per_dim: usize,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        Self { starts_per_dim: 64, seed: 0x4e0, repeat_tol: 1e-6, kdr_tol: 1e-6, directions_per_dim: 16 }
    }
}

#[derive(Clone, Debug)]
pub struct NormalizationReport {
    /// A(z) = X^{-1}(z - q).
    pub map: AffineMap,
    /// Columns x_1..x_d of X (translated so that q is the origin).
    pub basis: Vec<Point>,
    pub tau: Vec<f64>,
    pub r: f64,
    /// Sampled max of delta(q; v) over v in P_1.
    pub delta_h_sampled: f64,
    /// max(sampled value, tau_2..tau_d, delta(q)); the value entering the floor.
    pub delta_h: f64,
    pub lipschitz_floor: f64,
    pub kdr: KdrCheck,
}

impl NormalizationReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "map": affine_to_value(&self.map),
            "basis": self.basis.iter().map(|p| p.coords.clone()).collect::<Vec<_>>(),
            "tau": self.tau,
            "r": self.r,
            "delta_h_sampled": self.delta_h_sampled,
            "delta_h": self.delta_h,
            "lipschitz_floor": self.lipschitz_floor,
            "kdr": self.kdr.to_json(),
        })
    }
}

fn to_c(p: &Point) -> Vec<Complex<f64>> {
    p.to_complex()
}

/// Vectors of `span` complex-orthogonal to `v`, as an orthonormal basis.
fn drop_direction(span: &[Point], v: &Point) -> Vec<Point> {
    let mut proj = Point::zeros(v.len());
    for b in span {
        proj = &proj + &b.cscale(v.cdot(b));
    }
    let Some(u) = proj.normalized() else {
        return span.to_vec();
    };
    // most orthogonal vectors first, so the dependent one is the one left out
    let mut sorted: Vec<&Point> = span.iter().collect();
    sorted.sort_by(|a, b| a.cdot(&u).norm().partial_cmp(&b.cdot(&u).norm()).unwrap_or(std::cmp::Ordering::Equal));
    let vs: Vec<Vec<Complex<f64>>> = sorted.into_iter().map(to_c).collect();
    let mut out: Vec<Point> = complex_gram_schmidt(&[to_c(&u)], &vs, 1e-6).iter().map(|c| Point::from_complex(c)).collect();
    out.truncate(span.len().saturating_sub(1));
    out
}

fn closest_checked(d: &Domain, q: &Point, basis: &[Point], opts: &NormalizeOptions) -> Result<Point> {
    let starts = opts.starts_per_dim * 2 * d.dim();
    let hit = closest_boundary_in_subspace(d, q, basis, starts, opts.seed);
    if !hit.distance.is_finite() {
        return Err(Error::NotProperlyConvex);
    }
    if hit.exactness == Exactness::Refined {
        let again = closest_boundary_in_subspace(d, q, basis, starts, opts.seed.wrapping_add(0x9e37));
        let spread = (again.distance - hit.distance).abs();
        if spread > opts.repeat_tol * hit.distance.max(1.0) {
            return Err(Error::NotRepeatable(spread));
        }
        if again.distance < hit.distance {
            return Ok(&again.point - q);
        }
    }
    Ok(&hit.point - q)
}

pub fn normalize_at(d: &Domain, z0: &Point, xi: &Point, q: Option<&Point>, h: Option<&Supporting<f64>>) -> Result<NormalizationReport> {
    normalize_at_with(d, z0, xi, q, h, &NormalizeOptions::default())
}

/// A = X^{-1}(. - q) with x_1 = xi - q and x_j the closest boundary point to q in q + P_{j-1},
/// where P_1 is the complex hyperplane of the supporting functional and P_j drops C x_j.
pub fn normalize_at_with(
    d: &Domain,
    z0: &Point,
    xi: &Point,
    q: Option<&Point>,
    h: Option<&Supporting<f64>>,
    opts: &NormalizeOptions,
) -> Result<NormalizationReport> {
    if !d.is_complex() {
        return Err(Error::NotComplex);
    }
    d.require_interior(z0)?;
    let sup = match h {
        Some(s) => s.clone(),
        None => d.supporting_functional(xi)?,
    };
    let q = q.cloned().unwrap_or_else(|| z0.clone());
    d.require_interior(&q)?;
    let seg = z0 - xi;
    let s = (&q - xi).dot(&seg) / seg.dot(&seg);
    if !(s > 0.0 && s <= 1.0 + 1e-12) || xi.lerp(z0, s).dist(&q) > 1e-8 * seg.norm().max(1.0) {
        return Err(Error::MalformedDomain("q must lie on the segment (xi, z0]".into()));
    }
    let dim = d.dim();
    let nu = Point::new(sup.normal.coords.clone());
    let units: Vec<Point> = (0..dim).map(|j| Point::complex_unit(dim, j)).collect();
    let p1 = drop_direction(&units, &nu);

    let mut basis = vec![xi - &q];
    let mut p = p1.clone();
    for _ in 1..dim {
        let x = closest_checked(d, &q, &p, opts)?;
        p = drop_direction(&p, &x);
        basis.push(x);
    }
    let tau: Vec<f64> = basis.iter().map(|x| x.norm()).collect();
    let x = AffineMap::from_columns(&basis, &q);
    let map = x.inverse()?;

    let r = (d.delta(z0)?.value / seg.norm()).min(1.0);
    let delta_q = d.delta(&q)?.value;
    let delta_h_sampled = if dim > 1 { max_directional_delta(d, &q, &p1, opts.directions_per_dim, opts.seed)? } else { delta_q };
    let delta_h = tau[1..].iter().fold(delta_h_sampled.max(delta_q), |m, t| m.max(*t));
    let lipschitz_floor = r / ((dim as f64).sqrt() * delta_h);
    let image = Domain::affine_image(map.clone(), d.clone())?;
    let kdr = kdr_check(&image, r, opts.kdr_tol);
    Ok(NormalizationReport { map, basis, tau, r, delta_h_sampled, delta_h, lipschitz_floor, kdr })
}

/// Linear A fixing span{e_1..e_m} pointwise with A(D) in K_d(r), given that the slice of D by
/// span{e_1..e_m} is in K_m(r).
pub fn extend_normalization(d: &Domain, m: usize, r: f64, tol: f64) -> Result<AffineMap> {
    let dim = d.dim();
    if !d.is_complex() {
        return Err(Error::NotComplex);
    }
    if m == 0 || m > dim {
        return Err(Error::DimensionMismatch { expected: dim, got: m });
    }
    let pre = kdr_check_upto(d, r, tol, m);
    if !pre.passed {
        return Err(Error::NotInKdr(pre.first_failure().unwrap_or_default()));
    }
    let origin = Point::zeros(2 * dim);
    let mut p: Vec<Point> = (0..dim).map(|j| Point::complex_unit(dim, j)).collect();
    let mut cols = Vec::with_capacity(dim);
    for j in 0..dim {
        if j < m {
            let fixed: Vec<Option<Complex<f64>>> = (0..dim)
                .map(|k| match k {
                    k if k == j => Some(Complex::new(1.0, 0.0)),
                    k if k > j && k < m => Some(Complex::new(0.0, 0.0)),
                    _ => None,
                })
                .collect();
            let best = min_support(d, &fixed);
            if !(best.value <= 1.0 + tol) {
                return Err(Error::InfeasibleSeparation(best.value - 1.0));
            }
            cols.push(Point::complex_unit(dim, j));
            p = drop_direction(&p, &Point::from_complex(&best.nu));
        } else {
            let x = closest_checked(d, &origin, &p, &NormalizeOptions::default())?;
            p = drop_direction(&p, &x);
            cols.push(x);
        }
    }
    AffineMap::from_columns(&cols, &origin).inverse()
}
