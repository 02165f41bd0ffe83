//! Support functions and nearest boundary points inside complex affine subspaces (f64).

use num_complex::Complex;

use crate::geometry::piece::{Piece, QuadricKind};
use crate::geometry::{DomainSpec, Exactness, Point, Shape};
use crate::numerics::lp::{self, LpOutcome};
use crate::numerics::optim::{nelder_mead, NelderMeadOptions};
use crate::numerics::sampling::{seeded, unit_vector};

type Domain = DomainSpec<f64>;

pub(crate) fn polyhedral_rows(d: &Domain) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for p in d.pieces() {
        match p {
            Piece::Half { normal, offset } => {
                rows.push(normal.coords.clone());
                rhs.push(*offset);
            }
            _ => return None,
        }
    }
    Some((rows, rhs))
}

fn ellipsoid_support(exponents: &[f64], nu: &[Complex<f64>]) -> f64 {
    // maximise sum rho_k |nu_k| subject to sum rho_k^{2 m_k} <= 1
    let a: Vec<f64> = nu.iter().map(|z| z.norm()).collect();
    if a.iter().all(|x| *x == 0.0) {
        return 0.0;
    }
    let rho = |mu: f64| -> Vec<f64> {
        a.iter()
            .zip(exponents)
            .map(|(ak, m)| if *ak == 0.0 { 0.0 } else { (ak / (2.0 * m * mu)).powf(1.0 / (2.0 * m - 1.0)) })
            .collect()
    };
    let g = |mu: f64| -> f64 { rho(mu).iter().zip(exponents).map(|(r, m)| r.powf(2.0 * m)).sum::<f64>() - 1.0 };
    let (mut lo, mut hi) = (1e-300_f64.max(1e-12), 1.0);
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    while g(lo) < 0.0 && lo > 1e-280 {
        lo *= 1e-3;
    }
    let mut l = lo.ln();
    let mut h = hi.ln();
    for _ in 0..200 {
        let m = 0.5 * (l + h);
        if g(m.exp()) > 0.0 {
            l = m;
        } else {
            h = m;
        }
    }
    let r = rho((0.5 * (l + h)).exp());
    r.iter().zip(&a).map(|(x, y)| x * y).sum()
}

/// sup over the domain of <x, n> (may be +inf).
pub fn support_function(d: &Domain, n: &Point<f64>) -> f64 {
    match d.shape() {
        Shape::HalfSpaces { .. } => polytope_support(d, n),
        Shape::Ball { center, radius } => center.dot(n) + radius * n.norm(),
        Shape::ComplexEllipsoid { exponents } => ellipsoid_support(exponents, &n.to_complex()),
        Shape::Polydisk { radii } => radii.iter().zip(n.to_complex()).map(|(r, z)| r * z.norm()).sum(),
        Shape::Tube { base } => {
            let mut re = Point::zeros(base.real_dim());
            for k in 0..base.real_dim() {
                if n[2 * k + 1].abs() > 1e-14 * (1.0 + n.norm()) {
                    return f64::INFINITY;
                }
                re[k] = n[2 * k];
            }
            support_function(base, &re)
        }
        Shape::AffineImage { map, domain } => {
            let t = Point::from_complex(&map.translation);
            t.dot(n) + support_function(domain, &map.adjoint_linear(n))
        }
        Shape::Intersection { parts } => {
            if polyhedral_rows(d).is_some() {
                return polytope_support(d, n);
            }
            intersection_support(parts, n)
        }
    }
}

fn polytope_support(d: &Domain, n: &Point<f64>) -> f64 {
    let (rows, rhs) = polyhedral_rows(d).expect("polyhedral domain");
    match lp::maximize(&n.coords, &rows, &rhs, None) {
        Ok(LpOutcome::Optimal { value, .. }) => value,
        Ok(LpOutcome::Unbounded) => f64::INFINITY,
        _ => f64::NAN,
    }
}

/// Dual form min over n_1 + ... + n_k = n of sum h_i(n_i); every split is an upper bound.
fn intersection_support(parts: &[Domain], n: &Point<f64>) -> f64 {
    let k = parts.len();
    let dim = n.len();
    if k == 1 {
        return support_function(&parts[0], n);
    }
    let total = |x: &[f64]| -> f64 {
        let mut rest = n.clone();
        let mut acc = 0.0;
        for (i, p) in parts[..k - 1].iter().enumerate() {
            let ni = Point::new(x[i * dim..(i + 1) * dim].to_vec());
            rest = &rest - &ni;
            acc += support_function(p, &ni);
        }
        acc + support_function(&parts[k - 1], &rest)
    };
    let mut best = f64::INFINITY;
    let mut best_x = vec![0.0; (k - 1) * dim];
    for i in 0..k {
        // start from "all weight on part i"
        let mut x = vec![0.0; (k - 1) * dim];
        if i < k - 1 {
            x[i * dim..(i + 1) * dim].copy_from_slice(&n.coords);
        }
        let v = total(&x);
        if v < best {
            best = v;
            best_x = x;
        }
    }
    let scale = n.norm().max(1e-12);
    for step in [0.5 * scale, 0.05 * scale] {
        let opts = NelderMeadOptions { initial_step: step, max_iter: 4000, f_tol: 1e-15, x_tol: 1e-12 * scale };
        let m = nelder_mead(total, &best_x, &opts);
        if m.value < best {
            best = m.value;
            best_x = m.x;
        }
    }
    best
}

/// Minimum of the support function over functionals nu whose coordinates are pinned where
/// `fixed[k]` is Some and free elsewhere. Exact (dual LP) on polyhedral domains.
#[derive(Clone, Debug)]
pub struct SupportMinimum {
    pub nu: Vec<Complex<f64>>,
    pub value: f64,
    pub exactness: Exactness,
}

pub fn min_support(d: &Domain, fixed: &[Option<Complex<f64>>]) -> SupportMinimum {
    assert_eq!(fixed.len(), d.dim());
    let pins: Vec<Option<f64>> = fixed.iter().flat_map(|f| [f.map(|z| z.re), f.map(|z| z.im)]).collect();
    min_support_real(d, &pins)
}

/// As [`min_support`], pinning individual real coordinates of the interleaved representation.
pub fn min_support_real(d: &Domain, pins: &[Option<f64>]) -> SupportMinimum {
    let dim = d.dim();
    assert_eq!(pins.len(), 2 * dim);
    let free: Vec<usize> = (0..2 * dim).filter(|k| pins[*k].is_none()).collect();
    let assemble = |x: &[f64]| -> Vec<Complex<f64>> {
        let mut c: Vec<f64> = pins.iter().map(|f| f.unwrap_or_default()).collect();
        for (i, &k) in free.iter().enumerate() {
            c[k] = x[i];
        }
        c.chunks(2).map(|p| Complex::new(p[0], p[1])).collect()
    };
    if let Some((rows, rhs)) = polyhedral_rows(d) {
        // h(nu) = min { c.y : N^T y = nu, y >= 0 }; free coordinates drop their equations
        let mut eq = Vec::new();
        let mut b = Vec::new();
        for (part, f) in pins.iter().enumerate() {
            if let Some(val) = f {
                eq.push(rows.iter().map(|r| r[part]).collect::<Vec<f64>>());
                b.push(*val);
            }
        }
        return match lp::minimize_nonneg_eq(&rhs, &eq, &b) {
            Ok(LpOutcome::Optimal { value, x }) => {
                let mut nu = vec![Complex::new(0.0, 0.0); dim];
                for (y, r) in x.iter().zip(&rows) {
                    for k in 0..dim {
                        nu[k] += Complex::new(y * r[2 * k], y * r[2 * k + 1]);
                    }
                }
                SupportMinimum { nu, value, exactness: Exactness::Exact }
            }
            Ok(LpOutcome::Unbounded) => SupportMinimum { nu: assemble(&vec![0.0; free.len()]), value: f64::NEG_INFINITY, exactness: Exactness::Exact },
            _ => SupportMinimum { nu: assemble(&vec![0.0; free.len()]), value: f64::INFINITY, exactness: Exactness::Exact },
        };
    }
    let f = |x: &[f64]| support_function(d, &Point::from_complex(&assemble(x)));
    let mut x = vec![0.0; free.len()];
    let mut value = f(&x);
    if !free.is_empty() {
        for step in [0.5, 0.1, 0.01] {
            let m = nelder_mead(f, &x, &NelderMeadOptions { initial_step: step, max_iter: 3000, f_tol: 1e-15, x_tol: 1e-12 });
            if m.value <= value {
                value = m.value;
                x = m.x;
            }
        }
    }
    SupportMinimum { nu: assemble(&x), value, exactness: Exactness::Refined }
}

/// Nearest point of the boundary to q inside q + span_C(basis), basis complex orthonormal.
#[derive(Clone, Debug)]
pub struct SubspaceHit {
    pub point: Point<f64>,
    pub distance: f64,
    pub exactness: Exactness,
}

fn real_basis(basis: &[Point<f64>]) -> Vec<Point<f64>> {
    let mut out = Vec::with_capacity(2 * basis.len());
    for b in basis {
        out.push(b.clone());
        out.push(b.mul_i());
    }
    out
}

fn project(v: &Point<f64>, rb: &[Point<f64>]) -> Point<f64> {
    let mut p = Point::zeros(v.len());
    for b in rb {
        p = p.along(b, v.dot(b));
    }
    p
}

fn piece_subspace_exact(p: &Piece<f64>, q: &Point<f64>, basis: &[Point<f64>], rb: &[Point<f64>]) -> Option<(Point<f64>, f64)> {
    match p {
        Piece::Half { normal, offset } => {
            let gap = offset - normal.dot(q);
            let pn = project(normal, rb);
            let n2 = pn.dot(&pn);
            if n2 <= 1e-30 {
                return Some((q.clone(), f64::INFINITY));
            }
            Some((q.along(&pn, gap / n2), gap / n2.sqrt()))
        }
        Piece::Quadric { center, radius, kind: QuadricKind::Sphere, scale, .. } => {
            let c = Point::new(center.iter().map(|x| x / scale).collect());
            let r = radius / scale;
            let cp = q.along(&project(&(&c - q), rb), 1.0);
            let off = c.dist(&cp);
            let rho = (r * r - off * off).max(0.0).sqrt();
            let w = q - &cp;
            // q at the centre of the slice: every direction is closest
            let dir = if w.norm() > 1e-12 * r { w.normalized().unwrap() } else { basis[0].clone() };
            Some((cp.along(&dir, rho), rho - w.norm()))
        }
        Piece::Quadric { rows, center, radius, kind: QuadricKind::ComplexFunctional, .. } => {
            let a = &rows[0];
            let s = q.cdot(a) - Complex::new(center[0], center[1]);
            // complex projection of a onto the subspace
            let mut pa = Point::zeros(q.len());
            for b in basis {
                pa = &pa + &b.cscale(a.cdot(b));
            }
            let na = pa.norm();
            if na <= 1e-15 {
                return Some((q.clone(), f64::INFINITY));
            }
            let dist = (radius - s.norm()) / na;
            let phase = if s.norm() > 0.0 { s / s.norm() } else { Complex::new(1.0, 0.0) };
            let w = pa.scale(1.0 / na).cscale(phase * dist);
            Some((q + &w, dist))
        }
        _ => None,
    }
}

fn piece_subspace_numeric(p: &Piece<f64>, q: &Point<f64>, rb: &[Point<f64>], starts: usize, seed: u64) -> (Point<f64>, f64) {
    let m = rb.len();
    let dir = |c: &[f64]| -> Option<Point<f64>> {
        let mut u = Point::zeros(q.len());
        for (ci, b) in c.iter().zip(rb) {
            u = u.along(b, *ci);
        }
        u.normalized()
    };
    let f = |c: &[f64]| -> f64 {
        match dir(c) {
            Some(u) => p.ray(q, &u, 1e-14),
            None => f64::INFINITY,
        }
    };
    let mut rng = seeded(seed);
    let mut cands: Vec<(f64, Vec<f64>)> = (0..starts)
        .map(|_| {
            let c: Vec<f64> = unit_vector(&mut rng, m);
            (f(&c), c)
        })
        .collect();
    cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let opts = NelderMeadOptions { initial_step: 0.1, max_iter: 2000, f_tol: 1e-16, x_tol: 1e-12 };
    let mut best = (cands[0].0, cands[0].1.clone());
    for (_, c) in cands.iter().take(6) {
        let mut x = c.clone();
        for step in [0.1, 0.01] {
            let r = nelder_mead(f, &x, &NelderMeadOptions { initial_step: step, ..opts });
            x = r.x;
            if r.value < best.0 {
                best = (r.value, x.clone());
            }
        }
    }
    let u = dir(&best.1).expect("nonzero direction");
    (q.along(&u, best.0), best.0)
}

/// Closest boundary point to q within q + span_C(basis). Numeric pieces use `starts`
/// random starts seeded by `seed` followed by simplex refinement.
pub fn closest_boundary_in_subspace(d: &Domain, q: &Point<f64>, basis: &[Point<f64>], starts: usize, seed: u64) -> SubspaceHit {
    let rb = real_basis(basis);
    let mut best: Option<(Point<f64>, f64)> = None;
    let mut exactness = Exactness::Exact;
    for p in d.pieces() {
        let hit = match piece_subspace_exact(p, q, basis, &rb) {
            Some(h) => h,
            None => {
                exactness = Exactness::Refined;
                piece_subspace_numeric(p, q, &rb, starts, seed)
            }
        };
        if best.as_ref().is_none_or(|b| hit.1 < b.1) {
            best = Some(hit);
        }
    }
    let (point, distance) = best.expect("domain has pieces");
    SubspaceHit { point, distance, exactness }
}
