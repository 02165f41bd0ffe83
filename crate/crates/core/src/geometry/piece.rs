use num_complex::Complex;

use crate::geometry::{AffineMap, Point};
use crate::numerics::optim::bisect;
use crate::scalar::{lit, Real};

/// Structural class of a quadric piece; decides which distances are closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadricKind {
    /// L = s I on all of R^n (a round ball).
    Sphere,
    /// Rows are (Re<., a>, Im<., a>) for one complex functional a.
    ComplexFunctional,
    /// L L^T = s^2 I but neither of the above.
    Isotropic,
    General,
}

/// Convex building block; a domain is the intersection of its pieces.
#[derive(Clone, Debug)]
pub enum Piece<S: Real> {
    /// <x, n> < c.
    Half { normal: Point<S>, offset: S },
    /// ||L x - c|| < R with L given by rows.
    Quadric { rows: Vec<Point<S>>, center: Vec<S>, radius: S, kind: QuadricKind, scale: S },
    /// sum |w_j|^{2 m_j} < 1 with w = A^{-1} z.
    Ellipsoid { exponents: Vec<S>, maps: Option<(AffineMap<S>, AffineMap<S>)> },
}

fn classify<S: Real>(rows: &[Point<S>]) -> (QuadricKind, S) {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    let s2 = rows[0].dot(&rows[0]);
    let tol = lit::<S>(1e-12) * (S::one() + s2);
    let mut iso = true;
    for i in 0..m {
        for j in 0..m {
            let g = rows[i].dot(&rows[j]);
            let want = if i == j { s2 } else { S::zero() };
            if (g - want).abs() > tol {
                iso = false;
            }
        }
    }
    let s = s2.sqrt();
    if !iso {
        return (QuadricKind::General, s);
    }
    if m == n {
        return (QuadricKind::Sphere, s);
    }
    if m == 2 && n % 2 == 0 && rows[0].mul_i().dist(&rows[1]) <= tol {
        return (QuadricKind::ComplexFunctional, s);
    }
    (QuadricKind::Isotropic, s)
}

fn ellipsoid_value<S: Real>(exponents: &[S], w: &Point<S>) -> S {
    exponents
        .iter()
        .enumerate()
        .fold(S::zero(), |acc, (k, m)| acc + w.complex(k).norm_sqr().powf(*m))
}

impl<S: Real> Piece<S> {
    pub fn quadric(rows: Vec<Point<S>>, center: Vec<S>, radius: S) -> Self {
        let (kind, scale) = classify(&rows);
        Piece::Quadric { rows, center, radius, kind, scale }
    }

    pub fn ball(center: &Point<S>, radius: S) -> Self {
        let n = center.len();
        let rows = (0..n).map(|k| Point::unit(n, k)).collect();
        Piece::Quadric { rows, center: center.coords.clone(), radius, kind: QuadricKind::Sphere, scale: S::one() }
    }

    /// {|<z, a> - c| < r}.
    pub fn complex_cylinder(axis: &Point<S>, center: Complex<S>, radius: S) -> Self {
        Self::quadric(vec![axis.clone(), axis.mul_i()], vec![center.re, center.im], radius)
    }

    fn quadric_residual(rows: &[Point<S>], center: &[S], x: &Point<S>) -> Vec<S> {
        rows.iter().zip(center).map(|(r, c)| r.dot(x) - *c).collect()
    }

    pub fn contains(&self, x: &Point<S>) -> bool {
        match self {
            Piece::Half { normal, offset } => normal.dot(x) < *offset,
            Piece::Quadric { rows, center, radius, .. } => {
                let r = Self::quadric_residual(rows, center, x);
                r.iter().fold(S::zero(), |a, v| a + *v * *v) < *radius * *radius
            }
            Piece::Ellipsoid { exponents, maps } => {
                let w = match maps {
                    Some((_, inv)) => inv.apply(x),
                    None => x.clone(),
                };
                ellipsoid_value(exponents, &w) < S::one()
            }
        }
    }

    /// Distance along the unit direction u to the piece boundary (may be +inf).
    pub fn ray(&self, x: &Point<S>, u: &Point<S>, rel_tol: S) -> S {
        match self {
            Piece::Half { normal, offset } => {
                let a = normal.dot(u);
                if a > S::zero() {
                    ((*offset - normal.dot(x)) / a).max(S::zero())
                } else {
                    S::infinity()
                }
            }
            Piece::Quadric { rows, center, radius, .. } => {
                let r = Self::quadric_residual(rows, center, x);
                let lu: Vec<S> = rows.iter().map(|row| row.dot(u)).collect();
                let a = lu.iter().fold(S::zero(), |acc, v| acc + *v * *v);
                let b = lu.iter().zip(&r).fold(S::zero(), |acc, (p, q)| acc + *p * *q);
                let c = r.iter().fold(S::zero(), |acc, v| acc + *v * *v) - *radius * *radius;
                positive_root(a, b, c)
            }
            Piece::Ellipsoid { exponents, maps } => {
                let (w, dir) = match maps {
                    Some((_, inv)) => (inv.apply(x), inv.apply_linear(u)),
                    None => (x.clone(), u.clone()),
                };
                let f = |t: S| ellipsoid_value(exponents, &w.along(&dir, t)) - S::one();
                if f(S::zero()) >= S::zero() {
                    return S::zero();
                }
                let mut hi = S::one();
                let mut guard = 0;
                while f(hi) < S::zero() {
                    hi = hi * lit(2.0);
                    guard += 1;
                    if guard > 200 {
                        return S::infinity();
                    }
                }
                bisect(f, S::zero(), hi, rel_tol * hi)
            }
        }
    }

    /// Signed boundary defect: ~ distance outside (positive) or inside (negative).
    /// Euclidean for halfspaces and isotropic quadrics, radial for the rest.
    pub fn signed_defect(&self, x: &Point<S>, rel_tol: S) -> S {
        match self {
            Piece::Half { normal, offset } => (normal.dot(x) - *offset) / normal.norm(),
            Piece::Quadric { rows, center, radius, kind, scale } => {
                let r = Self::quadric_residual(rows, center, x);
                let norm = r.iter().fold(S::zero(), |a, v| a + *v * *v).sqrt();
                match kind {
                    QuadricKind::General => (norm - *radius) / self.lipschitz(),
                    _ => (norm - *radius) / *scale,
                }
            }
            Piece::Ellipsoid { exponents, maps } => {
                // radial defect measured from the ellipsoid centre
                let (w, fwd) = match maps {
                    Some((fwd, inv)) => (inv.apply(x), Some(fwd)),
                    None => (x.clone(), None),
                };
                let n = w.norm();
                if n == S::zero() {
                    return -S::one();
                }
                let u = w.scale(S::one() / n);
                let zero = Point::zeros(w.len());
                let t = Piece::Ellipsoid { exponents: exponents.clone(), maps: None }.ray(&zero, &u, rel_tol);
                let diff = w.scale((n - t) / n);
                let scale = match fwd {
                    Some(f) => f.apply_linear(&diff).norm(),
                    None => diff.norm(),
                };
                if n >= t {
                    scale
                } else {
                    -scale
                }
            }
        }
    }

    /// Upper bound on the gradient norm of the residual map of a general quadric.
    fn lipschitz(&self) -> S {
        match self {
            Piece::Quadric { rows, .. } => rows.iter().fold(S::zero(), |a, r| a + r.dot(r)).sqrt(),
            _ => S::one(),
        }
    }

    /// Outward unit normal at x (assumed on or near the piece boundary).
    pub fn normal(&self, x: &Point<S>) -> Option<Point<S>> {
        match self {
            Piece::Half { normal, .. } => normal.normalized(),
            Piece::Quadric { rows, center, .. } => {
                let r = Self::quadric_residual(rows, center, x);
                let mut g = Point::zeros(x.len());
                for (row, ri) in rows.iter().zip(&r) {
                    g = g.along(row, *ri);
                }
                g.normalized()
            }
            Piece::Ellipsoid { exponents, maps } => {
                let w = match maps {
                    Some((_, inv)) => inv.apply(x),
                    None => x.clone(),
                };
                let mut g = Point::zeros(w.len());
                for (k, m) in exponents.iter().enumerate() {
                    let rho2 = w.complex(k).norm_sqr();
                    let f = if rho2 > S::zero() { lit::<S>(2.0) * *m * rho2.powf(*m - S::one()) } else { S::zero() };
                    g[2 * k] = f * w[2 * k];
                    g[2 * k + 1] = f * w[2 * k + 1];
                }
                let g = match maps {
                    Some((_, inv)) => inv.adjoint_linear(&g),
                    None => g,
                };
                g.normalized()
            }
        }
    }

    /// Closed-form distance to the piece boundary when available.
    pub fn delta_exact(&self, x: &Point<S>) -> Option<S> {
        match self {
            Piece::Half { normal, offset } => Some((*offset - normal.dot(x)) / normal.norm()),
            Piece::Quadric { kind: QuadricKind::General, .. } => None,
            Piece::Quadric { .. } => Some(-self.signed_defect(x, S::zero())),
            Piece::Ellipsoid { .. } => None,
        }
    }

    /// Closed-form distance from x to the boundary inside the complex line x + C v (|v| = 1).
    pub fn delta_dir_exact(&self, x: &Point<S>, v: &Point<S>) -> Option<S> {
        match self {
            Piece::Half { normal, offset } => {
                let a = v.cdot(normal).norm();
                let gap = *offset - normal.dot(x);
                Some(if a > S::zero() { gap / a } else { S::infinity() })
            }
            Piece::Quadric { center, radius, kind: QuadricKind::Sphere, scale, .. } => {
                let c = Point::new(center.iter().map(|c| *c / *scale).collect());
                let w = x - &c;
                let r = *radius / *scale;
                let beta = w.cdot(v).norm();
                let rho2 = r * r - w.dot(&w) + beta * beta;
                Some(rho2.max(S::zero()).sqrt() - beta)
            }
            Piece::Quadric { rows, center, radius, kind: QuadricKind::ComplexFunctional, .. } => {
                let a = &rows[0];
                let s = x.cdot(a) - Complex::new(center[0], center[1]);
                let va = v.cdot(a).norm();
                Some(if va > S::zero() { (*radius - s.norm()) / va } else { S::infinity() })
            }
            _ => None,
        }
    }
}

/// Largest root of a t^2 + 2 b t + c = 0 with c < 0 (start point inside).
fn positive_root<S: Real>(a: S, b: S, c: S) -> S {
    if a <= S::zero() {
        return S::infinity();
    }
    if c >= S::zero() {
        return S::zero();
    }
    let disc = (b * b - a * c).max(S::zero()).sqrt();
    if b > S::zero() {
        -c / (b + disc)
    } else {
        (disc - b) / a
    }
}
