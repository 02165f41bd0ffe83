use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::piece::{Piece, QuadricKind};
use crate::geometry::{AffineMap, Point, Tolerances};
use crate::numerics::lp::{self, LpOutcome};
use crate::numerics::optim::{golden_section, nelder_mead, NelderMeadOptions};
use crate::numerics::sampling::direction_set;
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Complex,
    Real,
}

#[derive(Clone, Debug)]
pub enum Shape<S: Real> {
    /// {<x, n_i> < c_i for all i}
    HalfSpaces { normals: Vec<Point<S>>, offsets: Vec<S> },
    Ball { center: Point<S>, radius: S },
    /// {sum |z_j|^{2 m_j} < 1}
    ComplexEllipsoid { exponents: Vec<S> },
    Polydisk { radii: Vec<S> },
    /// base + i R^d with a real base domain.
    Tube { base: Box<DomainSpec<S>> },
    Intersection { parts: Vec<DomainSpec<S>> },
    AffineImage { map: AffineMap<S>, domain: Box<DomainSpec<S>> },
}

/// Whether a distance came from a closed form or from sampling plus refinement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exactness {
    Exact,
    Refined,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Distance<S> {
    pub value: S,
    pub exactness: Exactness,
}

#[derive(Clone, Debug)]
pub struct RayHit<S: Real> {
    pub t: S,
    pub point: Option<Point<S>>,
}

/// Real unit normal n at a boundary point and the complex vector nu with Re<z, nu> = <z, n>.
#[derive(Clone, Debug)]
pub struct Supporting<S: Real> {
    pub normal: Point<S>,
    pub nu: Vec<Complex<S>>,
}

/// Open convex domain in C^d (or R^n for real domains) with an interior witness.
#[derive(Clone, Debug)]
pub struct DomainSpec<S: Real = f64> {
    field: Field,
    dim: usize,
    shape: Shape<S>,
    witness: Point<S>,
    pieces: Vec<Piece<S>>,
}

fn lift_real_point<S: Real>(p: &Point<S>) -> Point<S> {
    let mut out = Point::zeros(2 * p.len());
    for (k, x) in p.coords.iter().enumerate() {
        out[2 * k] = *x;
    }
    out
}

fn map_piece<S: Real>(p: &Piece<S>, map: &AffineMap<S>, inv: &AffineMap<S>) -> Piece<S> {
    let t = Point::from_complex(&inv.translation);
    match p {
        Piece::Half { normal, offset } => Piece::Half {
            normal: inv.adjoint_linear(normal),
            offset: *offset - normal.dot(&t),
        },
        Piece::Quadric { rows, center, radius, .. } => {
            let new_rows: Vec<Point<S>> = rows.iter().map(|r| inv.adjoint_linear(r)).collect();
            let new_center = rows.iter().zip(center).map(|(r, c)| *c - r.dot(&t)).collect();
            Piece::quadric(new_rows, new_center, *radius)
        }
        Piece::Ellipsoid { exponents, maps } => {
            let (fwd, back) = match maps {
                Some((f, b)) => (map.compose(f), b.compose(inv)),
                None => (map.clone(), inv.clone()),
            };
            Piece::Ellipsoid { exponents: exponents.clone(), maps: Some((fwd, back)) }
        }
    }
}

impl<S: Real> DomainSpec<S> {
    fn build(field: Field, dim: usize, shape: Shape<S>, witness: Option<Point<S>>) -> Result<Self> {
        let real_dim = if field == Field::Complex { 2 * dim } else { dim };
        let tol = Tolerances::<S>::default();
        let pieces = match &shape {
            Shape::HalfSpaces { normals, offsets } => {
                if normals.len() != offsets.len() || normals.is_empty() {
                    return Err(Error::MalformedDomain("normals/offsets length".into()));
                }
                let mut out = Vec::new();
                for (n, c) in normals.iter().zip(offsets) {
                    if n.len() != real_dim {
                        return Err(Error::DimensionMismatch { expected: real_dim, got: n.len() });
                    }
                    if !(n.norm() > S::zero()) || !c.is_finite() {
                        return Err(Error::MalformedDomain("degenerate halfspace".into()));
                    }
                    out.push(Piece::Half { normal: n.clone(), offset: *c });
                }
                out
            }
            Shape::Ball { center, radius } => {
                if center.len() != real_dim {
                    return Err(Error::DimensionMismatch { expected: real_dim, got: center.len() });
                }
                if !(*radius > S::zero()) {
                    return Err(Error::MalformedDomain("radius must be positive".into()));
                }
                vec![Piece::ball(center, *radius)]
            }
            Shape::ComplexEllipsoid { exponents } => {
                if field != Field::Complex || exponents.len() != dim {
                    return Err(Error::MalformedDomain("ellipsoid needs one exponent per complex coordinate".into()));
                }
                if exponents.iter().any(|m| !(*m >= lit(0.5))) {
                    return Err(Error::MalformedDomain("exponents must be >= 1/2".into()));
                }
                vec![Piece::Ellipsoid { exponents: exponents.clone(), maps: None }]
            }
            Shape::Polydisk { radii } => {
                if field != Field::Complex || radii.len() != dim {
                    return Err(Error::MalformedDomain("polydisk needs one radius per complex coordinate".into()));
                }
                if radii.iter().any(|r| !(*r > S::zero())) {
                    return Err(Error::MalformedDomain("radii must be positive".into()));
                }
                radii
                    .iter()
                    .enumerate()
                    .map(|(k, r)| {
                        Piece::complex_cylinder(&Point::complex_unit(dim, k), Complex::new(S::zero(), S::zero()), *r)
                    })
                    .collect()
            }
            Shape::Tube { base } => {
                if field != Field::Complex || base.field != Field::Real || base.dim != dim {
                    return Err(Error::MalformedDomain("tube base must be a real domain of the same dimension".into()));
                }
                base.pieces
                    .iter()
                    .map(|p| match p {
                        Piece::Half { normal, offset } => {
                            Piece::Half { normal: lift_real_point(normal), offset: *offset }
                        }
                        Piece::Quadric { rows, center, radius, .. } => {
                            Piece::quadric(rows.iter().map(lift_real_point).collect(), center.clone(), *radius)
                        }
                        Piece::Ellipsoid { .. } => unreachable!("real domains have no complex ellipsoid pieces"),
                    })
                    .collect()
            }
            Shape::Intersection { parts } => {
                if parts.is_empty() {
                    return Err(Error::MalformedDomain("empty intersection".into()));
                }
                let mut out = Vec::new();
                for p in parts {
                    if p.field != field || p.dim != dim {
                        return Err(Error::MalformedDomain("intersection parts must share field and dimension".into()));
                    }
                    out.extend(p.pieces.iter().cloned());
                }
                out
            }
            Shape::AffineImage { map, domain } => {
                if field != Field::Complex || domain.field != Field::Complex || map.dim != dim || domain.dim != dim {
                    return Err(Error::MalformedDomain("affine images need a complex domain of matching dimension".into()));
                }
                let inv = map.inverse_with_limit(tol.singular_cond)?;
                domain.pieces.iter().map(|p| map_piece(p, map, &inv)).collect()
            }
        };
        let mut spec = Self { field, dim, shape, witness: Point::zeros(real_dim), pieces };
        let witness = match witness {
            Some(w) => w,
            None => spec.default_witness()?,
        };
        if witness.len() != real_dim {
            return Err(Error::DimensionMismatch { expected: real_dim, got: witness.len() });
        }
        if !witness.is_finite() || !spec.contains(&witness) {
            return Err(Error::MalformedDomain("witness is not an interior point".into()));
        }
        spec.witness = witness;
        Ok(spec)
    }

    fn default_witness(&self) -> Result<Point<S>> {
        let n = self.real_dim();
        match &self.shape {
            Shape::Ball { center, .. } => Ok(center.clone()),
            Shape::ComplexEllipsoid { .. } | Shape::Polydisk { .. } => Ok(Point::zeros(n)),
            Shape::Tube { base } => Ok(lift_real_point(&base.witness)),
            Shape::AffineImage { map, domain } => Ok(map.apply(&domain.witness)),
            Shape::Intersection { parts } => {
                for p in parts {
                    if self.contains(&p.witness) {
                        return Ok(p.witness.clone());
                    }
                }
                let mut mean = Point::zeros(n);
                for p in parts {
                    mean = mean.along(&p.witness, S::one() / S::of_usize(parts.len()));
                }
                if self.contains(&mean) {
                    return Ok(mean);
                }
                self.chebyshev_center()
                    .ok_or_else(|| Error::MalformedDomain("no interior witness found".into()))
            }
            Shape::HalfSpaces { .. } => {
                let o = Point::zeros(n);
                if self.contains(&o) {
                    return Ok(o);
                }
                self.chebyshev_center()
                    .ok_or_else(|| Error::MalformedDomain("halfspaces have empty interior".into()))
            }
        }
    }

    /// Deepest point of the halfspace pieces (LP); None if there are other pieces or no interior.
    fn chebyshev_center(&self) -> Option<Point<S>> {
        let n = self.real_dim();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for p in &self.pieces {
            match p {
                Piece::Half { normal, offset } => {
                    let mut r: Vec<f64> = normal.coords.iter().map(|x| x.f64()).collect();
                    r.push(normal.norm().f64());
                    rows.push(r);
                    rhs.push(offset.f64());
                }
                _ => return None,
            }
        }
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        let mut cap = vec![0.0; n + 1];
        cap[n] = 1.0;
        rows.push(cap);
        rhs.push(1.0);
        match lp::maximize(&c, &rows, &rhs, None).ok()? {
            LpOutcome::Optimal { value, x } if value > 0.0 => {
                Some(Point::new(x[..n].iter().map(|v| S::lit(*v)).collect()))
            }
            _ => None,
        }
    }

    pub fn halfspaces(dim: usize, normals: Vec<Point<S>>, offsets: Vec<S>) -> Result<Self> {
        Self::build(Field::Complex, dim, Shape::HalfSpaces { normals, offsets }, None)
    }

    pub fn real_halfspaces(dim: usize, normals: Vec<Point<S>>, offsets: Vec<S>) -> Result<Self> {
        Self::build(Field::Real, dim, Shape::HalfSpaces { normals, offsets }, None)
    }

    /// Ball in C^d; `center` has 2d real coordinates.
    pub fn ball(center: Point<S>, radius: S) -> Result<Self> {
        let dim = center.len() / 2;
        if center.len() % 2 != 0 {
            return Err(Error::MalformedDomain("complex ball needs an even number of coordinates".into()));
        }
        Self::build(Field::Complex, dim, Shape::Ball { center, radius }, None)
    }

    pub fn unit_ball(dim: usize) -> Self {
        Self::ball(Point::zeros(2 * dim), S::one()).expect("unit ball is well formed")
    }

    pub fn real_ball(center: Point<S>, radius: S) -> Result<Self> {
        let dim = center.len();
        Self::build(Field::Real, dim, Shape::Ball { center, radius }, None)
    }

    pub fn ellipsoid(exponents: Vec<S>) -> Result<Self> {
        let dim = exponents.len();
        Self::build(Field::Complex, dim, Shape::ComplexEllipsoid { exponents }, None)
    }

    pub fn polydisk(radii: Vec<S>) -> Result<Self> {
        let dim = radii.len();
        Self::build(Field::Complex, dim, Shape::Polydisk { radii }, None)
    }

    pub fn tube(base: DomainSpec<S>) -> Result<Self> {
        let dim = base.dim;
        Self::build(Field::Complex, dim, Shape::Tube { base: Box::new(base) }, None)
    }

    pub fn intersection(parts: Vec<DomainSpec<S>>) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::MalformedDomain("empty intersection".into()))?;
        let (field, dim) = (first.field, first.dim);
        Self::build(field, dim, Shape::Intersection { parts }, None)
    }

    pub fn affine_image(map: AffineMap<S>, domain: DomainSpec<S>) -> Result<Self> {
        let dim = domain.dim;
        Self::build(Field::Complex, dim, Shape::AffineImage { map, domain: Box::new(domain) }, None)
    }

    /// Same domain with a caller-chosen interior witness.
    pub fn with_witness(self, witness: Point<S>) -> Result<Self> {
        Self::build(self.field, self.dim, self.shape, Some(witness))
    }

    pub fn from_shape(field: Field, dim: usize, shape: Shape<S>, witness: Option<Point<S>>) -> Result<Self> {
        Self::build(field, dim, shape, witness)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Complex dimension d (or n for real domains).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn real_dim(&self) -> usize {
        match self.field {
            Field::Complex => 2 * self.dim,
            Field::Real => self.dim,
        }
    }

    pub fn is_complex(&self) -> bool {
        self.field == Field::Complex
    }

    pub fn shape(&self) -> &Shape<S> {
        &self.shape
    }

    pub fn witness(&self) -> &Point<S> {
        &self.witness
    }

    pub fn pieces(&self) -> &[Piece<S>] {
        &self.pieces
    }

    pub fn kind_name(&self) -> &'static str {
        match self.shape {
            Shape::HalfSpaces { .. } => "halfspaces",
            Shape::Ball { .. } => "ball",
            Shape::ComplexEllipsoid { .. } => "ellipsoid",
            Shape::Polydisk { .. } => "polydisk",
            Shape::Tube { .. } => "tube",
            Shape::Intersection { .. } => "intersection",
            Shape::AffineImage { .. } => "affine_image",
        }
    }

    fn check_len(&self, p: &Point<S>) -> Result<()> {
        if p.len() != self.real_dim() {
            return Err(Error::DimensionMismatch { expected: self.real_dim(), got: p.len() });
        }
        Ok(())
    }

    pub fn contains(&self, z: &Point<S>) -> bool {
        z.len() == self.real_dim() && self.pieces.iter().all(|p| p.contains(z))
    }

    pub fn require_interior(&self, z: &Point<S>) -> Result<()> {
        self.check_len(z)?;
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::NotInterior)
        }
    }

    /// Distance from z along the unit direction u to the boundary (+inf if the ray stays inside).
    pub fn ray(&self, z: &Point<S>, u: &Point<S>) -> S {
        let rel = Tolerances::<S>::default().ray_rel;
        self.pieces.iter().fold(S::infinity(), |t, p| t.min(p.ray(z, u, rel)))
    }

    pub fn ray_boundary(&self, z: &Point<S>, u: &Point<S>) -> Result<RayHit<S>> {
        self.require_interior(z)?;
        let u = u.normalized().ok_or(Error::ZeroDirection)?;
        let t = self.ray(z, &u);
        let point = if t.is_finite() { Some(z.along(&u, t)) } else { None };
        Ok(RayHit { t, point })
    }

    /// Signed boundary defect (positive outside); an upper bound on the distance to the boundary
    /// for points close to it.
    pub fn signed_defect(&self, x: &Point<S>) -> S {
        let rel = Tolerances::<S>::default().ray_rel;
        self.pieces.iter().fold(S::neg_infinity(), |m, p| m.max(p.signed_defect(x, rel)))
    }

    pub fn is_boundary_point(&self, x: &Point<S>, tol: S) -> bool {
        self.signed_defect(x).abs() <= tol
    }

    /// Euclidean distance to the boundary.
    pub fn delta(&self, z: &Point<S>) -> Result<Distance<S>> {
        self.require_interior(z)?;
        let mut value = S::infinity();
        let mut numeric: Vec<&Piece<S>> = Vec::new();
        for p in &self.pieces {
            match p.delta_exact(z) {
                Some(v) => value = value.min(v),
                None => numeric.push(p),
            }
        }
        if numeric.is_empty() {
            return Ok(Distance { value, exactness: Exactness::Exact });
        }
        let n = self.real_dim();
        let tol = Tolerances::<S>::default();
        let dirs: Vec<Vec<S>> = direction_set(n, n * tol.directions_per_dim, 0x5eed);
        let ray_all = |u: &[S]| -> S {
            let p = Point::new(u.to_vec());
            match p.normalized() {
                Some(u) => numeric.iter().fold(S::infinity(), |t, pc| t.min(pc.ray(z, &u, tol.ray_rel))),
                None => S::infinity(),
            }
        };
        let mut scored: Vec<(S, usize)> = dirs.iter().enumerate().map(|(i, d)| (ray_all(d), i)).collect();
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut best = scored[0].0;
        if best.is_finite() {
            let opts = NelderMeadOptions { initial_step: lit(0.05), max_iter: 300 * n, ..Default::default() };
            for &(_, i) in scored.iter().take(3) {
                let m = nelder_mead(ray_all, &dirs[i], &opts);
                best = best.min(m.value);
            }
        }
        Ok(Distance { value: value.min(best), exactness: Exactness::Refined })
    }

    /// Distance from z to the boundary inside the complex line z + C v.
    pub fn delta_dir(&self, z: &Point<S>, v: &Point<S>) -> Result<Distance<S>> {
        if !self.is_complex() {
            return Err(Error::NotComplex);
        }
        self.require_interior(z)?;
        self.check_len(v)?;
        let v = v.normalized().ok_or(Error::ZeroDirection)?;
        if self.dim == 1 {
            return self.delta(z);
        }
        let mut value = S::infinity();
        let mut numeric: Vec<&Piece<S>> = Vec::new();
        for p in &self.pieces {
            match p.delta_dir_exact(z, &v) {
                Some(t) => value = value.min(t),
                None => numeric.push(p),
            }
        }
        if numeric.is_empty() {
            return Ok(Distance { value, exactness: Exactness::Exact });
        }
        let tol = Tolerances::<S>::default();
        let iv = v.mul_i();
        let ray_at = |theta: S| -> S {
            let u = v.scale(theta.cos()).along(&iv, theta.sin());
            numeric.iter().fold(S::infinity(), |t, pc| t.min(pc.ray(z, &u, tol.ray_rel)))
        };
        let k = tol.line_angles;
        let step = S::TAU() / S::of_usize(k);
        let samples: Vec<S> = (0..k).map(|i| ray_at(step * S::of_usize(i))).collect();
        let mut imin = 0;
        for i in 1..k {
            if samples[i] < samples[imin] {
                imin = i;
            }
        }
        let mut best = samples[imin];
        if best.is_finite() {
            let centre = step * S::of_usize(imin);
            let (_, refined) = golden_section(ray_at, centre - step, centre + step, lit::<S>(1e-10));
            best = best.min(refined);
        }
        Ok(Distance { value: value.min(best), exactness: Exactness::Refined })
    }

    /// Outward unit normal and its complex form at a boundary point. At corners the normals of the
    /// active pieces are averaged and renormalised.
    pub fn supporting_functional(&self, xi: &Point<S>) -> Result<Supporting<S>> {
        self.supporting_functional_with(xi, &Tolerances::default())
    }

    pub fn supporting_functional_with(&self, xi: &Point<S>, tol: &Tolerances<S>) -> Result<Supporting<S>> {
        self.check_len(xi)?;
        let defects: Vec<S> = self.pieces.iter().map(|p| p.signed_defect(xi, tol.ray_rel)).collect();
        let top = defects.iter().fold(S::neg_infinity(), |m, d| m.max(*d));
        if !(top.abs() <= tol.boundary) {
            return Err(Error::NotBoundary(top.f64()));
        }
        let mut sum = Point::zeros(self.real_dim());
        for (p, d) in self.pieces.iter().zip(&defects) {
            if *d >= top - tol.tie {
                if let Some(n) = p.normal(xi) {
                    sum = &sum + &n;
                }
            }
        }
        let normal = sum.normalized().ok_or(Error::NotBoundary(top.f64()))?;
        let nu = if self.is_complex() { normal.to_complex() } else { Vec::new() };
        Ok(Supporting { normal, nu })
    }

    /// True when the domain contains no affine ray.
    pub fn is_bounded(&self) -> bool {
        let n = self.real_dim();
        let mut null_rows: Vec<Point<f64>> = Vec::new();
        let mut halves: Vec<Point<f64>> = Vec::new();
        for p in &self.pieces {
            match p {
                Piece::Ellipsoid { .. } => return true,
                Piece::Quadric { kind: QuadricKind::Sphere, .. } => return true,
                Piece::Quadric { rows, .. } => null_rows.extend(rows.iter().map(|r| r.cast())),
                Piece::Half { normal, .. } => halves.push(normal.cast()),
            }
        }
        let basis = real_null_space(&null_rows, n);
        if basis.is_empty() {
            return true;
        }
        let k = basis.len();
        let rows: Vec<Vec<f64>> = halves.iter().map(|h| basis.iter().map(|b| b.dot(h)).collect()).collect();
        let rhs = vec![0.0; rows.len()];
        for j in 0..k {
            for s in [1.0, -1.0] {
                let mut c = vec![0.0; k];
                c[j] = s;
                match lp::maximize(&c, &rows, &rhs, Some(1.0)) {
                    Ok(LpOutcome::Optimal { value, .. }) if value > 1e-9 => return false,
                    Ok(LpOutcome::Unbounded) => return false,
                    _ => {}
                }
            }
        }
        true
    }

    pub fn cast<T: Real>(&self) -> DomainSpec<T> {
        let shape = match &self.shape {
            Shape::HalfSpaces { normals, offsets } => Shape::HalfSpaces {
                normals: normals.iter().map(|n| n.cast()).collect(),
                offsets: offsets.iter().map(|c| T::lit(c.f64())).collect(),
            },
            Shape::Ball { center, radius } => Shape::Ball { center: center.cast(), radius: T::lit(radius.f64()) },
            Shape::ComplexEllipsoid { exponents } => {
                Shape::ComplexEllipsoid { exponents: exponents.iter().map(|m| T::lit(m.f64())).collect() }
            }
            Shape::Polydisk { radii } => Shape::Polydisk { radii: radii.iter().map(|r| T::lit(r.f64())).collect() },
            Shape::Tube { base } => Shape::Tube { base: Box::new(base.cast()) },
            Shape::Intersection { parts } => Shape::Intersection { parts: parts.iter().map(|p| p.cast()).collect() },
            Shape::AffineImage { map, domain } => {
                Shape::AffineImage { map: map.cast(), domain: Box::new(domain.cast()) }
            }
        };
        DomainSpec::build(self.field, self.dim, shape, Some(self.witness.cast()))
            .expect("cast of a valid domain is valid")
    }
}

/// Orthonormal basis of {u in R^n : r.u = 0 for every row r}.
pub(crate) fn real_null_space(rows: &[Point<f64>], n: usize) -> Vec<Point<f64>> {
    let mut span: Vec<Point<f64>> = Vec::new();
    for r in rows {
        let mut w = r.clone();
        for b in &span {
            w = w.along(b, -w.dot(b));
        }
        if let Some(u) = w.normalized() {
            if w.norm() > 1e-10 * (1.0 + r.norm()) {
                span.push(u);
            }
        }
    }
    let mut out: Vec<Point<f64>> = Vec::new();
    for k in 0..n {
        let mut w = Point::unit(n, k);
        for _ in 0..2 {
            for b in span.iter().chain(out.iter()) {
                w = w.along(b, -w.dot(b));
            }
        }
        if w.norm() > 1e-8 {
            out.push(w.normalized().expect("nonzero"));
        }
        if span.len() + out.len() == n {
            break;
        }
    }
    out
}
