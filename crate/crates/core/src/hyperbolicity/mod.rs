//! Finite metric spaces: Gromov products, four-point delta, thin triangles and visual metrics.

mod regularity;

pub use regularity::{
    fit_alpha_from_probes, fit_alpha_regularity, fit_visual_constant, sample_quasigeodesic, AlphaFitOptions, AlphaProbe,
    AlphaRegularityFit, VisualFit,
};

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::numerics::sampling::seeded;
use crate::scalar::{lit, Real};

/// Labelled symmetric distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetric<S: Real = f64> {
    labels: Vec<String>,
    dist: Vec<S>,
    /// Per-entry uncertainty (bracket widths) when built from brackets.
    uncertainty: Option<Vec<S>>,
}

impl<S: Real> FiniteMetric<S> {
    /// Checks zero diagonal, symmetry, nonnegativity and the triangle inequality (tolerance 1e-9
    /// relative to the largest entry).
    pub fn new(labels: Vec<String>, dist: Vec<S>) -> Result<Self> {
        let m = Self::unchecked(labels, dist)?;
        let scale = m.dist.iter().fold(S::one(), |a, b| a.max(*b));
        let defect = m.triangle_defect();
        if defect > lit::<S>(1e-9) * scale {
            return Err(Error::InvalidMetric(format!("triangle inequality fails by {defect}")));
        }
        Ok(m)
    }

    fn unchecked(labels: Vec<String>, dist: Vec<S>) -> Result<Self> {
        let n = labels.len();
        if dist.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: dist.len() });
        }
        let scale = dist.iter().fold(S::one(), |a, b| a.max(b.abs()));
        let tol = lit::<S>(1e-12) * scale;
        for i in 0..n {
            if dist[i * n + i].abs() > tol {
                return Err(Error::InvalidMetric(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let x = dist[i * n + j];
                if !x.is_finite() || x < S::zero() {
                    return Err(Error::InvalidMetric(format!("entry ({i},{j}) = {x}")));
                }
                if (x - dist[j * n + i]).abs() > tol {
                    return Err(Error::InvalidMetric(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { labels, dist, uncertainty: None })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Result<Self> {
        let mut dist = vec![S::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let x = f(i, j);
                dist[i * n + j] = x;
                dist[j * n + i] = x;
            }
        }
        Self::new((0..n).map(|i| i.to_string()).collect(), dist)
    }

    /// Representatives are bracket midpoints, widths are kept as uncertainty. The triangle
    /// inequality is not enforced (see `triangle_defect`).
    pub fn from_brackets(labels: Vec<String>, lower: &[S], upper: &[S]) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), got: upper.len() });
        }
        let half = lit::<S>(0.5);
        let mid: Vec<S> = lower.iter().zip(upper).map(|(a, b)| half * (*a + *b)).collect();
        let mut m = Self::unchecked(labels, mid)?;
        m.uncertainty = Some(lower.iter().zip(upper).map(|(a, b)| *b - *a).collect());
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn uncertainty(&self) -> Option<&[S]> {
        self.uncertainty.as_deref()
    }

    pub fn d(&self, i: usize, j: usize) -> S {
        self.dist[i * self.len() + j]
    }

    /// max over triples of d(i,k) - d(i,j) - d(j,k), clipped at 0.
    pub fn triangle_defect(&self) -> S {
        let n = self.len();
        let mut worst = S::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max(self.d(i, k) - self.d(i, j) - self.d(j, k));
                }
            }
        }
        worst
    }

    pub fn scaled(&self, c: S) -> Self {
        Self {
            labels: self.labels.clone(),
            dist: self.dist.iter().map(|x| *x * c).collect(),
            uncertainty: self.uncertainty.as_ref().map(|u| u.iter().map(|x| *x * c).collect()),
        }
    }

    /// Reorders points: new index k holds old point perm[k].
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.len();
        let mut dist = vec![S::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = self.d(perm[i], perm[j]);
            }
        }
        Self { labels: perm.iter().map(|&k| self.labels[k].clone()).collect(), dist, uncertainty: None }
    }

    /// Header row of labels, then the matrix, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.labels).unwrap();
        let n = self.len();
        for i in 0..n {
            w.write_record((0..n).map(|j| format!("{:.16e}", self.d(i, j).f64()))).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
        let labels: Vec<String> = r.headers().map_err(|e| Error::Parse(e.to_string()))?.iter().map(String::from).collect();
        let mut dist = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            for x in rec.iter() {
                dist.push(S::lit(x.parse::<f64>().map_err(|_| Error::Parse(x.to_string()))?));
            }
        }
        Self::new(labels, dist)
    }
}

/// (x|y)_z = (d(x,z) + d(z,y) - d(x,y)) / 2.
pub fn gromov_product<S: Real>(m: &FiniteMetric<S>, x: usize, y: usize, z: usize) -> S {
    lit::<S>(0.5) * (m.d(x, z) + m.d(z, y) - m.d(x, y))
}

/// Four-point delta of one quadruple: half the gap between the two largest pair sums.
pub fn quadruple_delta<S: Real>(m: &FiniteMetric<S>, q: [usize; 4]) -> S {
    let [w, x, y, z] = q;
    let mut s = [m.d(w, x) + m.d(y, z), m.d(w, y) + m.d(x, z), m.d(w, z) + m.d(x, y)];
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    lit::<S>(0.5) * (s[0] - s[1])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourPointDelta<S> {
    pub delta: S,
    pub exhaustive: bool,
    pub quadruples: usize,
    pub worst: [usize; 4],
}

pub const EXHAUSTIVE_LIMIT: usize = 40;
pub const SAMPLED_QUADRUPLES: usize = 100_000;

/// Largest four-point defect; exhaustive up to 40 points, otherwise 10^5 seeded quadruples.
pub fn four_point_delta<S: Real>(m: &FiniteMetric<S>, seed: u64) -> Result<FourPointDelta<S>> {
    let n = m.len();
    if n < 4 {
        return Err(Error::TooFewPoints { need: 4, got: n });
    }
    let mut best = FourPointDelta { delta: S::zero(), exhaustive: n <= EXHAUSTIVE_LIMIT, quadruples: 0, worst: [0, 1, 2, 3] };
    let visit = |q: [usize; 4], best: &mut FourPointDelta<S>| {
        best.quadruples += 1;
        let v = quadruple_delta(m, q);
        if v > best.delta {
            best.delta = v;
            best.worst = q;
        }
    };
    if n <= EXHAUSTIVE_LIMIT {
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        visit([a, b, c, d], &mut best);
                    }
                }
            }
        }
    } else {
        let mut rng = seeded(seed);
        for _ in 0..SAMPLED_QUADRUPLES {
            let mut q = [0usize; 4];
            let mut k = 0;
            while k < 4 {
                let c = rng.gen_range(0..n);
                if !q[..k].contains(&c) {
                    q[k] = c;
                    k += 1;
                }
            }
            visit(q, &mut best);
        }
    }
    Ok(best)
}

/// Largest distance from a vertex of one side to the vertices of the other two sides.
/// Sides run A->B, B->C, C->A (each may be reversed).
pub fn thin_triangle_measure<S: Real>(
    sides: [&[Point<S>]; 3],
    mut dist: impl FnMut(&Point<S>, &Point<S>) -> S,
) -> Result<S> {
    if sides.iter().any(|s| s.is_empty()) {
        return Err(Error::MismatchedEndpoints);
    }
    let ends = |s: &[Point<S>]| (s[0].clone(), s[s.len() - 1].clone());
    let tol = lit::<S>(1e-9);
    let same = |a: &Point<S>, b: &Point<S>| a.dist(b) <= tol * (S::one() + a.norm());
    let touches = |a: &[Point<S>], b: &[Point<S>]| {
        let (a0, a1) = ends(a);
        let (b0, b1) = ends(b);
        same(&a0, &b0) || same(&a0, &b1) || same(&a1, &b0) || same(&a1, &b1)
    };
    if !(touches(sides[0], sides[1]) && touches(sides[1], sides[2]) && touches(sides[2], sides[0])) {
        return Err(Error::MismatchedEndpoints);
    }
    let mut worst = S::zero();
    for i in 0..3 {
        for p in sides[i] {
            let mut near = S::infinity();
            for (j, s) in sides.iter().enumerate() {
                if j != i {
                    for q in s.iter() {
                        near = near.min(dist(p, q));
                    }
                }
            }
            worst = worst.max(near);
        }
    }
    Ok(worst)
}

/// Distance from a point to the vertices of a polyline under the given metric.
pub fn distance_to_polyline<S: Real>(p: &Point<S>, line: &[Point<S>], mut dist: impl FnMut(&Point<S>, &Point<S>) -> S) -> S {
    line.iter().fold(S::infinity(), |m, q| m.min(dist(p, q)))
}

#[derive(Clone, Debug)]
pub struct VisualMetricResult<S> {
    pub lambda: S,
    pub basepoint: usize,
    /// exp(-lambda (x|y)_{x0}) off the diagonal, 0 on it.
    pub rho: Vec<S>,
    /// Chain infimum of rho (all-pairs shortest paths).
    pub d_vis: Vec<S>,
    pub n: usize,
}

impl<S: Real> VisualMetricResult<S> {
    pub fn rho(&self, i: usize, j: usize) -> S {
        self.rho[i * self.n + j]
    }

    pub fn d_vis(&self, i: usize, j: usize) -> S {
        self.d_vis[i * self.n + j]
    }
}

/// ln 2 / (4 max(delta, 0.1)).
pub fn default_lambda<S: Real>(delta: S) -> S {
    lit::<S>(std::f64::consts::LN_2) / (lit::<S>(4.0) * delta.max(lit(0.1)))
}

pub fn visual_metric<S: Real>(m: &FiniteMetric<S>, basepoint: usize, lambda: S) -> Result<VisualMetricResult<S>> {
    let n = m.len();
    if basepoint >= n {
        return Err(Error::DimensionMismatch { expected: n, got: basepoint });
    }
    if !(lambda > S::zero()) {
        return Err(Error::InvalidMetric("lambda must be positive".into()));
    }
    let mut rho = vec![S::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rho[i * n + j] = (-lambda * gromov_product(m, i, j, basepoint)).exp();
            }
        }
    }
    let mut d = rho.clone();
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            for j in 0..n {
                let via = dik + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    Ok(VisualMetricResult { lambda, basepoint, rho, d_vis: d, n })
}
