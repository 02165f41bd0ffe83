//! Hilbert metric of a convex domain from chord endpoints.

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HilbertWarning {
    /// Both chord ends are at infinity; the distance is reported as 0.
    NotProperlyConvex,
}

#[derive(Clone, Debug)]
pub struct HilbertValue<S: Real> {
    pub value: S,
    /// Chord end beyond x (None at infinity).
    pub a: Option<Point<S>>,
    /// Chord end beyond y (None at infinity).
    pub b: Option<Point<S>>,
    pub warning: Option<HilbertWarning>,
}

struct Chord<S> {
    u: Point<S>,
    len: S,
    ta: S,
    tb: S,
}

fn chord<S: Real>(d: &DomainSpec<S>, x: &Point<S>, y: &Point<S>) -> Result<Option<Chord<S>>> {
    d.require_interior(x)?;
    d.require_interior(y)?;
    let diff = y - x;
    let len = diff.norm();
    if len == S::zero() {
        return Ok(None);
    }
    let u = diff.scale(S::one() / len);
    let tb = d.ray(x, &u);
    let ta = d.ray(x, &-&u);
    Ok(Some(Chord { u, len, ta, tb }))
}

/// H(x, y) = 1/2 log(|x-b||y-a| / (|y-b||x-a|)) with a, x, y, b in order on the chord.
pub fn hilbert_dist<S: Real>(d: &DomainSpec<S>, x: &Point<S>, y: &Point<S>) -> Result<HilbertValue<S>> {
    let Some(c) = chord(d, x, y)? else {
        return Ok(HilbertValue { value: S::zero(), a: None, b: None, warning: None });
    };
    let half = lit::<S>(0.5);
    let mut value = S::zero();
    // log(|x-b|/|y-b|) = -log(1 - L/tb); log(|y-a|/|x-a|) = log(1 + L/ta)
    if c.tb.is_finite() {
        value -= (-(c.len / c.tb)).ln_1p();
    }
    if c.ta.is_finite() {
        value += (c.len / c.ta).ln_1p();
    }
    let warning = if c.ta.is_infinite() && c.tb.is_infinite() { Some(HilbertWarning::NotProperlyConvex) } else { None };
    Ok(HilbertValue {
        value: half * value,
        a: c.ta.is_finite().then(|| x.along(&c.u, -c.ta)),
        b: c.tb.is_finite().then(|| x.along(&c.u, c.tb)),
        warning,
    })
}

/// Infinitesimal Hilbert norm (|v|/2)(1/|x-a| + 1/|x-b|) along the chord through x in direction v.
pub fn hilbert_norm<S: Real>(d: &DomainSpec<S>, x: &Point<S>, v: &Point<S>) -> Result<S> {
    d.require_interior(x)?;
    let n = v.norm();
    let u = v.normalized().ok_or(Error::ZeroDirection)?;
    let tb = d.ray(x, &u);
    let ta = d.ray(x, &-&u);
    let inv = |t: S| if t.is_finite() { S::one() / t } else { S::zero() };
    Ok(lit::<S>(0.5) * n * (inv(ta) + inv(tb)))
}

/// n points on the straight chord from x to y, equally spaced in Hilbert distance.
pub fn hilbert_geodesic<S: Real>(d: &DomainSpec<S>, x: &Point<S>, y: &Point<S>, n: usize) -> Result<Vec<Point<S>>> {
    if n < 2 {
        return Err(Error::TooFewPoints { need: 2, got: n });
    }
    let Some(c) = chord(d, x, y)? else {
        return Ok(vec![x.clone(); n]);
    };
    let total = hilbert_dist(d, x, y)?.value;
    let two = lit::<S>(2.0);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let s = if k == 0 {
            S::zero()
        } else if k == n - 1 {
            c.len
        } else if c.ta.is_infinite() && c.tb.is_infinite() {
            c.len * S::of_usize(k) / S::of_usize(n - 1)
        } else {
            let h = total * S::of_usize(k) / S::of_usize(n - 1);
            let e = (two * h).exp();
            if c.tb.is_infinite() {
                c.ta * (e - S::one())
            } else if c.ta.is_infinite() {
                c.tb * (S::one() - S::one() / e)
            } else {
                c.ta * c.tb * (e - S::one()) / (c.tb + e * c.ta)
            }
        };
        out.push(x.along(&c.u, s));
    }
    Ok(out)
}

/// Samples of a convex function F on the uniform grid x_i = x0 + i * step.
#[derive(Clone, Debug)]
pub struct GridSamples<S> {
    pub x0: S,
    pub step: S,
    pub values: Vec<S>,
    /// F' on the same grid; central differences are used when absent.
    pub derivatives: Option<Vec<S>>,
}

/// Probe window: base points with |x| <= x_max, offsets 0 < h <= h_max.
#[derive(Clone, Copy, Debug)]
pub struct ProbeWindow<S> {
    pub x_max: S,
    pub h_max: S,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasiSymmetry<S> {
    /// max D_x(h) / D_x(-h), at least 1; +inf when some D_x(-h) vanishes while D_x(h) does not.
    pub h_hat: S,
    pub divergent: bool,
    /// (x, h) attaining h_hat; h carries the sign of the numerator side.
    pub worst: Option<(S, S)>,
    pub pairs: usize,
    pub step: S,
}

/// Central differences in the interior, one-sided at the two ends.
pub fn central_differences<S: Real>(values: &[S], step: S) -> Vec<S> {
    let n = values.len();
    let two = lit::<S>(2.0);
    (0..n)
        .map(|i| {
            if n < 2 {
                S::zero()
            } else if i == 0 {
                (values[1] - values[0]) / step
            } else if i == n - 1 {
                (values[n - 1] - values[n - 2]) / step
            } else {
                (values[i + 1] - values[i - 1]) / (two * step)
            }
        })
        .collect()
}

/// Quasi-symmetry constant of the graph function from grid samples:
/// D_x(h) = F(x+h) - F(x) - F'(x) h, ratio D_x(h)/D_x(-h) maximised over grid probes.
pub fn quasi_symmetry_estimate<S: Real>(samples: &GridSamples<S>, window: &ProbeWindow<S>) -> Result<QuasiSymmetry<S>> {
    let n = samples.values.len();
    if n < 3 {
        return Err(Error::TooFewPoints { need: 3, got: n });
    }
    let deriv = match &samples.derivatives {
        Some(d) if d.len() == n => d.clone(),
        Some(d) => return Err(Error::DimensionMismatch { expected: n, got: d.len() }),
        None => central_differences(&samples.values, samples.step),
    };
    let floor = lit::<S>(1e-12);
    let neg = lit::<S>(-1e-10);
    let f = &samples.values;
    let mut h_hat = S::one();
    let mut worst = None;
    let mut divergent = false;
    let mut pairs = 0;
    for i in 0..n {
        let x = samples.x0 + samples.step * S::of_usize(i);
        if x.abs() > window.x_max * (S::one() + lit(1e-12)) {
            continue;
        }
        let mut k = 1;
        while i + k < n && k <= i {
            let h = samples.step * S::of_usize(k);
            if h > window.h_max * (S::one() + lit(1e-12)) {
                break;
            }
            let dp = f[i + k] - f[i] - deriv[i] * h;
            let dm = f[i - k] - f[i] + deriv[i] * h;
            if dp < neg || dm < neg {
                return Err(Error::NonconvexSamples(dp.min(dm).f64()));
            }
            k += 1;
            if dp < floor && dm < floor {
                continue;
            }
            pairs += 1;
            for (num, den, sh) in [(dp, dm, h), (dm, dp, -h)] {
                let ratio = if den < floor { S::infinity() } else { num / den };
                if ratio > h_hat || (ratio.is_infinite() && !divergent) {
                    divergent |= ratio.is_infinite();
                    h_hat = ratio;
                    worst = Some((x, sh));
                }
            }
        }
    }
    Ok(QuasiSymmetry { h_hat, divergent, worst, pairs, step: samples.step })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_closed_form() {
        let d = DomainSpec::<f64>::real_ball(Point::zeros(1), 1.0).unwrap();
        let v = hilbert_dist(&d, &Point::zeros(1), &Point::from_f64(&[0.5])).unwrap();
        assert!((v.value - 0.5 * 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn half_line_drops_infinite_end() {
        let d = DomainSpec::<f64>::real_halfspaces(1, vec![Point::from_f64(&[-1.0])], vec![0.0])
            .unwrap()
            .with_witness(Point::from_f64(&[1.0]))
            .unwrap();
        let v = hilbert_dist(&d, &Point::from_f64(&[1.0]), &Point::from_f64(&[2.0])).unwrap();
        assert!((v.value - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!(v.b.is_none() && v.warning.is_none());
    }
}
