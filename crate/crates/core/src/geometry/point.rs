use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Point or vector of R^n. Complex points of C^d use n = 2d with coordinates
/// interleaved as (x_1, y_1, x_2, y_2, ...).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point<S = f64> {
    pub coords: Vec<S>,
}

impl<S: Real> Point<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Self { coords }
    }

    pub fn zeros(n: usize) -> Self {
        Self { coords: vec![S::zero(); n] }
    }

    pub fn from_f64(xs: &[f64]) -> Self {
        Self { coords: xs.iter().map(|&x| S::lit(x)).collect() }
    }

    /// Real basis vector e_k of R^n.
    pub fn unit(n: usize, k: usize) -> Self {
        let mut p = Self::zeros(n);
        p.coords[k] = S::one();
        p
    }

    /// Complex basis vector e_j of C^d, as a point of R^{2d}.
    pub fn complex_unit(d: usize, j: usize) -> Self {
        Self::unit(2 * d, 2 * j)
    }

    pub fn from_complex(z: &[Complex<S>]) -> Self {
        let mut coords = Vec::with_capacity(2 * z.len());
        for c in z {
            coords.push(c.re);
            coords.push(c.im);
        }
        Self { coords }
    }

    pub fn to_complex(&self) -> Vec<Complex<S>> {
        self.coords.chunks(2).map(|c| Complex::new(c[0], c[1])).collect()
    }

    pub fn complex(&self, j: usize) -> Complex<S> {
        Complex::new(self.coords[2 * j], self.coords[2 * j + 1])
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn complex_dim(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn dot(&self, other: &Self) -> S {
        self.coords.iter().zip(&other.coords).fold(S::zero(), |a, (x, y)| a + *x * *y)
    }

    /// Hermitian product sum z_j conj(w_j); its real part is the real dot product.
    pub fn cdot(&self, other: &Self) -> Complex<S> {
        let mut acc = Complex::new(S::zero(), S::zero());
        for (a, b) in self.coords.chunks(2).zip(other.coords.chunks(2)) {
            acc = acc + Complex::new(a[0], a[1]) * Complex::new(b[0], -b[1]);
        }
        acc
    }

    pub fn norm(&self) -> S {
        self.dot(self).sqrt()
    }

    pub fn dist(&self, other: &Self) -> S {
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(S::zero(), |a, (x, y)| a + (*x - *y) * (*x - *y))
            .sqrt()
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > S::zero() && n.is_finite() {
            Some(self.scale(S::one() / n))
        } else {
            None
        }
    }

    pub fn scale(&self, t: S) -> Self {
        Self { coords: self.coords.iter().map(|x| *x * t).collect() }
    }

    /// Multiplication by i, (x, y) -> (-y, x) in every complex slot.
    pub fn mul_i(&self) -> Self {
        let mut coords = Vec::with_capacity(self.coords.len());
        for c in self.coords.chunks(2) {
            coords.push(-c[1]);
            coords.push(c[0]);
        }
        Self { coords }
    }

    /// Multiplication by a complex scalar.
    pub fn cscale(&self, lambda: Complex<S>) -> Self {
        let z: Vec<Complex<S>> = self.to_complex().into_iter().map(|c| c * lambda).collect();
        Self::from_complex(&z)
    }

    /// p + t * v.
    pub fn along(&self, v: &Self, t: S) -> Self {
        Self { coords: self.coords.iter().zip(&v.coords).map(|(a, b)| *a + t * *b).collect() }
    }

    pub fn lerp(&self, other: &Self, t: S) -> Self {
        Self {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| *a + t * (*b - *a)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|x| x.is_finite())
    }

    pub fn cast<T: Real>(&self) -> Point<T> {
        Point { coords: self.coords.iter().map(|x| T::lit(x.f64())).collect() }
    }
}

impl<S> Index<usize> for Point<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.coords[i]
    }
}

impl<S> IndexMut<usize> for Point<S> {
    fn index_mut(&mut self, i: usize) -> &mut S {
        &mut self.coords[i]
    }
}

impl<S: Real> Add for &Point<S> {
    type Output = Point<S>;
    fn add(self, o: &Point<S>) -> Point<S> {
        Point { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| *a + *b).collect() }
    }
}

impl<S: Real> Sub for &Point<S> {
    type Output = Point<S>;
    fn sub(self, o: &Point<S>) -> Point<S> {
        Point { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| *a - *b).collect() }
    }
}

impl<S: Real> Neg for &Point<S> {
    type Output = Point<S>;
    fn neg(self) -> Point<S> {
        Point { coords: self.coords.iter().map(|a| -*a).collect() }
    }
}

impl<S: Real> Mul<S> for &Point<S> {
    type Output = Point<S>;
    fn mul(self, t: S) -> Point<S> {
        self.scale(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_structure() {
        let p = Point::<f64>::from_f64(&[1.0, 2.0, 3.0, -1.0]);
        assert_eq!(p.mul_i().coords, vec![-2.0, 1.0, 1.0, 3.0]);
        assert_eq!(p.mul_i().mul_i(), -&p);
        let q = Point::<f64>::from_f64(&[0.5, 0.0, 0.0, 1.0]);
        assert!((p.cdot(&q).re - p.dot(&q)).abs() < 1e-15);
        assert_eq!(Point::from_complex(&p.to_complex()), p);
    }
}
