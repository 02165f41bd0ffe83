use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::numerics::linalg::{adjoint_matvec, complex_inverse, frobenius, matmul, matvec};
use crate::scalar::Real;

/// Complex affine map z -> M z + t on C^d.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap<S = f64> {
    pub dim: usize,
    /// Row-major d×d.
    pub matrix: Vec<Complex<S>>,
    pub translation: Vec<Complex<S>>,
}

impl<S: Real> AffineMap<S> {
    pub fn new(dim: usize, matrix: Vec<Complex<S>>, translation: Vec<Complex<S>>) -> Result<Self> {
        if matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: matrix.len() });
        }
        if translation.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: translation.len() });
        }
        Ok(Self { dim, matrix, translation })
    }

    pub fn identity(dim: usize) -> Self {
        let mut matrix = vec![Complex::new(S::zero(), S::zero()); dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = Complex::new(S::one(), S::zero());
        }
        Self { dim, matrix, translation: vec![Complex::new(S::zero(), S::zero()); dim] }
    }

    pub fn scaling(dim: usize, s: S) -> Self {
        let mut m = Self::identity(dim);
        m.matrix.iter_mut().for_each(|x| *x = *x * s);
        m
    }

    pub fn translation_by(t: &Point<S>) -> Self {
        let mut m = Self::identity(t.complex_dim());
        m.translation = t.to_complex();
        m
    }

    /// Map with the given columns (images of e_j) and translation.
    pub fn from_columns(columns: &[Point<S>], translation: &Point<S>) -> Self {
        let d = columns.len();
        let mut matrix = vec![Complex::new(S::zero(), S::zero()); d * d];
        for (j, c) in columns.iter().enumerate() {
            for (i, z) in c.to_complex().into_iter().enumerate() {
                matrix[i * d + j] = z;
            }
        }
        Self { dim: d, matrix, translation: translation.to_complex() }
    }

    pub fn apply(&self, z: &Point<S>) -> Point<S> {
        let w = matvec(&self.matrix, self.dim, &z.to_complex());
        let out: Vec<Complex<S>> = w.into_iter().zip(&self.translation).map(|(a, b)| a + *b).collect();
        Point::from_complex(&out)
    }

    /// Linear part only (for direction vectors).
    pub fn apply_linear(&self, v: &Point<S>) -> Point<S> {
        Point::from_complex(&matvec(&self.matrix, self.dim, &v.to_complex()))
    }

    /// M^* v, the real transpose of the linear part; pulls back normals.
    pub fn adjoint_linear(&self, v: &Point<S>) -> Point<S> {
        Point::from_complex(&adjoint_matvec(&self.matrix, self.dim, &v.to_complex()))
    }

    /// ||M||_F ||M^-1||_F.
    pub fn condition_estimate(&self) -> S {
        match complex_inverse(&self.matrix, self.dim) {
            Ok(inv) => frobenius(&self.matrix) * frobenius(&inv),
            Err(_) => S::infinity(),
        }
    }

    pub fn inverse_with_limit(&self, cond_limit: S) -> Result<Self> {
        let inv = complex_inverse(&self.matrix, self.dim)?;
        let cond = frobenius(&self.matrix) * frobenius(&inv);
        if !(cond <= cond_limit) {
            return Err(Error::Singular(cond.f64()));
        }
        let t = matvec(&inv, self.dim, &self.translation);
        Ok(Self { dim: self.dim, matrix: inv, translation: t.into_iter().map(|x| -x).collect() })
    }

    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with_limit(S::lit(1e12))
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Self) -> Self {
        let matrix = matmul(&self.matrix, &other.matrix, self.dim);
        let t = matvec(&self.matrix, self.dim, &other.translation);
        let translation = t.into_iter().zip(&self.translation).map(|(a, b)| a + *b).collect();
        Self { dim: self.dim, matrix, translation }
    }

    pub fn cast<T: Real>(&self) -> AffineMap<T> {
        let c = |z: &Complex<S>| Complex::new(T::lit(z.re.f64()), T::lit(z.im.f64()));
        AffineMap {
            dim: self.dim,
            matrix: self.matrix.iter().map(c).collect(),
            translation: self.translation.iter().map(c).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_compose() {
        let m = AffineMap::new(
            2,
            vec![Complex::new(1.0, 1.0), Complex::new(0.2, 0.0), Complex::new(0.0, -1.0), Complex::new(3.0, 0.0)],
            vec![Complex::new(0.5, -0.5), Complex::new(1.0, 0.0)],
        )
        .unwrap();
        let inv = m.inverse().unwrap();
        let z = Point::from_f64(&[0.3, -0.2, 1.1, 0.7]);
        assert!(inv.apply(&m.apply(&z)).dist(&z) < 1e-14);
        assert!(m.compose(&inv).apply(&z).dist(&z) < 1e-14);
    }

    #[test]
    fn singular_rejected() {
        let m = AffineMap::<f64>::new(2, vec![Complex::new(1.0, 0.0); 4], vec![Complex::new(0.0, 0.0); 2]).unwrap();
        assert!(matches!(m.inverse(), Err(Error::Singular(_))));
    }
}
