use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type C<S> = Complex<S>;

/// Inverse of a row-major n×n complex matrix by Gauss-Jordan with partial pivoting.
pub fn complex_inverse<S: Real>(m: &[C<S>], n: usize) -> Result<Vec<C<S>>> {
    let mut a = m.to_vec();
    let mut inv = vec![C::new(S::zero(), S::zero()); n * n];
    for i in 0..n {
        inv[i * n + i] = C::new(S::one(), S::zero());
    }
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].norm() > a[piv * n + col].norm() {
                piv = r;
            }
        }
        if a[piv * n + col].norm() == S::zero() {
            return Err(Error::Singular(f64::INFINITY));
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
                inv.swap(piv * n + k, col * n + k);
            }
        }
        let p = a[col * n + col];
        for k in 0..n {
            a[col * n + k] = a[col * n + k] / p;
            inv[col * n + k] = inv[col * n + k] / p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col];
            if f.norm() == S::zero() {
                continue;
            }
            for k in 0..n {
                let ak = a[col * n + k];
                let ik = inv[col * n + k];
                a[r * n + k] = a[r * n + k] - f * ak;
                inv[r * n + k] = inv[r * n + k] - f * ik;
            }
        }
    }
    Ok(inv)
}

pub fn frobenius<S: Real>(m: &[C<S>]) -> S {
    m.iter().fold(S::zero(), |a, z| a + z.norm_sqr()).sqrt()
}

pub fn matvec<S: Real>(m: &[C<S>], n: usize, v: &[C<S>]) -> Vec<C<S>> {
    (0..n)
        .map(|i| (0..n).fold(C::new(S::zero(), S::zero()), |acc, j| acc + m[i * n + j] * v[j]))
        .collect()
}

/// Conjugate transpose applied to a vector.
pub fn adjoint_matvec<S: Real>(m: &[C<S>], n: usize, v: &[C<S>]) -> Vec<C<S>> {
    (0..n)
        .map(|j| (0..n).fold(C::new(S::zero(), S::zero()), |acc, i| acc + m[i * n + j].conj() * v[i]))
        .collect()
}

pub fn matmul<S: Real>(a: &[C<S>], b: &[C<S>], n: usize) -> Vec<C<S>> {
    let mut out = vec![C::new(S::zero(), S::zero()); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                out[i * n + j] = out[i * n + j] + aik * b[k * n + j];
            }
        }
    }
    out
}

/// Hermitian inner product sum z_j conj(w_j).
pub fn cdot<S: Real>(z: &[C<S>], w: &[C<S>]) -> C<S> {
    z.iter().zip(w).fold(C::new(S::zero(), S::zero()), |a, (x, y)| a + *x * y.conj())
}

pub fn cnorm<S: Real>(z: &[C<S>]) -> S {
    z.iter().fold(S::zero(), |a, x| a + x.norm_sqr()).sqrt()
}

/// Orthonormalise `vectors` against `basis` and each other (complex Gram-Schmidt, two passes).
pub fn complex_gram_schmidt<S: Real>(basis: &[Vec<C<S>>], vectors: &[Vec<C<S>>], tol: S) -> Vec<Vec<C<S>>> {
    let mut out: Vec<Vec<C<S>>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in basis.iter().chain(out.iter()) {
                let c = cdot(&w, b);
                for (x, y) in w.iter_mut().zip(b) {
                    *x = *x - c * *y;
                }
            }
        }
        let n = cnorm(&w);
        if n > tol {
            out.push(w.into_iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Orthonormal basis of the complex orthogonal complement of `span` inside C^n.
pub fn complex_complement<S: Real>(span: &[Vec<C<S>>], n: usize) -> Vec<Vec<C<S>>> {
    let spanned = complex_gram_schmidt(&[], span, S::lit(1e-12));
    let units: Vec<Vec<C<S>>> = (0..n)
        .map(|i| {
            let mut e = vec![C::new(S::zero(), S::zero()); n];
            e[i] = C::new(S::one(), S::zero());
            e
        })
        .collect();
    let mut out = complex_gram_schmidt(&spanned, &units, S::lit(1e-6));
    out.truncate(n - spanned.len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = vec![
            C::new(2.0, 1.0),
            C::new(0.5, 0.0),
            C::new(-1.0, 0.3),
            C::new(1.0, -2.0),
        ];
        let inv = complex_inverse(&m, 2).unwrap();
        let id = matmul(&m, &inv, 2);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[i * 2 + j] - C::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn complement_is_orthogonal() {
        let v = vec![vec![C::new(1.0, 1.0), C::new(0.0, 2.0), C::new(-1.0, 0.0)]];
        let comp = complex_complement(&v, 3);
        assert_eq!(comp.len(), 2);
        for b in &comp {
            assert!(cdot(b, &v[0]).norm() < 1e-12);
            assert!((cnorm::<f64>(b) - 1.0).abs() < 1e-12);
        }
        assert!(cdot(&comp[0], &comp[1]).norm() < 1e-12);
    }
}
