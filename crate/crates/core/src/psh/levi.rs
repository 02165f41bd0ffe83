use nalgebra::DMatrix;
use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Richardson-extrapolated complex-line Laplacian with its error budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LeviEstimate {
    pub value: f64,
    /// |L(h/2) - L(h)| / 3.
    pub residual: f64,
    /// 10 residual plus a rounding allowance.
    pub budget: f64,
    pub step: f64,
}

fn ring(f: &dyn Fn(&Point) -> Result<f64>, z: &Point, v: &Point, h: f64, fz: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut w = v.scale(h);
    for _ in 0..4 {
        let val = f(&(z + &w)).map_err(|_| Error::StepTooLarge)?;
        if !val.is_finite() {
            return Err(Error::StepTooLarge);
        }
        sum += val;
        w = w.mul_i();
    }
    Ok((0.25 * sum - fz) / (h * h))
}

/// d^2/dlambda dlambda-bar of f(z + lambda v) at 0, from the four-point ring average at radii h and
/// h/2. Any probe that fails to evaluate is reported as StepTooLarge.
pub fn levi_form_fd(f: &dyn Fn(&Point) -> Result<f64>, z: &Point, v: &Point, h: f64) -> Result<LeviEstimate> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("finite-difference step {h}")));
    }
    let fz = f(z).map_err(|_| Error::StepTooLarge)?;
    let coarse = ring(f, z, v, h, fz)?;
    let fine = ring(f, z, v, 0.5 * h, fz)?;
    let value = (4.0 * fine - coarse) / 3.0;
    let residual = (fine - coarse).abs() / 3.0;
    let rounding = 64.0 * f64::EPSILON * fz.abs().max(1.0) / (0.25 * h * h);
    Ok(LeviEstimate { value, residual, budget: 10.0 * residual + rounding, step: h })
}

/// Hermitian Levi matrix by polarisation of the directional estimates.
#[derive(Clone, Debug)]
pub struct LeviMatrix {
    pub dim: usize,
    /// Row-major, entry (j, k) = d^2 f / dz_j dz-bar_k.
    pub entries: Vec<Complex<f64>>,
    /// Sum of the budgets of the directional estimates used.
    pub budget: f64,
}

impl LeviMatrix {
    /// Smallest eigenvalue with a unit minimising direction X of sum H_jk X_j conj(X_k).
    pub fn min_eigen(&self) -> (f64, Point) {
        let n = self.dim;
        let m = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
            let (j, k) = (r % n, c % n);
            let e = self.entries[j * n + k];
            match (r < n, c < n) {
                (true, true) | (false, false) => e.re,
                (true, false) => -e.im,
                (false, true) => e.im,
            }
        });
        let eig = m.symmetric_eigen();
        let (i, lam) = eig.eigenvalues.iter().enumerate().fold((0, f64::INFINITY), |b, (i, v)| if *v < b.1 { (i, *v) } else { b });
        let col = eig.eigenvectors.column(i);
        let z: Vec<Complex<f64>> = (0..n).map(|j| Complex::new(col[j], -col[n + j])).collect();
        let p = Point::from_complex(&z);
        (lam, p.normalized().unwrap_or(p))
    }

    pub fn quadratic_form(&self, x: &Point) -> f64 {
        let c = x.to_complex();
        let n = self.dim;
        let mut s = Complex::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                s += self.entries[j * n + k] * c[j] * c[k].conj();
            }
        }
        s.re
    }
}

pub fn levi_matrix_fd(f: &dyn Fn(&Point) -> Result<f64>, z: &Point, h: f64) -> Result<LeviMatrix> {
    let n = z.complex_dim();
    let mut entries = vec![Complex::new(0.0, 0.0); n * n];
    let mut budget = 0.0;
    let unit = |j| Point::complex_unit(n, j);
    let mut diag = vec![0.0; n];
    for j in 0..n {
        let e = levi_form_fd(f, z, &unit(j), h)?;
        diag[j] = e.value;
        budget += e.budget;
        entries[j * n + j] = Complex::new(e.value, 0.0);
    }
    for j in 0..n {
        for k in j + 1..n {
            let s = levi_form_fd(f, z, &(&unit(j) + &unit(k)), h)?;
            let t = levi_form_fd(f, z, &(&unit(j) + &unit(k).mul_i()), h)?;
            budget += s.budget + t.budget;
            let e = Complex::new(0.5 * (s.value - diag[j] - diag[k]), 0.5 * (t.value - diag[j] - diag[k]));
            entries[j * n + k] = e;
            entries[k * n + j] = e.conj();
        }
    }
    Ok(LeviMatrix { dim: n, entries, budget })
}

/// One sampled Levi inequality: value >= floor - budget.
#[derive(Clone, Debug, Serialize)]
pub struct LeviRecord {
    pub z: Vec<f64>,
    pub direction: Vec<f64>,
    pub value: f64,
    pub floor: f64,
    pub step: f64,
    pub budget: f64,
    pub pass: bool,
}

impl LeviRecord {
    pub fn new(z: &Point, direction: &Point, value: f64, floor: f64, step: f64, budget: f64) -> Self {
        Self {
            z: z.coords.clone(),
            direction: direction.coords.clone(),
            value,
            floor,
            step,
            budget,
            pass: value >= floor - budget,
        }
    }
}
