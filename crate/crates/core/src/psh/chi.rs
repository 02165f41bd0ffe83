use crate::numerics::quad::adaptive_simpson;

const PANELS: usize = 3000;
const QUAD_TOL: f64 = 1e-10;

/// Value and first two derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiValue {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Convex cutoff with chi'' = c exp(-1/(x + 2 alpha)) right of -2 alpha, zero left of it, and
/// chi(alpha) = 1. chi' and chi are tabulated once on [-2 alpha, alpha]; beyond alpha they are
/// continued by quadrature.
#[derive(Clone, Debug)]
pub struct Chi {
    alpha: f64,
    c: f64,
    step: f64,
    /// chi' at the nodes, for c = 1.
    d1: Vec<f64>,
    /// chi at the nodes, for c = 1.
    d0: Vec<f64>,
}

fn bump(x: f64, alpha: f64) -> f64 {
    let s = x + 2.0 * alpha;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

impl Chi {
    pub fn new(alpha: f64) -> Self {
        assert!(alpha > 0.0 && alpha.is_finite(), "alpha must be positive");
        let a = -2.0 * alpha;
        let step = 3.0 * alpha / PANELS as f64;
        let mut d1 = vec![0.0; PANELS + 1];
        let mut d0 = vec![0.0; PANELS + 1];
        for i in 0..PANELS {
            let (x0, x1) = (a + step * i as f64, a + step * (i + 1) as f64);
            d1[i + 1] = d1[i] + adaptive_simpson(|t| bump(t, alpha), x0, x1, QUAD_TOL / PANELS as f64, 30);
            // exact integral of the cubic Hermite interpolant of chi'
            d0[i + 1] = d0[i] + 0.5 * step * (d1[i] + d1[i + 1]) + step * step * (bump(x0, alpha) - bump(x1, alpha)) / 12.0;
        }
        let c = 1.0 / d0[PANELS];
        Self { alpha, c, step, d1, d0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Normalising constant c of chi''.
    pub fn scale(&self) -> f64 {
        self.c
    }

    /// min of chi'' over [-alpha, alpha]; chi'' is increasing, so this is chi''(-alpha).
    pub fn kappa(&self) -> f64 {
        self.c * bump(-self.alpha, self.alpha)
    }

    pub fn eval(&self, x: f64) -> ChiValue {
        let alpha = self.alpha;
        let a = -2.0 * alpha;
        if x <= a {
            return ChiValue { value: 0.0, d1: 0.0, d2: 0.0 };
        }
        let d2 = self.c * bump(x, alpha);
        if x > alpha {
            let (v1, v0) = (self.d1[PANELS], self.d0[PANELS]);
            let int1 = adaptive_simpson(|t| bump(t, alpha), alpha, x, QUAD_TOL, 40);
            let int0 = adaptive_simpson(|t| (x - t) * bump(t, alpha), alpha, x, QUAD_TOL, 40);
            return ChiValue { value: self.c * (v0 + v1 * (x - alpha) + int0), d1: self.c * (v1 + int1), d2 };
        }
        let u = (x - a) / self.step;
        let i = (u.floor() as usize).min(PANELS - 1);
        let t = u - i as f64;
        let h = self.step;
        let (x0, x1) = (a + h * i as f64, a + h * (i + 1) as f64);
        let herm = |p0: f64, p1: f64, m0: f64, m1: f64| -> f64 {
            let t2 = t * t;
            let t3 = t2 * t;
            (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * h * m0 + (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * h * m1
        };
        let d1 = herm(self.d1[i], self.d1[i + 1], bump(x0, alpha), bump(x1, alpha));
        let value = herm(self.d0[i], self.d0[i + 1], self.d1[i], self.d1[i + 1]);
        // interpolation can dip a rounding error below zero next to -2 alpha
        ChiValue { value: (self.c * value).max(0.0), d1: (self.c * d1).max(0.0), d2 }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x).value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_matches_difference_quotient() {
        let chi = Chi::new(2.0);
        for x in [-3.5, -1.0, 0.3, 1.9, 2.5] {
            let h = 1e-5;
            let fd = (chi.value(x + h) - chi.value(x - h)) / (2.0 * h);
            assert!((fd - chi.eval(x).d1).abs() < 1e-7, "{x}: {fd} vs {}", chi.eval(x).d1);
        }
    }

    #[test]
    fn continuation_past_the_table_is_continuous() {
        let chi = Chi::new(1.5);
        let l = chi.eval(1.5 - 1e-12);
        let r = chi.eval(1.5 + 1e-12);
        assert!((l.value - r.value).abs() < 1e-9 && (l.d1 - r.d1).abs() < 1e-9);
    }
}
