use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug)]
pub struct NelderMeadOptions<S> {
    pub initial_step: S,
    pub max_iter: usize,
    pub f_tol: S,
    pub x_tol: S,
}

impl<S: Real> Default for NelderMeadOptions<S> {
    fn default() -> Self {
        Self {
            initial_step: lit(0.1),
            max_iter: 400,
            f_tol: lit(1e-14),
            x_tol: lit(1e-10),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum<S> {
    pub x: Vec<S>,
    pub value: S,
    pub iterations: usize,
}

/// Derivative-free simplex minimisation. Non-finite values are treated as +inf.
pub fn nelder_mead<S: Real>(
    mut f: impl FnMut(&[S]) -> S,
    x0: &[S],
    opts: &NelderMeadOptions<S>,
) -> Minimum<S> {
    let n = x0.len();
    let mut eval = |x: &[S]| {
        let v = f(x);
        if v.is_nan() {
            S::infinity()
        } else {
            v
        }
    };
    if n == 0 {
        let value = eval(x0);
        return Minimum { x: vec![], value, iterations: 0 };
    }
    let mut simplex: Vec<Vec<S>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        simplex.push(x);
    }
    let mut values: Vec<S> = simplex.iter().map(|x| eval(x)).collect();
    let half = lit::<S>(0.5);
    let two = lit::<S>(2.0);
    let mut it = 0;
    while it < opts.max_iter {
        it += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread_f = (values[n] - values[0]).abs();
        let mut spread_x = S::zero();
        for v in &simplex[1..] {
            for (a, b) in v.iter().zip(&simplex[0]) {
                spread_x = spread_x.max((*a - *b).abs());
            }
        }
        if values[0].is_finite()
            && spread_f <= opts.f_tol * (S::one() + values[0].abs())
            && spread_x <= opts.x_tol
        {
            break;
        }

        let mut centroid = vec![S::zero(); n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += *x;
            }
        }
        let inv = S::one() / S::of_usize(n);
        centroid.iter_mut().for_each(|c| *c *= inv);
        let along = |t: S, s: &[S]| -> Vec<S> {
            centroid.iter().zip(s).map(|(c, w)| *c + t * (*w - *c)).collect()
        };

        let reflected = along(-S::one(), &simplex[n]);
        let fr = eval(&reflected);
        if fr < values[0] {
            let expanded = along(-two, &simplex[n]);
            let fe = eval(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[n] {
            let c = along(-half, &simplex[n]);
            let fc = eval(&c);
            (c, fc)
        } else {
            let c = along(half, &simplex[n]);
            let fc = eval(&c);
            (c, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            let shrunk: Vec<S> = best
                .iter()
                .zip(&simplex[i])
                .map(|(b, x)| *b + half * (*x - *b))
                .collect();
            values[i] = eval(&shrunk);
            simplex[i] = shrunk;
        }
    }
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] < values[best] {
            best = i;
        }
    }
    Minimum { x: simplex[best].clone(), value: values[best], iterations: it }
}

/// Golden-section minimisation of a unimodal function on [a, b].
pub fn golden_section<S: Real>(mut f: impl FnMut(S) -> S, mut a: S, mut b: S, tol: S) -> (S, S) {
    let g = lit::<S>(0.618_033_988_749_894_8);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut guard = 0;
    while (b - a).abs() > tol && guard < 200 {
        guard += 1;
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Bisection for a sign change of `f` on [lo, hi]; returns the bracket midpoint.
pub fn bisect<S: Real>(mut f: impl FnMut(S) -> S, mut lo: S, mut hi: S, tol: S) -> S {
    let mut flo = f(lo);
    let half = lit::<S>(0.5);
    let mut guard = 0;
    while (hi - lo).abs() > tol && guard < 300 {
        guard += 1;
        let mid = half * (lo + hi);
        let fm = f(mid);
        if fm == S::zero() {
            return mid;
        }
        if (fm < S::zero()) == (flo < S::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    half * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock_minimum() {
        let opts = NelderMeadOptions { max_iter: 5000, ..Default::default() };
        let m = nelder_mead(
            |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &opts,
        );
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{:?}", m.x);
    }

    #[test]
    fn golden_and_bisect() {
        let (x, _) = golden_section(|x: f64| (x - 0.3).powi(2), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }
}
