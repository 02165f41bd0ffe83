use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::Real;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector<S: Real>(rng: &mut impl Rng, n: usize) -> Vec<S> {
    (0..n).map(|_| S::lit(rng.sample::<f64, _>(StandardNormal))).collect()
}

/// Uniformly distributed point on the unit sphere of R^n.
pub fn unit_vector<S: Real>(rng: &mut impl Rng, n: usize) -> Vec<S> {
    loop {
        let v: Vec<S> = gaussian_vector(rng, n);
        let norm = v.iter().fold(S::zero(), |a, x| a + *x * *x).sqrt();
        if norm > S::lit(1e-6) {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform point of the closed unit ball of R^n.
pub fn ball_point<S: Real>(rng: &mut impl Rng, n: usize) -> Vec<S> {
    let u: Vec<S> = unit_vector(rng, n);
    let r = S::lit(rng.gen::<f64>().powf(1.0 / n as f64));
    u.into_iter().map(|x| x * r).collect()
}

/// Fixed direction set used wherever a deterministic sphere sampling is needed.
pub fn direction_set<S: Real>(n: usize, count: usize, seed: u64) -> Vec<Vec<S>> {
    let mut rng = seeded(seed);
    let mut dirs = Vec::with_capacity(count + 2 * n);
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![S::zero(); n];
            e[i] = S::lit(s);
            dirs.push(e);
        }
    }
    while dirs.len() < count.max(2 * n) {
        dirs.push(unit_vector(&mut rng, n));
    }
    dirs
}
