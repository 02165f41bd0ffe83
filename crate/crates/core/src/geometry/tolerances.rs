use crate::scalar::{lit, Real};

/// Numerical tolerances of the geometry layer.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances<S> {
    /// Points within this distance of the boundary count as boundary points.
    pub boundary: S,
    /// Working radius for windowed computations on unbounded domains.
    pub r_work: S,
    /// Affine maps with a larger condition estimate are rejected.
    pub singular_cond: S,
    /// Relative bisection tolerance for implicit ray hits.
    pub ray_rel: S,
    /// Normals of pieces whose activity differs by less than this are averaged.
    pub tie: S,
    /// Sampled directions per real dimension for numeric boundary distances.
    pub directions_per_dim: usize,
    /// Angular grid for distances inside complex lines.
    pub line_angles: usize,
}

impl<S: Real> Default for Tolerances<S> {
    fn default() -> Self {
        Self {
            boundary: lit(1e-8),
            r_work: lit(10.0),
            singular_cond: lit(1e12),
            ray_rel: lit(1e-13),
            tie: lit(1e-10),
            directions_per_dim: 32,
            line_angles: 64,
        }
    }
}
