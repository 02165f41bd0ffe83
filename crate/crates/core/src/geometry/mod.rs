//! Convex domains in C^d given by ray oracles, with affine maps and boundary distances.

mod affine;
mod domain;
pub mod hausdorff;
pub mod io;
mod piece;
mod point;
pub mod support;
mod tolerances;

pub use affine::AffineMap;
pub use domain::{DomainSpec, Distance, Exactness, Field, RayHit, Shape, Supporting};
pub use piece::{Piece, QuadricKind};
pub use point::Point;
pub use tolerances::Tolerances;

/// Directions of `dirs` along which the domain contains the whole ray from its witness.
pub fn asymptotic_cone_dirs<S: crate::scalar::Real>(d: &DomainSpec<S>, dirs: &[Point<S>]) -> Vec<Point<S>> {
    let w = d.witness();
    dirs.iter()
        .filter(|u| u.normalized().is_some_and(|u| d.ray(w, &u).is_infinite()))
        .cloned()
        .collect()
}
