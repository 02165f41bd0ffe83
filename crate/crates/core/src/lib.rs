//! Invariant metrics on convex domains: Hilbert and Kobayashi distances, Gromov hyperbolicity,
//! affine rescaling near boundary points and plurisubharmonic peak certificates.

pub mod corpus;
pub mod error;
pub mod geometry;
pub mod hilbert;
pub mod hyperbolicity;
pub mod kobayashi;
pub mod numerics;
pub mod psh;
pub mod rescaling;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Point = geometry::Point<f64>;
pub type Point32 = geometry::Point<f32>;
pub type Domain = geometry::DomainSpec<f64>;
pub type Domain32 = geometry::DomainSpec<f32>;
pub type AffineMap = geometry::AffineMap<f64>;
