//! Explicit SBV solutions of the planar eikonal system `|∂v/∂x₁| = |∂v/∂x₂| = 1`.
//!
//! The crate builds a particular solution `v` on a compatible planar domain by
//! covering it with squares whose sides have slope ±1 and placing an l¹
//! distance pyramid on each square. The squares come from a recursive
//! covering of triangular domains (`q`, `u`, `r` splits) or from closed-form
//! dyadic and rectangle tilings. From `v` we extract the exact jump set of
//! both partial derivatives and evaluate the distance-weighted jump functional
//!
//! ```text
//! F(v) = Σᵢ ∫_Ω H(d₁(x, ∂Ω)) d|D v_{xᵢ}|
//! ```
//!
//! for a family of weights `H`, together with a set of quantitative checks
//! (layer counts, intersection lengths, side-length bounds, slicing
//! inequality, grid eikonal residuals).
//!
//! Geometry and weights are generic over the scalar type (see [`Scalar`]);
//! the covering, solution and functional layers work in `f64`.
//!
//! ```
//! use sbv_eikonal::{domain, solution, functional, weights::Weight};
//!
//! let square = domain::build_unit_square(1.0).unwrap();
//! let v = solution::build_solution(&square, &solution::BuildOptions::levels(4)).unwrap();
//! let report = functional::evaluate_functional(&v, &Weight::power(1.0)).unwrap();
//! assert!(report.total > 0.0);
//! ```

pub mod analysis;
pub mod covering;
pub mod domain;
mod error;
pub mod functional;
pub mod geometry;
pub mod index;
pub mod quadrature;
mod scalar;
pub mod series;
pub mod solution;
pub mod weights;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision point.
pub type Point64 = geometry::Point<f64>;
/// Single-precision point.
pub type Point32 = geometry::Point<f32>;
/// Double-precision segment.
pub type Segment64 = geometry::Segment<f64>;
/// Single-precision segment.
pub type Segment32 = geometry::Segment<f32>;
/// Double-precision diamond square.
pub type DiamondSquare64 = geometry::DiamondSquare<f64>;
/// Double-precision rigid motion.
pub type RigidMotion64 = geometry::RigidMotion<f64>;
/// Double-precision weight.
pub type Weight64 = weights::Weight<f64>;
/// Single-precision weight.
pub type Weight32 = weights::Weight<f32>;
