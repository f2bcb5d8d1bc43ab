//! Funk weak metric and the tautological weak Finsler structure on open
//! convex domains of ℝⁿ.
//!
//! The crate is organised bottom-up: [`body`] holds the convex-set
//! representations and ray queries, [`gauge`] the Minkowski functions,
//! [`finsler`] the tautological structure and path lengths, [`funk`] the
//! closed-form distance together with its geodesics and spheres. [`verify`]
//! runs property suites over a body and [`cli`] backs the `funk` binary.

pub mod body;
pub mod cli;
pub mod directions;
pub mod error;
pub mod finsler;
pub mod funk;
pub mod gauge;
pub mod quadrature;
pub mod sampling;
pub mod verify;

pub use body::{ConvexBody, RadialResult};
pub use error::{Error, Result};

/// A point of ℝⁿ.
pub type Point = nalgebra::DVector<f64>;
/// A vector of ℝⁿ.
pub type Vector = nalgebra::DVector<f64>;

/// Builds a point from coordinates.
pub fn point(coords: &[f64]) -> Point {
    Point::from_column_slice(coords)
}
