//! Symmetric convex bodies, polarity, Steiner symmetrization, log-concave
//! measures and numerical checks of volume-product inequalities.
//!
//! The polytope layer is generic over [`Scalar`] (`f32` or `f64`); measures,
//! integration and verification work in `f64`. The aliases below fix the
//! common choices.

pub mod bodies;
pub mod error;
pub mod integrate;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod measures;
pub mod nelder_mead;
pub mod scalar;
pub mod symmetrize;
pub mod verify;

pub use error::{GeometryError, MeasureError};
pub use scalar::Scalar;

pub type HPolytope = bodies::HPolytope<f64>;
pub type VPolytope = bodies::VPolytope<f64>;
pub type AxisBox = bodies::AxisBox<f64>;
pub type HPolytopeF32 = bodies::HPolytope<f32>;
pub type VPolytopeF32 = bodies::VPolytope<f32>;
