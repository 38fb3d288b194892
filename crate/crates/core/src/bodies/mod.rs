//! Symmetric convex bodies: H- and V-polytopes, polarity, sections, and
//! oracle bodies (balls, geometric means) for integration.

mod generate;
mod hpoly;
mod oracle;
pub(crate) mod symmetry;
mod system;
mod vpoly;

pub use generate::random_symmetric_polytope;
pub use hpoly::HPolytope;
pub use oracle::{Body, BodyOracle, GaugeFn, Intersection, Section};
pub use symmetry::SignGroup;
pub use system::HalfspaceSystem;
pub use vpoly::VPolytope;

use crate::error::GeometryError;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub const MAX_DIM: usize = 6;

pub(crate) fn check_dim(dim: usize) -> Result<(), GeometryError> {
    if dim == 0 || dim > MAX_DIM {
        Err(GeometryError::UnsupportedDimension(dim))
    } else {
        Ok(())
    }
}

const MAX_CONDITION: f64 = 1e12;

pub(crate) fn checked_inverse<S: Scalar>(
    m: &Matrix<S>,
    dim: usize,
) -> Result<Matrix<S>, GeometryError> {
    if m.dim() != dim {
        return Err(GeometryError::DimensionMismatch {
            expected: dim,
            got: m.dim(),
        });
    }
    let cond = m.condition_estimate();
    if !(cond.as_f64() < MAX_CONDITION) {
        return Err(GeometryError::Singular(cond.as_f64()));
    }
    m.inverse().ok_or(GeometryError::Singular(f64::INFINITY))
}

/// Axis-aligned box `[lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox<S> {
    pub lo: Vec<S>,
    pub hi: Vec<S>,
}

impl<S: Scalar> AxisBox<S> {
    pub fn new(lo: Vec<S>, hi: Vec<S>) -> Self {
        assert_eq!(lo.len(), hi.len());
        Self { lo, hi }
    }

    pub fn symmetric(half_widths: &[S]) -> Self {
        Self::new(
            half_widths.iter().map(|&h| -h).collect(),
            half_widths.to_vec(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn extent(&self, axis: usize) -> S {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> S {
        (0..self.dim())
            .map(|i| self.extent(i))
            .fold(S::one(), |a, b| a * b)
    }

    pub fn contains(&self, x: &[S]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&v, (&l, &h))| v >= l && v <= h)
    }

    pub fn contains_box(&self, other: &Self) -> bool {
        (0..self.dim()).all(|i| other.lo[i] >= self.lo[i] && other.hi[i] <= self.hi[i])
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self::new(
            self.lo
                .iter()
                .zip(&other.lo)
                .map(|(&a, &b)| a.max(b))
                .collect(),
            self.hi
                .iter()
                .zip(&other.hi)
                .map(|(&a, &b)| a.min(b))
                .collect(),
        )
    }
}

/// Section of a body by a coordinate hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub enum Slice<S> {
    /// Empty or lower-dimensional section.
    Empty,
    /// Full-dimensional section in the chart of the remaining coordinates;
    /// offsets are general unless [`Slice::is_normalized`].
    Region(HalfspaceSystem<S>),
}

impl<S: Scalar> Slice<S> {
    pub fn is_empty(&self) -> bool {
        matches!(self, Slice::Empty)
    }

    pub fn system(&self) -> Option<&HalfspaceSystem<S>> {
        match self {
            Slice::Empty => None,
            Slice::Region(s) => Some(s),
        }
    }

    /// The chart origin is interior, so offsets can be scaled to 1.
    pub fn is_normalized(&self) -> bool {
        self.system().is_some_and(|s| s.is_normalized())
    }

    /// Offset-normalized body, when the chart origin is interior.
    pub fn to_hpolytope(&self) -> Option<Result<HPolytope<S>, GeometryError>> {
        let sys = self.system().filter(|s| s.is_normalized())?;
        let rows = sys.rows().map(|(a, _)| a.to_vec()).collect();
        Some(HPolytope::from_inequalities(sys.dim(), rows, sys.offsets()))
    }
}

/// `max(0, max_i a_i . x)`.
pub fn gauge_h<S: Scalar>(h: &HPolytope<S>, x: &[S]) -> Result<S, GeometryError> {
    h.gauge(x)
}

/// `min t` such that `x ∈ t conv(V)`.
pub fn gauge_v<S: Scalar>(v: &VPolytope<S>, x: &[S]) -> Result<S, GeometryError> {
    v.gauge(x)
}

pub fn polar_v_to_h<S: Scalar>(v: &VPolytope<S>) -> Result<HPolytope<S>, GeometryError> {
    v.polar()
}

pub fn polar_h_to_v<S: Scalar>(h: &HPolytope<S>) -> Result<VPolytope<S>, GeometryError> {
    h.polar()
}

pub fn intersect<S: Scalar>(
    a: &HPolytope<S>,
    b: &HPolytope<S>,
) -> Result<HPolytope<S>, GeometryError> {
    a.intersect(b)
}

pub fn slice_h<S: Scalar>(h: &HPolytope<S>, axis: usize, z: S) -> Result<Slice<S>, GeometryError> {
    h.slice(axis, z)
}

pub fn is_unconditional<S: Scalar>(h: &HPolytope<S>) -> bool {
    h.is_unconditional()
}
