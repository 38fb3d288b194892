use super::symmetry::{canonical_points, SignGroup};
use super::{check_dim, AxisBox, HPolytope};
use crate::error::GeometryError;
use crate::linalg::Matrix;
use crate::lp::{cone_gauge, ConeGauge};
use crate::scalar::Scalar;

/// Convex hull of a vertex list containing the origin in its interior.
///
/// Vertices are extreme points only, sorted lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope<S: Scalar> {
    dim: usize,
    vertices: Vec<Vec<S>>,
    group: SignGroup,
}

impl<S: Scalar> VPolytope<S> {
    pub fn new(dim: usize, vertices: Vec<Vec<S>>) -> Result<Self, GeometryError> {
        check_dim(dim)?;
        let (vertices, group) = canonical_points(dim, vertices, None).map_err(|e| match e {
            GeometryError::Unbounded => {
                GeometryError::Degenerate("vertex hull is not full-dimensional around the origin")
            }
            other => other,
        })?;
        Ok(Self {
            dim,
            vertices,
            group,
        })
    }

    /// Regular `k`-gon (k even) with circumradius `r`, one vertex on the x-axis.
    pub fn regular_polygon(k: usize, r: S) -> Result<Self, GeometryError> {
        if k < 4 || k % 2 == 1 {
            return Err(GeometryError::Degenerate(
                "regular polygon needs an even vertex count >= 4",
            ));
        }
        let mut verts = Vec::with_capacity(k);
        for j in 0..k / 2 {
            let theta = S::TAU() * S::of(j as f64) / S::of(k as f64);
            let v = vec![r * theta.cos(), r * theta.sin()];
            verts.push(v.iter().map(|&x| -x).collect());
            verts.push(v);
        }
        Self::new(2, verts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<S>] {
        &self.vertices
    }

    pub fn is_symmetric(&self) -> bool {
        self.group.has_negation()
    }

    pub fn symmetry_group(&self) -> &SignGroup {
        &self.group
    }

    /// Gauge by linear programming: `min sum lambda` with `sum lambda_i v_i = x`.
    pub fn gauge(&self, x: &[S]) -> Result<S, GeometryError> {
        if x.len() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let refs: Vec<&[S]> = self.vertices.iter().map(|v| v.as_slice()).collect();
        match cone_gauge(&refs, x) {
            ConeGauge::Finite(g) => Ok(g),
            ConeGauge::Outside => Err(GeometryError::Lp(
                "gauge program infeasible for a full-dimensional body",
            )),
        }
    }

    /// Polar body `{y : v_i . y <= 1}`.
    pub fn polar(&self) -> Result<HPolytope<S>, GeometryError> {
        HPolytope::with_hint(self.dim, self.vertices.clone(), Some(&self.group))
    }

    /// Facet description of the same body: the facet normals are the
    /// vertices of the polar.
    pub fn to_hpolytope(&self) -> Result<HPolytope<S>, GeometryError> {
        let polar = self.polar()?;
        HPolytope::with_hint(self.dim, polar.vertices().to_vec(), Some(&self.group))
    }

    pub fn volume(&self) -> Result<S, GeometryError> {
        Ok(self.to_hpolytope()?.volume())
    }

    pub fn enclosing_box(&self) -> AxisBox<S> {
        let mut lo = vec![S::infinity(); self.dim];
        let mut hi = vec![S::neg_infinity(); self.dim];
        for v in &self.vertices {
            for i in 0..self.dim {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        AxisBox::new(lo, hi)
    }

    /// Vertices map by `M`.
    pub fn linear_image(&self, m: &Matrix<S>) -> Result<Self, GeometryError> {
        super::checked_inverse(m, self.dim)?;
        let verts = self.vertices.iter().map(|v| m.mul_vec(v)).collect();
        Self::new(self.dim, verts)
    }

    pub fn cast<T: Scalar>(&self) -> Result<VPolytope<T>, GeometryError> {
        let verts = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|&x| T::of(x.as_f64())).collect())
            .collect();
        VPolytope::new(self.dim, verts)
    }
}
