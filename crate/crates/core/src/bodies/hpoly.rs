use std::collections::HashSet;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::OnceLock;

use super::symmetry::{canonical_points, dedupe_orbits, key, SignGroup};
use super::system::HalfspaceSystem;
use super::{check_dim, AxisBox, Slice, VPolytope};
use crate::error::GeometryError;
use crate::linalg::Matrix;
use crate::lp::cone_gauge;
use crate::scalar::{dot, Scalar};

/// Convex body `{x : a_i . x <= 1}` with the origin in its interior.
///
/// Normals are canonical: irredundant, free of near-duplicates and sorted
/// lexicographically. The exact sign-flip symmetry group of the normal set is
/// kept alongside; `is_symmetric` is the `x -> -x` member of that group.
#[derive(Debug, Clone)]
pub struct HPolytope<S: Scalar> {
    dim: usize,
    normals: Vec<Vec<S>>,
    group: SignGroup,
    vertices: OnceLock<Vec<Vec<S>>>,
}

impl<S: Scalar> PartialEq for HPolytope<S> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.normals == other.normals
    }
}

impl<S: Scalar> HPolytope<S> {
    /// Canonicalizes `normals` and checks boundedness.
    pub fn new(dim: usize, normals: Vec<Vec<S>>) -> Result<Self, GeometryError> {
        Self::with_hint(dim, normals, None)
    }

    pub(crate) fn with_hint(
        dim: usize,
        normals: Vec<Vec<S>>,
        hint: Option<&SignGroup>,
    ) -> Result<Self, GeometryError> {
        check_dim(dim)?;
        let (normals, group) = canonical_points(dim, normals, hint)?;
        Ok(Self {
            dim,
            normals,
            group,
            vertices: OnceLock::new(),
        })
    }

    /// From rows `a_i . x <= b_i` with every `b_i > 0`.
    pub fn from_inequalities(
        dim: usize,
        rows: Vec<Vec<S>>,
        offsets: &[S],
    ) -> Result<Self, GeometryError> {
        if rows.len() != offsets.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: rows.len(),
                got: offsets.len(),
            });
        }
        if offsets.iter().any(|&b| !(b > S::zero())) {
            return Err(GeometryError::NotNormalized);
        }
        let normals = rows
            .into_iter()
            .zip(offsets)
            .map(|(r, &b)| r.into_iter().map(|x| x / b).collect())
            .collect();
        Self::new(dim, normals)
    }

    /// `[-h, h]^n`.
    pub fn cube(dim: usize, half_width: S) -> Result<Self, GeometryError> {
        let mut normals = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            for s in [S::one(), -S::one()] {
                let mut a = vec![S::zero(); dim];
                a[i] = s / half_width;
                normals.push(a);
            }
        }
        Self::new(dim, normals)
    }

    /// Cross-polytope `{ |x|_1 <= r }`.
    pub fn cross_polytope(dim: usize, radius: S) -> Result<Self, GeometryError> {
        check_dim(dim)?;
        let normals = (0..1u32 << dim)
            .map(|m| {
                (0..dim)
                    .map(|i| {
                        if m >> i & 1 == 1 {
                            -S::one() / radius
                        } else {
                            S::one() / radius
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(dim, normals)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[Vec<S>] {
        &self.normals
    }

    pub fn facet_count(&self) -> usize {
        self.normals.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.group.has_negation()
    }

    pub fn symmetry_group(&self) -> &SignGroup {
        &self.group
    }

    /// Closed under every coordinate sign flip.
    pub fn is_unconditional(&self) -> bool {
        self.group.is_full()
    }

    pub fn as_system(&self) -> HalfspaceSystem<S> {
        HalfspaceSystem::normalized(self.dim, &self.normals)
    }

    /// Minkowski functional `max(0, max_i a_i . x)`.
    pub fn gauge(&self, x: &[S]) -> Result<S, GeometryError> {
        if x.len() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.gauge_unchecked(x))
    }

    pub(crate) fn gauge_unchecked(&self, x: &[S]) -> S {
        self.normals.iter().fold(S::zero(), |m, a| m.max(dot(a, x)))
    }

    pub fn contains(&self, x: &[S]) -> bool {
        self.gauge_unchecked(x) <= S::one() + S::tol(1e-12)
    }

    /// Vertices, exactly invariant under the body's sign-flip group.
    pub fn vertices(&self) -> &[Vec<S>] {
        self.vertices.get_or_init(|| {
            let raw = self.as_system().vertices();
            dedupe_orbits(&self.group, raw, S::tol(1e-9))
        })
    }

    /// Exact Lebesgue volume.
    pub fn volume(&self) -> S {
        self.as_system().volume()
    }

    /// Support values `max x_i` and `max -x_i` via the cone-gauge dual.
    pub fn enclosing_box(&self) -> Result<AxisBox<S>, GeometryError> {
        let refs: Vec<&[S]> = self.normals.iter().map(|a| a.as_slice()).collect();
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut e = vec![S::zero(); self.dim];
            e[i] = S::one();
            let up = cone_gauge(&refs, &e)
                .value()
                .ok_or(GeometryError::Unbounded)?;
            e[i] = -S::one();
            let down = cone_gauge(&refs, &e)
                .value()
                .ok_or(GeometryError::Unbounded)?;
            hi.push(up);
            lo.push(-down);
        }
        Ok(AxisBox::new(lo, hi))
    }

    /// Fiber of the body along `axis` through `point` (its `axis` entry is
    /// ignored), as absolute coordinates.
    pub fn fiber(&self, axis: usize, point: &[S]) -> Option<(S, S)> {
        let zero_tol = S::tol(1e-12);
        let mut lo = S::neg_infinity();
        let mut hi = S::infinity();
        for a in &self.normals {
            let mut rest = S::one();
            for (l, (&al, &pl)) in a.iter().zip(point).enumerate() {
                if l != axis {
                    rest = rest - al * pl;
                }
            }
            let c = a[axis];
            if c > zero_tol {
                hi = hi.min(rest / c);
            } else if c < -zero_tol {
                lo = lo.max(rest / c);
            } else if rest < -zero_tol {
                return None;
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Section `{x in H : x_axis = z}` in the chart of the other coordinates.
    pub fn slice(&self, axis: usize, z: S) -> Result<Slice<S>, GeometryError> {
        if axis >= self.dim {
            return Err(GeometryError::AxisOutOfRange {
                axis,
                dim: self.dim,
            });
        }
        if self.dim < 2 {
            return Err(GeometryError::UnsupportedDimension(self.dim - 1));
        }
        let Some(sys) = self.as_system().fix_coordinate(axis, z) else {
            return Ok(Slice::Empty);
        };
        if sys.is_empty() || sys.volume() <= S::tol(1e-12) {
            return Ok(Slice::Empty);
        }
        Ok(Slice::Region(sys))
    }

    /// `H1 ∩ H2`, redundancy removed.
    pub fn intersect(&self, other: &Self) -> Result<Self, GeometryError> {
        if other.dim != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let normals = self.normals.iter().chain(&other.normals).cloned().collect();
        Self::new(self.dim, normals)
    }

    /// Image under an invertible matrix: normals map by `M^{-T}`.
    pub fn linear_image(&self, m: &Matrix<S>) -> Result<Self, GeometryError> {
        let inv_t = super::checked_inverse(m, self.dim)?.transpose();
        let normals = self.normals.iter().map(|a| inv_t.mul_vec(a)).collect();
        Self::new(self.dim, normals)
    }

    /// Polar body `conv(normals)`.
    pub fn polar(&self) -> Result<VPolytope<S>, GeometryError> {
        VPolytope::new(self.dim, self.normals.clone())
    }

    /// Same body as a vertex list.
    pub fn to_vpolytope(&self) -> Result<VPolytope<S>, GeometryError> {
        VPolytope::new(self.dim, self.vertices().to_vec())
    }

    /// H-representation of the polar body (its normals are our vertices).
    pub fn polar_hpolytope(&self) -> Result<Self, GeometryError> {
        Self::with_hint(self.dim, self.vertices().to_vec(), Some(&self.group))
    }

    /// Stable hash of the canonical normal list.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.dim.hash(&mut h);
        for a in &self.normals {
            key(a).hash(&mut h);
        }
        h.finish()
    }

    /// Same normal set up to the tolerance used for canonicalization.
    pub fn approx_eq(&self, other: &Self, rel: S) -> bool {
        if self.dim != other.dim || self.normals.len() != other.normals.len() {
            return false;
        }
        self.normals.iter().all(|a| {
            other.normals.iter().any(|b| {
                let scale = S::one() + crate::scalar::max_abs(a);
                a.iter().zip(b).all(|(&x, &y)| (x - y).abs() <= rel * scale)
            })
        })
    }

    pub fn cast<T: Scalar>(&self) -> Result<HPolytope<T>, GeometryError> {
        let normals = self
            .normals
            .iter()
            .map(|a| a.iter().map(|&x| T::of(x.as_f64())).collect())
            .collect();
        HPolytope::new(self.dim, normals)
    }

    /// Set of exact normal keys, used by symmetry checks in tests.
    pub fn normal_keys(&self) -> HashSet<Vec<u64>> {
        self.normals.iter().map(|a| key(a)).collect()
    }
}
