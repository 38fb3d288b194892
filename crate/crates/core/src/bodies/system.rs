//! Halfspace systems `{x : a_i . x <= b_i}` with arbitrary offsets.
//!
//! Volume uses the recursive facet decomposition
//! `vol_d(P) = (1/d) sum_i b_i / |a_ik| * vol_{d-1}(proj_k F_i)`, where
//! `F_i` is facet `i` projected along its dominant coordinate `k`. This is a
//! fan from the origin over the facets, with each facet measured in its own
//! chart; signed offsets make it valid wherever the origin sits. Vertex
//! enumeration descends the same facet recursion.

use crate::scalar::{max_abs, Scalar};

/// A polyhedron in `dim` coordinates given by rows `a_i` and offsets `b_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceSystem<S> {
    dim: usize,
    rows: Vec<S>,
    offsets: Vec<S>,
}

struct Reduced<S> {
    rows: Vec<S>,
    offsets: Vec<S>,
    pivot: usize,
}

/// Restricts the system to the hyperplane `a_i . x = b_i`, eliminating the
/// coordinate where `|a_i|` is largest. Rows parallel to `a_i` are resolved
/// immediately; `None` means the facet is empty (or, with `tiebreak`, is
/// owned by an earlier coincident row).
fn reduce_onto<S: Scalar>(
    rows: &[S],
    offsets: &[S],
    d: usize,
    i: usize,
    tiebreak: bool,
) -> Option<Reduced<S>> {
    let row_i = &rows[i * d..(i + 1) * d];
    let bi = offsets[i];
    let pivot = (0..d).max_by(|&x, &y| row_i[x].abs().partial_cmp(&row_i[y].abs()).unwrap())?;
    let p = row_i[pivot];
    if p == S::zero() {
        return None;
    }
    let eps = S::tol(1e-11);
    let m = offsets.len();
    let mut na = Vec::with_capacity((m - 1) * (d - 1));
    let mut nb = Vec::with_capacity(m - 1);
    for j in 0..m {
        if j == i {
            continue;
        }
        let row_j = &rows[j * d..(j + 1) * d];
        let r = row_j[pivot] / p;
        let start = na.len();
        let mut mx = S::zero();
        for l in 0..d {
            if l == pivot {
                continue;
            }
            let v = row_j[l] - r * row_i[l];
            mx = mx.max(v.abs());
            na.push(v);
        }
        let nbv = offsets[j] - r * bi;
        if mx <= eps * max_abs(row_j) {
            na.truncate(start);
            let bscale = offsets[j].abs() + (r * bi).abs() + S::epsilon();
            if nbv < -eps * bscale {
                return None;
            }
            if tiebreak && nbv <= eps * bscale && r > S::zero() && j < i {
                return None;
            }
            continue;
        }
        nb.push(nbv);
    }
    Some(Reduced {
        rows: na,
        offsets: nb,
        pivot,
    })
}

fn interval<S: Scalar>(rows: &[S], offsets: &[S]) -> Option<(S, S)> {
    let mut lo = S::neg_infinity();
    let mut hi = S::infinity();
    for (&a, &b) in rows.iter().zip(offsets) {
        if a > S::zero() {
            hi = hi.min(b / a);
        } else if a < S::zero() {
            lo = lo.max(b / a);
        } else if b < S::zero() {
            return None;
        }
    }
    Some((lo, hi))
}

fn volume_rec<S: Scalar>(rows: &[S], offsets: &[S], d: usize) -> S {
    if offsets.is_empty() {
        return S::infinity();
    }
    if d == 1 {
        return match interval(rows, offsets) {
            Some((lo, hi)) => (hi - lo).max(S::zero()),
            None => S::zero(),
        };
    }
    let mut sum = S::zero();
    for i in 0..offsets.len() {
        if offsets[i] == S::zero() {
            continue;
        }
        let Some(red) = reduce_onto(rows, offsets, d, i, true) else {
            continue;
        };
        let sub = volume_rec(&red.rows, &red.offsets, d - 1);
        if sub == S::zero() {
            continue;
        }
        let p = rows[i * d + red.pivot];
        sum = sum + offsets[i] / p.abs() * sub;
    }
    sum / S::of(d as f64)
}

pub(crate) fn dedupe_points<S: Scalar>(points: Vec<Vec<S>>, rel: S) -> Vec<Vec<S>> {
    let mut out: Vec<Vec<S>> = Vec::with_capacity(points.len());
    for p in points {
        let scale = S::one() + max_abs(&p);
        if !out.iter().any(|q| {
            q.iter()
                .zip(&p)
                .all(|(&x, &y)| (x - y).abs() <= rel * scale)
        }) {
            out.push(p);
        }
    }
    out
}

fn vertices_rec<S: Scalar>(rows: &[S], offsets: &[S], d: usize) -> Vec<Vec<S>> {
    if offsets.is_empty() {
        return Vec::new();
    }
    if d == 1 {
        let Some((lo, hi)) = interval(rows, offsets) else {
            return Vec::new();
        };
        if !lo.is_finite() || !hi.is_finite() {
            return Vec::new();
        }
        let scale = S::one() + lo.abs().max(hi.abs());
        let eps = S::tol(1e-10) * scale;
        return if hi - lo > eps {
            vec![vec![lo], vec![hi]]
        } else if lo - hi <= eps {
            vec![vec![(lo + hi) / S::of(2.0)]]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    for i in 0..offsets.len() {
        let Some(red) = reduce_onto(rows, offsets, d, i, false) else {
            continue;
        };
        let row_i = &rows[i * d..(i + 1) * d];
        for sub in vertices_rec(&red.rows, &red.offsets, d - 1) {
            let mut x = Vec::with_capacity(d);
            let mut it = sub.into_iter();
            for l in 0..d {
                x.push(if l == red.pivot {
                    S::zero()
                } else {
                    it.next().unwrap()
                });
            }
            let rest: S = (0..d)
                .filter(|&l| l != red.pivot)
                .map(|l| row_i[l] * x[l])
                .sum();
            x[red.pivot] = (offsets[i] - rest) / row_i[red.pivot];
            out.push(x);
        }
    }
    dedupe_points(out, S::tol(1e-9))
}

impl<S: Scalar> HalfspaceSystem<S> {
    pub fn new(dim: usize, rows: Vec<Vec<S>>, offsets: Vec<S>) -> Self {
        assert_eq!(rows.len(), offsets.len(), "one offset per row");
        assert!(
            rows.iter().all(|r| r.len() == dim),
            "row length must equal dim"
        );
        Self {
            dim,
            rows: rows.into_iter().flatten().collect(),
            offsets,
        }
    }

    /// `{x : a . x <= 1}` for each normal.
    pub fn normalized(dim: usize, normals: &[Vec<S>]) -> Self {
        Self::new(dim, normals.to_vec(), vec![S::one(); normals.len()])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    pub fn offsets(&self) -> &[S] {
        &self.offsets
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[S], S)> + '_ {
        self.rows
            .chunks(self.dim.max(1))
            .zip(self.offsets.iter().copied())
    }

    /// All offsets strictly positive, so the chart origin is interior.
    pub fn is_normalized(&self) -> bool {
        self.offsets.iter().all(|&b| b > S::tol(1e-12))
    }

    pub fn contains(&self, x: &[S], tol: S) -> bool {
        self.rows()
            .all(|(a, b)| crate::scalar::dot(a, x) <= b + tol)
    }

    /// Lebesgue volume of the region (infinite when unbounded).
    pub fn volume(&self) -> S {
        volume_rec(&self.rows, &self.offsets, self.dim).max(S::zero())
    }

    /// Vertices (0-dimensional faces), duplicates merged.
    pub fn vertices(&self) -> Vec<Vec<S>> {
        let tol = S::tol(1e-9);
        vertices_rec(&self.rows, &self.offsets, self.dim)
            .into_iter()
            .filter(|v| self.contains(v, tol * (S::one() + max_abs(v))))
            .collect()
    }

    /// The system on the hyperplane `x_axis = value`, as a system in the
    /// remaining coordinates. `None` when a constant row is violated.
    pub fn fix_coordinate(&self, axis: usize, value: S) -> Option<Self> {
        let d = self.dim;
        let eps = S::tol(1e-12);
        let mut rows = Vec::with_capacity(self.rows.len());
        let mut offsets = Vec::with_capacity(self.offsets.len());
        for (a, b) in self.rows() {
            let nb = b - a[axis] * value;
            let start = rows.len();
            rows.extend((0..d).filter(|&l| l != axis).map(|l| a[l]));
            if max_abs(&rows[start..]) <= eps * max_abs(a) {
                rows.truncate(start);
                if nb < -eps * (S::one() + b.abs()) {
                    return None;
                }
                continue;
            }
            offsets.push(nb);
        }
        Some(Self {
            dim: d - 1,
            rows,
            offsets,
        })
    }

    /// Interval `{t : x + t e_axis in P}` with `x_axis` ignored, as absolute
    /// coordinates along the axis. Rows whose axis coefficient is below
    /// `1e-12` in magnitude are treated as parallel to the fiber.
    pub fn fiber(&self, axis: usize, point: &[S]) -> Option<(S, S)> {
        let zero_tol = S::tol(1e-12);
        let mut lo = S::neg_infinity();
        let mut hi = S::infinity();
        for (a, b) in self.rows() {
            let rest = b
                - (0..self.dim)
                    .filter(|&l| l != axis)
                    .map(|l| a[l] * point[l])
                    .sum::<S>();
            let c = a[axis];
            if c > zero_tol {
                hi = hi.min(rest / c);
            } else if c < -zero_tol {
                lo = lo.max(rest / c);
            } else if rest < -zero_tol {
                return None;
            }
        }
        if lo > hi {
            None
        } else {
            Some((lo, hi))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> HalfspaceSystem<f64> {
        HalfspaceSystem::normalized(
            2,
            &[
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
        )
    }

    #[test]
    fn square_volume_and_vertices() {
        let s = square();
        assert!((s.volume() - 4.0).abs() < 1e-14);
        assert_eq!(s.vertices().len(), 4);
    }

    #[test]
    fn offset_box_not_containing_origin() {
        // [2,3] x [1,5]
        let s: HalfspaceSystem<f64> = HalfspaceSystem::new(
            2,
            vec![
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
            vec![3.0, -2.0, 5.0, -1.0],
        );
        assert!((s.volume() - 4.0).abs() < 1e-13);
        assert!(!s.is_normalized());
    }

    #[test]
    fn duplicated_row_not_double_counted() {
        let s: HalfspaceSystem<f64> = HalfspaceSystem::normalized(
            2,
            &[
                vec![1.0, 0.0],
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
        );
        assert!((s.volume() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn empty_system_has_zero_volume() {
        let s: HalfspaceSystem<f64> = HalfspaceSystem::new(
            2,
            vec![
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
            vec![-1.0, -1.0, 1.0, 1.0],
        );
        assert_eq!(s.volume(), 0.0);
        assert!(s.vertices().is_empty());
    }

    #[test]
    fn cross_polytope_3d() {
        let mut normals = Vec::new();
        for m in 0..8u32 {
            normals.push(
                (0..3)
                    .map(|i| if m >> i & 1 == 1 { -1.0 } else { 1.0 })
                    .collect(),
            );
        }
        let s: HalfspaceSystem<f64> = HalfspaceSystem::normalized(3, &normals);
        assert!((s.volume() - 4.0 / 3.0).abs() < 1e-14);
        assert_eq!(s.vertices().len(), 6);
    }

    #[test]
    fn fix_coordinate_and_fiber() {
        let s = square();
        let slice = s.fix_coordinate(1, 0.5).unwrap();
        assert_eq!(slice.dim(), 1);
        assert!((slice.volume() - 2.0).abs() < 1e-15);
        assert_eq!(s.fiber(0, &[0.0, 0.5]), Some((-1.0, 1.0)));
        assert_eq!(s.fix_coordinate(1, 1.5), None);
    }
}
