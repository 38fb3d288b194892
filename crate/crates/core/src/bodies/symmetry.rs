//! Coordinate sign-flip symmetries and canonical point sets.
//!
//! Normals of an H-body and vertices of a V-body are both "point sets whose
//! convex hull contains the origin in its interior", and both are pruned the
//! same way: a point is dropped when it lies in the convex hull of the
//! remaining points and the origin. Pruning works orbit-by-orbit under the
//! exact sign-flip symmetry group of the set, so an exactly symmetric input
//! stays exactly symmetric.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::error::GeometryError;
use crate::lp::{cone_gauge, ConeGauge};
use crate::scalar::{max_abs, Scalar};

/// Subgroup of `{±1}^n` acting by coordinate sign flips. Element `mask`
/// flips every coordinate whose bit is set; `mask == all` is `x -> -x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignGroup {
    dim: usize,
    masks: Vec<u32>,
}

pub(crate) fn key<S: Scalar>(v: &[S]) -> Vec<u64> {
    v.iter().map(|x| x.canonical_bits()).collect()
}

pub(crate) fn flip<S: Scalar>(mask: u32, v: &[S]) -> Vec<S> {
    v.iter()
        .enumerate()
        .map(|(i, &x)| if mask >> i & 1 == 1 { -x } else { x })
        .collect()
}

pub(crate) fn cmp_lex<S: Scalar>(a: &[S], b: &[S]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

impl SignGroup {
    pub fn trivial(dim: usize) -> Self {
        Self {
            dim,
            masks: vec![0],
        }
    }

    /// Every flip pattern that maps the set onto itself exactly.
    pub fn detect<S: Scalar>(dim: usize, points: &[Vec<S>]) -> Self {
        let set: HashSet<Vec<u64>> = points.iter().map(|p| key(p)).collect();
        let masks = (0..1u32 << dim)
            .filter(|&m| m == 0 || points.iter().all(|p| set.contains(&key(&flip(m, p)))))
            .collect();
        Self { dim, masks }
    }

    /// Group generated by `self` and an extra flip pattern.
    pub fn with(&self, extra: u32) -> Self {
        let mut masks: Vec<u32> = self.masks.clone();
        let mut i = 0;
        if !masks.contains(&extra) {
            masks.push(extra);
        }
        while i < masks.len() {
            for j in 0..masks.len() {
                let m = masks[i] ^ masks[j];
                if !masks.contains(&m) {
                    masks.push(m);
                }
            }
            i += 1;
        }
        masks.sort_unstable();
        Self {
            dim: self.dim,
            masks,
        }
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn all_flips_mask(&self) -> u32 {
        (1u32 << self.dim) - 1
    }

    pub fn contains(&self, mask: u32) -> bool {
        self.masks.contains(&mask)
    }

    pub fn has_negation(&self) -> bool {
        self.contains(self.all_flips_mask())
    }

    pub fn is_full(&self) -> bool {
        self.masks.len() == 1usize << self.dim
    }

    /// Distinct images of `p` under the group, `p` first.
    pub fn orbit<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for &m in &self.masks {
            let q = flip(m, p);
            if seen.insert(key(&q)) {
                out.push(q);
            }
        }
        out
    }

    /// Closes a point set under the group.
    pub fn close<S: Scalar>(&self, points: &[Vec<S>]) -> Vec<Vec<S>> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for p in points {
            for q in self.orbit(p) {
                if seen.insert(key(&q)) {
                    out.push(q);
                }
            }
        }
        out
    }
}

fn near<S: Scalar>(a: &[S], b: &[S], rel: S) -> bool {
    let scale = max_abs(a).max(max_abs(b));
    a.iter().zip(b).all(|(&x, &y)| (x - y).abs() <= rel * scale)
}

/// Splits a point set into orbits; each orbit is listed with its first-seen
/// element as representative.
fn orbits<S: Scalar>(group: &SignGroup, points: &[Vec<S>]) -> Vec<Vec<Vec<S>>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for p in points {
        if seen.contains(&key(p)) {
            continue;
        }
        let orb = group.orbit(p);
        for q in &orb {
            seen.insert(key(q));
        }
        out.push(orb);
    }
    out
}

/// Snap negligible coordinates, fold `-0`, drop zero vectors and exact
/// duplicates.
pub(crate) fn clean<S: Scalar>(
    dim: usize,
    points: Vec<Vec<S>>,
) -> Result<Vec<Vec<S>>, GeometryError> {
    let snap = S::tol(1e-12);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(points.len());
    for mut p in points {
        if p.len() != dim {
            return Err(GeometryError::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let scale = max_abs(&p);
        if scale == S::zero() {
            continue;
        }
        for x in p.iter_mut() {
            if x.abs() <= snap * scale {
                *x = S::zero();
            }
        }
        if seen.insert(key(&p)) {
            out.push(p);
        }
    }
    Ok(out)
}

/// True when every signed axis direction lies in the cone of `points`, i.e.
/// the origin is interior to their convex hull.
pub(crate) fn spans_space<S: Scalar>(dim: usize, points: &[Vec<S>]) -> bool {
    if crate::linalg::rank(points, dim, S::tol(1e-12)) < dim {
        return false;
    }
    let refs: Vec<&[S]> = points.iter().map(|p| p.as_slice()).collect();
    (0..dim).all(|i| {
        [S::one(), -S::one()].iter().all(|&s| {
            let mut e = vec![S::zero(); dim];
            e[i] = s;
            matches!(cone_gauge(&refs, &e), ConeGauge::Finite(_))
        })
    })
}

/// Canonical, irredundant, sorted point set together with its exact sign
/// symmetry group. `hint` closes the input under extra known symmetries
/// before detection.
pub(crate) fn canonical_points<S: Scalar>(
    dim: usize,
    points: Vec<Vec<S>>,
    hint: Option<&SignGroup>,
) -> Result<(Vec<Vec<S>>, SignGroup), GeometryError> {
    let mut pts = clean(dim, points)?;
    if pts.is_empty() {
        return Err(GeometryError::Empty("point set"));
    }
    if let Some(g) = hint {
        pts = g.close(&pts);
    }
    let group = SignGroup::detect(dim, &pts);

    // Near-duplicates collapse orbit against orbit so symmetry survives.
    let dup_tol = S::tol(1e-12);
    let mut kept: Vec<Vec<S>> = Vec::with_capacity(pts.len());
    for orb in orbits(&group, &pts) {
        if kept.iter().any(|k| near(k, &orb[0], dup_tol)) {
            continue;
        }
        kept.extend(orb);
    }

    if !spans_space(dim, &kept) {
        return Err(GeometryError::Unbounded);
    }

    let red_tol = S::tol(1e-9);
    let mut alive: Vec<Vec<S>> = kept;
    for orb in orbits(&group, &alive.clone()) {
        let keys: HashSet<Vec<u64>> = orb.iter().map(|p| key(p)).collect();
        let others: Vec<&[S]> = alive
            .iter()
            .filter(|p| !keys.contains(&key(p)))
            .map(|p| p.as_slice())
            .collect();
        if let ConeGauge::Finite(g) = cone_gauge(&others, &orb[0]) {
            if g <= S::one() + red_tol {
                alive.retain(|p| !keys.contains(&key(p)));
            }
        }
    }
    alive.sort_by(|a, b| cmp_lex(a, b));
    // Pruned points may have hidden a larger symmetry.
    let group = SignGroup::detect(dim, &alive);
    Ok((alive, group))
}

/// Merges near-duplicate points and makes the result exactly invariant
/// under `group`: each cluster is represented by the orbit of its first
/// member.
pub(crate) fn dedupe_orbits<S: Scalar>(
    group: &SignGroup,
    points: Vec<Vec<S>>,
    rel: S,
) -> Vec<Vec<S>> {
    let mut out: Vec<Vec<S>> = Vec::with_capacity(points.len());
    for p in points {
        let scale = S::one() + max_abs(&p);
        let close = |q: &Vec<S>| {
            q.iter()
                .zip(&p)
                .all(|(&x, &y)| (x - y).abs() <= rel * scale)
        };
        if out.iter().any(close) {
            continue;
        }
        out.extend(group.orbit(&p));
    }
    out.sort_by(|a, b| cmp_lex(a, b));
    out
}
