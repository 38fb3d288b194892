//! Steiner symmetrization of H-polytopes along coordinate axes.

use crate::bodies::HPolytope;
use crate::error::GeometryError;
use crate::scalar::{dot, Scalar};

/// Coefficients below this magnitude along the symmetrization axis count as
/// parallel to it.
const AXIS_ZERO: f64 = 1e-12;
/// Facet membership and projection-overlap slack.
const FACET_TOL: f64 = 1e-9;

/// Counts from one symmetrization step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SteinerStats {
    /// Normals with positive, negative and (near) zero axis coefficient.
    pub positive: usize,
    pub negative: usize,
    pub parallel: usize,
    /// Pairs surviving the projection-overlap prefilter.
    pub pairs: usize,
    /// Halfspaces before canonicalization: `parallel + 2 * pairs`.
    pub candidates: usize,
    pub facets_out: usize,
}

fn embed<S: Scalar>(axis: usize, y: &[S], t: S) -> Vec<S> {
    let mut x = Vec::with_capacity(y.len() + 1);
    x.extend_from_slice(&y[..axis]);
    x.push(t);
    x.extend_from_slice(&y[axis..]);
    x
}

/// Fiber of `h` over `y`, where `y` lists the coordinates other than `axis`.
pub fn fiber_interval<S: Scalar>(
    h: &HPolytope<S>,
    axis: usize,
    y: &[S],
) -> Result<Option<(S, S)>, GeometryError> {
    if axis >= h.dim() {
        return Err(GeometryError::AxisOutOfRange { axis, dim: h.dim() });
    }
    if y.len() + 1 != h.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: h.dim() - 1,
            got: y.len(),
        });
    }
    Ok(h.fiber(axis, &embed(axis, y, S::zero())))
}

/// Projection onto the coordinates other than `axis` of the bounding box of
/// the facet with normal `a`.
fn facet_shadow<S: Scalar>(h: &HPolytope<S>, a: &[S], axis: usize) -> Option<(Vec<S>, Vec<S>)> {
    let tol = S::tol(FACET_TOL);
    let mut lo = vec![S::infinity(); h.dim()];
    let mut hi = vec![S::neg_infinity(); h.dim()];
    let mut any = false;
    for v in h.vertices() {
        if (dot(a, v) - S::one()).abs() <= tol {
            any = true;
            for l in (0..h.dim()).filter(|&l| l != axis) {
                lo[l] = lo[l].min(v[l]);
                hi[l] = hi[l].max(v[l]);
            }
        }
    }
    any.then_some((lo, hi))
}

fn shadows_overlap<S: Scalar>(p: &(Vec<S>, Vec<S>), q: &(Vec<S>, Vec<S>), axis: usize) -> bool {
    let tol = S::tol(FACET_TOL);
    (0..p.0.len()).filter(|&l| l != axis).all(|l| {
        let scale = S::one() + p.1[l].abs().max(q.1[l].abs());
        p.0[l] <= q.1[l] + tol * scale && q.0[l] <= p.1[l] + tol * scale
    })
}

/// Steiner symmetral of `h` along coordinate `axis`, with step statistics.
///
/// Over each point `y` of the orthogonal hyperplane the fiber `[f(y), g(y)]`
/// is replaced by `[-(g-f)/2, (g-f)/2]`. With `g = min_i g_i` over normals
/// pointing up and `f = max_j f_j` over normals pointing down, the half-length
/// is the minimum over pairs `(i, j)` of affine functions, so the symmetral is
/// cut out by `±x_u <= (g_i - f_j)/2` plus the normals parallel to the fiber.
/// Pairs whose facets have disjoint shadows never realize that minimum and
/// are skipped.
pub fn steiner_with_stats<S: Scalar>(
    h: &HPolytope<S>,
    axis: usize,
) -> Result<(HPolytope<S>, SteinerStats), GeometryError> {
    let dim = h.dim();
    if axis >= dim {
        return Err(GeometryError::AxisOutOfRange { axis, dim });
    }
    let zero = S::of(AXIS_ZERO);
    let mut up = Vec::new();
    let mut down = Vec::new();
    let mut candidates = Vec::new();
    for a in h.normals() {
        if a[axis] > zero {
            up.push(a);
        } else if a[axis] < -zero {
            down.push(a);
        } else {
            candidates.push(a.clone());
        }
    }
    let mut stats = SteinerStats {
        positive: up.len(),
        negative: down.len(),
        parallel: candidates.len(),
        ..SteinerStats::default()
    };
    let up_shadows: Vec<_> = up.iter().map(|a| facet_shadow(h, a, axis)).collect();
    let down_shadows: Vec<_> = down.iter().map(|a| facet_shadow(h, a, axis)).collect();
    let half = S::of(0.5);
    for (ai, si) in up.iter().zip(&up_shadows) {
        let Some(si) = si else { continue };
        for (aj, sj) in down.iter().zip(&down_shadows) {
            let Some(sj) = sj else { continue };
            if !shadows_overlap(si, sj, axis) {
                continue;
            }
            stats.pairs += 1;
            let (bi, bj) = (ai[axis], aj[axis]);
            let c = half * (S::one() / bi - S::one() / bj);
            let mut row: Vec<S> = (0..dim)
                .map(|l| {
                    if l == axis {
                        S::zero()
                    } else {
                        half * (ai[l] / bi - aj[l] / bj) / c
                    }
                })
                .collect();
            row[axis] = S::one() / c;
            let mut mirrored = row.clone();
            mirrored[axis] = -row[axis];
            candidates.push(row);
            candidates.push(mirrored);
        }
    }
    stats.candidates = candidates.len();
    let group = h.symmetry_group().with(1u32 << axis);
    let out = HPolytope::with_hint(dim, candidates, Some(&group))?;
    stats.facets_out = out.facet_count();
    Ok((out, stats))
}

/// Steiner symmetral of `h` along coordinate `axis`.
pub fn steiner<S: Scalar>(h: &HPolytope<S>, axis: usize) -> Result<HPolytope<S>, GeometryError> {
    steiner_with_stats(h, axis).map(|(out, _)| out)
}

/// Symmetrizes a centrally symmetric body along the last axis, then the one
/// before, down to the second; the result is invariant under every sign flip.
/// The first axis needs no step: the remaining flip is the product of the
/// central symmetry with the others.
pub fn unconditionalize<S: Scalar>(h: &HPolytope<S>) -> Result<HPolytope<S>, GeometryError> {
    Ok(unconditionalize_steps(h)?
        .pop()
        .expect("at least the input"))
}

/// Every body along the unconditionalization pipeline, input first.
pub fn unconditionalize_steps<S: Scalar>(
    h: &HPolytope<S>,
) -> Result<Vec<HPolytope<S>>, GeometryError> {
    if !h.is_symmetric() {
        return Err(GeometryError::NotSymmetric);
    }
    let mut steps = vec![h.clone()];
    for axis in (1..h.dim()).rev() {
        let next = steiner(steps.last().expect("nonempty"), axis)?;
        steps.push(next);
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::random_symmetric_polytope;

    fn sheared_cube() -> HPolytope<f64> {
        // |y| <= 1 and |x - y| <= 1 with x the first coordinate.
        HPolytope::new(
            2,
            vec![
                vec![0.0, 1.0],
                vec![0.0, -1.0],
                vec![1.0, -1.0],
                vec![-1.0, 1.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn fibers_of_simple_bodies() {
        let cube = HPolytope::<f64>::cube(2, 1.0).unwrap();
        assert_eq!(fiber_interval(&cube, 0, &[0.0]).unwrap(), Some((-1.0, 1.0)));
        let diamond = HPolytope::<f64>::cross_polytope(2, 1.0).unwrap();
        assert_eq!(
            fiber_interval(&diamond, 0, &[0.5]).unwrap(),
            Some((-0.5, 0.5))
        );
        assert_eq!(
            fiber_interval(&sheared_cube(), 0, &[0.5]).unwrap(),
            Some((-0.5, 1.5))
        );
        assert_eq!(fiber_interval(&cube, 0, &[1.5]).unwrap(), None);
        assert!(fiber_interval(&cube, 2, &[0.0]).is_err());
    }

    #[test]
    fn diamond_is_a_fixed_point() {
        let diamond = HPolytope::<f64>::cross_polytope(2, 1.0).unwrap();
        assert!(steiner(&diamond, 0).unwrap().approx_eq(&diamond, 1e-12));
    }

    #[test]
    fn sheared_cube_becomes_cube() {
        let cube = HPolytope::<f64>::cube(2, 1.0).unwrap();
        let s = steiner(&sheared_cube(), 0).unwrap();
        assert!(s.approx_eq(&cube, 1e-12), "{:?}", s.normals());
        let u = unconditionalize(&sheared_cube()).unwrap();
        assert!(u.is_unconditional());
        // Along the second axis the sheared cube is not centered either.
        assert!((u.volume() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cube_is_fixed_by_the_pipeline() {
        let cube = HPolytope::<f64>::cube(3, 1.0).unwrap();
        assert_eq!(unconditionalize(&cube).unwrap(), cube);
    }

    #[test]
    fn random_polygon_keeps_volume_and_centers_fibers() {
        for seed in 0..20 {
            let k = random_symmetric_polytope::<f64>(2, 5, seed)
                .unwrap()
                .to_hpolytope()
                .unwrap();
            for axis in 0..2 {
                let (s, stats) = steiner_with_stats(&k, axis).unwrap();
                assert!((s.volume() - k.volume()).abs() <= 1e-9 * k.volume());
                assert!(stats.candidates <= stats.parallel + 2 * stats.positive * stats.negative);
                assert!(s.facet_count() <= stats.candidates);
                let other = 1 - axis;
                let bx = s.enclosing_box().unwrap();
                for i in 1..20 {
                    let y = bx.lo[other] + (bx.hi[other] - bx.lo[other]) * i as f64 / 20.0;
                    if let Some((lo, hi)) = fiber_interval(&s, axis, &[y]).unwrap() {
                        assert!((lo + hi).abs() <= 1e-12, "{lo} {hi}");
                        let (klo, khi) = fiber_interval(&k, axis, &[y]).unwrap().unwrap();
                        assert!(((hi - lo) - (khi - klo)).abs() <= 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn pipeline_in_three_dimensions() {
        for seed in 0..10 {
            let k = random_symmetric_polytope::<f64>(3, 6, seed)
                .unwrap()
                .to_hpolytope()
                .unwrap();
            let u = unconditionalize(&k).unwrap();
            assert!(u.is_unconditional());
            assert!((u.volume() - k.volume()).abs() <= 1e-9 * k.volume());
        }
    }

    #[test]
    fn works_in_single_precision() {
        let k = random_symmetric_polytope::<f32>(2, 4, 3)
            .unwrap()
            .to_hpolytope()
            .unwrap();
        let u = unconditionalize(&k).unwrap();
        assert!(u.is_unconditional());
        assert!((u.volume() - k.volume()).abs() <= 1e-4 * k.volume());
    }

    #[test]
    fn rejects_asymmetric_input() {
        let tri = HPolytope::<f64>::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]])
            .unwrap();
        assert!(matches!(
            unconditionalize(&tri),
            Err(GeometryError::NotSymmetric)
        ));
    }
}
