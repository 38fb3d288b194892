use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::VPolytope;
use crate::error::GeometryError;
use crate::scalar::Scalar;

const MAX_ATTEMPTS: u64 = 64;

/// Random centrally symmetric polytope with `2m` vertices `±v_i`, each `v_i`
/// uniform on a sphere whose radius is log-uniform in `[0.5, 2]`. Points
/// that are not extreme are dropped. Degenerate draws are retried on
/// sub-seeds, so the result is a pure function of `(n, m, seed)`.
pub fn random_symmetric_polytope<S: Scalar>(
    n: usize,
    m: usize,
    seed: u64,
) -> Result<VPolytope<S>, GeometryError> {
    if m < n {
        return Err(GeometryError::Degenerate("need at least n vertex pairs"));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let mut verts: Vec<Vec<S>> = Vec::with_capacity(2 * m);
        for _ in 0..m {
            let dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-12 {
                continue;
            }
            let radius = rng.random_range(0.5f64.ln()..2.0f64.ln()).exp();
            let v: Vec<S> = dir.iter().map(|&x| S::of(x / norm * radius)).collect();
            verts.push(v.iter().map(|&x| -x).collect());
            verts.push(v);
        }
        match VPolytope::new(n, verts) {
            Ok(p) => return Ok(p),
            Err(GeometryError::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GeometryError::Degenerate(
        "generator failed to produce a full-dimensional body",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_pairs_in_the_plane_give_a_quadrilateral() {
        for seed in 0..10 {
            let p = random_symmetric_polytope::<f64>(2, 2, seed).unwrap();
            assert_eq!(p.vertices().len(), 4);
            assert!(p.is_symmetric());
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = random_symmetric_polytope::<f64>(3, 6, 11).unwrap();
        let b = random_symmetric_polytope::<f64>(3, 6, 11).unwrap();
        assert_eq!(a.vertices(), b.vertices());
        let c = random_symmetric_polytope::<f64>(3, 6, 12).unwrap();
        assert_ne!(a.vertices(), c.vertices());
    }

    #[test]
    fn rejects_too_few_pairs() {
        assert!(random_symmetric_polytope::<f64>(3, 2, 0).is_err());
    }
}
