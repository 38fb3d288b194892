use proptest::prelude::*;

use santalo_core::bodies::random_symmetric_polytope;
use santalo_core::linalg::Matrix;
use santalo_core::symmetrize::{steiner, unconditionalize};
use santalo_core::HPolytope;

fn body(n: usize, seed: u64) -> HPolytope {
    random_symmetric_polytope::<f64>(n, n + 3, seed)
        .unwrap()
        .to_hpolytope()
        .unwrap()
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => unreachable!(),
    }
}

fn dims() -> impl Strategy<Value = usize> {
    2usize..=3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bipolar_is_the_body(n in dims(), seed in any::<u64>()) {
        let k = body(n, seed);
        let bipolar = k.polar_hpolytope().unwrap().polar_hpolytope().unwrap();
        prop_assert!(bipolar.approx_eq(&k, 1e-9));
    }

    #[test]
    fn polar_gauge_is_support_function(n in dims(), seed in any::<u64>(), y in prop::collection::vec(-3.0f64..3.0, 3)) {
        let k = body(n, seed);
        let y = &y[..n];
        let support = k.vertices().iter().map(|v| v.iter().zip(y).map(|(a, b)| a * b).sum::<f64>()).fold(0.0, f64::max);
        let g = k.polar_hpolytope().unwrap().gauge(y).unwrap();
        prop_assert!((g - support).abs() <= 1e-9 * (1.0 + support));
    }

    #[test]
    fn membership_matches_gauge(n in dims(), seed in any::<u64>(), x in prop::collection::vec(-2.5f64..2.5, 3)) {
        let k = body(n, seed);
        let x = &x[..n];
        let g = k.gauge(x).unwrap();
        if (g - 1.0).abs() > 1e-9 {
            prop_assert_eq!(k.contains(x), g < 1.0);
        }
        // Scaling onto the boundary lands inside.
        if g > 0.0 {
            let b: Vec<f64> = x.iter().map(|v| v / g).collect();
            prop_assert!(k.contains(&b));
        }
    }

    #[test]
    fn steiner_is_idempotent_and_preserves_volume(n in dims(), seed in any::<u64>(), axis in 0usize..3) {
        let k = body(n, seed);
        let axis = axis % n;
        let s = steiner(&k, axis).unwrap();
        prop_assert!((s.volume() - k.volume()).abs() <= 1e-9 * k.volume());
        let again = steiner(&s, axis).unwrap();
        prop_assert!(again.approx_eq(&s, 1e-8));
    }

    #[test]
    fn unconditionalized_bodies_keep_their_volume(n in dims(), seed in any::<u64>()) {
        let k = body(n, seed);
        let u = unconditionalize(&k).unwrap();
        prop_assert!(u.is_unconditional());
        prop_assert!((u.volume() - k.volume()).abs() <= 1e-9 * k.volume());
    }

    #[test]
    fn linear_images_scale_volume_and_invert_polar(
        n in dims(),
        seed in any::<u64>(),
        entries in prop::collection::vec(-1.0f64..1.0, 9),
    ) {
        let k = body(n, seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| entries[i * 3 + j] + if i == j { 2.5 } else { 0.0 }).collect())
            .collect();
        let m = Matrix::from_rows(&rows).unwrap();
        let d = det(&rows).abs();
        let image = k.linear_image(&m).unwrap();
        prop_assert!((image.volume() - d * k.volume()).abs() <= 1e-9 * d * k.volume());
        // (MK)° = M^{-T} K°, so the volume product is invariant.
        let p = k.volume() * k.polar_hpolytope().unwrap().volume();
        let q = image.volume() * image.polar_hpolytope().unwrap().volume();
        prop_assert!((p - q).abs() <= 1e-8 * p);
    }
}
