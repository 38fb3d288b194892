use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::bodies::{random_symmetric_polytope, AxisBox, VPolytope};
use crate::linalg::Matrix;

fn gaussian2() -> LogConcaveMeasure {
    LogConcaveMeasure::gaussian(&[1.0, 1.0]).unwrap()
}

fn cube2() -> HPolytope<f64> {
    HPolytope::cube(2, 1.0).unwrap()
}

fn diamond2() -> HPolytope<f64> {
    HPolytope::cross_polytope(2, 1.0).unwrap()
}

fn sheared_cube() -> HPolytope<f64> {
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

fn phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

#[test]
fn lebesgue_products() {
    let v = Verifier::default();
    let p = v
        .volume_product(&cube2(), ProductMeasure::Lebesgue)
        .unwrap();
    assert_eq!(p.value.value, 8.0);
    assert_eq!(p.value.err, 0.0);
    // Restricting to the cube keeps the cube and its polar whole.
    let big = HPolytope::cube(2, 2.0).unwrap();
    let r = v
        .volume_product(&cube2(), ProductMeasure::Restricted(&big))
        .unwrap();
    assert!((r.value.value - 8.0).abs() < 1e-14);
    let small = HPolytope::cube(2, 0.5).unwrap();
    let r = v
        .volume_product(&cube2(), ProductMeasure::Restricted(&small))
        .unwrap();
    assert!((r.value.value - 1.0 * 1.0).abs() < 1e-14);
}

#[test]
fn gaussian_product_of_cube() {
    let v = Verifier::default();
    let p = v
        .volume_product(&cube2(), ProductMeasure::Measure(&gaussian2()))
        .unwrap();
    let want = (2.0 * phi(1.0) - 1.0).powi(2);
    assert!((p.body.value - want).abs() < 1e-9);
    let mc = crate::integrate::measure_mc(&gaussian2(), &diamond2(), 1_000_000, 17).unwrap();
    assert!((p.polar.value - mc.value).abs() <= 3.0 * (p.polar.err + mc.err));
}

#[test]
fn santalo_examples() {
    let v = Verifier::default();
    let r = v.santalo(&cube2(), "cube").unwrap();
    assert!(r.passed);
    assert!((r.margin - (PI * PI - 8.0)).abs() < 1e-14);

    let n = 128.0f64;
    let gon = VPolytope::regular_polygon(128, 1.0)
        .unwrap()
        .to_hpolytope()
        .unwrap();
    let r = v.santalo(&gon, "128-gon").unwrap();
    let want = (n * (PI / n).sin()).powi(2);
    assert!(
        (r.lhs.value - want).abs() < 1e-10,
        "{} vs {want}",
        r.lhs.value
    );
    assert!(r.passed && r.margin <= 0.01 * PI * PI);
}

#[test]
fn santalo_is_linear_invariant() {
    let v = Verifier::default();
    let k = random_symmetric_polytope::<f64>(2, 5, 4)
        .unwrap()
        .to_hpolytope()
        .unwrap();
    let m = Matrix::from_rows(&[vec![2.0, 0.5], vec![-0.3, 1.0]]).unwrap();
    let a = v.santalo(&k, "k").unwrap();
    let b = v.santalo(&k.linear_image(&m).unwrap(), "mk").unwrap();
    assert_eq!(a.passed, b.passed);
    assert!((a.lhs.value - b.lhs.value).abs() < 1e-9 * a.lhs.value);
}

#[test]
fn symmetral_factors_on_fixed_point_and_sheared_cube() {
    let v = Verifier::default();
    for r in v
        .symmetral_factors(&gaussian2(), &cube2(), 0, "cube")
        .unwrap()
    {
        assert!(r.passed && r.margin.abs() <= r.slack, "{r}");
    }
    for r in v
        .symmetral_factors(&gaussian2(), &sheared_cube(), 0, "sheared")
        .unwrap()
    {
        assert!(r.passed, "{r}");
        assert!(r.margin > 0.0);
    }
}

#[test]
fn chain_examples() {
    let v = Verifier::default();
    let out = v.chain(&gaussian2(), &sheared_cube(), "sheared").unwrap();
    assert_eq!(out.reports.len(), 1);
    assert!(out.final_unconditional && out.reports[0].passed);

    let leb = LogConcaveMeasure::lebesgue_box(&AxisBox::symmetric(&[3.0; 3])).unwrap();
    let k = random_symmetric_polytope::<f64>(3, 5, 1)
        .unwrap()
        .to_hpolytope()
        .unwrap();
    let out = v.chain(&leb, &k, "r3").unwrap();
    assert_eq!(out.reports.len(), 2);
    assert!(out.final_unconditional && out.reports.iter().all(|r| r.passed));

    let out = v.chain(&gaussian2(), &cube2(), "cube").unwrap();
    assert!(out.reports.iter().all(|r| r.margin.abs() <= r.slack));
}

#[test]
fn main_examples() {
    let v = Verifier::default();
    let r = v.main(&gaussian2(), &cube2(), "cube").unwrap();
    assert!(r.passed);
    assert!((r.rhs.value - (1.0 - (-0.5f64).exp()).powi(2)).abs() < 1e-15);
    assert!((r.rhs.value - 0.154818).abs() < 1e-6);
    let r = v.main_ball(&gaussian2()).unwrap();
    assert_eq!(r.margin, 0.0);
    let e = LogConcaveMeasure::product_exponential(&[1.0, 1.0]).unwrap();
    let r = v.main_ball(&e).unwrap();
    assert_eq!(r.margin, 0.0);
}

#[test]
fn requires_unconditional_measures() {
    let v = Verifier::default();
    let f: crate::measures::LogDensity = Arc::new(|x: &[f64]| -(x[0] + x[1]).abs());
    let flags = crate::measures::MeasureFlags {
        even: true,
        unconditional: false,
        log_concave_declared: true,
    };
    let mu = LogConcaveMeasure::custom(2, f, flags, AxisBox::symmetric(&[3.0, 3.0])).unwrap();
    assert!(matches!(
        v.main(&mu, &cube2(), "c"),
        Err(VerifyError::Precondition(_))
    ));
}

#[test]
fn pairing_bound_examples() {
    let v = Verifier::default();
    // Equality at x = (1, 1), y = (1/2, 1/2).
    let r = v.pairing_bound_polytope(&cube2(), 100, 0, "cube").unwrap();
    assert!(r.passed);
    assert!((r.lhs.value - 1.0).abs() < 1e-12);
    let r = v
        .pairing_bound_polytope(&diamond2(), 10_000, 1, "diamond")
        .unwrap();
    assert!(r.passed && r.lhs.value <= 1.0 + 1e-9);
    let ball = BodyOracle::ball(2, 1.0);
    let r = v
        .pairing_bound(&ball, &ball, None, 10_000, 2, "ball")
        .unwrap();
    assert!(r.passed);
    assert!(v
        .pairing_bound_polytope(&sheared_cube(), 10, 0, "s")
        .is_err());
}

#[test]
fn meyer_pajor_examples() {
    let v = Verifier::default();
    let r = v
        .meyer_pajor(&sheared_cube(), 0, 0.0, 10_000, 3, "sheared")
        .unwrap();
    assert!(r.passed, "{r}");
    let r = v.meyer_pajor(&cube2(), 1, 0.4, 1000, 4, "cube").unwrap();
    assert!(r.passed);
    let extent = sheared_cube()
        .polar_hpolytope()
        .unwrap()
        .enclosing_box()
        .unwrap()
        .hi[0];
    let r = v
        .meyer_pajor(&sheared_cube(), 0, 0.99 * extent, 1000, 5, "sheared")
        .unwrap();
    assert!(r.passed);
    let r = v
        .meyer_pajor(&sheared_cube(), 0, 1.5 * extent, 10, 5, "sheared")
        .unwrap();
    assert!(r.passed && r.context.note.as_deref().unwrap().ends_with("vacuous"));
}

#[test]
fn gm_membership_examples() {
    let v = Verifier::default();
    let (c, d) = (cube2(), diamond2());
    let m = v.gm_membership(&c, &c, &[0.3, -0.9]).unwrap();
    assert!(m.member && m.value <= 0.9 + 1e-9);
    assert!(v.gm_membership(&c, &d, &[0.70, 0.70]).unwrap().member);
    assert!(!v.gm_membership(&c, &d, &[0.72, 0.72]).unwrap().member);
    let m = v.gm_membership(&c, &d, &[0.70, 0.70]).unwrap();
    let (x, y) = &m.witness;
    assert!(c.gauge(x).unwrap() <= 1.0 + 1e-6 && d.gauge(y).unwrap() <= 1.0 + 1e-6);
    for i in 0..2 {
        assert!(((x[i] * y[i]).sqrt() - 0.70).abs() < 1e-12);
    }
    // A polytope against its polar: members stay in the Euclidean ball.
    let k = crate::symmetrize::unconditionalize(
        &random_symmetric_polytope::<f64>(2, 4, 8)
            .unwrap()
            .to_hpolytope()
            .unwrap(),
    )
    .unwrap();
    let kp = k.polar_hpolytope().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..200 {
        let z: Vec<f64> = (0..2).map(|_| rng.random_range(-1.2..1.2)).collect();
        let m = v.gm_membership(&k, &kp, &z).unwrap();
        if m.member {
            assert!(z.iter().map(|t| t * t).sum::<f64>().sqrt() <= 1.0 + 1e-6);
        }
    }
}

#[test]
fn geometric_mean_examples() {
    let v = Verifier::default();
    let c = Arc::new(cube2());
    let r = v
        .geometric_mean_product(&gaussian2(), &c, &c, "cube,cube")
        .unwrap();
    assert!(r.passed && r.margin.abs() <= r.slack, "{r}");
    let r = v
        .geometric_mean_product(&gaussian2(), &c, &Arc::new(diamond2()), "cube,diamond")
        .unwrap();
    assert!(r.passed, "{r}");
    let leb = LogConcaveMeasure::lebesgue_box(&AxisBox::symmetric(&[3.0, 3.0])).unwrap();
    let r = v
        .geometric_mean_product(
            &leb,
            &c,
            &Arc::new(HPolytope::cube(2, 2.0).unwrap()),
            "cube,2cube",
        )
        .unwrap();
    assert!((r.lhs.value - 64.0).abs() < 1e-12);
    assert!(r.passed && r.margin.abs() <= r.slack, "{r}");
}

#[test]
fn ball_logconcavity_examples() {
    let v = Verifier::default();
    let grid = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let all = v.ball_logconcavity_all(&gaussian2(), &grid).unwrap();
    assert_eq!(all.len(), 3);
    assert!(all.iter().all(|r| r.passed));
    let logs = v.log_ball_masses(&gaussian2(), &grid).unwrap();
    for (t, l) in grid.iter().zip(&logs) {
        let want = (-(-(2.0 * t).exp() / 2.0).exp_m1()).ln();
        assert!((l.value - want).abs() < 1e-12);
    }
    let leb = LogConcaveMeasure::lebesgue_box(&AxisBox::symmetric(&[3.0, 3.0])).unwrap();
    for r in v.ball_logconcavity_all(&leb, &grid).unwrap() {
        assert!(r.passed && r.margin.abs() <= 1e-12);
    }
    let e = LogConcaveMeasure::product_exponential(&[1.0, 1.0]).unwrap();
    assert!(v.ball_logconcavity(&e, &grid).unwrap().passed);
    assert!(v.ball_logconcavity(&e, &[0.0, 1.0, 3.0]).is_err());
}

#[test]
fn cache_reuses_values() {
    let v = Verifier::default();
    let a = v.measure(&gaussian2(), &diamond2()).unwrap();
    let b = v.measure(&gaussian2(), &diamond2()).unwrap();
    assert_eq!(a, b);
    assert_eq!(v.cache.lock().unwrap().len(), 1);
}
