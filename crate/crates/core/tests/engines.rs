use santalo_core::integrate::{measure_mc, measure_quadrature};
use santalo_core::measures::LogConcaveMeasure;
use santalo_core::{AxisBox, HPolytope};

/// `μ([-h, h]^n)` in closed form for each built-in measure.
fn cube_mass(mu: &LogConcaveMeasure, n: usize, h: f64) -> f64 {
    let id = mu.id();
    if id.starts_with("gaussian") {
        libm::erf(h / std::f64::consts::SQRT_2).powi(n as i32)
    } else if id.starts_with("product_exponential") {
        (-(-h).exp_m1()).powi(n as i32)
    } else {
        (2.0 * h.min(3.0)).powi(n as i32)
    }
}

fn builtins(n: usize) -> Vec<LogConcaveMeasure> {
    vec![
        LogConcaveMeasure::gaussian(&vec![1.0; n]).unwrap(),
        LogConcaveMeasure::product_exponential(&vec![1.0; n]).unwrap(),
        LogConcaveMeasure::lebesgue_box(&AxisBox::symmetric(&vec![3.0; n])).unwrap(),
    ]
}

#[test]
fn samplers_reproduce_closed_form_cube_masses() {
    for n in [1, 2, 3] {
        for mu in builtins(n) {
            for (i, h) in [0.3, 1.0, 2.5].into_iter().enumerate() {
                let cube = HPolytope::cube(n, h).unwrap();
                let want = cube_mass(&mu, n, h);
                let got = measure_mc(&mu, &cube, 200_000, 31 + i as u64).unwrap();
                assert!(
                    (got.value - want).abs() <= 4.0 * got.err + 1e-12,
                    "{} n={n} h={h}: {} ± {:e} vs {want}",
                    mu.id(),
                    got.value,
                    got.err
                );
            }
        }
    }
}

#[test]
fn quadrature_reproduces_closed_form_cube_masses() {
    for n in [1, 2, 3, 4] {
        for mu in builtins(n) {
            for h in [0.3, 1.0, 2.5] {
                let cube = HPolytope::cube(n, h).unwrap();
                let want = cube_mass(&mu, n, h);
                let got = measure_quadrature(&mu, &cube, 1e-10).unwrap();
                assert!(
                    (got.value - want).abs() <= 1e-9 * want,
                    "{} n={n} h={h}: {} vs {want}",
                    mu.id(),
                    got.value
                );
                assert!(
                    (got.value - want).abs() <= got.err + 4.0 * f64::EPSILON * want,
                    "{} n={n} h={h}: error estimate {:e} too small",
                    mu.id(),
                    got.err
                );
            }
        }
    }
}
