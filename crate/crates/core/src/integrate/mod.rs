//! Exact polytope volume, Fubini quadrature and Monte Carlo estimates of
//! `μ(K)`.

pub mod gauss;
mod mc;

use std::f64::consts::PI;

pub use mc::{measure_mc, measure_mc_with, MonteCarlo};

use crate::bodies::{Body, HPolytope, Section, VPolytope};
use crate::error::{GeometryError, MeasureError};
use crate::measures::{LogConcaveMeasure, MeasureKind};
use gauss::integrate_pieces;

/// How an estimate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Exact,
    Quadrature,
    MonteCarlo,
}

/// A nonnegative value with an absolute error: zero for exact values, an
/// accumulated truncation bound for quadrature, one standard error for Monte
/// Carlo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    pub value: f64,
    pub err: f64,
    pub method: Method,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
}

impl VolumeEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            err: 0.0,
            method: Method::Exact,
            samples: None,
            seed: None,
        }
    }

    pub fn quadrature(value: f64, err: f64) -> Self {
        Self {
            value: value.max(0.0),
            err,
            method: Method::Quadrature,
            samples: None,
            seed: None,
        }
    }

    /// Product with relative errors added.
    pub fn times(&self, other: &Self) -> Self {
        let value = self.value * other.value;
        let err = self.err * other.value + other.err * self.value + self.err * other.err;
        let method = self.method.max(other.method);
        Self {
            value,
            err,
            method,
            samples: self.samples.or(other.samples),
            seed: self.seed.or(other.seed),
        }
    }

    pub fn relative_err(&self) -> f64 {
        if self.value > 0.0 {
            self.err / self.value
        } else {
            f64::INFINITY
        }
    }
}

/// Lebesgue volume of an H-polytope by the recursive facet formula.
pub fn volume_exact(h: &HPolytope<f64>) -> VolumeEstimate {
    VolumeEstimate::exact(h.volume())
}

/// Lebesgue volume of a V-polytope, through its facet description.
pub fn volume_exact_v(v: &VPolytope<f64>) -> Result<VolumeEstimate, GeometryError> {
    Ok(VolumeEstimate::exact(v.volume()?))
}

/// Volume `κ_n` of the Euclidean unit ball, from `κ_n = κ_{n-2} 2π/n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}

/// `μ(rB)` from the radial structure of the measure: isotropic Gaussians and
/// Lebesgue boxes containing the ball.
pub fn ball_measure_radial(mu: &LogConcaveMeasure, r: f64) -> Result<VolumeEstimate, MeasureError> {
    let n = mu.dim();
    if !(r >= 0.0) {
        return Err(MeasureError::NonPositiveParameter { index: 0, value: r });
    }
    if let Some(sigma) = mu.isotropic_sigma() {
        if n == 2 {
            return Ok(VolumeEstimate::exact(
                -(-r * r / (2.0 * sigma * sigma)).exp_m1(),
            ));
        }
        let surface = n as f64 * unit_ball_volume(n);
        let norm = (2.0 * PI * sigma * sigma).powf(-(n as f64) / 2.0);
        let q = gauss::integrate(
            |s| surface * s.powi(n as i32 - 1) * (-s * s / (2.0 * sigma * sigma)).exp() * norm,
            0.0,
            r,
            1e-13,
            1e-15,
        );
        return Ok(VolumeEstimate {
            value: q.value,
            err: q.err,
            method: Method::Quadrature,
            samples: None,
            seed: None,
        });
    }
    if let MeasureKind::LebesgueBox { half_widths } = mu.kind() {
        if half_widths.iter().all(|&h| h >= r) {
            return Ok(VolumeEstimate::exact(
                unit_ball_volume(n) * r.powi(n as i32),
            ));
        }
    }
    Err(MeasureError::Unsupported(
        "no radial formula for this measure and radius",
    ))
}

struct Fubini<'a, B: Body + ?Sized> {
    mu: &'a LogConcaveMeasure,
    body: &'a B,
    lo: Vec<f64>,
    hi: Vec<f64>,
    outer: Vec<usize>,
    inner: usize,
    tol: f64,
    /// Integrate the outermost axis over its positive half and double.
    fold: bool,
    converged: bool,
}

const ABS_FLOOR: f64 = 1e-15;

impl<B: Body + ?Sized> Fubini<'_, B> {
    fn level(&mut self, k: usize, fixed: &mut [Option<f64>], point: &mut [f64]) -> (f64, f64) {
        if k == self.outer.len() {
            let Some((a, b)) = self.body.fiber(self.inner, point) else {
                return (0.0, 0.0);
            };
            let (a, b) = (a.max(self.lo[self.inner]), b.min(self.hi[self.inner]));
            return self.mu.fiber_mass(self.inner, point, a, b, self.tol * 1e-3);
        }
        let axis = self.outer[k];
        let (mut lo, hi) = (self.lo[axis], self.hi[axis]);
        if k == 0 && self.fold {
            lo = 0.0;
        }
        let mut breaks = vec![lo, hi];
        if lo < 0.0 && hi > 0.0 {
            breaks.push(0.0);
        }
        match self.body.section(axis, fixed) {
            Section::Empty => return (0.0, 0.0),
            Section::Unknown => {}
            Section::Breaks(b) => {
                let (first, last) = (b[0], b[b.len() - 1]);
                breaks.retain(|&t| t >= first && t <= last);
                breaks.extend(b.into_iter().filter(|&t| t > lo && t < hi));
                breaks.push(first.max(lo));
                breaks.push(last.min(hi));
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        if breaks.len() < 2 {
            return (0.0, 0.0);
        }
        let tol = self.tol;
        let mut converged = true;
        let q = {
            let this = &mut *self;
            integrate_pieces(
                |t| {
                    fixed[axis] = Some(t);
                    point[axis] = t;
                    this.level(k + 1, fixed, point)
                },
                &breaks,
                tol,
                ABS_FLOOR,
            )
        };
        converged &= q.converged;
        self.converged &= converged;
        fixed[axis] = None;
        point[axis] = 0.0;
        if k == 0 && self.fold {
            (2.0 * q.value, 2.0 * q.err)
        } else {
            (q.value, q.err)
        }
    }
}

/// `μ(K)` by nested adaptive quadrature.
///
/// The innermost axis is the one with the largest extent and is integrated
/// in closed form over the body's exact fiber, so the indicator of the body
/// never enters a quadrature rule. Outer axes use adaptive 15-point
/// Gauss–Legendre panels split at the body's section breakpoints.
pub fn measure_quadrature<B: Body + ?Sized>(
    mu: &LogConcaveMeasure,
    body: &B,
    tol: f64,
) -> Result<VolumeEstimate, MeasureError> {
    let n = mu.dim();
    if body.dim() != n {
        return Err(MeasureError::DimensionMismatch {
            expected: n,
            got: body.dim(),
        });
    }
    if n > 4 {
        return Err(MeasureError::Unsupported(
            "quadrature supports dimension at most 4",
        ));
    }
    let mut region = body.bounding_box();
    if let Some(s) = mu.support_box() {
        region = region.intersect(&s);
    }
    if (0..n).any(|i| !(region.hi[i] > region.lo[i])) {
        return Ok(VolumeEstimate::quadrature(0.0, 0.0));
    }
    let inner = (0..n)
        .max_by(|&a, &b| {
            region
                .extent(a)
                .total_cmp(&region.extent(b))
                .then(b.cmp(&a))
        })
        .expect("dim >= 1");
    let outer: Vec<usize> = (0..n).filter(|&i| i != inner).collect();
    let fold = !outer.is_empty()
        && body.is_symmetric()
        && mu.flags().even
        && (0..n).all(|i| region.lo[i] == -region.hi[i]);
    let mut f = Fubini {
        mu,
        body,
        lo: region.lo.clone(),
        hi: region.hi.clone(),
        outer,
        inner,
        tol,
        fold,
        converged: true,
    };
    let mut fixed = vec![None; n];
    let mut point = vec![0.0; n];
    let (value, err) = f.level(0, &mut fixed, &mut point);
    if !f.converged {
        log::warn!("quadrature did not reach tolerance {tol} everywhere; value {value} ± {err}");
    }
    Ok(VolumeEstimate::quadrature(value, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{AxisBox, BodyOracle};

    fn phi(x: f64) -> f64 {
        0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
    }

    #[test]
    fn exact_volumes() {
        assert_eq!(volume_exact(&HPolytope::cube(2, 1.0).unwrap()).value, 4.0);
        assert!(
            (volume_exact(&HPolytope::cross_polytope(2, 1.0).unwrap()).value - 2.0).abs() < 1e-15
        );
        assert!(
            (volume_exact(&HPolytope::cross_polytope(3, 1.0).unwrap()).value - 4.0 / 3.0).abs()
                < 1e-15
        );
        let v = VPolytope::new(
            2,
            vec![
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
        )
        .unwrap();
        assert!((volume_exact_v(&v).unwrap().value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ball_volumes_by_recursion() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn radial_formulas() {
        let g2 = LogConcaveMeasure::gaussian(&[1.0, 1.0]).unwrap();
        assert!(
            (ball_measure_radial(&g2, 1.0).unwrap().value - (1.0 - (-0.5f64).exp())).abs() < 1e-16
        );
        // n = 3: P(chi_3 <= 1) = erf(1/√2) - √(2/π) e^{-1/2}.
        let g3 = LogConcaveMeasure::gaussian(&[1.0; 3]).unwrap();
        let est = ball_measure_radial(&g3, 1.0).unwrap();
        let want = libm::erf(1.0 / std::f64::consts::SQRT_2) - (2.0 / PI).sqrt() * (-0.5f64).exp();
        assert!((est.value - want).abs() < 1e-12 && est.err <= 1e-10);
        let l = LogConcaveMeasure::lebesgue_box(&AxisBox::symmetric(&[2.0, 2.0])).unwrap();
        assert!((ball_measure_radial(&l, 1.0).unwrap().value - PI).abs() < 1e-15);
        assert!(ball_measure_radial(&l, 3.0).is_err());
        let e = LogConcaveMeasure::product_exponential(&[1.0, 1.0]).unwrap();
        assert!(ball_measure_radial(&e, 1.0).is_err());
    }

    #[test]
    fn quadrature_of_known_areas() {
        let leb = LogConcaveMeasure::lebesgue_box(&AxisBox::symmetric(&[3.0, 3.0])).unwrap();
        let d = HPolytope::cross_polytope(2, 1.0).unwrap();
        let q = measure_quadrature(&leb, &d, 1e-6).unwrap();
        assert!((q.value - 2.0).abs() <= 2e-6, "{q:?}");
        let ball = BodyOracle::ball(2, 1.0);
        let q = measure_quadrature(&leb, &ball, 1e-6).unwrap();
        assert!((q.value - PI).abs() <= 3e-6, "{q:?}");
        assert!((q.value - PI).abs() <= q.err.max(1e-12));
    }

    #[test]
    fn gaussian_cube_matches_error_function() {
        let g = LogConcaveMeasure::gaussian(&[1.0, 1.0]).unwrap();
        let c = HPolytope::cube(2, 1.0).unwrap();
        let q = measure_quadrature(&g, &c, 1e-6).unwrap();
        let want = (2.0 * phi(1.0) - 1.0).powi(2);
        assert!((q.value - want).abs() <= 1e-9, "{} vs {want}", q.value);
        assert!((want - 0.46607).abs() < 1e-5);
    }

    #[test]
    fn quadrature_matches_exact_volume_in_three_dimensions() {
        let leb = LogConcaveMeasure::lebesgue_box(&AxisBox::symmetric(&[3.0; 3])).unwrap();
        for seed in 0..5 {
            let k = crate::bodies::random_symmetric_polytope::<f64>(3, 6, seed)
                .unwrap()
                .to_hpolytope()
                .unwrap();
            let q = measure_quadrature(&leb, &k, 1e-6).unwrap();
            let v = k.volume();
            assert!(
                (q.value - v).abs() <= (1e-9f64).max(1e-6 * v),
                "{} vs {v}",
                q.value
            );
        }
    }

    #[test]
    fn product_exponential_cube() {
        let m = LogConcaveMeasure::product_exponential(&[1.0, 1.0]).unwrap();
        let c = HPolytope::cube(2, 1.0).unwrap();
        let q = measure_quadrature(&m, &c, 1e-6).unwrap();
        assert!((q.value - (1.0 - (-1f64).exp()).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn product_error_propagation() {
        let a = VolumeEstimate::quadrature(2.0, 0.02);
        let b = VolumeEstimate::quadrature(4.0, 0.04);
        let p = a.times(&b);
        assert_eq!(p.value, 8.0);
        assert!((p.relative_err() - (0.01 + 0.01 + 0.0001)).abs() < 1e-15);
    }
}
