//! Log-concave measures on ℝⁿ with closed-form fiber masses where available.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::bodies::{check_dim, AxisBox, Body, HPolytope};
use crate::error::MeasureError;
use crate::integrate::gauss::integrate;

pub type LogDensity = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Structural properties a measure declares about its density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MeasureFlags {
    pub even: bool,
    pub unconditional: bool,
    pub log_concave_declared: bool,
}

impl MeasureFlags {
    pub const UNCONDITIONAL: Self = Self {
        even: true,
        unconditional: true,
        log_concave_declared: true,
    };
}

#[derive(Clone)]
pub enum MeasureKind {
    Gaussian {
        sigma: Vec<f64>,
    },
    ProductExponential {
        lambda: Vec<f64>,
    },
    LebesgueBox {
        half_widths: Vec<f64>,
    },
    UniformBody {
        body: Arc<HPolytope<f64>>,
        bbox: AxisBox<f64>,
    },
    Custom {
        log_density: LogDensity,
        bbox: AxisBox<f64>,
    },
}

/// Outcome of the sampled structural checks on a custom density.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Validation {
    pub pairs_checked: usize,
    pub midpoint_violations: usize,
    pub flip_violations: usize,
    pub warnings: Vec<String>,
}

impl Validation {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// A measure `f(x) dx` stored through `log f`.
#[derive(Clone)]
pub struct LogConcaveMeasure {
    dim: usize,
    flags: MeasureFlags,
    kind: MeasureKind,
    id: String,
    validation: Option<Validation>,
}

impl fmt::Debug for LogConcaveMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LogConcaveMeasure")
            .field("id", &self.id)
            .field("dim", &self.dim)
            .field("flags", &self.flags)
            .finish()
    }
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn check_params(dim: usize, params: &[f64]) -> Result<(), MeasureError> {
    check_dim(dim)?;
    if params.len() != dim {
        return Err(MeasureError::DimensionMismatch {
            expected: dim,
            got: params.len(),
        });
    }
    for (index, &value) in params.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(MeasureError::NonPositiveParameter { index, value });
        }
    }
    Ok(())
}

/// `P(lo <= X <= hi)` for `X ~ N(0, sigma²)`, using `erfc` on one-sided
/// intervals to keep tail differences accurate.
fn normal_mass(lo: f64, hi: f64, sigma: f64) -> f64 {
    let s = sigma * SQRT_2;
    let (a, b) = (lo / s, hi / s);
    let m = if a >= 0.0 {
        0.5 * (libm::erfc(a) - libm::erfc(b))
    } else if b <= 0.0 {
        0.5 * (libm::erfc(-b) - libm::erfc(-a))
    } else {
        0.5 * (libm::erf(b) - libm::erf(a))
    };
    m.max(0.0)
}

/// Mass of `[lo, hi]` under the two-sided exponential with rate `lambda`.
fn laplace_mass(lo: f64, hi: f64, lambda: f64) -> f64 {
    let m = if lo >= 0.0 {
        0.5 * ((-lambda * lo).exp() - (-lambda * hi).exp())
    } else if hi <= 0.0 {
        0.5 * ((lambda * hi).exp() - (lambda * lo).exp())
    } else {
        1.0 - 0.5 * (lambda * lo).exp() - 0.5 * (-lambda * hi).exp()
    };
    m.max(0.0)
}

impl LogConcaveMeasure {
    /// Centered Gaussian with independent coordinates of deviation `sigma`.
    pub fn gaussian(sigma: &[f64]) -> Result<Self, MeasureError> {
        check_params(sigma.len(), sigma)?;
        Ok(Self {
            dim: sigma.len(),
            flags: MeasureFlags::UNCONDITIONAL,
            id: format!("gaussian({})", join(sigma)),
            kind: MeasureKind::Gaussian {
                sigma: sigma.to_vec(),
            },
            validation: None,
        })
    }

    /// Product of two-sided exponentials `(λ/2) e^{-λ|x|}`.
    pub fn product_exponential(lambda: &[f64]) -> Result<Self, MeasureError> {
        check_params(lambda.len(), lambda)?;
        Ok(Self {
            dim: lambda.len(),
            flags: MeasureFlags::UNCONDITIONAL,
            id: format!("product_exponential({})", join(lambda)),
            kind: MeasureKind::ProductExponential {
                lambda: lambda.to_vec(),
            },
            validation: None,
        })
    }

    /// Lebesgue measure restricted to the box `[lo_i, hi_i]`, which must be
    /// centered at the origin.
    pub fn lebesgue_box(bx: &AxisBox<f64>) -> Result<Self, MeasureError> {
        for i in 0..bx.dim() {
            if bx.lo[i] != -bx.hi[i] {
                return Err(MeasureError::AsymmetricBox(i));
            }
        }
        check_params(bx.dim(), &bx.hi)?;
        Ok(Self {
            dim: bx.dim(),
            flags: MeasureFlags::UNCONDITIONAL,
            id: format!("lebesgue_box({})", join(&bx.hi)),
            kind: MeasureKind::LebesgueBox {
                half_widths: bx.hi.clone(),
            },
            validation: None,
        })
    }

    /// Uniform (unnormalized) measure on an unconditional polytope.
    pub fn uniform_on_body(body: Arc<HPolytope<f64>>) -> Result<Self, MeasureError> {
        if !body.is_unconditional() {
            return Err(crate::error::GeometryError::NotUnconditional.into());
        }
        let bbox = body.enclosing_box()?;
        Ok(Self {
            dim: body.dim(),
            flags: MeasureFlags::UNCONDITIONAL,
            id: format!("uniform_body({:016x})", body.fingerprint()),
            kind: MeasureKind::UniformBody { body, bbox },
            validation: None,
        })
    }

    /// Measure from a caller-supplied log-density, supported in `bbox`.
    /// Declared flags are checked on random samples; failures become
    /// warnings in [`validation`](Self::validation), never errors.
    pub fn custom(
        dim: usize,
        log_density: LogDensity,
        flags: MeasureFlags,
        bbox: AxisBox<f64>,
    ) -> Result<Self, MeasureError> {
        check_dim(dim)?;
        if bbox.dim() != dim {
            return Err(MeasureError::DimensionMismatch {
                expected: dim,
                got: bbox.dim(),
            });
        }
        if flags.unconditional && !flags.even {
            return Err(MeasureError::InconsistentFlags);
        }
        let mut m = Self {
            dim,
            flags,
            id: "custom".to_string(),
            kind: MeasureKind::Custom { log_density, bbox },
            validation: None,
        };
        let v = m.validate(1000, 0);
        for w in &v.warnings {
            log::warn!("custom measure: {w}");
        }
        m.validation = Some(v);
        Ok(m)
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn flags(&self) -> MeasureFlags {
        self.flags
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn validation(&self) -> Option<&Validation> {
        self.validation.as_ref()
    }

    /// `log f(x)`, `-inf` outside the support.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        match &self.kind {
            MeasureKind::Gaussian { sigma } => x
                .iter()
                .zip(sigma)
                .map(|(&xi, &s)| -xi * xi / (2.0 * s * s) - (s * (2.0 * PI).sqrt()).ln())
                .sum(),
            MeasureKind::ProductExponential { lambda } => x
                .iter()
                .zip(lambda)
                .map(|(&xi, &l)| -l * xi.abs() + (l / 2.0).ln())
                .sum(),
            MeasureKind::LebesgueBox { half_widths } => {
                if x.iter().zip(half_widths).all(|(xi, h)| xi.abs() <= *h) {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            MeasureKind::UniformBody { body, .. } => {
                if body.contains(x) {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            MeasureKind::Custom { log_density, bbox } => {
                if bbox.contains(x) {
                    log_density(x)
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        self.log_density(x).exp()
    }

    /// Total mass for finite built-ins; unknown for custom densities.
    pub fn total_mass(&self) -> Option<f64> {
        match &self.kind {
            MeasureKind::Gaussian { .. } | MeasureKind::ProductExponential { .. } => Some(1.0),
            MeasureKind::LebesgueBox { half_widths } => {
                Some(half_widths.iter().map(|h| 2.0 * h).product())
            }
            MeasureKind::UniformBody { body, .. } => Some(body.volume()),
            MeasureKind::Custom { .. } => None,
        }
    }

    /// Box outside which the density vanishes, when compactly supported.
    pub fn support_box(&self) -> Option<AxisBox<f64>> {
        match &self.kind {
            MeasureKind::Gaussian { .. } | MeasureKind::ProductExponential { .. } => None,
            MeasureKind::LebesgueBox { half_widths } => Some(AxisBox::symmetric(half_widths)),
            MeasureKind::UniformBody { bbox, .. } | MeasureKind::Custom { bbox, .. } => {
                Some(bbox.clone())
            }
        }
    }

    /// Isotropic Gaussian deviation, when the measure is one.
    pub fn isotropic_sigma(&self) -> Option<f64> {
        match &self.kind {
            MeasureKind::Gaussian { sigma } if sigma.iter().all(|s| *s == sigma[0]) => {
                Some(sigma[0])
            }
            _ => None,
        }
    }

    pub fn has_sampler(&self) -> bool {
        !matches!(self.kind, MeasureKind::Custom { .. })
    }

    /// One draw from the normalized measure.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>, MeasureError> {
        let mut x = vec![0.0; self.dim];
        self.sample_into(rng, &mut x)?;
        Ok(x)
    }

    pub fn sample_into<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        x: &mut [f64],
    ) -> Result<(), MeasureError> {
        match &self.kind {
            MeasureKind::Gaussian { sigma } => {
                for (xi, s) in x.iter_mut().zip(sigma) {
                    let z: f64 = StandardNormal.sample(rng);
                    *xi = s * z;
                }
            }
            MeasureKind::ProductExponential { lambda } => {
                for (xi, &l) in x.iter_mut().zip(lambda) {
                    let e = Exp::new(l).expect("positive rate").sample(rng);
                    *xi = if rng.random::<bool>() { e } else { -e };
                }
            }
            MeasureKind::LebesgueBox { half_widths } => {
                for (xi, h) in x.iter_mut().zip(half_widths) {
                    *xi = rng.random_range(-h..=*h);
                }
            }
            MeasureKind::UniformBody { body, bbox } => loop {
                for (i, xi) in x.iter_mut().enumerate() {
                    *xi = rng.random_range(bbox.lo[i]..=bbox.hi[i]);
                }
                if body.contains(x) {
                    break;
                }
            },
            MeasureKind::Custom { .. } => return Err(MeasureError::MissingSampler),
        }
        Ok(())
    }

    /// Density contribution of every coordinate except `axis` at `point`.
    fn transverse_density(&self, axis: usize, point: &[f64]) -> f64 {
        match &self.kind {
            MeasureKind::Gaussian { sigma } => {
                let mut log = 0.0;
                for (l, (&x, &s)) in point.iter().zip(sigma).enumerate() {
                    if l != axis {
                        log -= x * x / (2.0 * s * s) + (s * (2.0 * PI).sqrt()).ln();
                    }
                }
                log.exp()
            }
            MeasureKind::ProductExponential { lambda } => {
                let mut log = 0.0;
                for (l, (&x, &r)) in point.iter().zip(lambda).enumerate() {
                    if l != axis {
                        log += -r * x.abs() + (r / 2.0).ln();
                    }
                }
                log.exp()
            }
            MeasureKind::LebesgueBox { half_widths } => {
                let inside = point
                    .iter()
                    .zip(half_widths)
                    .enumerate()
                    .all(|(l, (x, h))| l == axis || x.abs() <= *h);
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
            _ => 1.0,
        }
    }

    /// `∫_lo^hi f(point + t e_axis) dt` with `point[axis]` ignored.
    /// Closed form for the product built-ins; adaptive quadrature at
    /// relative tolerance `tol` otherwise. Returns the value and an error
    /// bound.
    pub fn fiber_mass(&self, axis: usize, point: &[f64], lo: f64, hi: f64, tol: f64) -> (f64, f64) {
        if !(hi > lo) {
            return (0.0, 0.0);
        }
        let closed = match &self.kind {
            MeasureKind::Gaussian { sigma } => Some(normal_mass(lo, hi, sigma[axis])),
            MeasureKind::ProductExponential { lambda } => Some(laplace_mass(lo, hi, lambda[axis])),
            MeasureKind::LebesgueBox { half_widths } => {
                let h = half_widths[axis];
                Some((hi.min(h) - lo.max(-h)).max(0.0))
            }
            MeasureKind::UniformBody { body, .. } => Some(match body.fiber(axis, point) {
                Some((a, b)) => (hi.min(b) - lo.max(a)).max(0.0),
                None => 0.0,
            }),
            MeasureKind::Custom { .. } => None,
        };
        if let Some(m) = closed {
            return (self.transverse_density(axis, point) * m, 0.0);
        }
        let (mut a, mut b) = (lo, hi);
        if let Some(bx) = self.support_box() {
            a = a.max(bx.lo[axis]);
            b = b.min(bx.hi[axis]);
            if !(b > a) {
                return (0.0, 0.0);
            }
        }
        let mut x = point.to_vec();
        let q = integrate(
            |t| {
                x[axis] = t;
                self.density(&x)
            },
            a,
            b,
            tol,
            1e-300,
        );
        (q.value, q.err)
    }

    /// Samples `samples` random pairs and points from the support box and
    /// checks midpoint log-concavity and the declared symmetries.
    pub fn validate(&self, samples: usize, seed: u64) -> Validation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bx = self
            .support_box()
            .unwrap_or_else(|| AxisBox::symmetric(&vec![5.0; self.dim]));
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..self.dim)
                .map(|i| rng.random_range(bx.lo[i]..=bx.hi[i]))
                .collect()
        };
        let mut v = Validation::default();
        for _ in 0..samples {
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            let (fx, fy) = (self.log_density(&x), self.log_density(&y));
            if fx.is_finite() && fy.is_finite() {
                v.pairs_checked += 1;
                let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
                if self.log_density(&mid) < 0.5 * (fx + fy) - 1e-9 {
                    v.midpoint_violations += 1;
                }
            }
            if self.flags.unconditional || self.flags.even {
                let mask: u32 = if self.flags.unconditional {
                    rng.random_range(0..(1u32 << self.dim))
                } else {
                    (1u32 << self.dim) - 1
                };
                let flipped: Vec<f64> = x
                    .iter()
                    .enumerate()
                    .map(|(i, &xi)| if mask >> i & 1 == 1 { -xi } else { xi })
                    .collect();
                let fz = self.log_density(&flipped);
                let same = if fx.is_finite() {
                    (fx - fz).abs() <= 1e-12 * (1.0 + fx.abs())
                } else {
                    fx == fz
                };
                if !same {
                    v.flip_violations += 1;
                }
            }
        }
        if v.midpoint_violations > 0 {
            v.warnings.push(format!(
                "midpoint log-concavity failed on {} of {} pairs",
                v.midpoint_violations, v.pairs_checked
            ));
        }
        if v.flip_violations > 0 {
            v.warnings.push(format!(
                "declared symmetry failed on {} of {samples} points",
                v.flip_violations
            ));
        }
        v
    }

    /// The measure seen along the line `y + t e_axis`, where `y` lists the
    /// coordinates other than `axis`.
    pub fn restrict_fiber(&self, axis: usize, y: &[f64]) -> Result<FiberMeasure<'_>, MeasureError> {
        if axis >= self.dim {
            return Err(crate::error::GeometryError::AxisOutOfRange {
                axis,
                dim: self.dim,
            }
            .into());
        }
        if y.len() + 1 != self.dim {
            return Err(MeasureError::DimensionMismatch {
                expected: self.dim - 1,
                got: y.len(),
            });
        }
        let mut base = Vec::with_capacity(self.dim);
        base.extend_from_slice(&y[..axis]);
        base.push(0.0);
        base.extend_from_slice(&y[axis..]);
        Ok(FiberMeasure {
            measure: self,
            axis,
            base,
        })
    }

    /// `μ(K)` is meaningful for this body: finite measures always, otherwise
    /// the support box must contain the body.
    pub fn covers<B: Body + ?Sized>(&self, body: &B) -> bool {
        match self.support_box() {
            Some(bx) => bx.contains_box(&body.bounding_box()),
            None => true,
        }
    }
}

/// One-dimensional restriction of a measure to a coordinate line.
#[derive(Debug, Clone)]
pub struct FiberMeasure<'a> {
    measure: &'a LogConcaveMeasure,
    axis: usize,
    base: Vec<f64>,
}

impl FiberMeasure<'_> {
    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn base_point(&self) -> &[f64] {
        &self.base
    }

    pub fn log_density(&self, t: f64) -> f64 {
        let mut x = self.base.clone();
        x[self.axis] = t;
        self.measure.log_density(&x)
    }

    /// Mass of `[lo, hi]` with an error bound.
    pub fn mass(&self, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
        self.measure.fiber_mass(self.axis, &self.base, lo, hi, tol)
    }

    /// `log f(t) == log f(-t)` on the given points, to `1e-12`.
    pub fn is_even_on(&self, ts: &[f64]) -> bool {
        ts.iter().all(|&t| {
            let (a, b) = (self.log_density(t), self.log_density(-t));
            a == b || (a - b).abs() <= 1e-12 * (1.0 + a.abs())
        })
    }
}
