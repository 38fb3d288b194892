//! Volume products and numerical certification of the inequalities relating
//! them, one [`VerificationReport`] per comparison.

mod report;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

pub use report::{InequalityId, ReportContext, VerificationReport, CSV_HEADER};

use crate::bodies::{Body, BodyOracle, HPolytope, Slice};
use crate::error::{GeometryError, MeasureError};
use crate::integrate::{
    ball_measure_radial, measure_quadrature, unit_ball_volume, Method, VolumeEstimate,
};
use crate::measures::LogConcaveMeasure;
use crate::symmetrize::{steiner, unconditionalize_steps};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("precondition failed: {0}")]
    Precondition(&'static str),
}

/// Membership test for slice midpoints, encoded as the lhs error so that the
/// report slack absorbs it.
const MEYER_PAJOR_TOL: f64 = 1e-7;
const GM_MEMBER_TOL: f64 = 1e-6;

/// Which measure a volume product uses.
#[derive(Debug, Clone, Copy)]
pub enum ProductMeasure<'a> {
    Lebesgue,
    /// Lebesgue measure restricted to a body `L`.
    Restricted(&'a HPolytope<f64>),
    Measure(&'a LogConcaveMeasure),
}

/// A product `a · b` with both factors kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Product {
    pub body: VolumeEstimate,
    pub polar: VolumeEstimate,
    pub value: VolumeEstimate,
}

/// Reports along the unconditionalization pipeline.
#[derive(Debug, Clone)]
pub struct ChainOutcome {
    pub reports: Vec<VerificationReport>,
    pub final_unconditional: bool,
}

/// Result of the geometric-mean membership search.
#[derive(Debug, Clone, PartialEq)]
pub struct GmMembership {
    pub member: bool,
    /// Smallest `max(‖x‖_K, ‖y‖_L)` found.
    pub value: f64,
    /// `(x, y)` with `|z_i| = √(|x_i| |y_i|)` realizing `value`.
    pub witness: (Vec<f64>, Vec<f64>),
}

/// Vertices of a body and of its polar.
pub type VertexLists<'a> = (&'a [Vec<f64>], &'a [Vec<f64>]);

/// Runs checks at fixed tolerances and caches `μ(K)` by body and measure.
#[derive(Debug)]
pub struct Verifier {
    pub quad_tol: f64,
    pub mc_samples: u64,
    /// Simplex iterations per geometric-mean search.
    pub gm_iters: usize,
    cache: Mutex<HashMap<(u64, String, u64), VolumeEstimate>>,
}

impl Default for Verifier {
    fn default() -> Self {
        Self::new(1e-6, 1_000_000)
    }
}

impl Clone for Verifier {
    fn clone(&self) -> Self {
        Self {
            gm_iters: self.gm_iters,
            ..Self::new(self.quad_tol, self.mc_samples)
        }
    }
}

fn context(n: usize, body_id: &str, measure_id: &str) -> ReportContext {
    ReportContext {
        n,
        body_id: body_id.to_string(),
        measure_id: measure_id.to_string(),
        seed: None,
        note: None,
    }
}

fn require_unconditional(mu: &LogConcaveMeasure) -> Result<(), VerifyError> {
    if mu.flags().unconditional {
        Ok(())
    } else {
        Err(VerifyError::Precondition("measure must be unconditional"))
    }
}

fn unit_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let d: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return d.into_iter().map(|v| v / norm).collect();
        }
    }
}

/// Uniform point of a bounded slice, by rejection from its vertex box.
fn sample_slice(
    verts: &[Vec<f64>],
    sys: &crate::bodies::HalfspaceSystem<f64>,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let d = sys.dim();
    let lo: Vec<f64> = (0..d)
        .map(|i| verts.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min))
        .collect();
    let hi: Vec<f64> = (0..d)
        .map(|i| verts.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    loop {
        let p: Vec<f64> = (0..d)
            .map(|i| {
                if hi[i] > lo[i] {
                    rng.random_range(lo[i]..=hi[i])
                } else {
                    lo[i]
                }
            })
            .collect();
        if sys.contains(&p, 0.0) {
            return p;
        }
    }
}

impl Verifier {
    pub fn new(quad_tol: f64, mc_samples: u64) -> Self {
        Self {
            quad_tol,
            mc_samples,
            gm_iters: 400,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// `μ(K)` by quadrature, cached.
    pub fn measure(
        &self,
        mu: &LogConcaveMeasure,
        k: &HPolytope<f64>,
    ) -> Result<VolumeEstimate, VerifyError> {
        let key = (
            k.fingerprint(),
            mu.id().to_string(),
            self.quad_tol.to_bits(),
        );
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let v = measure_quadrature(mu, k, self.quad_tol)?;
        self.cache.lock().expect("cache lock").insert(key, v);
        Ok(v)
    }

    /// `μ(rB)`: closed form where available, otherwise quadrature on the
    /// ball oracle.
    pub fn ball_measure(
        &self,
        mu: &LogConcaveMeasure,
        r: f64,
    ) -> Result<VolumeEstimate, VerifyError> {
        match ball_measure_radial(mu, r) {
            Ok(v) => Ok(v),
            Err(MeasureError::Unsupported(_)) => Ok(measure_quadrature(
                mu,
                &BodyOracle::ball(mu.dim(), r),
                self.quad_tol,
            )?),
            Err(e) => Err(e.into()),
        }
    }

    /// `|K| |K°|`, `|K ∩ L| |K° ∩ L|` or `μ(K) μ(K°)`.
    pub fn volume_product(
        &self,
        k: &HPolytope<f64>,
        measure: ProductMeasure<'_>,
    ) -> Result<Product, VerifyError> {
        if !k.is_symmetric() {
            return Err(VerifyError::Precondition("body must be symmetric"));
        }
        let polar = k.polar_hpolytope()?;
        let (body, polar) = match measure {
            ProductMeasure::Lebesgue => (
                VolumeEstimate::exact(k.volume()),
                VolumeEstimate::exact(polar.volume()),
            ),
            ProductMeasure::Restricted(l) => (
                VolumeEstimate::exact(k.intersect(l)?.volume()),
                VolumeEstimate::exact(polar.intersect(l)?.volume()),
            ),
            ProductMeasure::Measure(mu) => (self.measure(mu, k)?, self.measure(mu, &polar)?),
        };
        Ok(Product {
            body,
            polar,
            value: body.times(&polar),
        })
    }

    /// `P(K) <= κ_n²`.
    pub fn santalo(
        &self,
        k: &HPolytope<f64>,
        body_id: &str,
    ) -> Result<VerificationReport, VerifyError> {
        let p = self.volume_product(k, ProductMeasure::Lebesgue)?;
        let ball = unit_ball_volume(k.dim());
        Ok(VerificationReport::new(
            InequalityId::Santalo,
            p.value,
            VolumeEstimate::exact(ball * ball),
            context(k.dim(), body_id, "lebesgue"),
        ))
    }

    /// The two factor inequalities and the product inequality for one
    /// Steiner symmetrization.
    pub fn symmetral_factors(
        &self,
        mu: &LogConcaveMeasure,
        k: &HPolytope<f64>,
        axis: usize,
        body_id: &str,
    ) -> Result<[VerificationReport; 3], VerifyError> {
        require_unconditional(mu)?;
        let s = steiner(k, axis)?;
        let before = self.volume_product(k, ProductMeasure::Measure(mu))?;
        let after = self.volume_product(&s, ProductMeasure::Measure(mu))?;
        let ctx = context(k.dim(), body_id, mu.id());
        let note = format!("axis {axis}");
        Ok([
            VerificationReport::new(
                InequalityId::SymmetralBody,
                before.body,
                after.body,
                ctx.clone(),
            )
            .with_note(note.clone()),
            VerificationReport::new(
                InequalityId::SymmetralPolar,
                before.polar,
                after.polar,
                ctx.clone(),
            )
            .with_note(note.clone()),
            VerificationReport::new(
                InequalityId::SymmetralProduct,
                before.value,
                after.value,
                ctx,
            )
            .with_note(note),
        ])
    }

    /// `P_μ` along `K, S_{e_n} K, S_{e_{n-1}} S_{e_n} K, …`.
    pub fn chain(
        &self,
        mu: &LogConcaveMeasure,
        k: &HPolytope<f64>,
        body_id: &str,
    ) -> Result<ChainOutcome, VerifyError> {
        require_unconditional(mu)?;
        let steps = unconditionalize_steps(k)?;
        let products = steps
            .iter()
            .map(|s| self.volume_product(s, ProductMeasure::Measure(mu)))
            .collect::<Result<Vec<_>, _>>()?;
        let n = k.dim();
        let reports = products
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                VerificationReport::new(
                    InequalityId::Chain,
                    w[0].value,
                    w[1].value,
                    context(n, body_id, mu.id()),
                )
                .with_note(format!("step {} axis {}", i + 1, n - 1 - i))
            })
            .collect();
        Ok(ChainOutcome {
            reports,
            final_unconditional: steps.last().is_some_and(|s| s.is_unconditional()),
        })
    }

    /// `P_μ(K) <= μ(B)²` with `B` the unit ball.
    pub fn main(
        &self,
        mu: &LogConcaveMeasure,
        k: &HPolytope<f64>,
        body_id: &str,
    ) -> Result<VerificationReport, VerifyError> {
        require_unconditional(mu)?;
        let p = self.volume_product(k, ProductMeasure::Measure(mu))?;
        self.main_against(mu, p.value, k.dim(), 1.0, body_id)
    }

    /// `P_μ(B) <= μ(B)²`, a fixed point that must report margin zero.
    pub fn main_ball(&self, mu: &LogConcaveMeasure) -> Result<VerificationReport, VerifyError> {
        require_unconditional(mu)?;
        let b = self.ball_measure(mu, 1.0)?;
        self.main_against(mu, b.times(&b), mu.dim(), 1.0, "ball")
    }

    /// Lhs against `μ(rB)²`.
    pub fn main_against(
        &self,
        mu: &LogConcaveMeasure,
        lhs: VolumeEstimate,
        n: usize,
        radius: f64,
        body_id: &str,
    ) -> Result<VerificationReport, VerifyError> {
        let b = self.ball_measure(mu, radius)?;
        let mut r = VerificationReport::new(
            InequalityId::Main,
            lhs,
            b.times(&b),
            context(n, body_id, mu.id()),
        );
        if radius != 1.0 {
            r = r.with_note(format!("radius {radius}"));
        }
        Ok(r)
    }

    /// Largest `Σ |x_i y_i|` over random `x ∈ ∂K`, `y ∈ ∂K°`, plus all
    /// vertex pairs when both are polytopes.
    pub fn pairing_bound(
        &self,
        k: &dyn Body,
        k_polar: &dyn Body,
        vertex_pairs: Option<VertexLists<'_>>,
        samples: usize,
        seed: u64,
        body_id: &str,
    ) -> Result<VerificationReport, VerifyError> {
        if !k.is_unconditional() {
            return Err(VerifyError::Precondition("body must be unconditional"));
        }
        let n = k.dim();
        let pairing =
            |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| (a * b).abs()).sum::<f64>();
        let mut worst = 0.0f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let dx = unit_direction(&mut rng, n);
            let dy = unit_direction(&mut rng, n);
            let (gx, gy) = (k.gauge(&dx), k_polar.gauge(&dy));
            let x: Vec<f64> = dx.iter().map(|v| v / gx).collect();
            let y: Vec<f64> = dy.iter().map(|v| v / gy).collect();
            worst = worst.max(pairing(&x, &y));
        }
        if let Some((xs, ys)) = vertex_pairs {
            for x in xs {
                for y in ys {
                    worst = worst.max(pairing(x, y));
                }
            }
        }
        let mut ctx = context(n, body_id, "none");
        ctx.seed = Some(seed);
        Ok(VerificationReport::new(
            InequalityId::PairingBound,
            VolumeEstimate::exact(worst),
            VolumeEstimate::exact(1.0),
            ctx,
        ))
    }

    /// [`pairing_bound`](Self::pairing_bound) for an unconditional polytope.
    pub fn pairing_bound_polytope(
        &self,
        k: &HPolytope<f64>,
        samples: usize,
        seed: u64,
        body_id: &str,
    ) -> Result<VerificationReport, VerifyError> {
        let polar = k.polar_hpolytope()?;
        self.pairing_bound(
            k,
            &polar,
            Some((k.vertices(), polar.vertices())),
            samples,
            seed,
            body_id,
        )
    }

    /// Samples midpoints of `K°(z)` and `K°(-z)` and checks that, lifted to
    /// height `z`, they lie in `(S_u K)°`.
    pub fn meyer_pajor(
        &self,
        k: &HPolytope<f64>,
        axis: usize,
        z: f64,
        samples: usize,
        seed: u64,
        body_id: &str,
    ) -> Result<VerificationReport, VerifyError> {
        let n = k.dim();
        let polar = k.polar_hpolytope()?;
        let sym_polar = steiner(k, axis)?.polar_hpolytope()?;
        let mut ctx = context(n, body_id, "none");
        ctx.seed = Some(seed);
        let note = format!("axis {axis} z {z}");
        let (Slice::Region(up), Slice::Region(down)) =
            (polar.slice(axis, z)?, polar.slice(axis, -z)?)
        else {
            let r = VerificationReport::new(
                InequalityId::MeyerPajor,
                VolumeEstimate::exact(0.0),
                VolumeEstimate::exact(1.0),
                ctx,
            );
            return Ok(r.with_note(format!("{note} vacuous")));
        };
        let (vu, vd) = (up.vertices(), down.vertices());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        let mut x = vec![0.0; n];
        for _ in 0..samples {
            let p = sample_slice(&vu, &up, &mut rng);
            let q = sample_slice(&vd, &down, &mut rng);
            let mut j = 0;
            for (i, xi) in x.iter_mut().enumerate() {
                if i == axis {
                    *xi = z;
                } else {
                    *xi = 0.5 * (p[j] + q[j]);
                    j += 1;
                }
            }
            worst = worst.max(sym_polar.gauge(&x)?);
        }
        let lhs = VolumeEstimate {
            value: worst,
            err: MEYER_PAJOR_TOL / 3.0,
            method: Method::Exact,
            samples: Some(samples as u64),
            seed: Some(seed),
        };
        Ok(VerificationReport::new(
            InequalityId::MeyerPajor,
            lhs,
            VolumeEstimate::exact(1.0),
            ctx,
        )
        .with_note(note))
    }

    /// Decides `z ∈ K^{1/2} L^{1/2}` by minimizing over log-scales `w` the
    /// larger of `‖|z|e^w‖_K` and `‖|z|e^{-w}‖_L`.
    pub fn gm_membership(
        &self,
        k: &HPolytope<f64>,
        l: &HPolytope<f64>,
        z: &[f64],
    ) -> Result<GmMembership, VerifyError> {
        if !k.is_unconditional() || !l.is_unconditional() {
            return Err(VerifyError::Precondition("bodies must be unconditional"));
        }
        if z.len() != k.dim() || l.dim() != k.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: k.dim(),
                got: z.len(),
            }
            .into());
        }
        let r = BodyOracle::geometric_mean_search(k, l, z, self.gm_iters, None, None);
        let x = z
            .iter()
            .zip(&r.log_scale)
            .map(|(v, w)| v.abs() * w.exp())
            .collect();
        let y = z
            .iter()
            .zip(&r.log_scale)
            .map(|(v, w)| v.abs() * (-w).exp())
            .collect();
        Ok(GmMembership {
            member: r.value <= 1.0 + GM_MEMBER_TOL,
            value: r.value,
            witness: (x, y),
        })
    }

    /// `μ(K) μ(L) <= μ(K^{1/2} L^{1/2})²`. Membership in the geometric mean
    /// is certified only by a witness, so the rhs can only be too small.
    pub fn geometric_mean_product(
        &self,
        mu: &LogConcaveMeasure,
        k: &Arc<HPolytope<f64>>,
        l: &Arc<HPolytope<f64>>,
        body_id: &str,
    ) -> Result<VerificationReport, VerifyError> {
        require_unconditional(mu)?;
        if !k.is_unconditional() || !l.is_unconditional() {
            return Err(VerifyError::Precondition("bodies must be unconditional"));
        }
        if k.dim() > 3 {
            return Err(VerifyError::Precondition("dimension at most 3"));
        }
        let lhs = self.measure(mu, k)?.times(&self.measure(mu, l)?);
        let m = BodyOracle::geometric_mean(k.clone(), l.clone(), self.gm_iters);
        let mm = measure_quadrature(mu, &m, self.quad_tol)?;
        Ok(VerificationReport::new(
            InequalityId::GeometricMean,
            lhs,
            mm.times(&mm),
            context(k.dim(), body_id, mu.id()),
        )
        .with_note("rhs conservative"))
    }

    /// `log μ(e^t B)` on the grid; error propagated as `err / value`.
    pub fn log_ball_masses(
        &self,
        mu: &LogConcaveMeasure,
        t_grid: &[f64],
    ) -> Result<Vec<VolumeEstimate>, VerifyError> {
        t_grid
            .iter()
            .map(|&t| {
                let m = self.ball_measure(mu, t.exp())?;
                Ok(VolumeEstimate {
                    value: m.value.ln(),
                    err: m.err / m.value,
                    ..m
                })
            })
            .collect()
    }

    /// Midpoint concavity of `t -> log μ(e^t B)` on every consecutive triple
    /// of an equally spaced grid.
    pub fn ball_logconcavity_all(
        &self,
        mu: &LogConcaveMeasure,
        t_grid: &[f64],
    ) -> Result<Vec<VerificationReport>, VerifyError> {
        if !mu.flags().even {
            return Err(VerifyError::Precondition("measure must be even"));
        }
        if t_grid.len() < 3 {
            return Err(VerifyError::Precondition(
                "grid needs at least three points",
            ));
        }
        let h = t_grid[1] - t_grid[0];
        if !(h > 0.0)
            || t_grid
                .windows(2)
                .any(|w| ((w[1] - w[0]) - h).abs() > 1e-12 * (1.0 + h))
        {
            return Err(VerifyError::Precondition(
                "grid must be increasing and equally spaced",
            ));
        }
        let logs = self.log_ball_masses(mu, t_grid)?;
        Ok(logs
            .windows(3)
            .enumerate()
            .map(|(i, w)| {
                // Log masses may be negative, so these are plain reals:
                // the chord midpoint against the middle value.
                let lhs = VolumeEstimate {
                    value: 0.5 * (w[0].value + w[2].value),
                    err: 0.5 * (w[0].err + w[2].err),
                    method: w[0].method.max(w[2].method),
                    samples: None,
                    seed: None,
                };
                VerificationReport::new(
                    InequalityId::BallLogConcavity,
                    lhs,
                    w[1],
                    context(mu.dim(), "ball", mu.id()),
                )
                .with_note(format!("t {}", t_grid[i + 1]))
            })
            .collect())
    }

    /// The triple with the smallest margin relative to its slack.
    pub fn ball_logconcavity(
        &self,
        mu: &LogConcaveMeasure,
        t_grid: &[f64],
    ) -> Result<VerificationReport, VerifyError> {
        let all = self.ball_logconcavity_all(mu, t_grid)?;
        Ok(all
            .into_iter()
            .min_by(|a, b| (a.margin + a.slack).total_cmp(&(b.margin + b.slack)))
            .expect("at least one triple"))
    }
}

#[cfg(test)]
mod tests;
