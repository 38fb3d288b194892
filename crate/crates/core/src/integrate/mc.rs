//! Monte Carlo estimates of `μ(K)`, deterministic per seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Method, VolumeEstimate};
use crate::bodies::Body;
use crate::error::MeasureError;
use crate::measures::LogConcaveMeasure;

/// Samples per block; each block draws from its own ChaCha stream, so the
/// result does not depend on how blocks are spread over threads.
const BLOCK: u64 = 1 << 14;
const MIN_SAMPLES: u64 = 1000;

/// Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarlo {
    pub samples: u64,
    pub seed: u64,
    /// Pair each draw with its reflection (coordinate 0 flipped for
    /// unconditional measures, negated for even ones).
    pub antithetic: bool,
}

impl MonteCarlo {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            antithetic: true,
        }
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    count: u64,
    sum: f64,
    sum_sq: f64,
}

impl Tally {
    fn merge(self, o: Self) -> Self {
        Self {
            count: self.count + o.count,
            sum: self.sum + o.sum,
            sum_sq: self.sum_sq + o.sum_sq,
        }
    }
}

/// `μ(K)` as `total_mass · p̂` with the default antithetic setting.
pub fn measure_mc<B: Body + ?Sized>(
    mu: &LogConcaveMeasure,
    body: &B,
    samples: u64,
    seed: u64,
) -> Result<VolumeEstimate, MeasureError> {
    measure_mc_with(mu, body, MonteCarlo::new(samples, seed))
}

/// `μ(K)` as `total_mass · p̂`. Without antithetics the error is
/// `total_mass · √(p̂(1-p̂)/N)`; with them it is the standard error of the
/// pair means, which accounts for the correlation inside each pair.
pub fn measure_mc_with<B: Body + ?Sized>(
    mu: &LogConcaveMeasure,
    body: &B,
    cfg: MonteCarlo,
) -> Result<VolumeEstimate, MeasureError> {
    if body.dim() != mu.dim() {
        return Err(MeasureError::DimensionMismatch {
            expected: mu.dim(),
            got: body.dim(),
        });
    }
    if cfg.samples < MIN_SAMPLES {
        return Err(MeasureError::TooFewSamples {
            min: MIN_SAMPLES,
            got: cfg.samples,
        });
    }
    if !mu.has_sampler() {
        return Err(MeasureError::MissingSampler);
    }
    let mass = mu.total_mass().ok_or(MeasureError::UnknownMass)?;
    let flags = mu.flags();
    let reflect: Option<u32> = match (cfg.antithetic, flags.unconditional, flags.even) {
        (true, true, _) => Some(1),
        (true, false, true) => Some((1u32 << mu.dim()) - 1),
        _ => None,
    };
    let draws = if reflect.is_some() {
        cfg.samples / 2
    } else {
        cfg.samples
    };
    let blocks = draws.div_ceil(BLOCK);
    let dim = mu.dim();
    let tallies: Vec<Result<Tally, MeasureError>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b);
            let n = BLOCK.min(draws - b * BLOCK);
            let mut x = vec![0.0; dim];
            let mut t = Tally::default();
            for _ in 0..n {
                mu.sample_into(&mut rng, &mut x)?;
                let mut h = f64::from(u8::from(body.contains(&x)));
                if let Some(mask) = reflect {
                    for (i, xi) in x.iter_mut().enumerate() {
                        if mask >> i & 1 == 1 {
                            *xi = -*xi;
                        }
                    }
                    h = 0.5 * (h + f64::from(u8::from(body.contains(&x))));
                }
                t.count += 1;
                t.sum += h;
                t.sum_sq += h * h;
            }
            Ok(t)
        })
        .collect();
    let mut total = Tally::default();
    for t in tallies {
        total = total.merge(t?);
    }
    let n = total.count as f64;
    let p = total.sum / n;
    let var = if reflect.is_some() {
        ((total.sum_sq / n - p * p) * n / (n - 1.0)).max(0.0)
    } else {
        p * (1.0 - p)
    };
    Ok(VolumeEstimate {
        value: mass * p,
        err: mass * (var / n).sqrt(),
        method: Method::MonteCarlo,
        samples: Some(if reflect.is_some() {
            2 * total.count
        } else {
            total.count
        }),
        seed: Some(cfg.seed),
    })
}
