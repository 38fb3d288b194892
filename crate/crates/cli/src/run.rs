//! Batch verification over corpus × measures.

use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{Context, Result};
use rayon::prelude::*;

use santalo_core::bodies::HPolytope;
use santalo_core::measures::LogConcaveMeasure;
use santalo_core::symmetrize::unconditionalize;
use santalo_core::verify::{VerificationReport, Verifier};

use crate::config::{CheckKind, ExperimentConfig};

const Z_FRACTIONS: [f64; 3] = [0.0, 0.5, 0.9];
const LOG_GRID_POINTS: usize = 9;

#[derive(Debug, Clone, Copy)]
enum Task {
    Santalo(usize),
    SymmetralFactors {
        body: usize,
        measure: usize,
        axis: usize,
    },
    Chain {
        body: usize,
        measure: usize,
    },
    Main {
        body: usize,
        measure: usize,
    },
    PairingBound(usize),
    MeyerPajor {
        body: usize,
        axis: usize,
        z: usize,
    },
    GeometricMean {
        pair: usize,
        measure: usize,
    },
    BallLogConcavity(usize),
}

impl Task {
    fn kind(&self) -> CheckKind {
        match self {
            Self::Santalo(_) => CheckKind::Santalo,
            Self::SymmetralFactors { .. } => CheckKind::SymmetralFactors,
            Self::Chain { .. } => CheckKind::Chain,
            Self::Main { .. } => CheckKind::Main,
            Self::PairingBound(_) => CheckKind::PairingBound,
            Self::MeyerPajor { .. } => CheckKind::MeyerPajor,
            Self::GeometricMean { .. } => CheckKind::GeometricMean,
            Self::BallLogConcavity(_) => CheckKind::BallLogconcavity,
        }
    }
}

/// Per-item seed from the master seed and the item index (SplitMix64).
pub fn item_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Reports sorted by body, measure and inequality, plus per-check totals.
pub struct Outcome {
    pub reports: Vec<VerificationReport>,
    pub summary: BTreeMap<CheckKind, (usize, usize)>,
}

impl Outcome {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let corpus = cfg.corpus()?;
    let measures = cfg.measures()?;
    let n = cfg.dim;
    let verifier = Verifier::new(cfg.tolerances.quad_tol, cfg.tolerances.mc_samples);

    let wants = |c: CheckKind| cfg.checks.contains(&c);
    let unconditional: Vec<Arc<HPolytope<f64>>> =
        if wants(CheckKind::PairingBound) || wants(CheckKind::GeometricMean) {
            corpus
                .par_iter()
                .map(|(id, k)| {
                    unconditionalize(k)
                        .map(Arc::new)
                        .with_context(|| format!("unconditionalizing {id}"))
                })
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };

    let mut tasks = Vec::new();
    let mut checks = cfg.checks.clone();
    checks.sort();
    checks.dedup();
    for &check in &checks {
        match check {
            CheckKind::Santalo => tasks.extend((0..corpus.len()).map(Task::Santalo)),
            CheckKind::PairingBound => tasks.extend((0..corpus.len()).map(Task::PairingBound)),
            CheckKind::MeyerPajor => {
                for body in 0..corpus.len() {
                    for axis in 0..n {
                        tasks.extend((0..Z_FRACTIONS.len()).map(|z| Task::MeyerPajor {
                            body,
                            axis,
                            z,
                        }));
                    }
                }
            }
            CheckKind::BallLogconcavity => {
                tasks.extend((0..measures.len()).map(Task::BallLogConcavity))
            }
            CheckKind::GeometricMean => {
                for measure in 0..measures.len() {
                    tasks.extend(
                        (0..corpus.len()).map(|pair| Task::GeometricMean { pair, measure }),
                    );
                }
            }
            CheckKind::SymmetralFactors | CheckKind::Chain | CheckKind::Main => {
                for body in 0..corpus.len() {
                    for measure in 0..measures.len() {
                        match check {
                            CheckKind::SymmetralFactors => {
                                tasks.extend((0..n).map(|axis| Task::SymmetralFactors {
                                    body,
                                    measure,
                                    axis,
                                }))
                            }
                            CheckKind::Chain => tasks.push(Task::Chain { body, measure }),
                            _ => tasks.push(Task::Main { body, measure }),
                        }
                    }
                }
            }
        }
    }

    log::info!(
        "{} bodies, {} measures, {} tasks",
        corpus.len(),
        measures.len(),
        tasks.len()
    );
    let grid: Vec<f64> = (0..LOG_GRID_POINTS)
        .map(|i| -1.0 + 2.0 * i as f64 / (LOG_GRID_POINTS - 1) as f64)
        .collect();
    let run_task = |index: usize, task: Task| -> Result<Vec<VerificationReport>> {
        let seed = item_seed(cfg.seed, index as u64);
        let mu = |m: usize| -> &LogConcaveMeasure { &measures[m] };
        let out = match task {
            Task::Santalo(b) => vec![verifier.santalo(&corpus[b].1, &corpus[b].0)?],
            Task::SymmetralFactors {
                body,
                measure,
                axis,
            } => verifier
                .symmetral_factors(mu(measure), &corpus[body].1, axis, &corpus[body].0)?
                .to_vec(),
            Task::Chain { body, measure } => {
                verifier
                    .chain(mu(measure), &corpus[body].1, &corpus[body].0)?
                    .reports
            }
            Task::Main { body, measure } => {
                vec![verifier.main(mu(measure), &corpus[body].1, &corpus[body].0)?]
            }
            Task::PairingBound(b) => {
                vec![verifier.pairing_bound_polytope(
                    &unconditional[b],
                    cfg.tolerances.pairing_samples,
                    seed,
                    &corpus[b].0,
                )?]
            }
            Task::MeyerPajor { body, axis, z } => {
                let k = &corpus[body].1;
                let extent = k.polar_hpolytope()?.enclosing_box()?.hi[axis];
                vec![verifier.meyer_pajor(
                    k,
                    axis,
                    Z_FRACTIONS[z] * extent,
                    cfg.tolerances.meyer_pajor_samples,
                    seed,
                    &corpus[body].0,
                )?]
            }
            Task::GeometricMean { pair, measure } => {
                let j = (pair + 1) % corpus.len();
                let id = format!("{}+{}", corpus[pair].0, corpus[j].0);
                vec![verifier.geometric_mean_product(
                    mu(measure),
                    &unconditional[pair],
                    &unconditional[j],
                    &id,
                )?]
            }
            Task::BallLogConcavity(m) => verifier.ball_logconcavity_all(mu(m), &grid)?,
        };
        Ok(out)
    };

    let results: Vec<(CheckKind, Vec<VerificationReport>)> = tasks
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            run_task(i, t)
                .map(|r| (t.kind(), r))
                .with_context(|| format!("{:?}", t))
        })
        .collect::<Result<_>>()?;

    let mut summary: BTreeMap<CheckKind, (usize, usize)> =
        checks.iter().map(|&c| (c, (0, 0))).collect();
    let mut reports = Vec::new();
    for (kind, rs) in results {
        let entry = summary.entry(kind).or_default();
        entry.0 += rs.iter().filter(|r| r.passed).count();
        entry.1 += rs.len();
        reports.extend(rs);
    }
    reports.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(Outcome { reports, summary })
}
