//! Experiment configuration (TOML).
//!
//! ```toml
//! dim = 2
//! seed = 42
//! checks = ["santalo", "claim1", "chain", "main"]
//! output = "out"
//!
//! [corpus]
//! count = 10            # random symmetric polytopes
//! vertex_pairs = 5
//! seed = 1
//! files = ["bodies/sheared.toml"]
//!
//! [[measures]]
//! kind = "gaussian"     # gaussian | product_exponential | lebesgue_box | uniform_body
//! params = [1.0]        # one value is repeated on every axis
//!
//! [tolerances]
//! quad_tol = 1e-6
//! mc_samples = 1000000
//!
//! [sweep]
//! measure = { kind = "gaussian", params = [1.0] }
//! radii = [0.5, 1.0, 2.0]
//! t_grid = [-1.0, 0.0, 1.0]
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use santalo_core::bodies::{AxisBox, HPolytope};
use santalo_core::io::BodyFile;
use santalo_core::measures::LogConcaveMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Santalo,
    #[serde(rename = "claim1")]
    SymmetralFactors,
    Chain,
    Main,
    #[serde(rename = "corollary")]
    PairingBound,
    MeyerPajor,
    #[serde(rename = "prop8")]
    GeometricMean,
    BallLogconcavity,
}

impl CheckKind {
    /// Checks that integrate a measure numerically.
    pub fn needs_quadrature(self) -> bool {
        matches!(
            self,
            Self::SymmetralFactors
                | Self::Chain
                | Self::Main
                | Self::GeometricMean
                | Self::BallLogconcavity
        )
    }

    pub fn needs_measure(self) -> bool {
        self.needs_quadrature()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
    /// Body file for `uniform_body`.
    pub body: Option<PathBuf>,
}

impl MeasureSpec {
    /// `kind` or `kind:p1,p2,…`; for `uniform_body` the parameter is a path.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        if kind == "uniform_body" {
            if rest.is_empty() {
                bail!("uniform_body needs a body file: uniform_body:PATH");
            }
            return Ok(Self {
                kind: kind.to_string(),
                params: Vec::new(),
                body: Some(PathBuf::from(rest)),
            });
        }
        let params = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .with_context(|| format!("bad measure parameter {p:?}"))
                })
                .collect::<Result<_>>()?
        };
        Ok(Self {
            kind: kind.to_string(),
            params,
            body: None,
        })
    }

    fn params_for(&self, dim: usize, default: f64) -> Result<Vec<f64>> {
        match self.params.len() {
            0 => Ok(vec![default; dim]),
            1 => Ok(vec![self.params[0]; dim]),
            k if k == dim => Ok(self.params.clone()),
            k => bail!(
                "measure {} has {k} parameters for dimension {dim}",
                self.kind
            ),
        }
    }

    pub fn build(&self, dim: usize, base: &Path) -> Result<LogConcaveMeasure> {
        let m = match self.kind.as_str() {
            "gaussian" => LogConcaveMeasure::gaussian(&self.params_for(dim, 1.0)?)?,
            "product_exponential" => {
                LogConcaveMeasure::product_exponential(&self.params_for(dim, 1.0)?)?
            }
            "lebesgue_box" => {
                LogConcaveMeasure::lebesgue_box(&AxisBox::symmetric(&self.params_for(dim, 3.0)?))?
            }
            "uniform_body" => {
                let path = self.body.as_ref().context("uniform_body needs `body`")?;
                let file = BodyFile::read(&base.join(path))?;
                let h = file
                    .to_hpolytope()
                    .context("uniform_body needs a polytope")??;
                if h.dim() != dim {
                    bail!("uniform_body dimension {} differs from {dim}", h.dim());
                }
                LogConcaveMeasure::uniform_on_body(Arc::new(h))?
            }
            other => bail!("unknown measure kind {other:?}"),
        };
        Ok(m)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    #[serde(default)]
    pub count: usize,
    #[serde(default = "default_vertex_pairs")]
    pub vertex_pairs: usize,
    pub seed: Option<u64>,
    #[serde(default)]
    pub files: Vec<PathBuf>,
}

fn default_vertex_pairs() -> usize {
    5
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: u64,
    #[serde(default = "default_boundary_samples")]
    pub pairing_samples: usize,
    #[serde(default = "default_boundary_samples")]
    pub meyer_pajor_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_tol: default_quad_tol(),
            mc_samples: default_mc_samples(),
            pairing_samples: default_boundary_samples(),
            meyer_pajor_samples: default_boundary_samples(),
        }
    }
}

fn default_quad_tol() -> f64 {
    1e-6
}

fn default_mc_samples() -> u64 {
    1_000_000
}

fn default_boundary_samples() -> usize {
    10_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub measure: MeasureSpec,
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default)]
    pub t_grid: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dim: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub corpus: CorpusSpec,
    #[serde(default)]
    pub measures: Vec<MeasureSpec>,
    #[serde(default)]
    pub checks: Vec<CheckKind>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
    pub sweep: Option<SweepSpec>,
    /// Directory of the config file.
    #[serde(skip)]
    pub base: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: Self =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Dimension limits and tolerance sanity.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > 6 {
            bail!("dim must be between 1 and 6, got {}", self.dim);
        }
        if self.checks.iter().any(|c| c.needs_quadrature()) && self.dim > 4 {
            bail!(
                "dim {} too large for quadrature-backed checks (at most 4)",
                self.dim
            );
        }
        if self.checks.contains(&CheckKind::GeometricMean) && self.dim > 3 {
            bail!("prop8 supports dim at most 3");
        }
        if self.checks.iter().any(|c| c.needs_measure()) && self.measures.is_empty() {
            bail!("checks need at least one measure");
        }
        if !(self.tolerances.quad_tol > 0.0) {
            bail!("quad_tol must be positive");
        }
        Ok(())
    }

    /// Random bodies followed by the listed files, with their ids.
    pub fn corpus(&self) -> Result<Vec<(String, HPolytope<f64>)>> {
        let mut out = Vec::new();
        let seed = self.corpus.seed.unwrap_or(self.seed);
        for i in 0..self.corpus.count {
            let s = seed.wrapping_add(i as u64);
            let v = santalo_core::bodies::random_symmetric_polytope::<f64>(
                self.dim,
                self.corpus.vertex_pairs,
                s,
            )?;
            out.push((format!("rand-{seed}-{i:04}"), v.to_hpolytope()?));
        }
        for f in &self.corpus.files {
            let body = BodyFile::read(&self.base.join(f))?;
            let h = body
                .to_hpolytope()
                .with_context(|| format!("{}: corpus entries must be polytopes", f.display()))??;
            if h.dim() != self.dim {
                bail!(
                    "{}: dimension {} differs from {}",
                    f.display(),
                    h.dim(),
                    self.dim
                );
            }
            let id = f
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            out.push((id, h));
        }
        if out.is_empty() {
            bail!("empty corpus");
        }
        Ok(out)
    }

    pub fn measures(&self) -> Result<Vec<LogConcaveMeasure>> {
        self.measures
            .iter()
            .map(|m| m.build(self.dim, &self.base))
            .collect()
    }
}
