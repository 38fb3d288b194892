//! Body files (TOML) and report CSV.
//!
//! A body file holds one body:
//!
//! ```toml
//! kind = "hpolytope"          # or "vpolytope", "ball"
//! dim = 2
//! normals = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
//! # vertices = [...]         for kind = "vpolytope"
//! # radius = 1.0             for kind = "ball"
//! ```
//!
//! Reals are written in shortest round-trip form, so reading a written file
//! reproduces the body bit for bit.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::bodies::{HPolytope, VPolytope};
use crate::error::GeometryError;
use crate::verify::{VerificationReport, CSV_HEADER};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("body file: {0}")]
    Parse(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Contents of a body file.
#[derive(Debug, Clone, PartialEq)]
pub enum BodyFile {
    H(HPolytope<f64>),
    V(VPolytope<f64>),
    Ball { dim: usize, radius: f64 },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBody {
    kind: String,
    dim: usize,
    normals: Option<Vec<Vec<f64>>>,
    vertices: Option<Vec<Vec<f64>>>,
    radius: Option<f64>,
}

impl BodyFile {
    pub fn dim(&self) -> usize {
        match self {
            Self::H(h) => h.dim(),
            Self::V(v) => v.dim(),
            Self::Ball { dim, .. } => *dim,
        }
    }

    /// Facet description, for polytopes.
    pub fn to_hpolytope(&self) -> Option<Result<HPolytope<f64>, GeometryError>> {
        match self {
            Self::H(h) => Some(Ok(h.clone())),
            Self::V(v) => Some(v.to_hpolytope()),
            Self::Ball { .. } => None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        let raw: RawBody = toml::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
        let missing =
            |field: &str| IoError::Parse(format!("kind \"{}\" needs `{field}`", raw.kind));
        match raw.kind.as_str() {
            "hpolytope" => {
                let normals = raw.normals.clone().ok_or_else(|| missing("normals"))?;
                Ok(Self::H(HPolytope::new(raw.dim, normals)?))
            }
            "vpolytope" => {
                let vertices = raw.vertices.clone().ok_or_else(|| missing("vertices"))?;
                Ok(Self::V(VPolytope::new(raw.dim, vertices)?))
            }
            "ball" => {
                let radius = raw.radius.ok_or_else(|| missing("radius"))?;
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(IoError::Parse(format!(
                        "radius must be positive, got {radius}"
                    )));
                }
                crate::bodies::check_dim(raw.dim)?;
                Ok(Self::Ball {
                    dim: raw.dim,
                    radius,
                })
            }
            other => Err(IoError::Parse(format!("unknown kind \"{other}\""))),
        }
    }

    pub fn to_toml(&self) -> String {
        let mut s = String::new();
        let points = |s: &mut String, name: &str, pts: &[Vec<f64>]| {
            let _ = writeln!(s, "{name} = [");
            for p in pts {
                let row: Vec<String> = p.iter().map(|x| format!("{x:?}")).collect();
                let _ = writeln!(s, "    [{}],", row.join(", "));
            }
            s.push_str("]\n");
        };
        match self {
            Self::H(h) => {
                let _ = writeln!(s, "kind = \"hpolytope\"\ndim = {}", h.dim());
                points(&mut s, "normals", h.normals());
            }
            Self::V(v) => {
                let _ = writeln!(s, "kind = \"vpolytope\"\ndim = {}", v.dim());
                points(&mut s, "vertices", v.vertices());
            }
            Self::Ball { dim, radius } => {
                let _ = writeln!(s, "kind = \"ball\"\ndim = {dim}\nradius = {radius:?}");
            }
        }
        s
    }

    pub fn read(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|source| IoError::File {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        std::fs::write(path, self.to_toml()).map_err(|source| IoError::File {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Header plus one row per report, in the given order.
pub fn write_reports_csv<W: Write>(
    mut out: W,
    reports: &[VerificationReport],
) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in reports {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::random_symmetric_polytope;

    #[test]
    fn round_trips_bit_for_bit() {
        for seed in 0..10 {
            let v = random_symmetric_polytope::<f64>(3, 5, seed).unwrap();
            let h = v.to_hpolytope().unwrap();
            for body in [BodyFile::V(v.clone()), BodyFile::H(h)] {
                let back = BodyFile::parse(&body.to_toml()).unwrap();
                assert_eq!(back, body);
            }
        }
        let ball = BodyFile::Ball {
            dim: 3,
            radius: 0.1,
        };
        assert_eq!(BodyFile::parse(&ball.to_toml()).unwrap(), ball);
    }

    #[test]
    fn integer_entries_are_accepted() {
        let b = BodyFile::parse(
            "kind = \"hpolytope\"\ndim = 2\nnormals = [[1, 0], [-1, 0], [0, 1], [0, -1]]\n",
        )
        .unwrap();
        let h = b.to_hpolytope().unwrap().unwrap();
        assert_eq!(h.volume(), 4.0);
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(
            BodyFile::parse("kind = \"cone\"\ndim = 2"),
            Err(IoError::Parse(_))
        ));
        assert!(matches!(
            BodyFile::parse("kind = \"hpolytope\"\ndim = 2"),
            Err(IoError::Parse(_))
        ));
        let open = "kind = \"hpolytope\"\ndim = 2\nnormals = [[1.0, 0.0], [-1.0, 0.0]]";
        assert!(matches!(
            BodyFile::parse(open),
            Err(IoError::Geometry(GeometryError::Unbounded))
        ));
        assert!(BodyFile::parse("kind = \"ball\"\ndim = 2\nradius = -1.0").is_err());
    }
}
