//! JSON file formats. Floats are written as shortest round-trip decimals,
//! so loading and storing a file written by this tool reproduces it byte
//! for byte.

use std::fs;
use std::path::Path;

use gpsparsify::{CheckReport, Halfspace, Polytope, SparseSup, VectorSet};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorSetFile {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparseSupFile {
    pub dim: usize,
    pub support: Vec<Vec<f64>>,
    pub shifts: Vec<f64>,
    pub width_used: f64,
    pub source_indices: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolytopeKind {
    List,
    Empty,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceFile {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeFile {
    pub dim: usize,
    pub kind: PolytopeKind,
    #[serde(default)]
    pub halfspaces: Vec<HalfspaceFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckReportFile {
    pub name: String,
    pub bound: f64,
    pub measured: f64,
    pub std_err: f64,
    pub pass: bool,
    pub n_samples: usize,
    pub seed: u64,
}

fn finite(values: impl IntoIterator<Item = f64>, what: &str) -> Result<(), CliError> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(CliError::Invalid(format!("{what} contains a non-finite value")))
    }
}

impl VectorSetFile {
    pub fn into_set(self) -> Result<VectorSet<f64>, CliError> {
        finite(self.points.iter().flatten().copied(), "points")?;
        let set = VectorSet::new(self.dim, self.points)?;
        Ok(match self.labels {
            Some(l) => set.with_labels(l)?,
            None => set,
        })
    }

    pub fn from_set(set: &VectorSet<f64>) -> Self {
        Self { dim: set.dim(), points: set.points(), labels: set.labels().map(|l| l.to_vec()) }
    }
}

impl SparseSupFile {
    pub fn into_sparse(self) -> Result<SparseSup<f64>, CliError> {
        finite(self.support.iter().flatten().copied(), "support")?;
        finite(self.shifts.iter().copied(), "shifts")?;
        finite([self.width_used], "width_used")?;
        let support = VectorSet::new(self.dim, self.support)?;
        Ok(SparseSup::new(support, self.source_indices, self.shifts, self.width_used)?)
    }

    pub fn from_sparse(sp: &SparseSup<f64>) -> Self {
        Self {
            dim: sp.dim,
            support: sp.support.points(),
            shifts: sp.shifts.clone(),
            width_used: sp.width_used,
            source_indices: sp.source_indices.clone(),
        }
    }
}

impl PolytopeFile {
    pub fn into_polytope(self) -> Result<Polytope<f64>, CliError> {
        if self.dim == 0 {
            return Err(CliError::Invalid("dimension must be positive".into()));
        }
        match self.kind {
            PolytopeKind::Empty | PolytopeKind::Full if !self.halfspaces.is_empty() => {
                Err(CliError::Invalid("empty and full polytopes take no halfspaces".into()))
            }
            PolytopeKind::Empty => Ok(Polytope::Empty { dim: self.dim }),
            PolytopeKind::Full => Ok(Polytope::Full { dim: self.dim }),
            PolytopeKind::List => {
                if self.halfspaces.is_empty() {
                    return Err(CliError::Invalid("a list polytope needs at least one halfspace".into()));
                }
                for h in &self.halfspaces {
                    finite(h.normal.iter().copied().chain([h.offset]), "halfspace")?;
                }
                // Keep unit normals bit-exact; rescale anything else.
                let rows: Vec<Vec<f64>> = self.halfspaces.iter().map(|h| h.normal.clone()).collect();
                let offsets: Vec<f64> = self.halfspaces.iter().map(|h| h.offset).collect();
                let normals = VectorSet::new(self.dim, rows)?;
                match Polytope::from_unit_normals(normals, offsets) {
                    Ok(p) => Ok(p),
                    Err(_) => {
                        let hs = self
                            .halfspaces
                            .into_iter()
                            .map(|h| Halfspace::new(h.normal, h.offset))
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(Polytope::from_halfspaces(self.dim, hs)?)
                    }
                }
            }
        }
    }

    pub fn from_polytope(p: &Polytope<f64>) -> Self {
        let (kind, halfspaces) = match p {
            Polytope::Empty { .. } => (PolytopeKind::Empty, vec![]),
            Polytope::Full { .. } => (PolytopeKind::Full, vec![]),
            Polytope::List { .. } => (
                PolytopeKind::List,
                p.halfspaces()
                    .into_iter()
                    .map(|h| HalfspaceFile { normal: h.normal().to_vec(), offset: h.offset() })
                    .collect(),
            ),
        };
        Self { dim: p.dim(), kind, halfspaces }
    }
}

impl From<&CheckReport> for CheckReportFile {
    fn from(r: &CheckReport) -> Self {
        Self {
            name: r.name.clone(),
            bound: r.bound,
            measured: r.measured,
            std_err: r.std_err,
            pass: r.pass,
            n_samples: r.n_samples,
            seed: r.seed,
        }
    }
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

/// Canonical text: compact JSON followed by a newline.
pub fn to_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("file types always serialize");
    s.push('\n');
    s
}

pub fn store<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    fs::write(path, to_text(value)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
