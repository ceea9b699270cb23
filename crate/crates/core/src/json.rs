//! JSON wire formats.
//!
//! Matrices are serialized row-major as `[re, im]` pairs. A square matrix
//! is `{"dim": d, "entries": [[re, im], ...]}`; a map matrix (generally
//! rectangular, acting on column-stacked coordinates) carries explicit
//! `rows`/`cols`. Algebra descriptors serialize as
//! `{"kind": "direct_sum", "blocks": [...]}` or
//! `{"kind": "nilpotent", "size": m}`.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraDescriptor, AlgebraElement, CMatrix, Complex64};
use crate::error::{Error, Result};
use crate::nhom::{LinearMapRep, VerificationReport, Witness};
use crate::npotent::NPartition;

/// Square complex matrix: `{"dim": d, "entries": [[re, im], ...]}`,
/// row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let dim = m.nrows();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let z = m[(r, c)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixJson { dim, entries }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::ShapeMismatch {
                context: format!(
                    "matrix dim {} needs {} entries, got {}",
                    self.dim,
                    self.dim * self.dim,
                    self.entries.len()
                ),
            });
        }
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                let [re, im] = self.entries[r * self.dim + c];
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
                m[(r, c)] = Complex64::new(re, im);
            }
        }
        Ok(m)
    }
}

/// Rectangular matrix used for map representations, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RectMatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl RectMatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut entries = Vec::with_capacity(m.nrows() * m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                entries.push([z.re, z.im]);
            }
        }
        RectMatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            entries,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::ShapeMismatch {
                context: format!(
                    "{}x{} matrix needs {} entries, got {}",
                    self.rows,
                    self.cols,
                    self.rows * self.cols,
                    self.entries.len()
                ),
            });
        }
        let mut m = CMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let [re, im] = self.entries[r * self.cols + c];
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
                m[(r, c)] = Complex64::new(re, im);
            }
        }
        Ok(m)
    }
}

/// An algebra element: `{"algebra": <descriptor>, "matrix": <matrix>}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementJson {
    pub algebra: AlgebraDescriptor,
    pub matrix: MatrixJson,
}

impl ElementJson {
    pub fn from_element(e: &AlgebraElement) -> Self {
        ElementJson {
            algebra: e.algebra().clone(),
            matrix: MatrixJson::from_matrix(e.matrix()),
        }
    }

    pub fn to_element(&self) -> Result<AlgebraElement> {
        AlgebraElement::from_ambient(self.algebra.clone(), self.matrix.to_matrix()?)
    }
}

/// A linear map: `{"domain": ..., "codomain": ..., "matrix": ...}` with the
/// matrix acting on column-stacked coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapJson {
    pub domain: AlgebraDescriptor,
    pub codomain: AlgebraDescriptor,
    pub matrix: RectMatrixJson,
}

impl MapJson {
    pub fn from_map(m: &LinearMapRep) -> Self {
        MapJson {
            domain: m.domain().clone(),
            codomain: m.codomain().clone(),
            matrix: RectMatrixJson::from_matrix(m.matrix()),
        }
    }

    pub fn to_map(&self) -> Result<LinearMapRep> {
        LinearMapRep::new(
            self.domain.clone(),
            self.codomain.clone(),
            self.matrix.to_matrix()?,
        )
    }
}

/// `{"pass": bool, "max_residual": float, "witness": [...], ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReportJson {
    pub pass: bool,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    pub mode: String,
    pub checked: u64,
}

pub fn witness_to_json(w: &Witness) -> serde_json::Value {
    match w {
        Witness::BasisTuple(coords) => serde_json::json!({
            "kind": "basis_tuple",
            "units": coords.iter().map(|&(r, c)| vec![r, c]).collect::<Vec<_>>(),
        }),
        Witness::Sampled { trial, tuple } => serde_json::json!({
            "kind": "sampled_tuple",
            "trial": trial,
            "tuple": tuple.iter().map(MatrixJson::from_matrix).collect::<Vec<_>>(),
        }),
    }
}

impl VerificationReportJson {
    pub fn from_report(r: &VerificationReport) -> Self {
        VerificationReportJson {
            pass: r.pass,
            max_residual: r.max_residual,
            witness: r.witness.as_ref().map(witness_to_json),
            mode: r.mode.to_string(),
            checked: r.checked,
        }
    }
}

/// Partition report: the idempotents plus every invariant residual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionReportJson {
    pub n: u32,
    pub idempotents: Vec<MatrixJson>,
    pub idempotency_residual: f64,
    pub orthogonality_residual: f64,
    pub sum_to_unit_residual: f64,
    pub reconstruction_residual: f64,
}

impl PartitionReportJson {
    pub fn from_partition(p: &NPartition) -> Self {
        PartitionReportJson {
            n: p.n(),
            idempotents: p
                .idempotents()
                .iter()
                .map(|e| MatrixJson::from_matrix(e.matrix()))
                .collect(),
            idempotency_residual: p.residuals().idempotency,
            orthogonality_residual: p.residuals().orthogonality,
            sum_to_unit_residual: p.residuals().sum_to_unit,
            reconstruction_residual: p.residuals().reconstruction,
        }
    }
}

/// Per-theorem check record: `{"theorem": str, "pass": bool,
/// "residual": float, "witness": ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReportJson {
    pub theorem: String,
    pub pass: bool,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_element, random_linear_map, RandomStyle};

    #[test]
    fn matrix_round_trip() {
        let alg = AlgebraDescriptor::direct_sum(vec![2, 1]).unwrap();
        let a = random_element(&alg, RandomStyle::Ginibre, 42).unwrap();
        let json = ElementJson::from_element(&a);
        let text = serde_json::to_string(&json).unwrap();
        let back: ElementJson = serde_json::from_str(&text).unwrap();
        let b = back.to_element().unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert_eq!(a.algebra(), b.algebra());
    }

    #[test]
    fn map_round_trip() {
        let dom = AlgebraDescriptor::full_matrix(2).unwrap();
        let cod = AlgebraDescriptor::direct_sum(vec![1, 2]).unwrap();
        let m = random_linear_map(&dom, &cod, 7);
        let json = MapJson::from_map(&m);
        let text = serde_json::to_string(&json).unwrap();
        let back: MapJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_map().unwrap().matrix(), m.matrix());
    }

    #[test]
    fn descriptor_wire_format() {
        let ds = AlgebraDescriptor::direct_sum(vec![2, 3]).unwrap();
        assert_eq!(
            serde_json::to_string(&ds).unwrap(),
            r#"{"kind":"direct_sum","blocks":[2,3]}"#
        );
        let nil = AlgebraDescriptor::nilpotent(4).unwrap();
        assert_eq!(
            serde_json::to_string(&nil).unwrap(),
            r#"{"kind":"nilpotent","size":4}"#
        );
    }

    #[test]
    fn malformed_matrix_is_rejected() {
        let bad = MatrixJson {
            dim: 2,
            entries: vec![[1.0, 0.0]],
        };
        assert!(bad.to_matrix().is_err());
        let nan = MatrixJson {
            dim: 1,
            entries: vec![[f64::NAN, 0.0]],
        };
        assert!(nan.to_matrix().is_err());
    }
}
