//! JSON artifact formats.
//!
//! Every artifact the CLI reads or writes has a mirror struct here with
//! derived serde impls. Complex numbers are always two-element arrays
//! `[re, im]`; vectors are arrays of those; matrices are row-major arrays
//! of rows. The mirrors hold plain data only — converting back into core
//! types re-runs the constructors, so a hand-edited or tampered file fails
//! with the same errors the library would raise, and an
//! [`AffinePlane`] is rebuilt from its field descriptor and cross-checked
//! against the stored incidence rather than trusted.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dual::{BAssignment, DualError};
use crate::field::{FieldDescriptor, FieldError, FiniteField};
use crate::geometry::{
    build_affine_plane, AffinePlane, GeometryError, IncidenceStructure, LatinSquare,
};
use crate::linalg::{CMatrix, CVector, C64};
use crate::mub::{Basis, MubError, MubSet};
use crate::net::{NetError, QuantumNet};
use crate::sic::{Provenance, SicCandidate, SicError};

/// A complex number on the wire: `[re, im]`.
pub type ComplexPair = [f64; 2];

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed artifact: {0}")]
    Malformed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mub(#[from] MubError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Sic(#[from] SicError),
    #[error(transparent)]
    Dual(#[from] DualError),
}

pub fn vector_to_json(v: &CVector) -> Vec<ComplexPair> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_json(v: &[ComplexPair]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&[re, im]| C64::new(re, im)))
}

pub fn matrix_to_json(m: &CMatrix) -> Vec<Vec<ComplexPair>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &[Vec<ComplexPair>]) -> Result<CMatrix, JsonError> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(JsonError::Malformed("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |r, c| {
        C64::new(rows[r][c][0], rows[r][c][1])
    }))
}

/// Mirror of [`IncidenceStructure`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncidenceJson {
    pub n_points: usize,
    pub lines: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub point_labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub line_labels: Option<Vec<String>>,
}

impl From<&IncidenceStructure> for IncidenceJson {
    fn from(s: &IncidenceStructure) -> Self {
        Self {
            n_points: s.n_points(),
            lines: s.lines().to_vec(),
            point_labels: s.point_labels().map(<[String]>::to_vec),
            line_labels: s.line_labels().map(<[String]>::to_vec),
        }
    }
}

impl IncidenceJson {
    /// Duplicate lines are legal here: dual structures may contain them.
    pub fn to_structure(&self) -> Result<IncidenceStructure, JsonError> {
        let s = IncidenceStructure::allow_duplicates(self.n_points, self.lines.clone())?;
        Ok(s.with_labels(self.point_labels.clone(), self.line_labels.clone()))
    }
}

/// Mirror of one [`crate::geometry::Striation`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StriationJson {
    pub label: String,
    pub lines: Vec<Vec<usize>>,
}

/// Mirror of [`AffinePlane`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaneJson {
    pub order: u32,
    pub field: FieldDescriptor,
    pub incidence: IncidenceJson,
    pub striations: Vec<StriationJson>,
}

impl From<&AffinePlane> for PlaneJson {
    fn from(p: &AffinePlane) -> Self {
        Self {
            order: p.order(),
            field: p.field().clone(),
            incidence: IncidenceJson::from(p.incidence()),
            striations: p
                .striations()
                .iter()
                .map(|s| StriationJson {
                    label: s.label().to_string(),
                    lines: s.lines().to_vec(),
                })
                .collect(),
        }
    }
}

impl PlaneJson {
    /// Rebuild the plane from its field descriptor, then insist the stored
    /// incidence agrees — the construction is canonical, so any edit to
    /// the stored lines is detectable.
    pub fn to_plane(&self) -> Result<AffinePlane, JsonError> {
        let field = FiniteField::new(self.field.p, self.field.k)?;
        if field.modulus() != self.field.modulus.as_slice() {
            return Err(JsonError::Malformed(format!(
                "field modulus {:?} is not the canonical one {:?}",
                self.field.modulus,
                field.modulus()
            )));
        }
        let plane = build_affine_plane(&field);
        if plane.order() != self.order {
            return Err(JsonError::Malformed(format!(
                "order {} does not match field of order {}",
                self.order,
                plane.order()
            )));
        }
        if plane.incidence().lines() != self.incidence.lines.as_slice() {
            return Err(JsonError::Malformed(
                "stored incidence differs from the canonical plane of this field".into(),
            ));
        }
        Ok(plane)
    }
}

/// Mirror of [`LatinSquare`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatinSquareJson {
    pub order: usize,
    pub cells: Vec<Vec<usize>>,
}

impl From<&LatinSquare> for LatinSquareJson {
    fn from(sq: &LatinSquare) -> Self {
        Self {
            order: sq.order(),
            cells: sq.cells().to_vec(),
        }
    }
}

impl LatinSquareJson {
    pub fn to_square(&self) -> Result<LatinSquare, JsonError> {
        Ok(LatinSquare::from_cells(self.cells.clone())?)
    }
}

/// Mirror of one [`Basis`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisJson {
    pub label: String,
    pub vectors: Vec<Vec<ComplexPair>>,
}

/// Mirror of [`MubSet`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MubSetJson {
    pub dim: usize,
    pub provenance: String,
    pub bases: Vec<BasisJson>,
}

impl From<&MubSet> for MubSetJson {
    fn from(m: &MubSet) -> Self {
        Self {
            dim: m.dim(),
            provenance: m.provenance().to_string(),
            bases: m
                .bases()
                .iter()
                .map(|b| BasisJson {
                    label: b.label().to_string(),
                    vectors: b.vectors().iter().map(vector_to_json).collect(),
                })
                .collect(),
        }
    }
}

impl MubSetJson {
    pub fn to_mub_set(&self) -> Result<MubSet, JsonError> {
        let bases = self
            .bases
            .iter()
            .map(|b| {
                let vectors: Vec<CVector> =
                    b.vectors.iter().map(|v| vector_from_json(v)).collect();
                Basis::new(vectors, b.label.clone())
            })
            .collect::<Result<Vec<_>, _>>()?;
        let set = MubSet::from_bases(bases, self.provenance.clone())?;
        if set.dim() != self.dim {
            return Err(JsonError::Malformed(format!(
                "declared dim {} but bases have dim {}",
                self.dim,
                set.dim()
            )));
        }
        Ok(set)
    }
}

/// Mirror of [`SicCandidate`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SicCandidateJson {
    pub dim: usize,
    pub provenance: Provenance,
    pub vectors: Vec<Vec<ComplexPair>>,
}

impl From<&SicCandidate> for SicCandidateJson {
    fn from(c: &SicCandidate) -> Self {
        Self {
            dim: c.dim(),
            provenance: c.provenance(),
            vectors: c.vectors().iter().map(vector_to_json).collect(),
        }
    }
}

impl SicCandidateJson {
    pub fn to_candidate(&self) -> Result<SicCandidate, JsonError> {
        let vectors: Vec<CVector> = self.vectors.iter().map(|v| vector_from_json(v)).collect();
        let c = SicCandidate::new(vectors, self.provenance)?;
        if c.dim() != self.dim {
            return Err(JsonError::Malformed(format!(
                "declared dim {} but vectors have dim {}",
                self.dim,
                c.dim()
            )));
        }
        Ok(c)
    }
}

/// Mirror of [`QuantumNet`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetJson {
    pub dim: usize,
    pub plane: PlaneJson,
    pub line_projectors: Vec<Vec<Vec<ComplexPair>>>,
    pub point_operators: Vec<Vec<Vec<ComplexPair>>>,
}

impl From<&QuantumNet> for NetJson {
    fn from(net: &QuantumNet) -> Self {
        Self {
            dim: net.dim(),
            plane: PlaneJson::from(net.plane()),
            line_projectors: net.line_projectors().iter().map(matrix_to_json).collect(),
            point_operators: net.point_operators().iter().map(matrix_to_json).collect(),
        }
    }
}

impl NetJson {
    pub fn to_net(&self) -> Result<QuantumNet, JsonError> {
        let plane = self.plane.to_plane()?;
        let projectors = self
            .line_projectors
            .iter()
            .map(|m| matrix_from_json(m))
            .collect::<Result<Vec<_>, _>>()?;
        let operators = self
            .point_operators
            .iter()
            .map(|m| matrix_from_json(m))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QuantumNet::from_parts(plane, projectors, operators)?)
    }
}

/// Mirror of [`BAssignment`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BAssignmentJson {
    pub dim: usize,
    pub dual_plane: IncidenceJson,
    pub operators: Vec<Vec<Vec<ComplexPair>>>,
}

impl From<&BAssignment> for BAssignmentJson {
    fn from(a: &BAssignment) -> Self {
        Self {
            dim: a.dim(),
            dual_plane: IncidenceJson::from(a.dual_plane()),
            operators: a.operators().iter().map(matrix_to_json).collect(),
        }
    }
}

impl BAssignmentJson {
    pub fn to_assignment(&self) -> Result<BAssignment, JsonError> {
        let plane = self.dual_plane.to_structure()?;
        let operators = self
            .operators
            .iter()
            .map(|m| matrix_from_json(m))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BAssignment::new(self.dim, plane, operators)?)
    }
}
