//! JSON forms of matrices, points, spaces, oscillator elements and maps.
//!
//! Complex numbers are two-element arrays `[re, im]`; matrices are arrays of
//! rows. Floats are written in shortest round-trip form, so a dump reloads
//! bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::maps::MapSpec;
use crate::oscillator::OscElement;
use crate::space::{projective_extension, Point, SampleSet, Space};

/// The 12 icosahedron vertices as an `embedded` space document.
pub const ICOSAHEDRON: &str = include_str!("../fixtures/icosahedron.json");

fn config_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<C64>> {
    m.row_iter().map(|r| r.iter().cloned().collect()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<C64>]) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
        return Err(Error::Dimension { expected: ncols, found: bad.len() });
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn matrix_to_json(m: &CMatrix) -> String {
    serde_json::to_string(&matrix_to_rows(m)).expect("complex rows serialize")
}

pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    let rows: Vec<Vec<C64>> = serde_json::from_str(text)?;
    matrix_from_rows(&rows)
}

pub fn dump_matrix(path: impl AsRef<Path>, m: &CMatrix) -> Result<()> {
    fs::write(path, matrix_to_json(m))?;
    Ok(())
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<CMatrix> {
    matrix_from_json(&fs::read_to_string(path)?)
}

pub fn vector_to_json(v: &CVector) -> String {
    serde_json::to_string(v.as_slice()).expect("complex vector serializes")
}

/// `{"space": "szego" | "moebius" | "klauder" | "embedded", "dim": d, "points": [...]}`.
///
/// Projective extensions are written with an extra `"degree"`; their points
/// are `{"lambda": [re, im], "base": <point>}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub space: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Value>,
}

#[derive(Deserialize, Serialize)]
struct KlauderDoc {
    z0: C64,
    zeta: Vec<C64>,
}

#[derive(Deserialize, Serialize)]
struct ProjectiveDoc {
    lambda: C64,
    base: Value,
}

impl SpaceDoc {
    pub fn space(&self) -> Result<Space> {
        let base = match self.space.as_str() {
            "szego" => Space::Szego,
            "moebius" => Space::Moebius,
            "klauder" => Space::klauder(self.dim.ok_or_else(|| config_err("dim", "klauder space needs a dimension"))?),
            "embedded" => Space::Embedded { dim: self.dim.ok_or_else(|| config_err("dim", "embedded space needs a dimension"))? },
            other => return Err(config_err("space", format!("unknown space `{other}`"))),
        };
        match self.degree {
            Some(e) => projective_extension(&base, e),
            None => Ok(base),
        }
    }

    pub fn sample(&self) -> Result<SampleSet> {
        let space = self.space()?;
        let points = self
            .points
            .iter()
            .enumerate()
            .map(|(i, v)| point_from_value(&space, v).map_err(|e| config_err(format!("points[{i}]"), e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if points.is_empty() {
            return Err(config_err("points", "no points given"));
        }
        SampleSet::new(space, points)
    }

    pub fn from_sample(sample: &SampleSet) -> Result<Self> {
        let (name, dim, degree, base) = match &sample.space {
            Space::Projective { base, degree } => (base.kind().name(), base_dim(base), Some(*degree), base.as_ref()),
            other => (other.kind().name(), base_dim(other), None, other),
        };
        let _ = base;
        let points = sample.points.iter().map(point_to_value).collect::<Result<_>>()?;
        Ok(Self { space: name.to_string(), dim, degree, points })
    }
}

fn base_dim(space: &Space) -> Option<usize> {
    match space {
        Space::Klauder { dim } | Space::Embedded { dim } => Some(*dim),
        _ => None,
    }
}

pub fn point_from_value(space: &Space, v: &Value) -> Result<Point> {
    let point = match space {
        Space::Szego => Point::Disk(serde_json::from_value(v.clone())?),
        Space::Moebius => {
            let [z1, z2]: [C64; 2] = serde_json::from_value(v.clone())?;
            Point::Moebius(z1, z2)
        }
        Space::Klauder { .. } => {
            let doc: KlauderDoc = serde_json::from_value(v.clone())?;
            Point::klauder(doc.z0, doc.zeta)
        }
        Space::Embedded { .. } => Point::Embedded(serde_json::from_value(v.clone())?),
        Space::Projective { base, .. } => {
            let doc: ProjectiveDoc = serde_json::from_value(v.clone())?;
            Point::projective(doc.lambda, point_from_value(base, &doc.base)?)
        }
        other => return Err(config_err("space", format!("{} points have no JSON form", other.kind().name()))),
    };
    space.check_point(&point)?;
    Ok(point)
}

pub fn point_to_value(p: &Point) -> Result<Value> {
    let v = match p {
        Point::Disk(z) => serde_json::to_value(z)?,
        Point::Moebius(a, b) => serde_json::to_value([a, b])?,
        Point::Klauder { z0, zeta } => serde_json::to_value(KlauderDoc { z0: *z0, zeta: zeta.clone() })?,
        Point::Embedded(v) => serde_json::to_value(v)?,
        Point::Projective { lambda, base } => serde_json::to_value(ProjectiveDoc { lambda: *lambda, base: point_to_value(base)? })?,
        other => return Err(config_err("points", format!("{other:?} has no JSON form"))),
    };
    Ok(v)
}

pub fn parse_points(text: &str) -> Result<SampleSet> {
    let doc: SpaceDoc = serde_json::from_str(text)?;
    doc.sample()
}

pub fn load_points(path: impl AsRef<Path>) -> Result<SampleSet> {
    parse_points(&fs::read_to_string(path)?)
}

/// `{"rho": [re, im], "p": [...], "q": [...], "A": [[...], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscDoc {
    pub rho: C64,
    pub p: Vec<C64>,
    pub q: Vec<C64>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<C64>>,
}

impl OscDoc {
    pub fn element(&self) -> Result<OscElement> {
        OscElement::new(self.rho, CVector::from_vec(self.p.clone()), CVector::from_vec(self.q.clone()), matrix_from_rows(&self.a)?)
    }

    pub fn from_element(x: &OscElement) -> Self {
        Self { rho: x.rho, p: x.p.iter().cloned().collect(), q: x.q.iter().cloned().collect(), a: matrix_to_rows(&x.a) }
    }
}

pub fn parse_osc(text: &str) -> Result<OscElement> {
    serde_json::from_str::<OscDoc>(text)?.element()
}

/// Which adjoint a Möbius map document claims.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoebiusAdjoint {
    /// `A^sigma`, the correct adjoint.
    #[default]
    Sigma,
    /// The plain conjugate transpose.
    Matrix,
}

/// A map document: a Möbius matrix, an oscillator element, or a scalar
/// multiplication of the ambient space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapDoc {
    Moebius {
        moebius: [[C64; 2]; 2],
        #[serde(default)]
        adjoint: MoebiusAdjoint,
    },
    Oscillator {
        oscillator: OscDoc,
    },
    Scalar {
        scalar: C64,
    },
}

impl MapDoc {
    pub fn map(&self, space: &Space) -> Result<MapSpec> {
        match self {
            MapDoc::Moebius { moebius, adjoint: MoebiusAdjoint::Sigma } => MapSpec::moebius(*moebius),
            MapDoc::Moebius { moebius, adjoint: MoebiusAdjoint::Matrix } => MapSpec::moebius_with_matrix_adjoint(*moebius),
            MapDoc::Oscillator { oscillator } => Ok(MapSpec::oscillator(oscillator.element()?)),
            MapDoc::Scalar { scalar } => MapSpec::scalar(space, *scalar),
        }
    }
}
