//! JSON body documents: `{"dimension": n, "body": {"type": ..., ...}}`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Ball, ConvexBody, Ellipsoid, HPolytope, HalfSpace, Intersection};
use crate::error::{Error, Result};

/// Top-level body file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyDocument {
    pub dimension: usize,
    pub body: BodySpec,
}

/// One facet `{"normal": [...], "offset": s}` of an H-polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Serialized body representation, tagged by `"type"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    Ellipsoid {
        center: Vec<f64>,
        shape: Vec<Vec<f64>>,
    },
    Hpolytope {
        facets: Vec<FacetSpec>,
        witness: Vec<f64>,
    },
    Intersection {
        members: Vec<BodySpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<Vec<f64>>,
    },
}

impl BodyDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidBody(format!("body JSON: {e}")))
    }

    /// Builds the body, checking the declared dimension.
    pub fn build(&self) -> Result<ConvexBody> {
        let body = self.body.build()?;
        if body.dimension() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, found: body.dimension() });
        }
        Ok(body)
    }

    pub fn from_body(body: &ConvexBody) -> Option<Self> {
        Some(Self { dimension: body.dimension(), body: BodySpec::from_body(body)? })
    }
}

fn vector(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        Ok(match self {
            BodySpec::Ball { center, radius } => Ball::new(vector(center), *radius)?.into(),
            BodySpec::Halfspace { normal, offset } => HalfSpace::new(vector(normal), *offset)?.into(),
            BodySpec::Ellipsoid { center, shape } => {
                let n = center.len();
                if shape.len() != n || shape.iter().any(|row| row.len() != n) {
                    return Err(Error::InvalidBody(format!("ellipsoid shape must be {n}x{n}")));
                }
                let q = DMatrix::from_fn(n, n, |i, j| shape[i][j]);
                Ellipsoid::new(vector(center), q)?.into()
            }
            BodySpec::Hpolytope { facets, witness } => {
                let facets = facets
                    .iter()
                    .map(|f| HalfSpace::new(vector(&f.normal), f.offset))
                    .collect::<Result<Vec<_>>>()?;
                HPolytope::new(facets, vector(witness))?.into()
            }
            BodySpec::Intersection { members, witness } => {
                let members = members.iter().map(BodySpec::build).collect::<Result<Vec<_>>>()?;
                Intersection::new(members, witness.as_deref().map(vector))?.into()
            }
        })
    }

    /// `None` for implicit bodies, which have no serialized form.
    pub fn from_body(body: &ConvexBody) -> Option<Self> {
        let slice = |v: &DVector<f64>| v.as_slice().to_vec();
        Some(match body {
            ConvexBody::HalfSpace(h) => BodySpec::Halfspace { normal: slice(h.normal()), offset: h.offset() },
            ConvexBody::Ball(b) => BodySpec::Ball { center: slice(b.center()), radius: b.radius() },
            ConvexBody::Ellipsoid(e) => {
                let q = e.shape();
                BodySpec::Ellipsoid {
                    center: slice(e.center()),
                    shape: (0..q.nrows()).map(|i| (0..q.ncols()).map(|j| q[(i, j)]).collect()).collect(),
                }
            }
            ConvexBody::HPolytope(p) => BodySpec::Hpolytope {
                facets: p
                    .facets()
                    .iter()
                    .map(|f| FacetSpec { normal: slice(f.normal()), offset: f.offset() })
                    .collect(),
                witness: slice(p.witness()),
            },
            ConvexBody::Implicit(_) => return None,
            ConvexBody::Intersection(i) => BodySpec::Intersection {
                members: i.members().iter().map(BodySpec::from_body).collect::<Option<Vec<_>>>()?,
                witness: Some(slice(i.witness())),
            },
        })
    }
}
