//! JSON body specifications.

use serde::{Deserialize, Serialize};

use super::{ConvexBody, Variant};
use crate::error::{GeomError, Result};
use crate::linalg::{matrix_from_rows, matrix_to_rows, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Ellipsoid {
        center: Vec<f64>,
        shape: Vec<Vec<f64>>,
    },
    Hpoly {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    Vpoly {
        vertices: Vec<Vec<f64>>,
    },
    Affine {
        #[serde(rename = "L")]
        l: Vec<Vec<f64>>,
        a: Vec<f64>,
        inner: Box<BodySpec>,
    },
}

impl BodySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GeomError::MalformedBody(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("body specs always serialize")
    }

    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Ball { center, radius } => ConvexBody::ball(center.clone(), *radius),
            BodySpec::Ellipsoid { center, shape } => {
                ConvexBody::ellipsoid(center.clone(), matrix_from_rows(shape)?)
            }
            BodySpec::Hpoly { a, b } => {
                ConvexBody::hpolytope(matrix_from_rows(a)?, Vector::from_column_slice(b))
            }
            BodySpec::Vpoly { vertices } => ConvexBody::vpolytope_from_rows(vertices),
            BodySpec::Affine { l, a, inner } => {
                let body = inner.build()?;
                let l = matrix_from_rows(l)?;
                body.affine_image(&l, &Vector::from_column_slice(a))
            }
        }
    }

    pub(crate) fn from_body(body: &ConvexBody) -> Self {
        match body.variant() {
            Variant::Ball { center, radius } => BodySpec::Ball {
                center: center.as_slice().to_vec(),
                radius: *radius,
            },
            Variant::Ellipsoid { center, shape } => BodySpec::Ellipsoid {
                center: center.as_slice().to_vec(),
                shape: matrix_to_rows(shape),
            },
            Variant::HPolytope { a, b } => BodySpec::Hpoly {
                a: matrix_to_rows(a),
                b: b.as_slice().to_vec(),
            },
            Variant::VPolytope { vertices } => BodySpec::Vpoly {
                vertices: vertices.iter().map(|v| v.as_slice().to_vec()).collect(),
            },
            Variant::Affine { l, a, inner } => BodySpec::Affine {
                l: matrix_to_rows(l),
                a: a.as_slice().to_vec(),
                inner: Box::new(Self::from_body(inner)),
            },
        }
    }
}
