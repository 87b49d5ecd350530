//! Reference elements, quadrature, isoparametric maps and assembly.

mod assembly;
mod map;
mod quadrature;
mod reference;

use thiserror::Error;

pub use assembly::{assemble_system, local_face_matrices, AssembledSystem, FaceMatrices};
pub use map::{face_metric, isoparametric_map, ElementMap, FaceMetric, MappedPoint};
pub(crate) use map::face_metric_with;
pub use quadrature::{EdgeRule, QuadratureRule, TriangleRule};
pub use reference::{face_shape, Order, ReferenceElement, ShapeEval, MAX_NODES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("non-positive Jacobian determinant {det:e} in element {element}")]
    SingularJacobian { element: usize, det: f64 },
    #[error("boundary face {face} is degenerate")]
    DegenerateFace { face: usize },
    #[error("quadrature exact to degree {got}, at least {required} required")]
    QuadratureTooWeak { required: usize, got: usize },
    #[error("reference point ({xi}, {eta}) lies outside the reference triangle")]
    OutsideReference { xi: f64, eta: f64 },
    #[error("no element {0}")]
    NoSuchElement(usize),
    #[error("no boundary face {0}")]
    NoSuchFace(usize),
}
