//! Error norms on Ω_h/Γ_h and on the exact domain Ω/Γ, plus geometric and
//! consistency diagnostics.

mod diagnostics;
mod discrete;
mod exact;
mod extension;

use thiserror::Error;

use crate::fem::FemError;
use crate::geometry::GeometryError;

pub use diagnostics::{consistency_residual, normal_discrepancy};
pub use discrete::{error_norms_discrete, DiscreteErrors, MIN_ERROR_EDGE_DEGREE, MIN_ERROR_TRIANGLE_DEGREE};
pub use exact::{error_norms_exact_domain, ExactDomainErrors};
pub use extension::{natural_extension_eval, NaturalExtension};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("quadrature exact to degree {got}, at least {required} required")]
    QuadratureTooWeak { required: usize, got: usize },
    #[error("point ({x}, {y}) lies outside Ω_h and the boundary skin")]
    OutsideSkin { x: f64, y: f64 },
    #[error("could not invert the map of element {element} at ({x}, {y})")]
    MapInversionFailure { element: usize, x: f64, y: f64 },
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub(crate) fn require_degree(got: usize, required: usize) -> Result<(), NormError> {
    if got < required {
        Err(NormError::QuadratureTooWeak { required, got })
    } else {
        Ok(())
    }
}
