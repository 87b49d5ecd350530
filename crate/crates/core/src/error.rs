use thiserror::Error;

use crate::error_norms::NormError;
use crate::fem::FemError;
use crate::geometry::GeometryError;
use crate::harness::HarnessError;
use crate::interpolation::InterpolationError;
use crate::linalg::LinalgError;
use crate::mesh::MeshError;

/// Union of the per-module error types.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Interpolation(#[from] InterpolationError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}
