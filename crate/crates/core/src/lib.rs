//! Isoparametric finite elements for the generalized Robin problem
//!
//! ```text
//!   -Δu = f                      in Ω
//!   ∂u/∂n + u - Δ_Γ u = τ        on Γ = ∂Ω
//! ```
//!
//! on smooth planar domains, discretized with P1 or P2 isoparametric
//! triangles whose boundary nodes sit exactly on Γ. Data are supplied as
//! smooth extensions evaluated directly on the discrete domain Ω_h and its
//! boundary Γ_h.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: implicit domains, signed distance, closest-point projection.
//! * [`mesh`]: ring-based disk triangulations, mesh file I/O, invariants.
//! * [`fem`]: reference elements, quadrature, isoparametric maps, assembly.
//! * [`linalg`]: CSR matrices and preconditioned conjugate gradients.
//! * [`interpolation`]: Lagrange and Scott–Zhang interpolation.
//! * [`error_norms`]: discrete and exact-domain error norms, diagnostics.
//! * [`harness`]: manufactured solutions, convergence studies, reports.

pub mod error_norms;
pub mod fem;
pub mod geometry;
pub mod harness;
pub mod interpolation;
pub mod linalg;
pub mod mesh;

mod error;

pub use error::Error;

pub use error_norms::{DiscreteErrors, ExactDomainErrors};
pub use fem::{AssembledSystem, Order, QuadratureRule, ReferenceElement};
pub use geometry::{DomainGeometry, DomainKind};
pub use harness::{ConvergenceReport, ManufacturedSolution, StudyConfig};
pub use interpolation::{NodeAssignment, SolutionField};
pub use linalg::CsrMatrix;
pub use mesh::Mesh;

/// Points and vectors in the plane.
pub type Vec2 = nalgebra::Vector2<f64>;
/// 2×2 matrices (Jacobians, Hessians).
pub type Mat2 = nalgebra::Matrix2<f64>;
