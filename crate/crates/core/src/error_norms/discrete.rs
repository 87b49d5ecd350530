use crate::fem::{face_metric_with, EdgeRule, ElementMap, TriangleRule};
use crate::interpolation::SolutionField;
use crate::Vec2;

use super::{require_degree, NormError};

/// Error quadrature must be stronger than the degree-5 assembly rules.
pub const MIN_ERROR_TRIANGLE_DEGREE: usize = 7;
/// Seven Gauss points on each face.
pub const MIN_ERROR_EDGE_DEGREE: usize = 13;

/// `‖∇(ũ − u_h)‖_{Ω_h}`, `‖∇_{Γ_h}(ũ − u_h)‖_{Γ_h}`, `‖ũ − u_h‖_{Ω_h}`,
/// `‖ũ − u_h‖_{Γ_h}`, all in L².
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiscreteErrors {
    pub grad_omega: f64,
    pub grad_gamma: f64,
    pub l2_omega: f64,
    pub l2_gamma: f64,
}

impl DiscreteErrors {
    pub fn as_array(&self) -> [f64; 4] {
        [self.grad_omega, self.grad_gamma, self.l2_omega, self.l2_gamma]
    }
}

/// Squared bulk norms `(‖∇e‖², ‖e‖²)` over Ω_h.
pub(crate) fn bulk_squares<U, G>(field: &SolutionField, u: &U, grad_u: &G, quad_tri: &TriangleRule) -> Result<(f64, f64), NormError>
where
    U: Fn(&Vec2) -> f64,
    G: Fn(&Vec2) -> Vec2,
{
    let mesh = field.mesh();
    let (mut grad2, mut l2) = (0.0, 0.0);
    for e in 0..mesh.num_elements() {
        let map = ElementMap::new(mesh, e);
        for (xi, w) in quad_tri.iter() {
            let xi = Vec2::new(xi[0], xi[1]);
            let mp = map.eval_checked(&xi)?;
            let (uh, grad_uh) = field.eval_mapped(&map, &xi);
            let dx = w * mp.det;
            l2 += dx * (u(&mp.x) - uh).powi(2);
            grad2 += dx * (grad_u(&mp.x) - grad_uh).norm_squared();
        }
    }
    Ok((grad2, l2))
}

/// Error norms on the discrete domain.
///
/// Surface gradients on Γ_h are tangential projections `(I − n_h ⊗ n_h)`
/// of ambient gradients; the ambient gradient of `u_h` on a face is taken
/// from the element the face belongs to.
pub fn error_norms_discrete<U, G>(
    field: &SolutionField,
    u: U,
    grad_u: G,
    quad_tri: &TriangleRule,
    quad_edge: &EdgeRule,
) -> Result<DiscreteErrors, NormError>
where
    U: Fn(&Vec2) -> f64,
    G: Fn(&Vec2) -> Vec2,
{
    require_degree(quad_tri.exactness_degree(), MIN_ERROR_TRIANGLE_DEGREE)?;
    require_degree(quad_edge.exactness_degree(), MIN_ERROR_EDGE_DEGREE)?;
    let mesh = field.mesh();
    let (grad_omega2, l2_omega2) = bulk_squares(field, &u, &grad_u, quad_tri)?;

    let (mut grad_gamma2, mut l2_gamma2) = (0.0, 0.0);
    for (face, bf) in mesh.boundary_faces().iter().enumerate() {
        let map = ElementMap::new(mesh, bf.element);
        for (s, w) in quad_edge.iter() {
            let metric = face_metric_with(&map, bf.local_edge, face, s[0])?;
            let (uh, grad_uh) = field.eval_mapped(&map, &metric.mapped.reference);
            let diff = grad_u(&metric.point) - grad_uh;
            let tangential = diff - metric.normal * metric.normal.dot(&diff);
            let dgamma = w * metric.sqrt_det;
            l2_gamma2 += dgamma * (u(&metric.point) - uh).powi(2);
            grad_gamma2 += dgamma * tangential.norm_squared();
        }
    }

    Ok(DiscreteErrors {
        grad_omega: grad_omega2.sqrt(),
        grad_gamma: grad_gamma2.sqrt(),
        l2_omega: l2_omega2.sqrt(),
        l2_gamma: l2_gamma2.sqrt(),
    })
}
