use crate::fem::{face_metric_with, EdgeRule, ElementMap, TriangleRule};
use crate::geometry::{DomainGeometry, GeometryError};
use crate::mesh::Mesh;
use crate::Vec2;

use super::discrete::{MIN_ERROR_EDGE_DEGREE, MIN_ERROR_TRIANGLE_DEGREE};
use super::{require_degree, NormError};

/// Largest `|n(π(x)) − n_h(x)|` over the quadrature points of all faces.
pub fn normal_discrepancy(mesh: &Mesh, domain: &DomainGeometry, quad_edge: &EdgeRule) -> Result<f64, GeometryError> {
    let mut worst: f64 = 0.0;
    for (face, bf) in mesh.boundary_faces().iter().enumerate() {
        let map = ElementMap::new(mesh, bf.element);
        for s in quad_edge.points() {
            let metric = face_metric_with(&map, bf.local_edge, face, s[0]).map_err(|_| GeometryError::DegenerateGradient {
                x: f64::NAN,
                y: f64::NAN,
            })?;
            let p = domain.closest_point(&metric.point)?;
            let n = domain.unit_normal(&p)?;
            worst = worst.max((n - metric.normal).norm());
        }
    }
    Ok(worst)
}

/// Discrete dual norm `√(rᵀ D⁻¹ r)` of `r_i = a_h(ũ, φ_i) − ℓ_h(φ_i)`, with
/// `D` the diagonal of the stiffness matrix.
pub fn consistency_residual<U, G, F, T>(
    mesh: &Mesh,
    u: U,
    grad_u: G,
    f: F,
    tau: T,
    quad_tri: &TriangleRule,
    quad_edge: &EdgeRule,
) -> Result<f64, NormError>
where
    U: Fn(&Vec2) -> f64,
    G: Fn(&Vec2) -> Vec2,
    F: Fn(&Vec2) -> f64,
    T: Fn(&Vec2) -> f64,
{
    require_degree(quad_tri.exactness_degree(), MIN_ERROR_TRIANGLE_DEGREE)?;
    require_degree(quad_edge.exactness_degree(), MIN_ERROR_EDGE_DEGREE)?;
    let mut residual = vec![0.0; mesh.num_nodes()];
    let mut diag = vec![0.0; mesh.num_nodes()];

    for e in 0..mesh.num_elements() {
        let map = ElementMap::new(mesh, e);
        for (xi, w) in quad_tri.iter() {
            let mp = map.eval_checked(&Vec2::new(xi[0], xi[1]))?;
            let grads = mp.physical_gradients();
            let dx = w * mp.det;
            let gu = grad_u(&mp.x);
            let fx = f(&mp.x);
            for (i, &node) in map.nodes().iter().enumerate() {
                residual[node] += dx * (gu.dot(&grads[i]) - fx * mp.shape.values[i]);
                diag[node] += dx * grads[i].norm_squared();
            }
        }
    }

    for (face, bf) in mesh.boundary_faces().iter().enumerate() {
        let map = ElementMap::new(mesh, bf.element);
        let local = map.reference().face_nodes(bf.local_edge);
        for (s, w) in quad_edge.iter() {
            let metric = face_metric_with(&map, bf.local_edge, face, s[0])?;
            let surface = metric.surface_gradients(bf.local_edge);
            let dgamma = w * metric.sqrt_det;
            let x = metric.point;
            let gu = grad_u(&x);
            let gu_t = gu - metric.normal * metric.normal.dot(&gu);
            let (ux, tx) = (u(&x), tau(&x));
            for &l in &local {
                let node = map.nodes()[l];
                let phi = metric.mapped.shape.values[l];
                residual[node] += dgamma * ((ux - tx) * phi + gu_t.dot(&surface[l]));
                diag[node] += dgamma * (phi * phi + surface[l].norm_squared());
            }
        }
    }

    Ok(residual.iter().zip(&diag).map(|(r, d)| r * r / d).sum::<f64>().sqrt())
}
