//! Error norms on the exact domain through the natural extension.
//!
//! ```text
//! ‖e‖²_Ω = ‖e‖²_{Ω_h} + Σ_S ‖ē‖²_{π(S) skin}
//! ‖e‖²_Γ = Σ_S ‖ē‖²_{π(S)}
//! ```
//!
//! Each skin cell is parametrised by the boundary parameter θ over π(S) and
//! the normal offset t, `x = c(θ) + t n(θ)`, with area element
//! `|c'(θ)| (1 + κ t) dθ dt`. For each θ the offset runs from the crossing
//! of the normal line with Γ_h up to Γ. Where Γ_h lies outside Ω the cell
//! is subtracted, since the element quadrature already counted it.

use nalgebra::{Matrix2, Vector2};

use crate::fem::{face_shape, EdgeRule, ElementMap, TriangleRule};
use crate::geometry::DomainGeometry;
use crate::interpolation::SolutionField;
use crate::Vec2;

use super::discrete::{bulk_squares, MIN_ERROR_EDGE_DEGREE, MIN_ERROR_TRIANGLE_DEGREE};
use super::extension::{face_arc, NaturalExtension};
use super::{require_degree, NormError};

/// `‖∇(u − ū_h)‖_Ω`, `‖∇_Γ(u − ū_h)‖_Γ`, `‖u − ū_h‖_Ω`, `‖u − ū_h‖_Γ`, in L².
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExactDomainErrors {
    pub grad_omega: f64,
    pub grad_gamma: f64,
    pub l2_omega: f64,
    pub l2_gamma: f64,
}

impl ExactDomainErrors {
    pub fn as_array(&self) -> [f64; 4] {
        [self.grad_omega, self.grad_gamma, self.l2_omega, self.l2_gamma]
    }
}

/// Signed normal offset `t` at which `c + t n` meets the curved face, and the
/// face parameter there.
fn crossing(map: &ElementMap, edge: usize, c: &Vec2, n: &Vec2, s0: f64) -> Option<(f64, f64)> {
    let order = map.reference().order();
    let face_local = map.reference().face_nodes(edge);
    let coords: Vec<Vec2> = face_local.iter().map(|&l| map.coords()[l]).collect();
    let curve = |s: f64| {
        let (vals, ders) = face_shape(order, s);
        let mut p = Vec2::zeros();
        let mut dp = Vec2::zeros();
        for (a, x) in coords.iter().enumerate() {
            p += x * vals[a];
            dp += x * ders[a];
        }
        (p, dp)
    };
    let (mut s, mut t) = (s0, 0.0);
    for _ in 0..50 {
        let (p, dp) = curve(s);
        let r = p - c - n * t;
        if r.norm() < 1e-15 {
            return Some((t, s));
        }
        let jac = Matrix2::new(dp.x, -n.x, dp.y, -n.y);
        let step = jac.try_inverse()? * Vector2::new(r.x, r.y);
        s -= step.x;
        t -= step.y;
        if step.norm() < 1e-16 {
            break;
        }
    }
    let (p, _) = curve(s);
    ((p - c - n * t).norm() < 1e-12).then_some((t, s))
}

/// Exact-domain error norms of `field` against `u`.
///
/// `quad_tri` integrates over Ω_h; `quad_edge` is used both along arcs and
/// across the skin.
pub fn error_norms_exact_domain<U, G>(
    field: &SolutionField,
    u: U,
    grad_u: G,
    domain: &DomainGeometry,
    quad_tri: &TriangleRule,
    quad_edge: &EdgeRule,
) -> Result<ExactDomainErrors, NormError>
where
    U: Fn(&Vec2) -> f64,
    G: Fn(&Vec2) -> Vec2,
{
    require_degree(quad_tri.exactness_degree(), MIN_ERROR_TRIANGLE_DEGREE)?;
    require_degree(quad_edge.exactness_degree(), MIN_ERROR_EDGE_DEGREE)?;
    let mesh = field.mesh();
    let ext = NaturalExtension::new(field, domain)?;
    let (mut grad_omega2, mut l2_omega2) = bulk_squares(field, &u, &grad_u, quad_tri)?;
    let (mut grad_gamma2, mut l2_gamma2) = (0.0, 0.0);

    for (face, bf) in mesh.boundary_faces().iter().enumerate() {
        let map = ElementMap::new(mesh, bf.element);
        let (start, span) = face_arc(field, domain, face)?;
        for (sq, wq) in quad_edge.iter() {
            let theta = start + span * sq[0];
            let b = domain.boundary_sample(theta);
            let speed = b.tangent.norm();
            let tangent = b.tangent / speed;

            let (uh, grad_uh) = ext.eval_on_face(face, &b.point)?;
            let dgamma = wq * span * speed;
            let diff = grad_u(&b.point) - grad_uh;
            l2_gamma2 += dgamma * (u(&b.point) - uh).powi(2);
            grad_gamma2 += dgamma * tangent.dot(&diff).powi(2);

            let (t_cross, _) = crossing(&map, bf.local_edge, &b.point, &b.normal, sq[0]).ok_or(
                NormError::MapInversionFailure {
                    element: bf.element,
                    x: b.point.x,
                    y: b.point.y,
                },
            )?;
            if t_cross == 0.0 {
                continue;
            }
            // t_cross < 0: Ω \ Ω_h, added; t_cross > 0: Ω_h \ Ω, removed
            let sign = if t_cross < 0.0 { 1.0 } else { -1.0 };
            let length = t_cross.abs();
            for (tq, wt) in quad_edge.iter() {
                let t = t_cross * tq[0];
                let x = b.point + b.normal * t;
                let (vh, grad_vh) = ext.eval_on_face(face, &x)?;
                let dx = sign * wq * span * wt * length * speed * (1.0 + b.curvature * t);
                l2_omega2 += dx * (u(&x) - vh).powi(2);
                grad_omega2 += dx * (grad_u(&x) - grad_vh).norm_squared();
            }
        }
    }

    Ok(ExactDomainErrors {
        grad_omega: grad_omega2.max(0.0).sqrt(),
        grad_gamma: grad_gamma2.sqrt(),
        l2_omega: l2_omega2.max(0.0).sqrt(),
        l2_gamma: l2_gamma2.sqrt(),
    })
}
