//! Implicit smooth domains.
//!
//! A domain is described by a level-set function φ that is negative inside,
//! zero on the boundary Γ and positive outside. Inside the tube
//! `|d| ≤ δ₀` every point has a unique decomposition `x = π(x) + d(x) n(π(x))`
//! where π is the closest-point projection onto Γ, d the signed distance and
//! n the outward unit normal. Projection is computed by a damped Newton
//! iteration, so the level set itself does not need to be a distance function.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::fem::{face_metric, EdgeRule};
use crate::mesh::Mesh;
use crate::{Mat2, Vec2};

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;
const NEWTON_DAMPING: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point ({x}, {y}) lies outside the tube of unique projection")]
    OutsideTube { x: f64, y: f64 },
    #[error("closest-point iteration did not converge in {0} steps")]
    NonConvergence(usize),
    #[error("level-set gradient vanishes at ({x}, {y})")]
    DegenerateGradient { x: f64, y: f64 },
    #[error("point ({x}, {y}) is not on the boundary (level set {value:e})")]
    NotOnBoundary { x: f64, y: f64, value: f64 },
    #[error("invalid domain parameters: {0}")]
    InvalidDomain(String),
}

/// Which smooth domain is represented.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    UnitDisk,
    /// Axis-aligned ellipse centred at the origin.
    Ellipse { semi_x: f64, semi_y: f64 },
}

/// A smooth convex domain given by a level set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainGeometry {
    kind: DomainKind,
    tube_halfwidth: f64,
}

/// Result of [`DomainGeometry::signed_distance`].
///
/// Outside the tube the level set is returned as a proxy and `exact` is false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedDistance {
    pub value: f64,
    pub exact: bool,
}

/// Point of Γ together with its local frame, at a boundary parameter.
#[derive(Debug, Clone, Copy)]
pub struct BoundarySample {
    pub point: Vec2,
    /// Derivative of the boundary curve with respect to the parameter.
    pub tangent: Vec2,
    pub normal: Vec2,
    pub curvature: f64,
}

impl DomainGeometry {
    pub fn unit_disk() -> Self {
        Self {
            kind: DomainKind::UnitDisk,
            tube_halfwidth: 0.5,
        }
    }

    /// Ellipse with semi-axes in `[0.5, 1.5]`. The tube half-width is half the
    /// smallest radius of curvature.
    pub fn ellipse(semi_x: f64, semi_y: f64) -> Result<Self, GeometryError> {
        let valid = |a: f64| a.is_finite() && (0.5..=1.5).contains(&a);
        if !valid(semi_x) || !valid(semi_y) {
            return Err(GeometryError::InvalidDomain(format!(
                "ellipse semi-axes must lie in [0.5, 1.5], got ({semi_x}, {semi_y})"
            )));
        }
        let (a, b) = (semi_x.max(semi_y), semi_x.min(semi_y));
        Ok(Self {
            kind: DomainKind::Ellipse { semi_x, semi_y },
            tube_halfwidth: 0.5 * b * b / a,
        })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    /// δ₀.
    pub fn tube_halfwidth(&self) -> f64 {
        self.tube_halfwidth
    }

    /// Both implemented domains are convex, so exterior projections are unique
    /// at any distance.
    pub fn is_convex(&self) -> bool {
        true
    }

    fn axes(&self) -> (f64, f64) {
        match self.kind {
            DomainKind::UnitDisk => (1.0, 1.0),
            DomainKind::Ellipse { semi_x, semi_y } => (semi_x, semi_y),
        }
    }

    /// φ(x) = sqrt((x/a)² + (y/b)²) − 1; for the unit disk this is |x| − 1.
    pub fn level_set(&self, x: &Vec2) -> f64 {
        match self.kind {
            DomainKind::UnitDisk => x.norm() - 1.0,
            DomainKind::Ellipse { .. } => {
                let (a, b) = self.axes();
                (x.x / a).hypot(x.y / b) - 1.0
            }
        }
    }

    pub fn level_set_gradient(&self, x: &Vec2) -> Vec2 {
        let (a, b) = self.axes();
        let rho = (x.x / a).hypot(x.y / b);
        if rho == 0.0 {
            return Vec2::zeros();
        }
        Vec2::new(x.x / (a * a * rho), x.y / (b * b * rho))
    }

    fn level_set_hessian(&self, x: &Vec2) -> Mat2 {
        let (a, b) = self.axes();
        let (a2, b2) = (a * a, b * b);
        let rho = (x.x / a).hypot(x.y / b);
        let rho3 = rho * rho * rho;
        let xx = 1.0 / (a2 * rho) - x.x * x.x / (a2 * a2 * rho3);
        let xy = -x.x * x.y / (a2 * b2 * rho3);
        let yy = 1.0 / (b2 * rho) - x.y * x.y / (b2 * b2 * rho3);
        Mat2::new(xx, xy, xy, yy)
    }

    /// Bound on |φ| that any point of the tube satisfies.
    fn level_set_bound(&self) -> f64 {
        let (a, b) = self.axes();
        2.0 * self.tube_halfwidth / a.min(b)
    }

    /// Signed distance d(x): negative inside, positive outside.
    pub fn signed_distance(&self, x: &Vec2) -> Result<SignedDistance, GeometryError> {
        let phi = self.level_set(x);
        let proxy = SignedDistance {
            value: phi,
            exact: false,
        };
        if phi.abs() > self.level_set_bound() {
            return Ok(proxy);
        }
        let p = match self.closest_point(x) {
            Ok(p) => p,
            Err(GeometryError::OutsideTube { .. }) => return Ok(proxy),
            Err(e) => return Err(e),
        };
        let dist = (x - p).norm();
        if dist > self.tube_halfwidth {
            return Ok(proxy);
        }
        Ok(SignedDistance {
            value: if phi < 0.0 { -dist } else { dist },
            exact: true,
        })
    }

    /// Closest-point projection π(x) onto Γ.
    ///
    /// Interior points deeper than δ₀ are rejected. Exterior points of a convex
    /// domain are projected at any distance.
    pub fn closest_point(&self, x: &Vec2) -> Result<Vec2, GeometryError> {
        let phi = self.level_set(x);
        let bound = self.level_set_bound();
        let outside_tube = phi < -bound || (phi > bound && !self.is_convex());
        if outside_tube || self.level_set_gradient(x).norm() < 1e-10 {
            return Err(GeometryError::OutsideTube { x: x.x, y: x.y });
        }

        let mut p = *x;
        let mut iterations = 0;

        // Newton on the level set along the gradient until p is on Γ.
        while iterations < NEWTON_MAX_ITER {
            let value = self.level_set(&p);
            if value.abs() <= NEWTON_TOL {
                break;
            }
            iterations += 1;
            let g = self.level_set_gradient(&p);
            let step = g * (value / g.norm_squared());
            let mut scale = 1.0;
            let mut next = p - step;
            while self.level_set(&next).abs() > value.abs() && scale > 1e-6 {
                scale *= NEWTON_DAMPING;
                next = p - step * scale;
            }
            p = next;
        }

        // Newton on x = p + μ ∇φ(p), φ(p) = 0: tangential correction.
        let g = self.level_set_gradient(&p);
        let mut mu = (x - p).dot(&g) / g.norm_squared();
        let residual = |p: &Vec2, mu: f64| -> Vector3<f64> {
            let g = self.level_set_gradient(p);
            let r = p + g * mu - x;
            Vector3::new(r.x, r.y, self.level_set(p))
        };
        let mut r = residual(&p, mu);
        while iterations < NEWTON_MAX_ITER {
            if r.norm() <= NEWTON_TOL {
                break;
            }
            iterations += 1;
            let g = self.level_set_gradient(&p);
            let h = self.level_set_hessian(&p);
            #[rustfmt::skip]
            let jac = Matrix3::new(
                1.0 + mu * h[(0, 0)], mu * h[(0, 1)], g.x,
                mu * h[(1, 0)], 1.0 + mu * h[(1, 1)], g.y,
                g.x, g.y, 0.0,
            );
            let Some(delta) = jac.lu().solve(&(-r)) else {
                return Err(GeometryError::NonConvergence(iterations));
            };
            let mut scale = 1.0;
            loop {
                let cand_p = p + Vec2::new(delta.x, delta.y) * scale;
                let cand_mu = mu + delta.z * scale;
                let cand_r = residual(&cand_p, cand_mu);
                if cand_r.norm() < r.norm() || scale < 1e-6 {
                    p = cand_p;
                    mu = cand_mu;
                    r = cand_r;
                    break;
                }
                scale *= NEWTON_DAMPING;
            }
        }
        if r.norm() > NEWTON_TOL {
            return Err(GeometryError::NonConvergence(NEWTON_MAX_ITER));
        }
        if phi < 0.0 && (x - p).norm() > self.tube_halfwidth {
            return Err(GeometryError::OutsideTube { x: x.x, y: x.y });
        }
        Ok(p)
    }

    /// Outward unit normal at a boundary point.
    pub fn unit_normal(&self, boundary_point: &Vec2) -> Result<Vec2, GeometryError> {
        let value = self.level_set(boundary_point);
        if value.abs() > 1e-8 {
            return Err(GeometryError::NotOnBoundary {
                x: boundary_point.x,
                y: boundary_point.y,
                value,
            });
        }
        let g = self.level_set_gradient(boundary_point);
        let norm = g.norm();
        if norm < 1e-10 {
            return Err(GeometryError::DegenerateGradient {
                x: boundary_point.x,
                y: boundary_point.y,
            });
        }
        Ok(g / norm)
    }

    /// Boundary parameter of a point on (or near) Γ, in `(-π, π]`.
    ///
    /// The parameter runs counter-clockwise; for the disk it is the polar angle.
    pub fn boundary_param(&self, p: &Vec2) -> f64 {
        let (a, b) = self.axes();
        (p.y / b).atan2(p.x / a)
    }

    pub fn boundary_sample(&self, t: f64) -> BoundarySample {
        let (a, b) = self.axes();
        let (s, c) = t.sin_cos();
        let point = Vec2::new(a * c, b * s);
        let tangent = Vec2::new(-a * s, b * c);
        let normal = Vec2::new(b * c, a * s).normalize();
        let speed2 = a * a * s * s + b * b * c * c;
        BoundarySample {
            point,
            tangent,
            normal,
            curvature: a * b / (speed2 * speed2.sqrt()),
        }
    }
}

/// Counter-clockwise parameter increment from `from` to `to`, in `[0, 2π)`.
pub(crate) fn ccw_param_span(from: f64, to: f64) -> f64 {
    (to - from).rem_euclid(2.0 * PI)
}

/// Largest `|d(x)|` over the quadrature points of all boundary faces.
///
/// This bounds the distance between Γ and Γ_h from below and converges at
/// the geometric approximation order of the mesh.
pub fn boundary_distance_profile(
    domain: &DomainGeometry,
    mesh: &Mesh,
    quad: &EdgeRule,
) -> Result<f64, GeometryError> {
    let mut profile: f64 = 0.0;
    for face in 0..mesh.boundary_faces().len() {
        for s in quad.points() {
            let metric = face_metric(mesh, face, s[0]).map_err(|_| GeometryError::OutsideTube {
                x: f64::NAN,
                y: f64::NAN,
            })?;
            let d = domain.signed_distance(&metric.point)?;
            if !d.exact {
                return Err(GeometryError::OutsideTube {
                    x: metric.point.x,
                    y: metric.point.y,
                });
            }
            profile = profile.max(d.value.abs());
        }
    }
    Ok(profile)
}
