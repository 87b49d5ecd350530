//! Natural extension of a finite element function beyond Ω_h.
//!
//! Outside Ω_h, a point `x` of the boundary skin is attributed to the face S
//! whose projected arc π(S) contains π(x); the value there is the element
//! polynomial of T_S composed with the inverse of the extrapolated map
//! F_{T_S} on the doubled reference triangle.

use crate::fem::{EdgeRule, ElementMap, ReferenceElement};
use crate::geometry::{boundary_distance_profile, ccw_param_span, DomainGeometry};
use crate::interpolation::SolutionField;
use crate::Vec2;

use super::NormError;

/// A field with its natural extension to the boundary skin.
pub struct NaturalExtension<'a> {
    field: &'a SolutionField<'a>,
    domain: DomainGeometry,
    maps: Vec<ElementMap>,
    boxes: Vec<(Vec2, Vec2)>,
    /// `(start parameter, span, face)` sorted by start parameter.
    arcs: Vec<(f64, f64, usize)>,
    skin_width: f64,
}

impl<'a> NaturalExtension<'a> {
    pub fn new(field: &'a SolutionField<'a>, domain: &DomainGeometry) -> Result<Self, NormError> {
        let mesh = field.mesh();
        let maps: Vec<ElementMap> = (0..mesh.num_elements()).map(|e| ElementMap::new(mesh, e)).collect();
        let boxes = maps
            .iter()
            .map(|m| {
                let mut lo = Vec2::repeat(f64::INFINITY);
                let mut hi = Vec2::repeat(f64::NEG_INFINITY);
                for c in m.coords() {
                    lo = lo.inf(c);
                    hi = hi.sup(c);
                }
                let pad = 0.25 * (hi - lo).norm();
                (lo - Vec2::repeat(pad), hi + Vec2::repeat(pad))
            })
            .collect();
        let mut arcs = Vec::with_capacity(mesh.boundary_faces().len());
        for face in 0..mesh.boundary_faces().len() {
            let (start, span) = face_arc(field, domain, face)?;
            arcs.push((start, span, face));
        }
        arcs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
        let profile = boundary_distance_profile(domain, mesh, &EdgeRule::gauss(7))?;
        Ok(Self {
            field,
            domain: *domain,
            maps,
            boxes,
            arcs,
            skin_width: 2.0 * profile + 1e-12,
        })
    }

    /// Half-width of the skin where the extension is defined.
    pub fn skin_width(&self) -> f64 {
        self.skin_width
    }

    /// Element containing `x` and the reference point, if `x ∈ Ω_h`.
    pub fn locate(&self, x: &Vec2) -> Option<(usize, Vec2)> {
        self.boxes
            .iter()
            .enumerate()
            .filter(|(_, (lo, hi))| x.x >= lo.x && x.y >= lo.y && x.x <= hi.x && x.y <= hi.y)
            .find_map(|(e, _)| {
                let xi = self.maps[e].invert(x)?;
                ReferenceElement::barycentric(&xi)
                    .iter()
                    .all(|&l| l >= -1e-12)
                    .then_some((e, xi))
            })
    }

    /// Face whose projected arc contains the boundary parameter `t`; points on
    /// a shared endpoint go to the lower face id.
    pub fn face_for_param(&self, t: f64) -> usize {
        let n = self.arcs.len();
        let idx = self.arcs.partition_point(|a| a.0 <= t);
        let mut best: Option<usize> = None;
        for i in [idx + 2 * n - 2, idx + 2 * n - 1, idx + 2 * n] {
            let (start, span, face) = self.arcs[i % n];
            let offset = ccw_param_span(start, t);
            let inside = offset <= span + 1e-14 || offset >= 2.0 * std::f64::consts::PI - 1e-14;
            if inside && best.is_none_or(|b| face < b) {
                best = Some(face);
            }
        }
        best.unwrap_or_else(|| {
            // parameter fell in no arc (meshes not matching Γ): nearest start
            self.arcs
                .iter()
                .min_by(|a, b| {
                    let da = ccw_param_span(t, a.0).min(ccw_param_span(a.0, t));
                    let db = ccw_param_span(t, b.0).min(ccw_param_span(b.0, t));
                    da.total_cmp(&db)
                })
                .map(|a| a.2)
                .expect("mesh has boundary faces")
        })
    }

    /// Value and gradient of the polynomial of T_S extrapolated to `x`.
    pub fn eval_on_face(&self, face: usize, x: &Vec2) -> Result<(f64, Vec2), NormError> {
        let element = self.field.mesh().boundary_faces()[face].element;
        let map = &self.maps[element];
        let xi = map.invert(x).ok_or(NormError::MapInversionFailure { element, x: x.x, y: x.y })?;
        Ok(self.field.eval_mapped(map, &xi))
    }

    /// Value and gradient of ū_h at `x`.
    pub fn eval(&self, x: &Vec2) -> Result<(f64, Vec2), NormError> {
        if let Some((e, xi)) = self.locate(x) {
            return Ok(self.field.eval_mapped(&self.maps[e], &xi));
        }
        let d = self.domain.signed_distance(x)?;
        if !d.exact || d.value.abs() > self.skin_width {
            return Err(NormError::OutsideSkin { x: x.x, y: x.y });
        }
        let p = self.domain.closest_point(x)?;
        let face = self.face_for_param(self.domain.boundary_param(&p));
        self.eval_on_face(face, x)
    }
}

/// Start parameter and counter-clockwise span of π(S).
pub(crate) fn face_arc(field: &SolutionField, domain: &DomainGeometry, face: usize) -> Result<(f64, f64), NormError> {
    let mesh = field.mesh();
    let ids = mesh.face_nodes(face);
    let a = domain.closest_point(&mesh.node(ids[0]))?;
    let b = domain.closest_point(&mesh.node(ids[1]))?;
    let start = domain.boundary_param(&a);
    Ok((start, ccw_param_span(start, domain.boundary_param(&b))))
}

/// One-shot evaluation of the natural extension at a point.
pub fn natural_extension_eval(field: &SolutionField, domain: &DomainGeometry, point: &Vec2) -> Result<(f64, Vec2), NormError> {
    NaturalExtension::new(field, domain)?.eval(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{face_metric, Order};
    use crate::interpolation::lagrange_interpolate;
    use crate::mesh::generate_disk_mesh;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Random point between Γ_h and Γ: on the ray at angle θ between the
    /// chord (r_h) and the circle (r = 1).
    fn skin_point(mesh: &crate::mesh::Mesh, rng: &mut ChaCha8Rng) -> Vec2 {
        let n = mesh.num_boundary_vertices() as f64;
        let t: f64 = rng.random_range(-PI..PI);
        // chord through the two neighbouring boundary vertices at angles 2πi/n
        let step = 2.0 * PI / n;
        let i = (t / step).floor();
        let mid = (i + 0.5) * step;
        let r_h = (step / 2.0).cos() / (t - mid).cos();
        let r = rng.random_range(r_h..1.0);
        Vec2::new(r * t.cos(), r * t.sin())
    }

    #[test]
    fn affine_field_extends_exactly() {
        let mesh = generate_disk_mesh(24, Order::Linear).unwrap();
        let disk = DomainGeometry::unit_disk();
        let ell = |p: &Vec2| 0.7 - 1.3 * p.x + 0.4 * p.y;
        let field = lagrange_interpolate(&mesh, ell).unwrap();
        let ext = NaturalExtension::new(&field, &disk).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let x = skin_point(&mesh, &mut rng);
            assert!(ext.locate(&x).is_none() || disk.level_set(&x).abs() < 1e-12);
            let (v, g) = ext.eval(&x).unwrap();
            assert!((v - ell(&x)).abs() < 1e-10);
            assert!((g - Vec2::new(-1.3, 0.4)).norm() < 1e-10);
        }
    }

    #[test]
    fn inside_and_extension_agree_on_faces() {
        for order in [Order::Linear, Order::Quadratic] {
            let mesh = generate_disk_mesh(16, order).unwrap();
            let disk = DomainGeometry::unit_disk();
            let field = lagrange_interpolate(&mesh, |p| (p.x * 3.0).sin() + p.y * p.y).unwrap();
            let ext = NaturalExtension::new(&field, &disk).unwrap();
            for face in 0..mesh.boundary_faces().len() {
                for s in [0.2, 0.5, 0.8] {
                    let x = face_metric(&mesh, face, s).unwrap().point;
                    let inside = ext.eval(&x).unwrap().0;
                    let extended = ext.eval_on_face(face, &x).unwrap().0;
                    assert!((inside - extended).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn far_points_rejected() {
        let mesh = generate_disk_mesh(16, Order::Linear).unwrap();
        let disk = DomainGeometry::unit_disk();
        let field = lagrange_interpolate(&mesh, |_| 1.0).unwrap();
        let ext = NaturalExtension::new(&field, &disk).unwrap();
        assert!(matches!(ext.eval(&Vec2::new(1.3, 0.0)), Err(NormError::OutsideSkin { .. })));
        assert!(ext.eval(&Vec2::new(0.0, 0.0)).is_ok());
    }

    #[test]
    fn lateral_tie_goes_to_lower_face() {
        let mesh = generate_disk_mesh(16, Order::Linear).unwrap();
        let disk = DomainGeometry::unit_disk();
        let field = lagrange_interpolate(&mesh, |_| 1.0).unwrap();
        let ext = NaturalExtension::new(&field, &disk).unwrap();
        for face in 0..mesh.boundary_faces().len() {
            let ids = mesh.face_nodes(face);
            let t = disk.boundary_param(&mesh.node(ids[0]));
            let owner = ext.face_for_param(t);
            let other = (0..mesh.boundary_faces().len())
                .find(|&f| mesh.face_nodes(f)[1] == ids[0])
                .unwrap();
            assert_eq!(owner, face.min(other));
        }
    }
}
