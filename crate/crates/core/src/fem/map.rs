use crate::fem::reference::{ReferenceElement, ShapeEval, MAX_NODES};
use crate::fem::FemError;
use crate::mesh::Mesh;
use crate::{Mat2, Vec2};

/// The isoparametric map F_T of one element, `F_T(x̂) = Σ a_i φ̂_i(x̂)`.
#[derive(Debug, Clone, Copy)]
pub struct ElementMap {
    reference: ReferenceElement,
    coords: [Vec2; MAX_NODES],
    nodes: [usize; MAX_NODES],
    element: usize,
}

/// F_T and its derivatives at one reference point.
#[derive(Debug, Clone, Copy)]
pub struct MappedPoint {
    pub reference: Vec2,
    pub x: Vec2,
    pub jacobian: Mat2,
    pub det: f64,
    pub shape: ShapeEval,
}

impl MappedPoint {
    /// Physical gradients `J⁻ᵀ ∇̂φ̂_i` of all shape functions.
    pub fn physical_gradients(&self) -> [Vec2; MAX_NODES] {
        let mut out = [Vec2::zeros(); MAX_NODES];
        let j = &self.jacobian;
        let inv_det = 1.0 / self.det;
        for (g, gh) in out.iter_mut().zip(self.shape.gradients()) {
            // J⁻ᵀ = (1/det) [[j11, -j10], [-j01, j00]]
            *g = Vec2::new(
                (j[(1, 1)] * gh.x - j[(1, 0)] * gh.y) * inv_det,
                (-j[(0, 1)] * gh.x + j[(0, 0)] * gh.y) * inv_det,
            );
        }
        out
    }
}

impl ElementMap {
    pub fn new(mesh: &Mesh, element: usize) -> Self {
        let reference = ReferenceElement::new(mesh.order());
        let local = mesh.element(element);
        let mut coords = [Vec2::zeros(); MAX_NODES];
        let mut nodes = [0; MAX_NODES];
        for (i, &n) in local.iter().enumerate() {
            coords[i] = mesh.node(n);
            nodes[i] = n;
        }
        Self {
            reference,
            coords,
            nodes,
            element,
        }
    }

    pub fn element(&self) -> usize {
        self.element
    }

    pub fn reference(&self) -> &ReferenceElement {
        &self.reference
    }

    /// Global node ids in local order.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes[..self.reference.num_nodes()]
    }

    pub fn coords(&self) -> &[Vec2] {
        &self.coords[..self.reference.num_nodes()]
    }

    /// Evaluates the map at any reference point, including points outside
    /// `T̂` (the polynomial map extrapolates naturally).
    pub fn eval(&self, reference: &Vec2) -> MappedPoint {
        let shape = self.reference.evaluate(reference);
        let mut x = Vec2::zeros();
        let mut jacobian = Mat2::zeros();
        for i in 0..shape.len {
            x += self.coords[i] * shape.values[i];
            jacobian += self.coords[i] * shape.gradients[i].transpose();
        }
        MappedPoint {
            reference: *reference,
            x,
            jacobian,
            det: jacobian.determinant(),
            shape,
        }
    }

    /// Like [`ElementMap::eval`] but rejects non-positive Jacobians.
    pub fn eval_checked(&self, reference: &Vec2) -> Result<MappedPoint, FemError> {
        let mp = self.eval(reference);
        if mp.det <= 0.0 || !mp.det.is_finite() {
            return Err(FemError::SingularJacobian {
                element: self.element,
                det: mp.det,
            });
        }
        Ok(mp)
    }

    /// Newton inversion of F_T, restricted to the doubled reference triangle
    /// `2T̂` (barycentric coordinates ≥ −1/3).
    pub fn invert(&self, x: &Vec2) -> Option<Vec2> {
        let mut xi = Vec2::new(1.0 / 3.0, 1.0 / 3.0);
        let scale = (self.coords[1] - self.coords[0]).norm().max((self.coords[2] - self.coords[0]).norm());
        for _ in 0..50 {
            let mp = self.eval(&xi);
            let r = mp.x - x;
            if r.norm() <= 1e-14 * scale.max(1.0) {
                return in_doubled_reference(&xi).then_some(xi);
            }
            let step = mp.jacobian.try_inverse()? * r;
            xi -= step;
            if !xi.iter().all(|v| v.is_finite()) || xi.norm() > 10.0 {
                return None;
            }
            if step.norm() < 1e-15 {
                return in_doubled_reference(&xi).then_some(xi);
            }
        }
        None
    }
}

fn in_doubled_reference(xi: &Vec2) -> bool {
    ReferenceElement::barycentric(xi).iter().all(|&l| l >= -1.0 / 3.0 - 1e-12)
}

/// Evaluates F_T and ∇F_T at a point of the reference triangle.
pub fn isoparametric_map(mesh: &Mesh, element: usize, ref_point: &Vec2) -> Result<(Vec2, Mat2), FemError> {
    if element >= mesh.num_elements() {
        return Err(FemError::NoSuchElement(element));
    }
    if ReferenceElement::barycentric(ref_point).iter().any(|&l| l < -1e-12) {
        return Err(FemError::OutsideReference {
            xi: ref_point.x,
            eta: ref_point.y,
        });
    }
    let mp = ElementMap::new(mesh, element).eval_checked(ref_point)?;
    Ok((mp.x, mp.jacobian))
}

/// Local frame of a boundary face F_S at an edge parameter.
#[derive(Debug, Clone, Copy)]
pub struct FaceMetric {
    pub point: Vec2,
    /// dF_S/ds.
    pub covariant: Vec2,
    /// `|dF_S/ds|`.
    pub sqrt_det: f64,
    /// `g / |g|²`, so that `∇_{Γ_h} v = ḡ dv/ds`.
    pub contravariant: Vec2,
    /// Outward unit normal to Γ_h.
    pub normal: Vec2,
    /// Element map evaluated at the same point, for ambient gradients from T_S.
    pub mapped: MappedPoint,
}

impl FaceMetric {
    /// Surface gradient of every element shape function at this point.
    pub fn surface_gradients(&self, edge: usize) -> [Vec2; MAX_NODES] {
        let dir = ReferenceElement::edge_direction(edge);
        let mut out = [Vec2::zeros(); MAX_NODES];
        for (g, gh) in out.iter_mut().zip(self.mapped.shape.gradients()) {
            *g = self.contravariant * gh.dot(&dir);
        }
        out
    }
}

/// Face metric for boundary face `face` (index into `mesh.boundary_faces()`).
pub fn face_metric(mesh: &Mesh, face: usize, s: f64) -> Result<FaceMetric, FemError> {
    let bf = *mesh.boundary_faces().get(face).ok_or(FemError::NoSuchFace(face))?;
    let map = ElementMap::new(mesh, bf.element);
    face_metric_with(&map, bf.local_edge, face, s)
}

pub(crate) fn face_metric_with(map: &ElementMap, edge: usize, face: usize, s: f64) -> Result<FaceMetric, FemError> {
    let mapped = map.eval(&ReferenceElement::edge_point(edge, s));
    let covariant = mapped.jacobian * ReferenceElement::edge_direction(edge);
    let sqrt_det = covariant.norm();
    if sqrt_det < 1e-12 {
        return Err(FemError::DegenerateFace { face });
    }
    let tangent = covariant / sqrt_det;
    let mut normal = Vec2::new(tangent.y, -tangent.x);
    // the vertex opposite the edge is interior
    let opposite = map.coords()[(edge + 2) % 3];
    if normal.dot(&(mapped.x - opposite)) < 0.0 {
        normal = -normal;
    }
    Ok(FaceMetric {
        point: mapped.x,
        covariant,
        sqrt_det,
        contravariant: covariant / (sqrt_det * sqrt_det),
        normal,
        mapped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::Order;
    use crate::mesh::{generate_disk_mesh, Mesh};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_triangle() -> Mesh {
        Mesh::new(
            Order::Linear,
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
            vec![0, 1, 2],
            None,
        )
        .unwrap()
    }

    #[test]
    fn identity_map_on_unit_triangle() {
        let mesh = unit_triangle();
        let (x, j) = isoparametric_map(&mesh, 0, &Vec2::new(0.25, 0.25)).unwrap();
        assert!((x - Vec2::new(0.25, 0.25)).norm() < 1e-15);
        assert!((j - Mat2::identity()).norm() < 1e-15);
        assert!(matches!(
            isoparametric_map(&mesh, 0, &Vec2::new(0.8, 0.8)),
            Err(FemError::OutsideReference { .. })
        ));
    }

    #[test]
    fn affine_jacobian_is_constant() {
        let mesh = Mesh::new(
            Order::Linear,
            vec![Vec2::new(0.3, -0.1), Vec2::new(1.2, 0.4), Vec2::new(-0.2, 0.9)],
            vec![0, 1, 2],
            None,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (_, j0) = isoparametric_map(&mesh, 0, &Vec2::new(0.1, 0.1)).unwrap();
        for _ in 0..5 {
            let a: f64 = rng.random_range(0.0..1.0);
            let b: f64 = rng.random_range(0.0..(1.0 - a));
            let (_, j) = isoparametric_map(&mesh, 0, &Vec2::new(a, b)).unwrap();
            assert!((j - j0).norm() < 1e-14);
        }
    }

    #[test]
    fn curved_element_jacobian_close_to_straight() {
        let mesh = generate_disk_mesh(32, Order::Quadratic).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for bf in mesh.boundary_faces() {
            let map = ElementMap::new(&mesh, bf.element);
            let c = map.coords();
            let straight = (c[1] - c[0]).perp(&(c[2] - c[0]));
            for _ in 0..5 {
                let a: f64 = rng.random_range(0.0..1.0);
                let b: f64 = rng.random_range(0.0..(1.0 - a));
                let det = map.eval(&Vec2::new(a, b)).det;
                let ratio = det / straight;
                assert!((0.9..=1.1).contains(&ratio), "ratio {ratio}");
            }
        }
    }

    #[test]
    fn straight_face_metric() {
        let mesh = unit_triangle();
        // local edge 1 runs from (1,0) to (0,1)
        let face = mesh.boundary_faces().iter().position(|f| f.local_edge == 1).unwrap();
        let m = face_metric(&mesh, face, 0.5).unwrap();
        assert!((m.point - Vec2::new(0.5, 0.5)).norm() < 1e-15);
        assert!((m.sqrt_det - 2f64.sqrt()).abs() < 1e-15);
        let r = 0.5f64.sqrt();
        assert!((m.normal - Vec2::new(r, r)).norm() < 1e-15);
        for s in [0.0, 0.3, 1.0] {
            assert!((face_metric(&mesh, face, s).unwrap().sqrt_det - 2f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn inversion_round_trip_in_doubled_triangle() {
        let mesh = generate_disk_mesh(16, Order::Quadratic).unwrap();
        let bf = mesh.boundary_faces()[3];
        let map = ElementMap::new(&mesh, bf.element);
        for xi in [Vec2::new(0.2, 0.3), Vec2::new(-0.2, 0.5), Vec2::new(0.6, 0.6)] {
            let x = map.eval(&xi).x;
            let back = map.invert(&x).unwrap();
            assert!((back - xi).norm() < 1e-12);
        }
        let far = map.eval(&Vec2::new(2.0, 2.0)).x;
        assert!(map.invert(&far).is_none());
    }
}
