//! Assembly of
//!
//! ```text
//! a_h(u, v) = (∇u, ∇v)_{Ω_h} + (u, v)_{Γ_h} + (∇_{Γ_h} u, ∇_{Γ_h} v)_{Γ_h}
//! ℓ_h(v)    = (f̃, v)_{Ω_h} + (τ̃, v)_{Γ_h}
//! ```
//!
//! over the isoparametric space V_h. Data are evaluated directly at physical
//! quadrature points of Ω_h and Γ_h.

use nalgebra::DMatrix;

use crate::fem::map::{face_metric_with, ElementMap};
use crate::fem::quadrature::{EdgeRule, TriangleRule};
use crate::fem::reference::face_shape;
use crate::fem::FemError;
use crate::linalg::{csr_from_triplets, CsrMatrix};
use crate::mesh::Mesh;
use crate::Vec2;

/// Stiffness matrix and load vector of the discrete problem.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

impl AssembledSystem {
    pub fn dof_count(&self) -> usize {
        self.rhs.len()
    }
}

/// Boundary mass and surface-stiffness matrices of one face, in face-node
/// order (start, end, then the P2 edge node).
#[derive(Debug, Clone, PartialEq)]
pub struct FaceMatrices {
    pub mass: DMatrix<f64>,
    pub surface_stiffness: DMatrix<f64>,
}

pub(crate) fn require_degree(got: usize, required: usize) -> Result<(), FemError> {
    if got < required {
        Err(FemError::QuadratureTooWeak { required, got })
    } else {
        Ok(())
    }
}

pub fn local_face_matrices(mesh: &Mesh, face: usize, quad_edge: &EdgeRule) -> Result<FaceMatrices, FemError> {
    let order = mesh.order();
    require_degree(quad_edge.exactness_degree(), 2 * order.degree() + 2)?;
    let bf = *mesh.boundary_faces().get(face).ok_or(FemError::NoSuchFace(face))?;
    let map = ElementMap::new(mesh, bf.element);
    let n = order.nodes_per_face();
    let mut mass = DMatrix::zeros(n, n);
    let mut stiffness = DMatrix::zeros(n, n);
    for (s, w) in quad_edge.iter() {
        let metric = face_metric_with(&map, bf.local_edge, face, s[0])?;
        let (vals, ders) = face_shape(order, s[0]);
        let dgamma = w * metric.sqrt_det;
        // |ḡ|² = 1/|g|²
        let inv_g2 = metric.contravariant.norm_squared();
        for i in 0..n {
            for j in 0..n {
                mass[(i, j)] += dgamma * vals[i] * vals[j];
                stiffness[(i, j)] += dgamma * inv_g2 * ders[i] * ders[j];
            }
        }
    }
    Ok(FaceMatrices {
        mass,
        surface_stiffness: stiffness,
    })
}

/// Assembles the stiffness matrix and load vector of the discrete problem.
pub fn assemble_system<F, T>(
    mesh: &Mesh,
    f: F,
    tau: T,
    quad_tri: &TriangleRule,
    quad_edge: &EdgeRule,
) -> Result<AssembledSystem, FemError>
where
    F: Fn(&Vec2) -> f64,
    T: Fn(&Vec2) -> f64,
{
    let k = mesh.order().degree();
    require_degree(quad_tri.exactness_degree(), 2 * k + 1)?;
    require_degree(quad_edge.exactness_degree(), 2 * k + 2)?;

    let n_local = mesh.order().nodes_per_element();
    let mut triplets = Vec::with_capacity(mesh.num_elements() * n_local * n_local + mesh.boundary_faces().len() * 9);
    let mut rhs = vec![0.0; mesh.num_nodes()];

    let mut local = vec![0.0; n_local * n_local];
    for e in 0..mesh.num_elements() {
        let map = ElementMap::new(mesh, e);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (xi, w) in quad_tri.iter() {
            let mp = map.eval_checked(&Vec2::new(xi[0], xi[1]))?;
            let grads = mp.physical_gradients();
            let dx = w * mp.det;
            let fx = f(&mp.x);
            for i in 0..n_local {
                rhs[map.nodes()[i]] += dx * fx * mp.shape.values[i];
                for j in 0..n_local {
                    local[i * n_local + j] += dx * grads[i].dot(&grads[j]);
                }
            }
        }
        for (i, &gi) in map.nodes().iter().enumerate() {
            for (j, &gj) in map.nodes().iter().enumerate() {
                triplets.push((gi, gj, local[i * n_local + j]));
            }
        }
    }

    for (face, bf) in mesh.boundary_faces().iter().enumerate() {
        let map = ElementMap::new(mesh, bf.element);
        let face_nodes: Vec<usize> = map
            .reference()
            .face_nodes(bf.local_edge)
            .iter()
            .map(|&l| map.nodes()[l])
            .collect();
        let matrices = local_face_matrices(mesh, face, quad_edge)?;
        for (s, w) in quad_edge.iter() {
            let metric = face_metric_with(&map, bf.local_edge, face, s[0])?;
            let (vals, _) = face_shape(mesh.order(), s[0]);
            let t = tau(&metric.point);
            for (a, &g) in face_nodes.iter().enumerate() {
                rhs[g] += w * metric.sqrt_det * t * vals[a];
            }
        }
        for (a, &ga) in face_nodes.iter().enumerate() {
            for (b, &gb) in face_nodes.iter().enumerate() {
                triplets.push((ga, gb, matrices.mass[(a, b)] + matrices.surface_stiffness[(a, b)]));
            }
        }
    }

    let matrix = csr_from_triplets(mesh.num_nodes(), &triplets).expect("mesh node ids are in range");
    Ok(AssembledSystem { matrix, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::Order;
    use crate::linalg::{conjugate_gradient, CgOptions};
    use crate::mesh::generate_disk_mesh;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn straight_edge_mesh(len: f64) -> (Mesh, usize) {
        let mesh = Mesh::new(
            Order::Linear,
            vec![Vec2::new(0.0, 0.0), Vec2::new(len, 0.0), Vec2::new(0.0, len)],
            vec![0, 1, 2],
            None,
        )
        .unwrap();
        let face = mesh.boundary_faces().iter().position(|f| f.local_edge == 0).unwrap();
        (mesh, face)
    }

    #[test]
    fn p1_face_matrices_match_exact_integrals() {
        for len in [1.0, 0.37, 2.5] {
            let (mesh, face) = straight_edge_mesh(len);
            let m = local_face_matrices(&mesh, face, &EdgeRule::gauss(5)).unwrap();
            // exact 1D integrals of hat functions
            let mass = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]) * (len / 6.0);
            let stiff = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]) / len;
            assert!((&m.mass - mass).abs().max() < 1e-12);
            assert!((&m.surface_stiffness - stiff).abs().max() < 1e-12);
        }
    }

    #[test]
    fn face_stiffness_annihilates_constants() {
        let mesh = generate_disk_mesh(16, Order::Quadratic).unwrap();
        for face in 0..mesh.boundary_faces().len() {
            let m = local_face_matrices(&mesh, face, &EdgeRule::gauss(5)).unwrap();
            let ones = nalgebra::DVector::from_element(3, 1.0);
            assert!((&m.surface_stiffness * ones).abs().max() < 1e-13);
        }
    }

    #[test]
    fn weak_edge_quadrature_rejected() {
        let mesh = generate_disk_mesh(16, Order::Quadratic).unwrap();
        assert!(matches!(
            local_face_matrices(&mesh, 0, &EdgeRule::gauss(3)),
            Err(FemError::QuadratureTooWeak { required: 6, got: 5 })
        ));
        assert!(matches!(
            assemble_system(&mesh, |_| 0.0, |_| 0.0, &TriangleRule::triangle(2), &EdgeRule::gauss(5)),
            Err(FemError::QuadratureTooWeak { .. })
        ));
    }

    #[test]
    fn single_triangle_bulk_stiffness() {
        let mesh = Mesh::new(
            Order::Linear,
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
            vec![0, 1, 2],
            None,
        )
        .unwrap();
        let full = assemble_system(&mesh, |_| 0.0, |_| 0.0, &TriangleRule::triangle(5), &EdgeRule::gauss(5)).unwrap();
        // subtract boundary contributions to isolate the bulk stiffness
        let mut boundary = DMatrix::<f64>::zeros(3, 3);
        for face in 0..3 {
            let bf = mesh.boundary_faces()[face];
            let m = local_face_matrices(&mesh, face, &EdgeRule::gauss(5)).unwrap();
            let nodes = [bf.local_edge, (bf.local_edge + 1) % 3];
            for a in 0..2 {
                for b in 0..2 {
                    boundary[(nodes[a], nodes[b])] += m.mass[(a, b)] + m.surface_stiffness[(a, b)];
                }
            }
        }
        let bulk = full.matrix.to_dense() - boundary;
        // hand integration of hat gradients on the unit right triangle
        let expected = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, -1.0, 1.0, 0.0, -1.0, 0.0, 1.0]) * 0.5;
        assert!((bulk - expected).abs().max() < 1e-14);
    }

    #[test]
    fn constant_solution_is_reproduced() {
        for order in [Order::Linear, Order::Quadratic] {
            let mesh = generate_disk_mesh(24, order).unwrap();
            let sys = assemble_system(&mesh, |_| 0.0, |_| 1.0, &TriangleRule::triangle(5), &EdgeRule::gauss(5)).unwrap();
            // A·1 equals (∫_{Γ_h} φ_i)_i, which is exactly the load vector for τ̃ = 1
            let ones = vec![1.0; sys.dof_count()];
            let a1 = sys.matrix.spmv(&ones).unwrap();
            let scale = sys.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (x, y) in a1.iter().zip(&sys.rhs) {
                assert!((x - y).abs() <= 1e-12 * scale);
            }
            let sol = conjugate_gradient(&sys.matrix, &sys.rhs, None, &CgOptions::default()).unwrap();
            assert!(sol.x.iter().all(|v| (v - 1.0).abs() < 1e-10));
        }
    }

    #[test]
    fn matrix_is_symmetric_positive_definite() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for order in [Order::Linear, Order::Quadratic] {
            let mesh = generate_disk_mesh(32, order).unwrap();
            let sys = assemble_system(&mesh, |_| 0.0, |_| 0.0, &TriangleRule::triangle(5), &EdgeRule::gauss(5)).unwrap();
            let a = &sys.matrix;
            let max = a.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(a.max_asymmetry() <= 1e-12 * max);
            for _ in 0..20 {
                let v: Vec<f64> = (0..a.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let av = a.spmv(&v).unwrap();
                let q: f64 = v.iter().zip(&av).map(|(x, y)| x * y).sum();
                assert!(q > 0.0);
            }
        }
    }
}
