//! Finite element fields and the two interpolation operators onto V_h.
//!
//! Scott–Zhang: each node `p` is assigned a support σ_p (the lowest-id
//! boundary face containing it for boundary nodes, the lowest-id element
//! otherwise) and a dual function ψ_p spanned by the shape functions of σ_p
//! with `(φ_q, ψ_p)_{σ_p} = δ_pq`. The coefficient of `p` is `(v, ψ_p)_{σ_p}`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::fem::{face_metric_with, face_shape, EdgeRule, ElementMap, FemError, TriangleRule};
use crate::mesh::Mesh;
use crate::Vec2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpolationError {
    #[error("function evaluation failed at node {node}")]
    EvaluationFailure { node: usize },
    #[error("singular Gram matrix on {0:?}")]
    SingularGram(Support),
    #[error("expected {expected} coefficients, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Fem(#[from] FemError),
}

/// A function in V_h given by its nodal coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField<'m> {
    mesh: &'m Mesh,
    values: Vec<f64>,
}

impl<'m> SolutionField<'m> {
    pub fn new(mesh: &'m Mesh, values: Vec<f64>) -> Result<Self, InterpolationError> {
        if values.len() != mesh.num_nodes() {
            return Err(InterpolationError::LengthMismatch {
                expected: mesh.num_nodes(),
                got: values.len(),
            });
        }
        Ok(Self { mesh, values })
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn node_value(&self, id: usize) -> f64 {
        self.values[id]
    }

    /// Value and physical gradient of the element polynomial of `map` at a
    /// reference point (which may lie outside `T̂`).
    pub fn eval_mapped(&self, map: &ElementMap, reference: &Vec2) -> (f64, Vec2) {
        let mp = map.eval(reference);
        let grads = mp.physical_gradients();
        let mut value = 0.0;
        let mut grad = Vec2::zeros();
        for (i, &n) in map.nodes().iter().enumerate() {
            value += self.values[n] * mp.shape.values[i];
            grad += grads[i] * self.values[n];
        }
        (value, grad)
    }
}

/// Lagrange interpolation: the coefficient of every node is `v(node)`.
pub fn lagrange_interpolate<'m, F>(mesh: &'m Mesh, v: F) -> Result<SolutionField<'m>, InterpolationError>
where
    F: Fn(&Vec2) -> f64,
{
    let values = mesh
        .nodes()
        .iter()
        .enumerate()
        .map(|(id, p)| {
            let value = v(p);
            if value.is_finite() {
                Ok(value)
            } else {
                Err(InterpolationError::EvaluationFailure { node: id })
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    SolutionField::new(mesh, values)
}

/// The simplex a node's dual function lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Support {
    Element(usize),
    /// Index into `mesh.boundary_faces()`.
    Face(usize),
}

/// Dual function ψ_p = Σ_q `coefficients[q]` φ_{`nodes[q]`} on σ_p.
#[derive(Debug, Clone, PartialEq)]
pub struct DualRow {
    pub support: Support,
    pub nodes: Vec<usize>,
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeAssignment {
    rows: Vec<DualRow>,
    quad_tri: TriangleRule,
    quad_edge: EdgeRule,
}

impl NodeAssignment {
    pub fn rows(&self) -> &[DualRow] {
        &self.rows
    }

    pub fn support(&self, node: usize) -> Support {
        self.rows[node].support
    }
}

/// Local shape-function values times quadrature weight on a support.
struct SupportSamples {
    nodes: Vec<usize>,
    points: Vec<Vec2>,
    weights: Vec<f64>,
    /// `values[k][i]`: shape function `i` at point `k`.
    values: Vec<Vec<f64>>,
}

fn support_samples(mesh: &Mesh, support: Support, quad_tri: &TriangleRule, quad_edge: &EdgeRule) -> Result<SupportSamples, FemError> {
    let mut out = SupportSamples {
        nodes: Vec::new(),
        points: Vec::new(),
        weights: Vec::new(),
        values: Vec::new(),
    };
    match support {
        Support::Element(e) => {
            let map = ElementMap::new(mesh, e);
            out.nodes = map.nodes().to_vec();
            for (xi, w) in quad_tri.iter() {
                let mp = map.eval_checked(&Vec2::new(xi[0], xi[1]))?;
                out.points.push(mp.x);
                out.weights.push(w * mp.det);
                out.values.push(mp.shape.values().to_vec());
            }
        }
        Support::Face(f) => {
            let bf = mesh.boundary_faces()[f];
            let map = ElementMap::new(mesh, bf.element);
            out.nodes = mesh.face_nodes(f);
            for (s, w) in quad_edge.iter() {
                let metric = face_metric_with(&map, bf.local_edge, f, s[0])?;
                let (vals, _) = face_shape(mesh.order(), s[0]);
                out.points.push(metric.point);
                out.weights.push(w * metric.sqrt_det);
                out.values.push(vals[..out.nodes.len()].to_vec());
            }
        }
    }
    Ok(out)
}

impl SupportSamples {
    fn gram(&self) -> DMatrix<f64> {
        let n = self.nodes.len();
        let mut g = DMatrix::zeros(n, n);
        for (vals, w) in self.values.iter().zip(&self.weights) {
            for i in 0..n {
                for j in 0..n {
                    g[(i, j)] += w * vals[i] * vals[j];
                }
            }
        }
        g
    }

    fn moments(&self, v: &impl Fn(&Vec2) -> f64) -> Result<Vec<f64>, f64> {
        let mut m = vec![0.0; self.nodes.len()];
        for ((p, vals), w) in self.points.iter().zip(&self.values).zip(&self.weights) {
            let value = v(p);
            if !value.is_finite() {
                return Err(value);
            }
            for (mi, phi) in m.iter_mut().zip(vals) {
                *mi += w * value * phi;
            }
        }
        Ok(m)
    }
}

/// Assigns σ_p to every node and computes the dual rows by inverting the
/// local Gram matrices.
pub fn build_node_assignment(
    mesh: &Mesh,
    quad_edge: &EdgeRule,
    quad_tri: &TriangleRule,
) -> Result<NodeAssignment, InterpolationError> {
    let mut supports: Vec<Option<Support>> = vec![None; mesh.num_nodes()];
    for f in 0..mesh.boundary_faces().len() {
        for n in mesh.face_nodes(f) {
            supports[n].get_or_insert(Support::Face(f));
        }
    }
    for e in 0..mesh.num_elements() {
        for &n in mesh.element(e) {
            if !mesh.is_boundary_node(n) {
                supports[n].get_or_insert(Support::Element(e));
            }
        }
    }

    let mut inverses: BTreeMap<Support, (Vec<usize>, DMatrix<f64>)> = BTreeMap::new();
    let mut rows = Vec::with_capacity(mesh.num_nodes());
    for (p, support) in supports.into_iter().enumerate() {
        let support = support.expect("every node belongs to an element");
        if !inverses.contains_key(&support) {
            let samples = support_samples(mesh, support, quad_tri, quad_edge)?;
            let inv = samples
                .gram()
                .try_inverse()
                .ok_or(InterpolationError::SingularGram(support))?;
            inverses.insert(support, (samples.nodes, inv));
        }
        let (nodes, inv) = &inverses[&support];
        let local = nodes.iter().position(|&n| n == p).expect("node lies on its support");
        rows.push(DualRow {
            support,
            nodes: nodes.clone(),
            coefficients: inv.row(local).iter().copied().collect(),
        });
    }
    Ok(NodeAssignment {
        rows,
        quad_tri: quad_tri.clone(),
        quad_edge: quad_edge.clone(),
    })
}

/// Scott–Zhang interpolation `I_h v = Σ_p (v, ψ_p)_{σ_p} φ_p`.
pub fn scott_zhang_interpolate<'m, F>(
    mesh: &'m Mesh,
    assignment: &NodeAssignment,
    v: F,
) -> Result<SolutionField<'m>, InterpolationError>
where
    F: Fn(&Vec2) -> f64,
{
    let mut moments: BTreeMap<Support, Vec<f64>> = BTreeMap::new();
    let mut values = Vec::with_capacity(mesh.num_nodes());
    for (p, row) in assignment.rows.iter().enumerate() {
        if !moments.contains_key(&row.support) {
            let samples = support_samples(mesh, row.support, &assignment.quad_tri, &assignment.quad_edge)?;
            let m = samples
                .moments(&v)
                .map_err(|_| InterpolationError::EvaluationFailure { node: p })?;
            moments.insert(row.support, m);
        }
        let m = &moments[&row.support];
        values.push(row.coefficients.iter().zip(m).map(|(c, mi)| c * mi).sum());
    }
    SolutionField::new(mesh, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::Order;
    use crate::mesh::generate_disk_mesh;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rules() -> (EdgeRule, TriangleRule) {
        (EdgeRule::gauss(5), TriangleRule::triangle(5))
    }

    #[test]
    fn constant_lagrange() {
        let mesh = generate_disk_mesh(16, Order::Quadratic).unwrap();
        let f = lagrange_interpolate(&mesh, |_| 1.0).unwrap();
        assert!(f.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn lagrange_reports_failing_node() {
        let mesh = generate_disk_mesh(16, Order::Linear).unwrap();
        let err = lagrange_interpolate(&mesh, |p| if p.norm() == 0.0 { f64::NAN } else { 1.0 }).unwrap_err();
        assert_eq!(err, InterpolationError::EvaluationFailure { node: 0 });
    }

    #[test]
    fn affine_reproduced_inside_elements() {
        let mesh = generate_disk_mesh(24, Order::Linear).unwrap();
        let affine = |p: &Vec2| 0.3 + 1.7 * p.x - 2.1 * p.y;
        let field = lagrange_interpolate(&mesh, affine).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let e = rng.random_range(0..mesh.num_elements());
            let a: f64 = rng.random_range(0.0..1.0);
            let b: f64 = rng.random_range(0.0..(1.0 - a));
            let map = ElementMap::new(&mesh, e);
            let xi = Vec2::new(a, b);
            let (value, grad) = field.eval_mapped(&map, &xi);
            let x = map.eval(&xi).x;
            assert!((value - affine(&x)).abs() < 1e-12);
            assert!((grad - Vec2::new(1.7, -2.1)).norm() < 1e-12);
        }
    }

    #[test]
    fn single_triangle_assignment() {
        let mesh = Mesh::new(
            Order::Linear,
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
            vec![0, 1, 2],
            None,
        )
        .unwrap();
        let (qe, qt) = rules();
        let asg = build_node_assignment(&mesh, &qe, &qt).unwrap();
        for p in 0..3 {
            assert!(matches!(asg.support(p), Support::Face(_)));
        }
        assert_gram_identity(&mesh, &asg, &qe, &qt, 0..3);
    }

    fn assert_gram_identity(
        mesh: &Mesh,
        asg: &NodeAssignment,
        qe: &EdgeRule,
        qt: &TriangleRule,
        nodes: impl Iterator<Item = usize>,
    ) {
        for p in nodes {
            let row = &asg.rows()[p];
            let samples = support_samples(mesh, row.support, qt, qe).unwrap();
            let gram = samples.gram();
            for (q_local, &q) in row.nodes.iter().enumerate() {
                // (φ_q, ψ_p)_{σ_p}
                let pairing: f64 = row
                    .coefficients
                    .iter()
                    .enumerate()
                    .map(|(r, c)| c * gram[(q_local, r)])
                    .sum();
                let expected = if q == p { 1.0 } else { 0.0 };
                assert!((pairing - expected).abs() < 1e-10, "p={p} q={q}: {pairing}");
            }
        }
    }

    #[test]
    fn disk_assignment_follows_rule() {
        let mesh = generate_disk_mesh(32, Order::Linear).unwrap();
        let (qe, qt) = rules();
        let asg = build_node_assignment(&mesh, &qe, &qt).unwrap();
        for p in 0..mesh.num_nodes() {
            match asg.support(p) {
                Support::Face(_) => assert!(mesh.is_boundary_node(p)),
                Support::Element(_) => assert!(!mesh.is_boundary_node(p)),
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let picks: Vec<usize> = (0..10).map(|_| rng.random_range(0..mesh.num_nodes())).collect();
        assert_gram_identity(&mesh, &asg, &qe, &qt, picks.into_iter());
    }

    #[test]
    fn scott_zhang_reproduces_constants() {
        for order in [Order::Linear, Order::Quadratic] {
            let mesh = generate_disk_mesh(20, order).unwrap();
            let (qe, qt) = rules();
            let asg = build_node_assignment(&mesh, &qe, &qt).unwrap();
            let field = scott_zhang_interpolate(&mesh, &asg, |_| 2.5).unwrap();
            assert!(field.values().iter().all(|v| (v - 2.5).abs() < 1e-10));
        }
    }

    #[test]
    fn boundary_values_local_to_faces() {
        // an affine function restricted to a straight face is linear, so the
        // boundary coefficients reproduce it exactly
        let mesh = generate_disk_mesh(24, Order::Linear).unwrap();
        let (qe, qt) = rules();
        let asg = build_node_assignment(&mesh, &qe, &qt).unwrap();
        let affine = |p: &Vec2| 1.0 - 0.5 * p.x + 3.0 * p.y;
        let field = scott_zhang_interpolate(&mesh, &asg, affine).unwrap();
        for p in 0..mesh.num_nodes() {
            assert!((field.node_value(p) - affine(&mesh.node(p))).abs() < 1e-9);
        }
    }
}
