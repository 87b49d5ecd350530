use std::fmt;

use crate::Vec2;

/// Largest number of local nodes (P2 triangle).
pub const MAX_NODES: usize = 6;

/// Polynomial order of the isoparametric elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Linear,
    Quadratic,
}

impl Order {
    pub fn degree(self) -> usize {
        match self {
            Order::Linear => 1,
            Order::Quadratic => 2,
        }
    }

    pub fn from_degree(k: usize) -> Option<Self> {
        match k {
            1 => Some(Order::Linear),
            2 => Some(Order::Quadratic),
            _ => None,
        }
    }

    /// Local nodes per triangle.
    pub fn nodes_per_element(self) -> usize {
        match self {
            Order::Linear => 3,
            Order::Quadratic => 6,
        }
    }

    /// Local nodes per boundary face.
    pub fn nodes_per_face(self) -> usize {
        self.degree() + 1
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.degree())
    }
}

/// Shape functions evaluated at one reference point.
#[derive(Debug, Clone, Copy)]
pub struct ShapeEval {
    pub len: usize,
    pub values: [f64; MAX_NODES],
    pub gradients: [Vec2; MAX_NODES],
}

impl ShapeEval {
    pub fn values(&self) -> &[f64] {
        &self.values[..self.len]
    }

    pub fn gradients(&self) -> &[Vec2] {
        &self.gradients[..self.len]
    }
}

/// Lagrange element on the unit triangle with vertices (0,0), (1,0), (0,1).
///
/// Local ordering: the three vertices counter-clockwise, then for P2 the
/// midpoints of edges (0,1), (1,2), (2,0). Local edge `e` joins vertices
/// `e` and `(e + 1) % 3` and carries the P2 edge node `3 + e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceElement {
    order: Order,
}

const VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

impl ReferenceElement {
    pub fn new(order: Order) -> Self {
        Self { order }
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn num_nodes(&self) -> usize {
        self.order.nodes_per_element()
    }

    /// The nodes Σ̂_k.
    pub fn nodes(&self) -> Vec<Vec2> {
        let mut nodes: Vec<Vec2> = VERTICES.iter().map(|v| Vec2::new(v[0], v[1])).collect();
        if self.order == Order::Quadratic {
            for e in 0..3 {
                let (a, b) = (VERTICES[e], VERTICES[(e + 1) % 3]);
                nodes.push(Vec2::new(0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])));
            }
        }
        nodes
    }

    /// Reference point on local edge `edge` at edge parameter `s ∈ [0, 1]`.
    pub fn edge_point(edge: usize, s: f64) -> Vec2 {
        let (a, b) = (VERTICES[edge], VERTICES[(edge + 1) % 3]);
        Vec2::new((1.0 - s) * a[0] + s * b[0], (1.0 - s) * a[1] + s * b[1])
    }

    /// d(reference point)/ds along local edge `edge`.
    pub fn edge_direction(edge: usize) -> Vec2 {
        let (a, b) = (VERTICES[edge], VERTICES[(edge + 1) % 3]);
        Vec2::new(b[0] - a[0], b[1] - a[1])
    }

    /// Element-local indices of the nodes on `edge`: start, end, then the
    /// edge node for P2.
    pub fn face_nodes(&self, edge: usize) -> Vec<usize> {
        let mut nodes = vec![edge, (edge + 1) % 3];
        if self.order == Order::Quadratic {
            nodes.push(3 + edge);
        }
        nodes
    }

    /// Values and reference gradients of all shape functions. Valid on any
    /// point of the plane, not only inside `T̂` (used for extrapolation).
    pub fn evaluate(&self, p: &Vec2) -> ShapeEval {
        let l = [1.0 - p.x - p.y, p.x, p.y];
        let dl = [Vec2::new(-1.0, -1.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        let mut out = ShapeEval {
            len: self.num_nodes(),
            values: [0.0; MAX_NODES],
            gradients: [Vec2::zeros(); MAX_NODES],
        };
        match self.order {
            Order::Linear => {
                out.values[..3].copy_from_slice(&l);
                out.gradients[..3].copy_from_slice(&dl);
            }
            Order::Quadratic => {
                for i in 0..3 {
                    out.values[i] = l[i] * (2.0 * l[i] - 1.0);
                    out.gradients[i] = dl[i] * (4.0 * l[i] - 1.0);
                }
                for e in 0..3 {
                    let (i, j) = (e, (e + 1) % 3);
                    out.values[3 + e] = 4.0 * l[i] * l[j];
                    out.gradients[3 + e] = (dl[i] * l[j] + dl[j] * l[i]) * 4.0;
                }
            }
        }
        out
    }

    /// Barycentric coordinates of a reference point.
    pub fn barycentric(p: &Vec2) -> [f64; 3] {
        [1.0 - p.x - p.y, p.x, p.y]
    }
}

/// 1D Lagrange basis on a face, in face-node order (start, end, mid), and
/// its derivative in the edge parameter.
pub fn face_shape(order: Order, s: f64) -> ([f64; 3], [f64; 3]) {
    match order {
        Order::Linear => ([1.0 - s, s, 0.0], [-1.0, 1.0, 0.0]),
        Order::Quadratic => (
            [(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)],
            [4.0 * s - 3.0, 4.0 * s - 1.0, 4.0 - 8.0 * s],
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kronecker_property() {
        for order in [Order::Linear, Order::Quadratic] {
            let el = ReferenceElement::new(order);
            for (j, node) in el.nodes().iter().enumerate() {
                let eval = el.evaluate(node);
                for (i, v) in eval.values().iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_and_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for order in [Order::Linear, Order::Quadratic] {
            let el = ReferenceElement::new(order);
            for _ in 0..50 {
                let p = Vec2::new(rng.random_range(-0.5..1.0), rng.random_range(-0.5..1.0));
                let eval = el.evaluate(&p);
                let sum: f64 = eval.values().iter().sum();
                assert!((sum - 1.0).abs() < 1e-14);
                let gsum: Vec2 = eval.gradients().iter().sum();
                assert!(gsum.norm() < 1e-13);
                // finite-difference gradient check
                let h = 1e-6;
                for i in 0..el.num_nodes() {
                    let fx = (el.evaluate(&(p + Vec2::new(h, 0.0))).values[i]
                        - el.evaluate(&(p - Vec2::new(h, 0.0))).values[i])
                        / (2.0 * h);
                    let fy = (el.evaluate(&(p + Vec2::new(0.0, h))).values[i]
                        - el.evaluate(&(p - Vec2::new(0.0, h))).values[i])
                        / (2.0 * h);
                    assert!((Vec2::new(fx, fy) - eval.gradients[i]).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn face_shape_matches_element_trace() {
        for order in [Order::Linear, Order::Quadratic] {
            let el = ReferenceElement::new(order);
            for edge in 0..3 {
                let face_nodes = el.face_nodes(edge);
                for s in [0.0, 0.2, 0.5, 0.9] {
                    let eval = el.evaluate(&ReferenceElement::edge_point(edge, s));
                    let (vals, ders) = face_shape(order, s);
                    for (a, &local) in face_nodes.iter().enumerate() {
                        assert!((eval.values[local] - vals[a]).abs() < 1e-14);
                        let d = eval.gradients[local].dot(&ReferenceElement::edge_direction(edge));
                        assert!((d - ders[a]).abs() < 1e-13);
                    }
                    // nodes off the edge vanish on it
                    for i in 0..el.num_nodes() {
                        if !face_nodes.contains(&i) {
                            assert!(eval.values[i].abs() < 1e-14);
                        }
                    }
                }
            }
        }
    }
}
