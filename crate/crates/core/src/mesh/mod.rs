//! Order-k triangulations with boundary faces.
//!
//! Node ids are 0-based and contiguous. Each element lists its three
//! vertices counter-clockwise, followed for P2 by the nodes on edges
//! (0,1), (1,2), (2,0). A boundary face is `(element, local_edge)` where
//! local edge `e` joins local vertices `e` and `(e + 1) % 3`.

mod generate;
mod io;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::fem::{ElementMap, Order, TriangleRule};
use crate::geometry::DomainGeometry;
use crate::Vec2;

pub use generate::{generate_disk_mesh, MIN_ANGLE_DEGREES};
pub use io::{load_mesh, parse_mesh, write_mesh};

/// Largest admissible `h_T / ρ_T`.
pub const MAX_REGULARITY_RATIO: f64 = 10.0;

/// A mesh invariant that can be violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Orientation,
    Jacobian,
    EdgeNodes,
    BoundaryFaces,
    BoundaryCycle,
    Euler,
    ShapeRegularity,
    BoundaryOnDomain,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Check::Orientation => "orientation",
            Check::Jacobian => "jacobian",
            Check::EdgeNodes => "edge nodes",
            Check::BoundaryFaces => "boundary faces",
            Check::BoundaryCycle => "boundary cycle",
            Check::Euler => "euler",
            Check::ShapeRegularity => "shape regularity",
            Check::BoundaryOnDomain => "boundary on domain",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invariant violated ({check}): {detail}")]
    InvariantViolation { check: Check, detail: String },
    #[error("topology error: {0}")]
    Topology(String),
    #[error("mesh quality failure: {0}")]
    MeshQualityFailure(String),
    #[error("invalid mesh input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl MeshError {
    fn violation(check: Check, detail: impl Into<String>) -> Self {
        MeshError::InvariantViolation {
            check,
            detail: detail.into(),
        }
    }

    /// The violated invariant, if this is an invariant violation.
    pub fn check(&self) -> Option<Check> {
        match self {
            MeshError::InvariantViolation { check, .. } => Some(*check),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryFace {
    pub element: usize,
    pub local_edge: usize,
}

/// Size and shape statistics of the straight skeleton.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshSize {
    /// Largest element diameter (longest edge).
    pub h: f64,
    /// Smallest interior angle, in degrees.
    pub min_angle: f64,
    /// Largest `h_T / ρ_T` with ρ_T the inradius.
    pub regularity_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    order: Order,
    nodes: Vec<Vec2>,
    connectivity: Vec<usize>,
    boundary_faces: Vec<BoundaryFace>,
    boundary_nodes: Vec<bool>,
    h: f64,
}

impl Mesh {
    /// Builds a mesh and checks every structural invariant.
    ///
    /// `connectivity` holds `order.nodes_per_element()` node ids per element.
    /// When `boundary_faces` is `None` they are extracted from the
    /// connectivity; when given they must match the extracted set.
    pub fn new(
        order: Order,
        nodes: Vec<Vec2>,
        connectivity: Vec<usize>,
        boundary_faces: Option<Vec<BoundaryFace>>,
    ) -> Result<Self, MeshError> {
        let stride = order.nodes_per_element();
        if connectivity.is_empty() || connectivity.len() % stride != 0 {
            return Err(MeshError::InvalidInput(format!(
                "connectivity length {} is not a positive multiple of {stride}",
                connectivity.len()
            )));
        }
        if let Some(&bad) = connectivity.iter().find(|&&n| n >= nodes.len()) {
            return Err(MeshError::InvalidInput(format!("node id {bad} out of range")));
        }
        let vertices: Vec<[usize; 3]> = connectivity.chunks(stride).map(|c| [c[0], c[1], c[2]]).collect();
        let extracted = extract_boundary_faces(&vertices)?;
        let boundary_faces = match boundary_faces {
            None => extracted,
            Some(given) => {
                let a: BTreeSet<_> = given.iter().copied().collect();
                let b: BTreeSet<_> = extracted.iter().copied().collect();
                if a != b || given.len() != a.len() {
                    return Err(MeshError::violation(
                        Check::BoundaryFaces,
                        "listed boundary faces differ from the connectivity",
                    ));
                }
                given
            }
        };

        let mut boundary_nodes = vec![false; nodes.len()];
        for bf in &boundary_faces {
            let el = &connectivity[bf.element * stride..(bf.element + 1) * stride];
            boundary_nodes[el[bf.local_edge]] = true;
            boundary_nodes[el[(bf.local_edge + 1) % 3]] = true;
            if order == Order::Quadratic {
                boundary_nodes[el[3 + bf.local_edge]] = true;
            }
        }

        let mut mesh = Self {
            order,
            nodes,
            connectivity,
            boundary_faces,
            boundary_nodes,
            h: 0.0,
        };
        mesh.validate()?;
        mesh.h = mesh_size(&mesh).h;
        Ok(mesh)
    }

    fn validate(&self) -> Result<(), MeshError> {
        let vertices: Vec<[usize; 3]> = (0..self.num_elements()).map(|e| self.vertices(e)).collect();

        for (e, v) in vertices.iter().enumerate() {
            let [a, b, c] = v.map(|i| self.nodes[i]);
            if (b - a).perp(&(c - a)) <= 0.0 {
                return Err(MeshError::violation(
                    Check::Orientation,
                    format!("element {e} is not counter-clockwise"),
                ));
            }
        }

        let rule = TriangleRule::triangle(5);
        for e in 0..self.num_elements() {
            let map = ElementMap::new(self, e);
            for (xi, _) in rule.iter() {
                let det = map.eval(&Vec2::new(xi[0], xi[1])).det;
                if !(det > 0.0) {
                    return Err(MeshError::violation(
                        Check::Jacobian,
                        format!("element {e} has Jacobian determinant {det:e}"),
                    ));
                }
            }
        }

        if self.order == Order::Quadratic {
            let mut edge_nodes: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for e in 0..self.num_elements() {
                let el = self.element(e);
                for edge in 0..3 {
                    let (a, b) = (el[edge], el[(edge + 1) % 3]);
                    let key = (a.min(b), a.max(b));
                    let mid = el[3 + edge];
                    if *edge_nodes.entry(key).or_insert(mid) != mid {
                        return Err(MeshError::violation(
                            Check::EdgeNodes,
                            format!("edge ({a}, {b}) carries two different edge nodes"),
                        ));
                    }
                }
            }
        }

        check_boundary_cycle(&vertices, &self.boundary_faces)?;

        let used: BTreeSet<usize> = vertices.iter().flatten().copied().collect();
        let edges: BTreeSet<(usize, usize)> = vertices
            .iter()
            .flat_map(|v| (0..3).map(move |i| (v[i].min(v[(i + 1) % 3]), v[i].max(v[(i + 1) % 3]))))
            .collect();
        let euler = used.len() as i64 - edges.len() as i64 + vertices.len() as i64;
        if euler != 1 {
            return Err(MeshError::violation(Check::Euler, format!("V - E + F = {euler}")));
        }

        let size = mesh_size(self);
        if size.regularity_ratio > MAX_REGULARITY_RATIO {
            return Err(MeshError::violation(
                Check::ShapeRegularity,
                format!("h_T/rho_T = {} exceeds {MAX_REGULARITY_RATIO}", size.regularity_ratio),
            ));
        }
        Ok(())
    }

    /// Checks that every boundary node lies on Γ to `1e-10`.
    pub fn check_boundary_on(&self, domain: &DomainGeometry) -> Result<(), MeshError> {
        for (id, p) in self.nodes.iter().enumerate() {
            if self.boundary_nodes[id] {
                let phi = domain.level_set(p);
                if phi.abs() > 1e-10 {
                    return Err(MeshError::violation(
                        Check::BoundaryOnDomain,
                        format!("boundary node {id} has level set {phi:e}"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.connectivity.len() / self.order.nodes_per_element()
    }

    pub fn node(&self, id: usize) -> Vec2 {
        self.nodes[id]
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    /// Node ids of element `e` in local order.
    pub fn element(&self, e: usize) -> &[usize] {
        let stride = self.order.nodes_per_element();
        &self.connectivity[e * stride..(e + 1) * stride]
    }

    pub fn vertices(&self, e: usize) -> [usize; 3] {
        let el = self.element(e);
        [el[0], el[1], el[2]]
    }

    pub fn boundary_faces(&self) -> &[BoundaryFace] {
        &self.boundary_faces
    }

    /// Global node ids of a face: start, end, then the P2 edge node.
    pub fn face_nodes(&self, face: usize) -> Vec<usize> {
        let bf = self.boundary_faces[face];
        let el = self.element(bf.element);
        let mut out = vec![el[bf.local_edge], el[(bf.local_edge + 1) % 3]];
        if self.order == Order::Quadratic {
            out.push(el[3 + bf.local_edge]);
        }
        out
    }

    pub fn is_boundary_node(&self, id: usize) -> bool {
        self.boundary_nodes[id]
    }

    pub fn boundary_node_flags(&self) -> &[bool] {
        &self.boundary_nodes
    }

    /// Largest element diameter of the straight skeleton.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of vertices on the boundary.
    pub fn num_boundary_vertices(&self) -> usize {
        let set: BTreeSet<usize> = (0..self.boundary_faces.len())
            .flat_map(|f| self.face_nodes(f).into_iter().take(2))
            .collect();
        set.len()
    }

    /// Applies `transform` to every node coordinate.
    pub fn map_nodes(&self, transform: impl Fn(&Vec2) -> Vec2) -> Result<Self, MeshError> {
        Mesh::new(
            self.order,
            self.nodes.iter().map(transform).collect(),
            self.connectivity.clone(),
            Some(self.boundary_faces.clone()),
        )
    }
}

/// Edges that belong to exactly one triangle, ordered by element then local
/// edge.
pub fn extract_boundary_faces(elements: &[[usize; 3]]) -> Result<Vec<BoundaryFace>, MeshError> {
    let mut count: BTreeMap<(usize, usize), Vec<BoundaryFace>> = BTreeMap::new();
    for (e, v) in elements.iter().enumerate() {
        for local_edge in 0..3 {
            let (a, b) = (v[local_edge], v[(local_edge + 1) % 3]);
            count
                .entry((a.min(b), a.max(b)))
                .or_default()
                .push(BoundaryFace { element: e, local_edge });
        }
    }
    let mut faces = Vec::new();
    for ((a, b), owners) in count {
        match owners.len() {
            1 => faces.push(owners[0]),
            2 => {}
            n => {
                return Err(MeshError::Topology(format!("edge ({a}, {b}) belongs to {n} triangles")));
            }
        }
    }
    faces.sort();
    Ok(faces)
}

fn check_boundary_cycle(elements: &[[usize; 3]], faces: &[BoundaryFace]) -> Result<(), MeshError> {
    let mut next: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for f in faces {
        let v = elements[f.element];
        let (a, b) = (v[f.local_edge], v[(f.local_edge + 1) % 3]);
        next.entry(a).or_default().push(b);
    }
    if next.values().any(|succ| succ.len() != 1) {
        return Err(MeshError::violation(
            Check::BoundaryCycle,
            "a boundary vertex has more than one outgoing face",
        ));
    }
    let Some((&start, _)) = next.iter().next() else {
        return Err(MeshError::violation(Check::BoundaryCycle, "no boundary faces"));
    };
    let mut current = start;
    let mut steps = 0;
    loop {
        let Some(succ) = next.get(&current) else {
            return Err(MeshError::violation(Check::BoundaryCycle, "boundary curve is not closed"));
        };
        current = succ[0];
        steps += 1;
        if current == start || steps > faces.len() {
            break;
        }
    }
    if current != start || steps != faces.len() {
        return Err(MeshError::violation(
            Check::BoundaryCycle,
            format!("boundary walk closed after {steps} of {} faces", faces.len()),
        ));
    }
    Ok(())
}

/// Element size and shape statistics over the straight skeleton.
pub fn mesh_size(mesh: &Mesh) -> MeshSize {
    let mut out = MeshSize {
        h: 0.0,
        min_angle: 180.0,
        regularity_ratio: 0.0,
    };
    for e in 0..mesh.num_elements() {
        let [a, b, c] = mesh.vertices(e).map(|i| mesh.node(i));
        let lengths = [(b - a).norm(), (c - b).norm(), (a - c).norm()];
        let h_t = lengths.iter().copied().fold(0.0, f64::max);
        let area = 0.5 * (b - a).perp(&(c - a)).abs();
        let inradius = 2.0 * area / lengths.iter().sum::<f64>();
        let corners = [(a, b, c), (b, c, a), (c, a, b)];
        for (p, q, r) in corners {
            let (u, v) = (q - p, r - p);
            let angle = u.perp(&v).abs().atan2(u.dot(&v)).to_degrees();
            out.min_angle = out.min_angle.min(angle);
        }
        out.h = out.h.max(h_t);
        out.regularity_ratio = out.regularity_ratio.max(h_t / inradius);
    }
    out
}
