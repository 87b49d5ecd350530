use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{mesh_size, Mesh, MeshError};
use crate::fem::Order;
use crate::geometry::DomainGeometry;
use crate::Vec2;

/// Smallest admissible interior angle of a generated triangle, in degrees.
pub const MIN_ANGLE_DEGREES: f64 = 20.0;

/// Quasi-uniform triangulation of the unit disk with `n_boundary` vertices on
/// the unit circle.
///
/// The vertices form a centre node plus `R = max(2, ⌊N/2π⌋)` concentric
/// rings at radii `j/R`, ring `j` carrying `round(N j / R)` equally spaced
/// nodes; interior rings are staggered by half a spacing. Adjacent rings
/// are stitched by advancing along whichever ring has the next smaller
/// angle. For P2 the edge nodes are the straight-edge midpoints, except on
/// boundary edges where the midpoint is projected onto the circle.
pub fn generate_disk_mesh(n_boundary: usize, order: Order) -> Result<Mesh, MeshError> {
    if n_boundary < 8 {
        return Err(MeshError::InvalidInput(format!(
            "at least 8 boundary nodes required, got {n_boundary}"
        )));
    }
    let rings = ((n_boundary as f64 / (2.0 * PI)).floor() as usize).max(2);

    let mut nodes = vec![Vec2::zeros()];
    // (first node id, count, angular offset in units of the spacing)
    let mut layout = Vec::with_capacity(rings);
    for j in 1..=rings {
        let count = ((n_boundary * j) as f64 / rings as f64).round() as usize;
        let offset = if (rings - j) % 2 == 1 { 0.5 } else { 0.0 };
        let radius = j as f64 / rings as f64;
        layout.push((nodes.len(), count, offset));
        for i in 0..count {
            let t = 2.0 * PI * (i as f64 + offset) / count as f64;
            if j == rings {
                nodes.push(Vec2::new(t.cos(), t.sin()));
            } else {
                nodes.push(Vec2::new(radius * t.cos(), radius * t.sin()));
            }
        }
    }

    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let push_ccw = |tris: &mut Vec<[usize; 3]>, nodes: &[Vec2], t: [usize; 3]| {
        let [a, b, c] = t.map(|i| nodes[i]);
        if (b - a).perp(&(c - a)) > 0.0 {
            tris.push(t);
        } else {
            tris.push([t[0], t[2], t[1]]);
        }
    };

    let (first, count, _) = layout[0];
    for i in 0..count {
        push_ccw(&mut triangles, &nodes, [0, first + i, first + (i + 1) % count]);
    }

    for pair in layout.windows(2) {
        let (a_first, na, a_off) = pair[0];
        let (b_first, nb, b_off) = pair[1];
        let alpha = |i: usize| 2.0 * PI * (i as f64 + a_off) / na as f64;
        let beta = |j: usize| 2.0 * PI * (j as f64 + b_off) / nb as f64;
        let a_id = |i: usize| a_first + i % na;
        let b_id = |j: usize| b_first + j % nb;
        // angles below are unrolled so that comparisons never wrap
        let alpha0 = alpha(0);
        let mut j = ((alpha0 / (2.0 * PI)) * nb as f64 - b_off).floor().max(0.0) as usize;
        let j_end = j + nb;
        let mut i = 0;
        while i < na || j < j_end {
            let advance_outer = if i == na {
                true
            } else if j == j_end {
                false
            } else {
                beta(j + 1) < alpha(i + 1)
            };
            if advance_outer {
                push_ccw(&mut triangles, &nodes, [a_id(i), b_id(j), b_id(j + 1)]);
                j += 1;
            } else {
                push_ccw(&mut triangles, &nodes, [a_id(i), b_id(j), a_id(i + 1)]);
                i += 1;
            }
        }
    }

    let mut connectivity = Vec::with_capacity(triangles.len() * order.nodes_per_element());
    match order {
        Order::Linear => triangles.iter().for_each(|t| connectivity.extend_from_slice(t)),
        Order::Quadratic => {
            let boundary_first = layout[rings - 1].0;
            let on_boundary = |n: usize| n >= boundary_first;
            let mut edge_counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for t in &triangles {
                for e in 0..3 {
                    let (a, b) = (t[e], t[(e + 1) % 3]);
                    *edge_counts.entry((a.min(b), a.max(b))).or_default() += 1;
                }
            }
            let disk = DomainGeometry::unit_disk();
            let mut midnodes: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for t in &triangles {
                connectivity.extend_from_slice(t);
                for e in 0..3 {
                    let (a, b) = (t[e], t[(e + 1) % 3]);
                    let key = (a.min(b), a.max(b));
                    let id = match midnodes.get(&key) {
                        Some(&id) => id,
                        None => {
                            let mid = (nodes[a] + nodes[b]) * 0.5;
                            let boundary_edge = on_boundary(a) && on_boundary(b) && edge_counts[&key] == 1;
                            let p = if boundary_edge {
                                disk.closest_point(&mid).map_err(|e| MeshError::MeshQualityFailure(e.to_string()))?
                            } else {
                                mid
                            };
                            nodes.push(p);
                            midnodes.insert(key, nodes.len() - 1);
                            nodes.len() - 1
                        }
                    };
                    connectivity.push(id);
                }
            }
        }
    }

    let mesh = Mesh::new(order, nodes, connectivity, None).map_err(|e| match e {
        MeshError::InvariantViolation { check, detail } => {
            MeshError::MeshQualityFailure(format!("generated mesh violates {check}: {detail}"))
        }
        other => other,
    })?;
    let size = mesh_size(&mesh);
    if size.min_angle < MIN_ANGLE_DEGREES {
        return Err(MeshError::MeshQualityFailure(format!(
            "minimum angle {:.2} degrees below {MIN_ANGLE_DEGREES}",
            size.min_angle
        )));
    }
    debug_assert_eq!(mesh.num_boundary_vertices(), n_boundary);
    Ok(mesh)
}
