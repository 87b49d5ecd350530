//! ASCII mesh files.
//!
//! ```text
//! order <k>
//! nodes <count>
//! <id> <x> <y>
//! elements <count>
//! <node ids...>
//! boundary <count>        # optional section
//! <element_id> <local_edge>
//! ```
//!
//! Ids are 0-based and contiguous; lines starting with `#` are comments.
//! Coordinates are written in shortest round-trip form, so reading a written
//! mesh reproduces every coordinate bit for bit.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{BoundaryFace, Mesh, MeshError};
use crate::fem::Order;
use crate::Vec2;

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    writeln!(out, "order {}", mesh.order().degree()).unwrap();
    writeln!(out, "nodes {}", mesh.num_nodes()).unwrap();
    for (id, p) in mesh.nodes().iter().enumerate() {
        writeln!(out, "{id} {:?} {:?}", p.x, p.y).unwrap();
    }
    writeln!(out, "elements {}", mesh.num_elements()).unwrap();
    for e in 0..mesh.num_elements() {
        let ids: Vec<String> = mesh.element(e).iter().map(usize::to_string).collect();
        writeln!(out, "{}", ids.join(" ")).unwrap();
    }
    writeln!(out, "boundary {}", mesh.boundary_faces().len()).unwrap();
    for f in mesh.boundary_faces() {
        writeln!(out, "{} {}", f.element, f.local_edge).unwrap();
    }
    out
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh, MeshError> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Self { inner: it.peekable() }
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), MeshError> {
        match self.inner.next() {
            Some((n, l)) => Ok((n, l.split_whitespace().collect())),
            None => Err(MeshError::Parse {
                line: 0,
                reason: format!("unexpected end of file, expected {what}"),
            }),
        }
    }

    fn header(&mut self, keyword: &str) -> Result<(usize, usize), MeshError> {
        let (line, tokens) = self.next_line(keyword)?;
        match tokens.as_slice() {
            [k, count] if *k == keyword => Ok((line, parse_token(count, line, "count")?)),
            _ => Err(MeshError::Parse {
                line,
                reason: format!("expected `{keyword} <count>`"),
            }),
        }
    }
}

fn parse_token<T: FromStr>(token: &str, line: usize, what: &str) -> Result<T, MeshError> {
    token.parse().map_err(|_| MeshError::Parse {
        line,
        reason: format!("invalid {what} `{token}`"),
    })
}

pub fn parse_mesh(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = Lines::new(text);

    let (line, k) = lines.header("order")?;
    let order = Order::from_degree(k).ok_or_else(|| MeshError::Parse {
        line,
        reason: format!("unsupported order {k}"),
    })?;

    let (_, n_nodes) = lines.header("nodes")?;
    let mut nodes = Vec::with_capacity(n_nodes);
    for expected in 0..n_nodes {
        let (line, t) = lines.next_line("node")?;
        if t.len() != 3 {
            return Err(MeshError::Parse {
                line,
                reason: "expected `id x y`".into(),
            });
        }
        let id: usize = parse_token(t[0], line, "node id")?;
        if id != expected {
            return Err(MeshError::Parse {
                line,
                reason: format!("node ids must be contiguous: expected {expected}, got {id}"),
            });
        }
        let x: f64 = parse_token(t[1], line, "coordinate")?;
        let y: f64 = parse_token(t[2], line, "coordinate")?;
        if !x.is_finite() || !y.is_finite() {
            return Err(MeshError::Parse {
                line,
                reason: "non-finite coordinate".into(),
            });
        }
        nodes.push(Vec2::new(x, y));
    }

    let (_, n_elements) = lines.header("elements")?;
    let stride = order.nodes_per_element();
    let mut connectivity = Vec::with_capacity(n_elements * stride);
    for _ in 0..n_elements {
        let (line, t) = lines.next_line("element")?;
        if t.len() != stride {
            return Err(MeshError::Parse {
                line,
                reason: format!("expected {stride} node ids"),
            });
        }
        for tok in t {
            let id: usize = parse_token(tok, line, "node id")?;
            if id >= n_nodes {
                return Err(MeshError::Parse {
                    line,
                    reason: format!("dangling node id {id}"),
                });
            }
            connectivity.push(id);
        }
    }

    let mut boundary = None;
    if lines.inner.peek().is_some() {
        let (_, n_faces) = lines.header("boundary")?;
        let mut faces = Vec::with_capacity(n_faces);
        for _ in 0..n_faces {
            let (line, t) = lines.next_line("boundary face")?;
            if t.len() != 2 {
                return Err(MeshError::Parse {
                    line,
                    reason: "expected `element_id local_edge`".into(),
                });
            }
            let element: usize = parse_token(t[0], line, "element id")?;
            let local_edge: usize = parse_token(t[1], line, "local edge")?;
            if element >= n_elements || local_edge > 2 {
                return Err(MeshError::Parse {
                    line,
                    reason: format!("invalid boundary face ({element}, {local_edge})"),
                });
            }
            faces.push(BoundaryFace { element, local_edge });
        }
        if let Some((line, _)) = lines.inner.next() {
            return Err(MeshError::Parse {
                line,
                reason: "trailing content".into(),
            });
        }
        boundary = Some(faces);
    }

    Mesh::new(order, nodes, connectivity, boundary)
}
