//! Finite directed multigraphs with stable vertex and edge identities.
//!
//! A [`Graph`] is immutable once built. Vertex and edge ids are opaque
//! integers; the ascending id order of vertices fixes the indexing of
//! adjacency matrices. Parallel edges and self-loops are allowed.

mod algo;
mod io;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::IntMatrix;

pub use algo::{is_isomorphism, Cycle, SccDecomposition};
pub use io::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub src: VertexId,
    pub dst: VertexId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("edge {edge} references unknown vertex {vertex}")]
    UnknownEndpoint { edge: EdgeId, vertex: VertexId },
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
}

/// A finite directed multigraph `(E⁰, E¹, s, r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<VertexId>,
    edges: BTreeMap<EdgeId, Edge>,
    out: BTreeMap<VertexId, Vec<EdgeId>>,
    inc: BTreeMap<VertexId, Vec<EdgeId>>,
    vertex_labels: BTreeMap<VertexId, String>,
    edge_labels: BTreeMap<EdgeId, String>,
}

impl Graph {
    /// Builds a graph, checking id uniqueness and that every edge endpoint
    /// is a declared vertex.
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, GraphError> {
        let mut vs: Vec<VertexId> = Vec::new();
        let mut out = BTreeMap::new();
        let mut inc = BTreeMap::new();
        for v in vertices {
            if out.insert(v, Vec::new()).is_some() {
                return Err(GraphError::DuplicateVertex(v));
            }
            inc.insert(v, Vec::new());
            vs.push(v);
        }
        vs.sort_unstable();
        let mut es = BTreeMap::new();
        for e in edges {
            for endpoint in [e.src, e.dst] {
                if !out.contains_key(&endpoint) {
                    return Err(GraphError::UnknownEndpoint { edge: e.id, vertex: endpoint });
                }
            }
            if es.insert(e.id, e).is_some() {
                return Err(GraphError::DuplicateEdge(e.id));
            }
        }
        for e in es.values() {
            out.get_mut(&e.src).expect("checked").push(e.id);
            inc.get_mut(&e.dst).expect("checked").push(e.id);
        }
        Ok(Graph {
            vertices: vs,
            edges: es,
            out,
            inc,
            vertex_labels: BTreeMap::new(),
            edge_labels: BTreeMap::new(),
        })
    }

    /// Convenience constructor: vertices `0..n`, edges numbered in the given order.
    pub fn from_edge_list(n: u32, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        Graph::new(
            (0..n).map(VertexId),
            edges.iter().enumerate().map(|(i, &(s, d))| Edge {
                id: EdgeId(i as u32),
                src: VertexId(s),
                dst: VertexId(d),
            }),
        )
    }

    /// Attaches labels. Labels for unknown ids are ignored.
    pub fn with_labels(
        mut self,
        vertex_labels: BTreeMap<VertexId, String>,
        edge_labels: BTreeMap<EdgeId, String>,
    ) -> Self {
        self.vertex_labels = vertex_labels
            .into_iter()
            .filter(|(v, _)| self.out.contains_key(v))
            .collect();
        self.edge_labels = edge_labels
            .into_iter()
            .filter(|(e, _)| self.edges.contains_key(e))
            .collect();
        self
    }

    /// Interprets a square matrix as a graph: vertex `i` has id `i`, and
    /// `m[i][j]` parallel edges run from `i` to `j`. Edge ids follow
    /// row-major order.
    pub fn from_matrix(m: &IntMatrix) -> Result<Self, GraphError> {
        if !m.is_square() {
            return Err(GraphError::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        let n = m.rows();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for _ in 0..m.get(i, j) {
                    edges.push(Edge {
                        id: EdgeId(edges.len() as u32),
                        src: VertexId(i as u32),
                        dst: VertexId(j as u32),
                    });
                }
            }
        }
        Graph::new((0..n as u32).map(VertexId), edges)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.values()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(&id)
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.out.contains_key(&v)
    }

    /// Source of an edge. Panics on an unknown id.
    pub fn src(&self, e: EdgeId) -> VertexId {
        self.edges[&e].src
    }

    /// Range of an edge. Panics on an unknown id.
    pub fn dst(&self, e: EdgeId) -> VertexId {
        self.edges[&e].dst
    }

    /// `s⁻¹(v)` in ascending edge-id order.
    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        self.out.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `r⁻¹(v)` in ascending edge-id order.
    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        self.inc.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_edges(v).len()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_edges(v).len()
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.out_degree(v) == 0
    }

    pub fn is_source(&self, v: VertexId) -> bool {
        self.in_degree(v) == 0
    }

    /// Number of parallel edges from `a` to `b`.
    pub fn multiplicity(&self, a: VertexId, b: VertexId) -> u64 {
        self.out_edges(a).iter().filter(|&&e| self.dst(e) == b).count() as u64
    }

    /// Position of `v` in the ascending vertex order.
    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn successors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.out_edges(v).iter().map(move |&e| self.dst(e))
    }

    pub fn predecessors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.in_edges(v).iter().map(move |&e| self.src(e))
    }

    pub fn vertex_label(&self, v: VertexId) -> Option<&str> {
        self.vertex_labels.get(&v).map(String::as_str)
    }

    pub fn edge_label(&self, e: EdgeId) -> Option<&str> {
        self.edge_labels.get(&e).map(String::as_str)
    }

    pub fn vertex_labels(&self) -> &BTreeMap<VertexId, String> {
        &self.vertex_labels
    }

    pub fn edge_labels(&self) -> &BTreeMap<EdgeId, String> {
        &self.edge_labels
    }

    /// Display name: the label if present, otherwise `v<id>`.
    pub fn vertex_name(&self, v: VertexId) -> String {
        self.vertex_label(v).map(str::to_owned).unwrap_or_else(|| v.to_string())
    }

    pub fn edge_name(&self, e: EdgeId) -> String {
        self.edge_label(e).map(str::to_owned).unwrap_or_else(|| e.to_string())
    }

    /// Looks a vertex up by display name.
    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().copied().find(|&v| self.vertex_name(v) == name)
    }

    pub fn max_vertex_id(&self) -> Option<VertexId> {
        self.vertices.last().copied()
    }

    pub fn max_edge_id(&self) -> Option<EdgeId> {
        self.edges.keys().next_back().copied()
    }

    /// `A_E(v, w) = |s⁻¹(v) ∩ r⁻¹(w)|`, indexed by ascending vertex id.
    pub fn adjacency_matrix(&self) -> IntMatrix {
        let n = self.vertices.len();
        let mut m = IntMatrix::zeros(n, n);
        for e in self.edges.values() {
            let i = self.index_of(e.src).expect("endpoint");
            let j = self.index_of(e.dst).expect("endpoint");
            m.set(i, j, m.get(i, j) + 1);
        }
        m
    }

    /// No sinks and no sources.
    pub fn is_essential(&self) -> bool {
        self.vertices
            .iter()
            .all(|&v| self.out_degree(v) >= 1 && self.in_degree(v) >= 1)
    }

    /// `E* = (E⁰, E¹, r, s)`: same ids, source and range swapped.
    pub fn transpose(&self) -> Graph {
        let mut g = Graph::new(
            self.vertices.iter().copied(),
            self.edges.values().map(|e| Edge { id: e.id, src: e.dst, dst: e.src }),
        )
        .expect("transpose of a valid graph is valid");
        g.vertex_labels = self.vertex_labels.clone();
        g.edge_labels = self.edge_labels.clone();
        g
    }

    /// Induced subgraph on the given vertex set, keeping ids and labels.
    pub fn induced(&self, keep: &std::collections::BTreeSet<VertexId>) -> Graph {
        let g = Graph::new(
            self.vertices.iter().copied().filter(|v| keep.contains(v)),
            self.edges
                .values()
                .filter(|e| keep.contains(&e.src) && keep.contains(&e.dst))
                .copied(),
        )
        .expect("induced subgraph is valid");
        g.with_labels(self.vertex_labels.clone(), self.edge_labels.clone())
    }
}
