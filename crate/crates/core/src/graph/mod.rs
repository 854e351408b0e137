//! Combinatorial metric trees.
//!
//! A [`TreeGraph`] is an oriented tree whose vertices carry either a Neumann
//! (Kirchhoff) or a Dirichlet condition. Dirichlet vertices are treated as
//! points missing from the space, so an incomplete edge is modelled as an
//! edge ending in a Dirichlet leaf. Edge ids index the torus coordinates
//! `z_j`; a graph built from a plain edge list numbers its edges `1..=n` in
//! input order, while subtrees produced by the strata code keep the ids of
//! the ambient graph.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

pub mod families;
pub mod format;
mod subgraph;

pub use subgraph::{boundary_and_type, components_after_deletion, enumerate_type_m, OpenSubgraph};

pub type VertexId = i64;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    Neumann,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub id: EdgeId,
    pub source: VertexId,
    pub target: VertexId,
}

impl Edge {
    pub fn touches(&self, v: VertexId) -> bool {
        self.source == v || self.target == v
    }

    /// The endpoint opposite to `v`. `v` must be an endpoint.
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.source == v {
            self.target
        } else {
            self.source
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeGraph {
    ambient: usize,
    vertices: BTreeMap<VertexId, Condition>,
    edges: Vec<Edge>,
    incidence: BTreeMap<VertexId, Vec<EdgeId>>,
}

/// Builds a tree from `(source, target)` pairs. Edge `j` is the `j`-th pair.
/// Every vertex not listed in `dirichlet` gets a Neumann condition.
pub fn build_graph(
    edge_list: &[(VertexId, VertexId)],
    dirichlet: &BTreeSet<VertexId>,
) -> Result<TreeGraph> {
    let edges = edge_list
        .iter()
        .enumerate()
        .map(|(i, &(source, target))| Edge {
            id: i + 1,
            source,
            target,
        })
        .collect();
    TreeGraph::from_edges(edge_list.len(), edges, dirichlet)
}

impl TreeGraph {
    /// Validating constructor for trees whose edge ids are any distinct
    /// subset of `1..=ambient`.
    pub fn from_edges(
        ambient: usize,
        mut edges: Vec<Edge>,
        dirichlet: &BTreeSet<VertexId>,
    ) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        edges.sort_by_key(|e| e.id);
        let mut ids = BTreeSet::new();
        let mut pairs = BTreeSet::new();
        for e in &edges {
            if e.id == 0 || e.id > ambient {
                return Err(Error::EdgeIdOutOfRange { id: e.id, ambient });
            }
            if !ids.insert(e.id) {
                return Err(Error::DuplicateEdgeId(e.id));
            }
            if e.source == e.target {
                return Err(Error::SelfLoop(e.source));
            }
            let key = (e.source.min(e.target), e.source.max(e.target));
            if !pairs.insert(key) {
                return Err(Error::DuplicateEdge(key.0, key.1));
            }
        }

        let mut incidence: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
        for e in &edges {
            incidence.entry(e.source).or_default().push(e.id);
            incidence.entry(e.target).or_default().push(e.id);
        }

        let index: BTreeMap<VertexId, usize> =
            incidence.keys().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = UnionFind::new(index.len());
        for e in &edges {
            if !uf.union(index[&e.source], index[&e.target]) {
                return Err(Error::CycleDetected(e.source, e.target));
            }
        }
        let root = uf.find(0);
        for (&v, &i) in &index {
            if uf.find(i) != root {
                return Err(Error::Disconnected(v));
            }
        }

        for v in dirichlet {
            if !incidence.contains_key(v) {
                return Err(Error::UnknownVertex(*v));
            }
        }
        let vertices = incidence
            .keys()
            .map(|&v| {
                let c = if dirichlet.contains(&v) {
                    Condition::Dirichlet
                } else {
                    Condition::Neumann
                };
                (v, c)
            })
            .collect();

        Ok(TreeGraph {
            ambient,
            vertices,
            edges,
            incidence,
        })
    }

    /// Number of edges.
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of torus coordinates the graph's polynomials live in.
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().map(|e| e.id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.edges[i])
    }

    /// Index of edge `id` in ascending id order; column pair `2i, 2i+1`.
    pub fn position(&self, id: EdgeId) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, Condition)> + '_ {
        self.vertices.iter().map(|(&v, &c)| (v, c))
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains_key(&v)
    }

    pub fn condition(&self, v: VertexId) -> Option<Condition> {
        self.vertices.get(&v).copied()
    }

    pub fn is_dirichlet(&self, v: VertexId) -> bool {
        self.condition(v) == Some(Condition::Dirichlet)
    }

    pub fn dirichlet_vertices(&self) -> BTreeSet<VertexId> {
        self.vertices()
            .filter(|&(_, c)| c == Condition::Dirichlet)
            .map(|(v, _)| v)
            .collect()
    }

    /// Incident edge ids of `v`, ascending. Empty for unknown vertices.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        self.incidence.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incident(v).len()
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.degree(v) == 1
    }

    pub fn max_degree(&self) -> usize {
        self.incidence.values().map(Vec::len).max().unwrap_or(0)
    }

    /// True when the tree is homeomorphic to an interval.
    pub fn is_path_like(&self) -> bool {
        self.max_degree() <= 2
    }

    /// Same tree with a different Dirichlet set.
    pub fn with_dirichlet(&self, dirichlet: &BTreeSet<VertexId>) -> Result<Self> {
        TreeGraph::from_edges(self.ambient, self.edges.clone(), dirichlet)
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}
