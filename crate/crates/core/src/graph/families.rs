//! Standard trees used throughout the tests, benches and CLI examples.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{build_graph, TreeGraph, VertexId};

/// Path `1 -> 2 -> ... -> n+1`, Neumann everywhere.
pub fn path(n: usize) -> TreeGraph {
    let edges: Vec<_> = (1..=n as VertexId).map(|i| (i, i + 1)).collect();
    build_graph(&edges, &BTreeSet::new()).expect("path is a tree")
}

/// Star with leaves `1..=n` pointing at the center `n+1`.
pub fn star(n: usize) -> TreeGraph {
    let c = n as VertexId + 1;
    let edges: Vec<_> = (1..=n as VertexId).map(|i| (i, c)).collect();
    build_graph(&edges, &BTreeSet::new()).expect("star is a tree")
}

/// Caterpillar with three degree-three vertices `u = 1`, `w = 2`, `v = 3`.
///
/// Pendant edges `e1, e2` hang at `u`, `e4` at `w`, `e6, e7` at `v`; the
/// spine is `e3: u - w` and `e5: w - v`. The shape is reconstructed from its
/// three top-dimensional stratum classes
/// `8 a1 a2 (a3+..+a7)`, `8 (a1+..+a5) a6 a7` and
/// `8 (a1+a2+a3) a4 (a5+..+a7)`; no drawing of the original is available.
pub fn caterpillar7() -> TreeGraph {
    let edges = [(4, 1), (5, 1), (1, 2), (6, 2), (2, 3), (7, 3), (8, 3)];
    build_graph(&edges, &BTreeSet::new()).expect("caterpillar is a tree")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirichletPolicy {
    /// Neumann everywhere.
    None,
    /// Each leaf is Dirichlet with the given probability.
    Leaves(f64),
    /// Each vertex is Dirichlet with the given probability.
    Any(f64),
}

/// Random tree on `n` edges: vertex `i` attaches to a uniformly chosen
/// earlier vertex, orientations are random and edges are numbered in a
/// shuffled order.
pub fn random_tree<R: Rng + ?Sized>(n: usize, policy: DirichletPolicy, rng: &mut R) -> TreeGraph {
    assert!(n >= 1);
    let mut edges: Vec<(VertexId, VertexId)> = (2..=n as VertexId + 1)
        .map(|v| {
            let u = rng.random_range(1..v);
            if rng.random_bool(0.5) {
                (u, v)
            } else {
                (v, u)
            }
        })
        .collect();
    edges.shuffle(rng);
    let bare = build_graph(&edges, &BTreeSet::new()).expect("attachment builds a tree");
    let dirichlet: BTreeSet<VertexId> = match policy {
        DirichletPolicy::None => BTreeSet::new(),
        DirichletPolicy::Leaves(p) => bare
            .vertex_ids()
            .filter(|&v| bare.is_leaf(v))
            .filter(|_| rng.random_bool(p))
            .collect(),
        DirichletPolicy::Any(p) => bare.vertex_ids().filter(|_| rng.random_bool(p)).collect(),
    };
    bare.with_dirichlet(&dirichlet).expect("same tree")
}
