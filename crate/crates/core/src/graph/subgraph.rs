use std::collections::{BTreeMap, BTreeSet};

use super::{EdgeId, TreeGraph, UnionFind, VertexId};
use crate::error::{Error, Result};

/// An open subgraph `H`: a deletion set of Neumann vertices together with a
/// selection of the components of `G` minus that set.
///
/// `type_m = beta0(H) - |boundary|`, where the boundary is the part of the
/// deletion set adjacent to a kept component.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpenSubgraph {
    deleted: BTreeSet<VertexId>,
    kept: Vec<BTreeSet<EdgeId>>,
    boundary: BTreeSet<VertexId>,
}

impl OpenSubgraph {
    /// Assembles a subgraph without checking the no-endpoint rule. The kept
    /// sets must already be components of `g` minus `deleted`.
    pub(crate) fn assemble(
        g: &TreeGraph,
        deleted: BTreeSet<VertexId>,
        mut kept: Vec<BTreeSet<EdgeId>>,
    ) -> Self {
        kept.sort();
        let boundary = deleted
            .iter()
            .copied()
            .filter(|&v| kept_degree(g, v, &kept) > 0)
            .collect();
        OpenSubgraph {
            deleted,
            kept,
            boundary,
        }
    }

    pub fn deleted(&self) -> &BTreeSet<VertexId> {
        &self.deleted
    }

    pub fn kept_components(&self) -> &[BTreeSet<EdgeId>] {
        &self.kept
    }

    pub fn boundary(&self) -> &BTreeSet<VertexId> {
        &self.boundary
    }

    pub fn beta0(&self) -> usize {
        self.kept.len()
    }

    pub fn type_m(&self) -> i64 {
        self.kept.len() as i64 - self.boundary.len() as i64
    }

    /// All kept edges.
    pub fn edges(&self) -> BTreeSet<EdgeId> {
        self.kept.iter().flatten().copied().collect()
    }

    /// Whether every boundary vertex meets at least two kept edges.
    pub fn satisfies_endpoint_rule(&self, g: &TreeGraph) -> bool {
        self.endpoint_violation(g).is_none()
    }

    fn endpoint_violation(&self, g: &TreeGraph) -> Option<VertexId> {
        self.boundary
            .iter()
            .copied()
            .find(|&v| kept_degree(g, v, &self.kept) < 2)
    }
}

fn kept_degree(g: &TreeGraph, v: VertexId, kept: &[BTreeSet<EdgeId>]) -> usize {
    g.incident(v)
        .iter()
        .filter(|e| kept.iter().any(|k| k.contains(e)))
        .count()
}

/// Connected components of the space `G` minus `deleted`, as edge sets.
///
/// Dirichlet vertices are already missing from `G`, so they separate edges
/// just like deleted vertices do. Components are sorted by their least edge.
pub fn components_after_deletion(
    g: &TreeGraph,
    deleted: &BTreeSet<VertexId>,
) -> Result<Vec<BTreeSet<EdgeId>>> {
    if let Some(&v) = deleted.iter().find(|&&v| !g.contains_vertex(v)) {
        return Err(Error::UnknownVertex(v));
    }
    let edges = g.edges();
    let pos: BTreeMap<EdgeId, usize> = edges.iter().enumerate().map(|(i, e)| (e.id, i)).collect();
    let mut uf = UnionFind::new(edges.len());
    for v in g.vertex_ids() {
        if deleted.contains(&v) || g.is_dirichlet(v) {
            continue;
        }
        let inc = g.incident(v);
        for w in inc.windows(2) {
            uf.union(pos[&w[0]], pos[&w[1]]);
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<EdgeId>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().insert(e.id);
    }
    let mut comps: Vec<_> = groups.into_values().collect();
    comps.sort();
    Ok(comps)
}

/// Validates `(deleted, kept)` against `g` and computes boundary and type.
pub fn boundary_and_type(
    g: &TreeGraph,
    deleted: &BTreeSet<VertexId>,
    kept: &[BTreeSet<EdgeId>],
) -> Result<OpenSubgraph> {
    if let Some(&v) = deleted.iter().find(|&&v| g.is_dirichlet(v)) {
        return Err(Error::DeletedDirichlet(v));
    }
    let comps = components_after_deletion(g, deleted)?;
    let mut seen = BTreeSet::new();
    for k in kept {
        if !comps.contains(k) || !seen.insert(k.clone()) {
            return Err(Error::InvalidComponent(k.iter().copied().collect()));
        }
    }
    let h = OpenSubgraph::assemble(g, deleted.clone(), kept.to_vec());
    match h.endpoint_violation(g) {
        Some(v) => Err(Error::EndpointRuleViolated(v)),
        None => Ok(h),
    }
}

/// All type-`m` open subgraphs of `g` obeying the no-endpoint rule.
///
/// Each subgraph is reported once, with its deletion set equal to its
/// boundary. The search runs over candidate boundaries (Neumann vertices of
/// degree at least two) and, for each, over selections of `m + |B|`
/// components in which every boundary vertex meets two kept edges.
pub fn enumerate_type_m(g: &TreeGraph, m: i64) -> Vec<OpenSubgraph> {
    let candidates: Vec<VertexId> = g
        .vertex_ids()
        .filter(|&v| !g.is_dirichlet(v) && g.degree(v) >= 2)
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << candidates.len()) {
        let boundary: BTreeSet<VertexId> = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let want = m + boundary.len() as i64;
        if want < 1 {
            continue;
        }
        let comps = components_after_deletion(g, &boundary).expect("candidates are vertices");
        let want = want as usize;
        if want > comps.len() {
            continue;
        }
        // For each component, how many of its edges touch each boundary vertex.
        let touches: Vec<Vec<usize>> = comps
            .iter()
            .map(|c| {
                boundary
                    .iter()
                    .map(|&b| g.incident(b).iter().filter(|e| c.contains(e)).count())
                    .collect()
            })
            .collect();
        let mut chosen = Vec::with_capacity(want);
        select(&touches, want, 0, &mut chosen, &mut |sel| {
            let kept = sel.iter().map(|&i| comps[i].clone()).collect();
            out.push(OpenSubgraph::assemble(g, boundary.clone(), kept));
        });
    }
    out.sort();
    out
}

fn select(
    touches: &[Vec<usize>],
    want: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if chosen.len() == want {
        let nb = touches.first().map_or(0, Vec::len);
        let ok = (0..nb).all(|b| chosen.iter().map(|&i| touches[i][b]).sum::<usize>() >= 2);
        if ok {
            emit(chosen);
        }
        return;
    }
    let remaining = want - chosen.len();
    for i in start..=touches.len().saturating_sub(remaining) {
        chosen.push(i);
        select(touches, want, i + 1, chosen, emit);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families;

    fn set<T: Ord + Copy>(xs: &[T]) -> BTreeSet<T> {
        xs.iter().copied().collect()
    }

    #[test]
    fn star_minus_center() {
        let g = families::star(3);
        let comps = components_after_deletion(&g, &set(&[4])).unwrap();
        assert_eq!(comps, vec![set(&[1]), set(&[2]), set(&[3])]);
    }

    #[test]
    fn path_components() {
        let g = families::path(2);
        assert_eq!(
            components_after_deletion(&g, &BTreeSet::new()).unwrap(),
            vec![set(&[1, 2])]
        );
        assert_eq!(
            components_after_deletion(&g, &set(&[2])).unwrap(),
            vec![set(&[1]), set(&[2])]
        );
        assert_eq!(
            components_after_deletion(&g, &set(&[9])).unwrap_err(),
            Error::UnknownVertex(9)
        );
    }

    #[test]
    fn dirichlet_vertices_separate() {
        let g = families::path(2).with_dirichlet(&set(&[2])).unwrap();
        assert_eq!(
            components_after_deletion(&g, &BTreeSet::new()).unwrap(),
            vec![set(&[1]), set(&[2])]
        );
    }

    #[test]
    fn both_endpoints_deleted_is_singleton() {
        let g = families::path(3);
        let comps = components_after_deletion(&g, &set(&[2, 3])).unwrap();
        assert_eq!(comps, vec![set(&[1]), set(&[2]), set(&[3])]);
    }

    #[test]
    fn star_type_two() {
        let g = families::star(3);
        let all = vec![set(&[1]), set(&[2]), set(&[3])];
        let h = boundary_and_type(&g, &set(&[4]), &all).unwrap();
        assert_eq!(h.type_m(), 2);
        assert_eq!(h.boundary(), &set(&[4]));
        assert_eq!(h.beta0(), 3);
    }

    #[test]
    fn path_type_one() {
        let g = families::path(2);
        let h = boundary_and_type(&g, &set(&[2]), &[set(&[1]), set(&[2])]).unwrap();
        assert_eq!(h.type_m(), 1);
    }

    #[test]
    fn endpoint_rule() {
        let g = families::star(3);
        assert_eq!(
            boundary_and_type(&g, &set(&[4]), &[set(&[1])]).unwrap_err(),
            Error::EndpointRuleViolated(4)
        );
    }

    #[test]
    fn invalid_inputs() {
        let g = families::star(3);
        assert_eq!(
            boundary_and_type(&g, &set(&[4]), &[set(&[1, 2])]).unwrap_err(),
            Error::InvalidComponent(vec![1, 2])
        );
        let gd = g.with_dirichlet(&set(&[1])).unwrap();
        assert_eq!(
            boundary_and_type(&gd, &set(&[1]), &[]).unwrap_err(),
            Error::DeletedDirichlet(1)
        );
    }

    #[test]
    fn enumerate_examples() {
        let g = families::star(3);
        let hs = enumerate_type_m(&g, 2);
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].deleted(), &set(&[4]));
        assert_eq!(hs[0].beta0(), 3);

        assert!(enumerate_type_m(&families::path(2), 2).is_empty());

        let g4 = families::star(4);
        let hs = enumerate_type_m(&g4, 2);
        assert_eq!(hs.len(), 4);
        assert!(hs
            .iter()
            .all(|h| h.beta0() == 3 && h.deleted() == &set(&[5])));
        let hs3 = enumerate_type_m(&g4, 3);
        assert_eq!(hs3.len(), 1);
        assert_eq!(hs3[0].beta0(), 4);
    }

    #[test]
    fn star_counts_are_binomial() {
        for n in 3..=7usize {
            let hs = enumerate_type_m(&families::star(n), 2);
            let expected = n * (n - 1) * (n - 2) / 6;
            assert_eq!(hs.len(), expected, "star {n}");
        }
    }
}
