//! Strata `Z(H)` of the singular locus, the multiplicity formula and
//! eigenvector propagation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{
    boundary_and_type, enumerate_type_m, Condition, Edge, EdgeId, OpenSubgraph, TreeGraph, VertexId,
};
use crate::poly::{parse_poly, MultiPoly};
use crate::secular::{
    eigenspace, kernel_residual, secular_polynomial, support_of_point, CoeffVector, TorusPoint,
};

/// Systems vanishing below this (relative to the L1 norm) count as zero
/// when testing a sample against deeper strata.
pub const TAU_GENERIC: f64 = 1e-6;
/// Absolute tolerance a sampled point must satisfy on every system.
pub const TAU_SAMPLE: f64 = 1e-10;
pub const MAX_SAMPLE_TRIES: usize = 100;
/// Divisions by quantities below this are treated as vanishing.
const TAU_VANISH: f64 = 1e-8;
/// Residual above which a propagated vector is rejected.
const TAU_PROPAGATION: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Stratum {
    pub h: OpenSubgraph,
    /// One secular polynomial per kept component, in the ambient ring.
    pub systems: Vec<MultiPoly>,
    pub codim: usize,
    pub m: i64,
}

impl Stratum {
    /// Torus dimension of `Z(H)`.
    pub fn dim(&self) -> usize {
        self.systems.first().map_or(0, MultiPoly::nvars) - self.codim
    }

    /// Largest `|P_K(z)| / ||P_K||_1` over the systems.
    pub fn defect(&self, z: &TorusPoint) -> f64 {
        self.systems
            .iter()
            .map(|p| p.eval(z.coords()).norm() / p.l1_norm())
            .fold(0.0, f64::max)
    }
}

/// The tree on the edges of `k`, with Dirichlet conditions at the deleted
/// vertices it touches.
pub fn component_graph(g: &TreeGraph, h: &OpenSubgraph, k: &BTreeSet<EdgeId>) -> Result<TreeGraph> {
    if !h.kept_components().contains(k) {
        return Err(Error::InvalidComponent(k.iter().copied().collect()));
    }
    let edges: Vec<Edge> = k
        .iter()
        .map(|&id| g.edge(id).copied().ok_or(Error::UnknownEdge(id)))
        .collect::<Result<_>>()?;
    let dirichlet: BTreeSet<VertexId> = edges
        .iter()
        .flat_map(|e| [e.source, e.target])
        .filter(|v| h.deleted().contains(v) || g.is_dirichlet(*v))
        .collect();
    TreeGraph::from_edges(g.ambient(), edges, &dirichlet)
}

pub fn build_stratum(g: &TreeGraph, h: &OpenSubgraph) -> Result<Stratum> {
    let systems = h
        .kept_components()
        .iter()
        .map(|k| secular_polynomial(&component_graph(g, h, k)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Stratum {
        h: h.clone(),
        codim: systems.len(),
        systems,
        m: h.type_m(),
    })
}

/// All strata of type `m >= 2`, sorted by codimension.
///
/// `m` increases from 2 until two consecutive values produce nothing.
pub fn singular_components(g: &TreeGraph) -> Result<Vec<Stratum>> {
    let mut out = Vec::new();
    let mut empty_run = 0;
    let mut m = 2;
    while empty_run < 2 {
        let hs = enumerate_type_m(g, m);
        if hs.is_empty() {
            empty_run += 1;
        } else {
            empty_run = 0;
        }
        for h in &hs {
            out.push(build_stratum(g, h)?);
        }
        m += 1;
    }
    out.sort_by_key(|s| s.codim);
    Ok(out)
}

/// Roots of `c2 w^2 + c1 w + c0`.
fn quadratic_roots(c2: Complex64, c1: Complex64, c0: Complex64) -> Vec<Complex64> {
    let scale = c2.norm().max(c1.norm()).max(c0.norm());
    if c2.norm() <= 1e-14 * scale {
        if c1.norm() <= 1e-14 * scale {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let mut s = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    if (c1.conj() * s).re < 0.0 {
        s = -s;
    }
    let q = -(c1 + s) / 2.0;
    if q.norm() <= 1e-14 * scale {
        return vec![Complex64::new(0.0, 0.0); 2];
    }
    vec![q / c2, c0 / q]
}

/// Moves `z` onto `Z_P` by re-solving one coordinate of `P`'s support.
/// Every other coordinate stays as given.
fn solve_on_zero_locus<R: Rng + ?Sized>(p: &MultiPoly, z: &mut [Complex64], rng: &mut R) -> bool {
    let vars: Vec<usize> = p
        .support_vars()
        .into_iter()
        .filter(|&j| p.degree_in(j) > 0)
        .collect();
    if vars.is_empty() {
        return false;
    }
    let j = vars[rng.random_range(0..vars.len())];
    let c: Vec<Complex64> = (0..=2).map(|k| p.coefficient_of(j, k).eval(z)).collect();
    let roots = quadratic_roots(c[2], c[1], c[0]);
    if roots.is_empty() {
        return false;
    }
    let w = roots[rng.random_range(0..roots.len())];
    if (w.norm() - 1.0).abs() > TAU_GENERIC {
        return false;
    }
    z[j - 1] = w / w.norm();
    p.eval(z).norm() < TAU_SAMPLE
}

fn random_angles<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
        .collect()
}

/// A generic point of `Z(H)`.
///
/// All coordinates start uniform on the circle; each system then fixes one
/// of its own coordinates by solving the quadratic it satisfies there (the
/// roots lie on the circle). A draw is rejected when it also satisfies
/// every system of a stratum in `avoid` of larger codimension.
pub fn sample_stratum<R: Rng + ?Sized>(
    s: &Stratum,
    avoid: &[Stratum],
    rng: &mut R,
) -> Result<TorusPoint> {
    let Some(first) = s.systems.first() else {
        return Err(Error::SamplingFailed(0));
    };
    let n = first.nvars();
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, p) in s.systems.iter().enumerate() {
        for j in p.support_vars() {
            if owner.insert(j, i).is_some() {
                return Err(Error::OverlappingVariables(j));
            }
        }
    }
    let deeper: Vec<&Stratum> = avoid.iter().filter(|t| t.codim > s.codim).collect();
    'draw: for _ in 0..MAX_SAMPLE_TRIES {
        let mut z = random_angles(n, rng);
        for p in &s.systems {
            if !solve_on_zero_locus(p, &mut z, rng) {
                continue 'draw;
            }
        }
        let point = TorusPoint::from_angles(&z.iter().map(|w| w.arg()).collect::<Vec<_>>());
        if s.systems
            .iter()
            .any(|p| p.eval(point.coords()).norm() >= TAU_SAMPLE)
        {
            continue;
        }
        if deeper.iter().any(|t| t.defect(&point) < TAU_GENERIC) {
            continue;
        }
        return Ok(point);
    }
    Err(Error::SamplingFailed(MAX_SAMPLE_TRIES))
}

/// A point of `Z_G` away from every singular stratum.
pub fn sample_secular<R: Rng + ?Sized>(
    g: &TreeGraph,
    strata: &[Stratum],
    rng: &mut R,
) -> Result<TorusPoint> {
    let p = secular_polynomial(g)?;
    let whole = Stratum {
        h: OpenSubgraph::assemble(g, BTreeSet::new(), vec![g.edge_ids().collect()]),
        systems: vec![p],
        codim: 1,
        m: 1,
    };
    sample_stratum(&whole, strata, rng)
}

/// `beta0(supp) - |boundary(supp)|` at `z`.
pub fn predicted_multiplicity(g: &TreeGraph, z: &TorusPoint, tau_rank: f64) -> Result<i64> {
    Ok(support_of_point(g, z, tau_rank)?.subgraph.type_m())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplicityCheck {
    pub numeric: usize,
    pub predicted: i64,
    pub agree: bool,
    /// Ratio of the largest dropped to the smallest kept singular value.
    pub rank_margin: f64,
}

pub fn verify_multiplicity(
    g: &TreeGraph,
    z: &TorusPoint,
    tau_rank: f64,
) -> Result<MultiplicityCheck> {
    let s = support_of_point(g, z, tau_rank)?;
    let numeric = s.eigenspace.dim;
    let predicted = s.subgraph.type_m();
    Ok(MultiplicityCheck {
        numeric,
        predicted,
        agree: numeric as i64 == predicted,
        rank_margin: s.eigenspace.rank_margin(),
    })
}

/// Vertex whose incident edges, except at most one, end at leaves; among
/// vertices of degree at least two the least id, else the least Neumann
/// endpoint.
pub fn special_vertex(g: &TreeGraph) -> Result<VertexId> {
    let core = |v: VertexId| g.degree(v) >= 2;
    let inner = g.vertex_ids().find(|&v| {
        core(v)
            && g.incident(v)
                .iter()
                .filter(|&&e| core(g.edge(e).unwrap().other(v)))
                .count()
                <= 1
    });
    if let Some(v) = inner {
        return Ok(v);
    }
    g.vertices()
        .find(|&(_, c)| c == Condition::Neumann)
        .map(|(v, _)| v)
        .ok_or(Error::NoSpecialVertex)
}

struct Propagation<'a> {
    g: &'a TreeGraph,
    z: &'a TorusPoint,
    coeffs: Vec<(Complex64, Complex64)>,
}

impl Propagation<'_> {
    fn slot(&self, e: EdgeId) -> usize {
        self.g.position(e).unwrap()
    }

    fn value_at(&self, e: &Edge, v: VertexId) -> Complex64 {
        let (a, b) = self.coeffs[self.slot(e.id)];
        let z = self.z.z(e.id);
        if e.source == v {
            a + b * z
        } else {
            a * z + b
        }
    }

    fn outward_at(&self, e: &Edge, v: VertexId) -> Complex64 {
        let (a, b) = self.coeffs[self.slot(e.id)];
        let z = self.z.z(e.id);
        if e.source == v {
            a - b * z
        } else {
            b - a * z
        }
    }

    /// Edge from `near` to a leaf, with value 1 at `near`.
    fn leaf_edge(&mut self, e: &Edge, near: VertexId) -> Result<()> {
        let z = self.z.z(e.id);
        let far = e.other(near);
        let z2 = z * z;
        let (det, sign) = if self.g.is_dirichlet(far) {
            (1.0 - z2, -1.0)
        } else {
            (1.0 + z2, 1.0)
        };
        if det.norm() < TAU_VANISH {
            return Err(Error::VanishingVertex(near));
        }
        let one = Complex64::new(1.0, 0.0);
        // Neumann far end: b = a z (source near) or a = b z (target near).
        let (a, b) = if e.source == near {
            let a = one / det;
            (a, sign * a * z)
        } else {
            let b = one / det;
            (sign * b * z, b)
        };
        let slot = self.slot(e.id);
        self.coeffs[slot] = (a, b);
        Ok(())
    }

    /// Edge leaving `low` with value `value` and outward derivative `d`.
    fn set_from_data(&mut self, e: &Edge, low: VertexId, value: Complex64, d: Complex64) {
        let z = self.z.z(e.id);
        let (a, b) = if e.source == low {
            ((value + d) / 2.0, (value - d) / (2.0 * z))
        } else {
            ((value - d) / (2.0 * z), (value + d) / 2.0)
        };
        let slot = self.slot(e.id);
        self.coeffs[slot] = (a, b);
    }

    fn scale(&mut self, edges: &[EdgeId], s: Complex64) {
        for &e in edges {
            let slot = self.slot(e);
            let (a, b) = self.coeffs[slot];
            self.coeffs[slot] = (a * s, b * s);
        }
    }

    /// Solves the branch hanging below `v` (entered through `parent`) with
    /// value 1 at `v`, then extends it along `parent`. Returns the edges of
    /// the branch including `parent`.
    fn branch(&mut self, v: VertexId, parent: Option<&Edge>) -> Result<Vec<EdgeId>> {
        let g = self.g;
        let mut edges = Vec::new();
        let mut current = Complex64::new(0.0, 0.0);
        for &id in g.incident(v) {
            let e = g.edge(id).unwrap();
            if parent.is_some_and(|p| p.id == id) {
                continue;
            }
            let child = e.other(v);
            if g.is_leaf(child) {
                self.leaf_edge(e, v)?;
                edges.push(id);
            } else {
                let sub = self.branch(child, Some(e))?;
                let reach = self.value_at(e, v);
                let norm = sub
                    .iter()
                    .map(|&s| {
                        let (a, b) = self.coeffs[self.slot(s)];
                        a.norm_sqr() + b.norm_sqr()
                    })
                    .sum::<f64>()
                    .sqrt();
                if reach.norm() < TAU_VANISH * norm {
                    return Err(Error::VanishingVertex(v));
                }
                self.scale(&sub, reach.inv());
                edges.extend(sub);
            }
            current += self.outward_at(e, v);
        }
        if let Some(p) = parent {
            self.set_from_data(p, v, Complex64::new(1.0, 0.0), -current);
            edges.push(p.id);
        }
        Ok(edges)
    }
}

/// The eigenvector at a point where the eigenspace vanishes at no vertex.
///
/// `E = 1` is fixed at [`special_vertex`]. Leaf edges are solved from the
/// value at their inner end (`a = E / (z^2 + 1)` for a Neumann leaf,
/// `E / (1 - z^2)` for a Dirichlet leaf, up to orientation); every other
/// edge is determined by the value and the current it must carry at its
/// lower end, and branches meeting at a vertex are rescaled to a common
/// value there. The result is normalized to unit norm.
pub fn reconstruct_eigenvector(g: &TreeGraph, z: &TorusPoint) -> Result<CoeffVector> {
    if z.dim() != g.ambient() {
        return Err(Error::DimensionMismatch {
            expected: g.ambient(),
            got: z.dim(),
        });
    }
    if let Some(v) = g
        .dirichlet_vertices()
        .into_iter()
        .find(|&v| g.degree(v) >= 2)
    {
        return Err(Error::InteriorDirichlet(v));
    }
    let seed = special_vertex(g)?;
    let mut prop = Propagation {
        g,
        z,
        coeffs: vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); g.n_edges()],
    };
    if g.is_leaf(seed) {
        // Single Neumann edge seeded at an endpoint.
        let e = *g.edge(g.incident(seed)[0]).unwrap();
        prop.leaf_edge(&e, seed)?;
    } else {
        prop.branch(seed, None)?;
    }
    let phi = CoeffVector(prop.coeffs.iter().flat_map(|&(a, b)| [a, b]).collect());
    let r = kernel_residual(g, z, &phi);
    if r.is_nan() || r >= TAU_PROPAGATION {
        return Err(Error::NotOnSecularManifold(r));
    }
    Ok(phi.normalized())
}

/// `||x u - y|| / ||y||` for the unit `u` aligning `x` with `y`.
pub fn phase_aligned_error(x: &CoeffVector, y: &CoeffVector) -> f64 {
    let s: Complex64 = x.0.iter().zip(&y.0).map(|(a, b)| a.conj() * b).sum();
    let u = if s.norm() > 0.0 {
        s / s.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let xn = x.norm();
    let yn = y.norm();
    let d: f64 =
        x.0.iter()
            .zip(&y.0)
            .map(|(a, b)| (a * u * (yn / xn) - b).norm_sqr())
            .sum();
    d.sqrt() / yn
}

/// Compares the propagated vector with the numeric kernel at a simple
/// point. Returns the phase-aligned relative error.
pub fn reconstruction_error(g: &TreeGraph, z: &TorusPoint, tau_rank: f64) -> Result<f64> {
    let rec = reconstruct_eigenvector(g, z)?;
    let es = eigenspace(g, z, tau_rank)?;
    if es.dim != 1 {
        return Err(Error::NotOnSecularManifold(es.rank_margin()));
    }
    Ok(phase_aligned_error(&rec, &es.basis[0]))
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

/// Text report, one block per stratum:
///
/// ```text
/// stratum m=2 codim=3
/// deleted 4
/// component 1 : 1 z1^2 + 1
/// end
/// ```
pub fn write_strata_report(strata: &[Stratum]) -> String {
    let mut out = String::new();
    for s in strata {
        writeln!(out, "stratum m={} codim={}", s.m, s.codim).unwrap();
        writeln!(out, "deleted {}", join(s.h.deleted(), " ")).unwrap();
        for (k, p) in s.h.kept_components().iter().zip(&s.systems) {
            writeln!(out, "component {} : {}", join(k, ","), p).unwrap();
        }
        out.push_str("end\n");
    }
    out
}

/// Header line, `m`, `codim`, deleted vertices, components and systems of
/// the block being read.
type OpenBlock = (
    usize,
    i64,
    usize,
    BTreeSet<VertexId>,
    Vec<BTreeSet<EdgeId>>,
    Vec<MultiPoly>,
);

/// Parses a report back into strata of `g`, validating each subgraph.
pub fn parse_strata_report(g: &TreeGraph, text: &str) -> Result<Vec<Stratum>> {
    let mut out = Vec::new();
    let mut open: Option<OpenBlock> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
        match (head, open.as_mut()) {
            ("stratum", None) => {
                let mut m = None;
                let mut codim = None;
                for tok in rest.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("m=") {
                        m = v.parse::<i64>().ok();
                    } else if let Some(v) = tok.strip_prefix("codim=") {
                        codim = v.parse::<usize>().ok();
                    }
                }
                let (Some(m), Some(codim)) = (m, codim) else {
                    return Err(Error::parse(line_no, "expected `stratum m=<m> codim=<c>`"));
                };
                open = Some((line_no, m, codim, BTreeSet::new(), Vec::new(), Vec::new()));
            }
            ("deleted", Some(block)) => {
                block.3 = rest
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<VertexId>()
                            .map_err(|_| Error::parse(line_no, format!("bad vertex `{t}`")))
                    })
                    .collect::<Result<_>>()?;
            }
            ("component", Some(block)) => {
                let (edges, poly) = rest.split_once(':').ok_or_else(|| {
                    Error::parse(line_no, "expected `component <edges> : <poly>`")
                })?;
                let k = edges
                    .trim()
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<EdgeId>()
                            .map_err(|_| Error::parse(line_no, format!("bad edge `{t}`")))
                    })
                    .collect::<Result<BTreeSet<_>>>()?;
                let p = parse_poly(poly.trim(), Some(g.ambient()))
                    .map_err(|e| Error::parse(line_no, e.to_string()))?;
                block.4.push(k);
                block.5.push(p);
            }
            ("end", Some(_)) => {
                let (start, m, codim, deleted, kept, systems) = open.take().unwrap();
                let h = boundary_and_type(g, &deleted, &kept)?;
                let order: Vec<usize> = h
                    .kept_components()
                    .iter()
                    .map(|k| kept.iter().position(|x| x == k).unwrap())
                    .collect();
                let systems: Vec<MultiPoly> = order.iter().map(|&i| systems[i].clone()).collect();
                if h.type_m() != m || systems.len() != codim {
                    return Err(Error::parse(
                        start,
                        "m or codim disagrees with the components",
                    ));
                }
                out.push(Stratum {
                    h,
                    systems,
                    codim,
                    m,
                });
            }
            (other, _) => {
                return Err(Error::parse(line_no, format!("unexpected `{other}`")));
            }
        }
    }
    if let Some((start, ..)) = open {
        return Err(Error::parse(start, "unterminated stratum block"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families;
    use crate::secular::TAU_RANK;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set<T: Ord + Copy>(xs: &[T]) -> BTreeSet<T> {
        xs.iter().copied().collect()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn only_type_two(g: &TreeGraph) -> OpenSubgraph {
        let hs = enumerate_type_m(g, 2);
        assert_eq!(hs.len(), 1);
        hs.into_iter().next().unwrap()
    }

    #[test]
    fn component_graphs_inherit_conditions() {
        let g = families::star(3);
        let h = only_type_two(&g);
        let k = component_graph(&g, &h, &set(&[1])).unwrap();
        assert_eq!(k.n_edges(), 1);
        assert!(k.is_dirichlet(4) && !k.is_dirichlet(1));
        assert_eq!(k.ambient(), 3);
        assert!(matches!(
            component_graph(&g, &h, &set(&[1, 2])),
            Err(Error::InvalidComponent(_))
        ));

        let p = families::path(2);
        let h = boundary_and_type(&p, &set(&[2]), &[set(&[1])]);
        // a single kept edge leaves vertex 2 with one kept edge
        assert_eq!(h.unwrap_err(), Error::EndpointRuleViolated(2));
        let h = OpenSubgraph::assemble(&p, set(&[2]), vec![set(&[1])]);
        let k = component_graph(&p, &h, &set(&[1])).unwrap();
        assert!(k.is_dirichlet(2) && !k.is_dirichlet(1));
    }

    #[test]
    fn caterpillar_component() {
        let g = families::caterpillar7();
        let h = OpenSubgraph::assemble(
            &g,
            set(&[1]),
            vec![set(&[1]), set(&[2]), set(&[3, 4, 5, 6, 7])],
        );
        let k = component_graph(&g, &h, &set(&[3, 4, 5, 6, 7])).unwrap();
        assert_eq!(k.n_edges(), 5);
        assert_eq!(k.dirichlet_vertices(), set(&[1]));
    }

    #[test]
    fn star_stratum() {
        let g = families::star(3);
        let s = build_stratum(&g, &only_type_two(&g)).unwrap();
        assert_eq!(s.codim, 3);
        assert_eq!(s.m, 2);
        let txt: Vec<String> = s.systems.iter().map(|p| p.to_string()).collect();
        assert_eq!(txt, ["1 z1^2 + 1", "1 z2^2 + 1", "1 z3^2 + 1"]);
    }

    #[test]
    fn singular_component_lists() {
        for n in 1..=5 {
            assert!(singular_components(&families::path(n)).unwrap().is_empty());
        }
        let s = singular_components(&families::star(3)).unwrap();
        assert_eq!(s.len(), 1);
        let s4 = singular_components(&families::star(4)).unwrap();
        assert_eq!(s4.iter().filter(|s| s.m == 2).count(), 4);
        assert_eq!(s4.iter().filter(|s| s.m == 3).count(), 1);
        assert!(s4.windows(2).all(|w| w[0].codim <= w[1].codim));
        let top = &s4[0];
        assert_eq!(top.codim, 3);
        assert!(top.systems.iter().all(|p| p.support_vars().len() == 1));
    }

    #[test]
    fn sampling_star_strata() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = families::star(4);
        let all = singular_components(&g).unwrap();
        let s = all.iter().find(|s| s.h.edges() == set(&[1, 2, 3])).unwrap();
        for _ in 0..10 {
            let z = sample_stratum(s, &all, &mut rng).unwrap();
            for j in 1..=3 {
                assert!((z.z(j) * z.z(j) + 1.0).norm() < 1e-10);
            }
            assert!((z.z(4) * z.z(4) + 1.0).norm() > TAU_GENERIC);
            assert_eq!(predicted_multiplicity(&g, &z, TAU_RANK).unwrap(), 2);
            let v = verify_multiplicity(&g, &z, TAU_RANK).unwrap();
            assert!(v.agree && v.numeric == 2);
        }
        let empty = Stratum {
            h: s.h.clone(),
            systems: vec![],
            codim: 0,
            m: 0,
        };
        assert_eq!(
            sample_stratum(&empty, &[], &mut rng).unwrap_err(),
            Error::SamplingFailed(0)
        );
    }

    #[test]
    fn multiplicity_examples() {
        let g = families::star(3);
        let z = TorusPoint::new(vec![c(0.0, 1.0); 3]).unwrap();
        let v = verify_multiplicity(&g, &z, TAU_RANK).unwrap();
        assert_eq!((v.numeric, v.predicted, v.agree), (2, 2, true));
        let i1 = families::path(1);
        let v = verify_multiplicity(&i1, &TorusPoint::from_angles(&[0.0]), TAU_RANK).unwrap();
        assert_eq!((v.numeric, v.predicted, v.agree), (1, 1, true));
    }

    #[test]
    fn interval_reconstruction() {
        let g = families::path(1);
        let phi = reconstruct_eigenvector(&g, &TorusPoint::from_angles(&[0.0])).unwrap();
        let (a, b) = phi.pair(0);
        assert!((a - b).norm() < 1e-14);
        assert!((a - c(1.0 / 2f64.sqrt(), 0.0)).norm() < 1e-14);

        let nd = g.with_dirichlet(&set(&[2])).unwrap();
        let z = TorusPoint::from_angles(&[std::f64::consts::FRAC_PI_4]);
        assert!(matches!(
            reconstruct_eigenvector(&nd, &z),
            Err(Error::NotOnSecularManifold(_))
        ));
        let dd = g.with_dirichlet(&set(&[1, 2])).unwrap();
        assert_eq!(
            reconstruct_eigenvector(&dd, &TorusPoint::from_angles(&[0.0])).unwrap_err(),
            Error::NoSpecialVertex
        );
    }

    #[test]
    fn star_reconstruction() {
        let g = families::star(3);
        let z = TorusPoint::new(vec![c(-1.0, 0.0); 3]).unwrap();
        let phi = reconstruct_eigenvector(&g, &z).unwrap();
        let (a1, b1) = phi.pair(0);
        for p in 0..3 {
            let (a, b) = phi.pair(p);
            assert!((b - b1).norm() < 1e-12);
            assert!((a + b).norm() < 1e-12);
        }
        assert!((a1 + b1).norm() < 1e-12);
        assert!(reconstruction_error(&g, &z, TAU_RANK).unwrap() < 1e-8);

        let z = TorusPoint::new(vec![c(0.0, 1.0); 3]).unwrap();
        assert_eq!(
            reconstruct_eigenvector(&g, &z).unwrap_err(),
            Error::VanishingVertex(4)
        );
    }

    #[test]
    fn special_vertices() {
        assert_eq!(special_vertex(&families::caterpillar7()).unwrap(), 1);
        assert_eq!(special_vertex(&families::star(3)).unwrap(), 4);
        assert_eq!(special_vertex(&families::path(1)).unwrap(), 1);
        assert_eq!(special_vertex(&families::path(4)).unwrap(), 2);
        let g = families::path(2).with_dirichlet(&set(&[2])).unwrap();
        assert_eq!(
            reconstruct_eigenvector(&g, &TorusPoint::from_angles(&[0.0, 0.0])).unwrap_err(),
            Error::InteriorDirichlet(2)
        );
    }

    #[test]
    fn caterpillar_reconstruction_on_generic_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = families::caterpillar7();
        let strata = singular_components(&g).unwrap();
        for _ in 0..10 {
            let z = sample_secular(&g, &strata, &mut rng).unwrap();
            assert!(reconstruction_error(&g, &z, TAU_RANK).unwrap() < 1e-8);
        }
    }

    #[test]
    fn report_round_trip() {
        let g = families::caterpillar7();
        let strata = singular_components(&g).unwrap();
        let text = write_strata_report(&strata);
        assert!(text.starts_with("stratum m=2 codim=3\ndeleted "));
        let back = parse_strata_report(&g, &text).unwrap();
        assert_eq!(back, strata);
        assert!(matches!(
            parse_strata_report(&g, "stratum m=2 codim=3\ndeleted 1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
