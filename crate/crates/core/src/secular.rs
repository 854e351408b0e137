//! Edge scattering matrix, secular polynomial and numeric eigenspaces.
//!
//! On edge `j`, parametrized by `x in [0, l_j]` from its source to its
//! target, an eigenfunction reads `a_j e^{ikx} + b_j z_j e^{-ikx}` with
//! `z_j = e^{ik l_j}`. Its boundary value is `a_j + b_j z_j` at the source
//! and `a_j z_j + b_j` at the target; after dividing by `ik` the derivative
//! is `a_j - b_j z_j` at the source and `a_j z_j - b_j` at the target. The
//! vertex conditions are linear in `(a_1, b_1, ..., a_n, b_n)` with entries
//! of degree at most one in each `z_j`.

use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{
    components_after_deletion, Condition, Edge, EdgeId, OpenSubgraph, TreeGraph, VertexId,
};
use crate::linalg;
use crate::poly::MultiPoly;

pub const TAU_TORUS: f64 = 1e-9;
pub const TAU_RANK: f64 = 1e-8;
pub const TAU_RESIDUAL: f64 = 1e-10;
const TAU_CONTINUITY: f64 = 1e-8;

/// Square matrix of polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    size: usize,
    nvars: usize,
    entries: Vec<MultiPoly>,
}

impl PolyMatrix {
    pub fn zeros(size: usize, nvars: usize) -> Self {
        PolyMatrix {
            size,
            nvars,
            entries: vec![MultiPoly::zero(nvars); size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, r: usize, c: usize) -> &MultiPoly {
        &self.entries[r * self.size + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: MultiPoly) {
        self.entries[r * self.size + c] = p;
    }

    /// Numeric matrix at `z`.
    pub fn eval(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.size, self.size, |r, c| {
            let p = self.get(r, c);
            if p.is_zero() {
                Complex64::new(0.0, 0.0)
            } else {
                p.eval(z)
            }
        })
    }

    /// Determinant by Laplace expansion along rows, memoized on the set of
    /// columns already used.
    pub fn det_cofactor(&self) -> MultiPoly {
        assert!(self.size <= 32, "cofactor expansion limited to 32 columns");
        let mut memo: HashMap<u32, MultiPoly> = HashMap::new();
        self.cofactor(0, 0, &mut memo)
    }

    fn cofactor(&self, row: usize, used: u32, memo: &mut HashMap<u32, MultiPoly>) -> MultiPoly {
        if row == self.size {
            return MultiPoly::one(self.nvars);
        }
        if let Some(p) = memo.get(&used) {
            return p.clone();
        }
        let mut acc = MultiPoly::zero(self.nvars);
        let mut free_index = 0;
        for c in 0..self.size {
            if used >> c & 1 == 1 {
                continue;
            }
            let entry = self.get(row, c);
            if !entry.is_zero() {
                let minor = self.cofactor(row + 1, used | 1 << c, memo);
                if !minor.is_zero() {
                    let term = entry * &minor;
                    acc = if free_index % 2 == 0 {
                        &acc + &term
                    } else {
                        &acc - &term
                    };
                }
            }
            free_index += 1;
        }
        memo.insert(used, acc.clone());
        acc
    }

    /// Determinant by fraction-free (Bareiss) elimination with row pivoting.
    pub fn det_bareiss(&self) -> MultiPoly {
        let n = self.size;
        let mut m: Vec<Vec<MultiPoly>> = (0..n)
            .map(|r| (0..n).map(|c| self.get(r, c).clone()).collect())
            .collect();
        let mut negate = false;
        let mut prev = MultiPoly::one(self.nvars);
        for k in 0..n {
            let pivot = (k..n)
                .filter(|&r| !m[r][k].is_zero())
                .min_by_key(|&r| m[r][k].n_terms());
            let Some(p) = pivot else {
                return MultiPoly::zero(self.nvars);
            };
            if p != k {
                m.swap(p, k);
                negate = !negate;
            }
            if k + 1 == n {
                break;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                    m[i][j] = t.div_exact(&prev).expect("Bareiss quotients are exact");
                }
                m[i][k] = MultiPoly::zero(self.nvars);
            }
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone();
        if negate {
            -&det
        } else {
            det
        }
    }
}

/// Linear form `(coefficient of a_j, coefficient of b_j)` for one edge end.
type EndForm = (MultiPoly, MultiPoly);

fn value_form(g: &TreeGraph, e: &Edge, v: VertexId) -> EndForm {
    let n = g.ambient();
    let z = MultiPoly::var(n, e.id);
    let one = MultiPoly::one(n);
    if e.source == v {
        (one, z)
    } else {
        (z, one)
    }
}

/// Derivative form divided by `ik`, in the edge's own direction.
fn derivative_form(g: &TreeGraph, e: &Edge, v: VertexId) -> EndForm {
    let n = g.ambient();
    let z = MultiPoly::var(n, e.id);
    let one = MultiPoly::one(n);
    if e.source == v {
        (one, -&z)
    } else {
        (z, -&one)
    }
}

/// Edge scattering matrix of `g`.
///
/// Rows run over vertices in ascending id order. A Neumann vertex of degree
/// `d` contributes `d - 1` continuity rows (value on the `i`-th incident
/// edge minus value on the next) followed by one current row, the sum of
/// outward derivatives signed so that the least-id edge's derivative
/// expression enters positively. A Dirichlet vertex contributes one
/// vanishing row per incident edge. Columns are `a_1, b_1, ..., a_n, b_n`
/// over the graph's edges in id order.
pub fn scattering_matrix(g: &TreeGraph) -> PolyMatrix {
    let size = 2 * g.n_edges();
    let mut m = PolyMatrix::zeros(size, g.ambient());
    let col = |id: EdgeId| 2 * g.position(id).expect("incident edge belongs to g");
    let mut row = 0;
    for (v, cond) in g.vertices() {
        let inc: Vec<&Edge> = g
            .incident(v)
            .iter()
            .map(|&id| g.edge(id).unwrap())
            .collect();
        match cond {
            Condition::Dirichlet => {
                for e in &inc {
                    let (fa, fb) = value_form(g, e, v);
                    m.set(row, col(e.id), fa);
                    m.set(row, col(e.id) + 1, fb);
                    row += 1;
                }
            }
            Condition::Neumann => {
                for pair in inc.windows(2) {
                    let (fa, fb) = value_form(g, pair[0], v);
                    m.set(row, col(pair[0].id), fa);
                    m.set(row, col(pair[0].id) + 1, fb);
                    let (ga, gb) = value_form(g, pair[1], v);
                    m.set(row, col(pair[1].id), -&ga);
                    m.set(row, col(pair[1].id) + 1, -&gb);
                    row += 1;
                }
                // Outward derivative is +d/dx at a source and -d/dx at a target.
                let lead_is_source = inc[0].source == v;
                for e in &inc {
                    let (da, db) = derivative_form(g, e, v);
                    let flip = (e.source == v) != lead_is_source;
                    let (da, db) = if flip { (-&da, -&db) } else { (da, db) };
                    m.set(row, col(e.id), da);
                    m.set(row, col(e.id) + 1, db);
                }
                row += 1;
            }
        }
    }
    debug_assert_eq!(row, size);
    m
}

/// `det S_G` up to a unit, with cofactor expansion for `n <= 8` edges and
/// Bareiss elimination beyond.
pub fn secular_polynomial(g: &TreeGraph) -> Result<MultiPoly> {
    let m = scattering_matrix(g);
    let det = if g.n_edges() <= 8 {
        m.det_cofactor()
    } else {
        m.det_bareiss()
    };
    if det.is_zero() {
        return Err(Error::DegenerateSystem);
    }
    Ok(det.canonical())
}

/// A point of the torus `T^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    coords: Vec<Complex64>,
}

impl TorusPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        for (i, z) in coords.iter().enumerate() {
            let r = z.norm();
            if (r - 1.0).abs() > TAU_TORUS || !r.is_finite() {
                return Err(Error::OffTorus {
                    index: i + 1,
                    modulus: r,
                });
            }
        }
        Ok(TorusPoint { coords })
    }

    pub fn from_angles(theta: &[f64]) -> Self {
        TorusPoint {
            coords: theta
                .iter()
                .map(|&t| Complex64::from_polar(1.0, t))
                .collect(),
        }
    }

    /// `exp(i k l)`.
    pub fn along_path(k: f64, lengths: &[f64]) -> Self {
        Self::from_angles(&lengths.iter().map(|l| k * l).collect::<Vec<_>>())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Coordinate `z_j`, 1-based.
    pub fn z(&self, j: EdgeId) -> Complex64 {
        self.coords[j - 1]
    }
}

/// Amplitudes `(a_1, b_1, ..., a_n, b_n)` over a graph's edges in id order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector(pub Vec<Complex64>);

impl CoeffVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        CoeffVector(self.0.iter().map(|c| c / n).collect())
    }

    /// `(a_j, b_j)` for the edge at `position`.
    pub fn pair(&self, position: usize) -> (Complex64, Complex64) {
        (self.0[2 * position], self.0[2 * position + 1])
    }

    pub fn to_dvector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.0)
    }
}

impl From<DVector<Complex64>> for CoeffVector {
    fn from(v: DVector<Complex64>) -> Self {
        CoeffVector(v.iter().copied().collect())
    }
}

#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub dim: usize,
    /// Orthonormal kernel basis.
    pub basis: Vec<CoeffVector>,
    /// Singular values of the evaluated matrix, descending.
    pub singular_values: Vec<f64>,
}

impl Eigenspace {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Ratio of the largest kernel singular value to the smallest retained
    /// one; values near 1 flag an ambiguous rank decision.
    pub fn rank_margin(&self) -> f64 {
        let s = &self.singular_values;
        let k = s.len() - self.dim;
        match (self.dim, k) {
            (0, _) => s.last().copied().unwrap_or(0.0) / self.sigma_max(),
            (_, 0) => 0.0,
            _ => s[k].max(1e-300) / s[k - 1],
        }
    }
}

fn check_point(g: &TreeGraph, z: &TorusPoint) -> Result<()> {
    if z.dim() != g.ambient() {
        return Err(Error::DimensionMismatch {
            expected: g.ambient(),
            got: z.dim(),
        });
    }
    TorusPoint::new(z.coords.clone()).map(|_| ())
}

/// Numeric kernel of `S_G(z)`: singular values below `tau_rank * sigma_max`.
pub fn eigenspace(g: &TreeGraph, z: &TorusPoint, tau_rank: f64) -> Result<Eigenspace> {
    check_point(g, z)?;
    let m = scattering_matrix(g).eval(z.coords());
    Ok(eigenspace_of_matrix(&m, tau_rank))
}

pub(crate) fn eigenspace_of_matrix(m: &DMatrix<Complex64>, tau_rank: f64) -> Eigenspace {
    let s = linalg::svd(m);
    let basis: Vec<CoeffVector> = s
        .kernel(tau_rank)
        .into_iter()
        .map(CoeffVector::from)
        .collect();
    Eigenspace {
        dim: basis.len(),
        basis,
        singular_values: s.values,
    }
}

/// `||S_G(z) phi|| / (||S_G(z)|| ||phi||)` with the Frobenius norm.
pub fn kernel_residual(g: &TreeGraph, z: &TorusPoint, phi: &CoeffVector) -> f64 {
    let m = scattering_matrix(g).eval(z.coords());
    let r = &m * phi.to_dvector();
    r.norm() / (m.norm() * phi.norm()).max(f64::MIN_POSITIVE)
}

fn edge_value(
    g: &TreeGraph,
    z: &TorusPoint,
    e: &Edge,
    v: VertexId,
    phi: &CoeffVector,
) -> Complex64 {
    let (a, b) = phi.pair(g.position(e.id).unwrap());
    let zj = z.z(e.id);
    if e.source == v {
        a + b * zj
    } else {
        a * zj + b
    }
}

/// Boundary value of `phi` at `v`, read on the least-id incident edge.
/// The other incident edges must agree to `1e-8` relative to `||phi||`.
pub fn eval_vertex(
    g: &TreeGraph,
    z: &TorusPoint,
    v: VertexId,
    phi: &CoeffVector,
) -> Result<Complex64> {
    if !g.contains_vertex(v) {
        return Err(Error::UnknownVertex(v));
    }
    if phi.len() != 2 * g.n_edges() {
        return Err(Error::DimensionMismatch {
            expected: 2 * g.n_edges(),
            got: phi.len(),
        });
    }
    let values: Vec<Complex64> = g
        .incident(v)
        .iter()
        .map(|&id| edge_value(g, z, g.edge(id).unwrap(), v, phi))
        .collect();
    let spread = values
        .iter()
        .map(|x| (x - values[0]).norm())
        .fold(0.0, f64::max);
    if spread > TAU_CONTINUITY * phi.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::ContinuityViolated { vertex: v, spread });
    }
    Ok(values[0])
}

/// Restriction of `phi` to the edges in `h`, in id order.
pub fn project_coefficients(
    g: &TreeGraph,
    h: &BTreeSet<EdgeId>,
    phi: &CoeffVector,
) -> Result<CoeffVector> {
    let mut out = Vec::with_capacity(2 * h.len());
    for &id in h {
        let p = g.position(id).ok_or(Error::UnknownEdge(id))?;
        let (a, b) = phi.pair(p);
        out.push(a);
        out.push(b);
    }
    Ok(CoeffVector(out))
}

#[derive(Debug, Clone)]
pub struct Support {
    pub subgraph: OpenSubgraph,
    pub vanishing_vertices: BTreeSet<VertexId>,
    pub vanishing_edges: BTreeSet<EdgeId>,
    pub eigenspace: Eigenspace,
}

/// Support of the `z`-eigenspace and its vanishing set.
///
/// A Neumann vertex (resp. edge) vanishes when the norm of the evaluation
/// (resp. projection) map restricted to the eigenspace is below `tau_rank`.
/// Dirichlet vertices are not part of `G` and never listed. The support is
/// `G` minus the vanishing vertices, keeping the components that carry a
/// non-vanishing edge.
pub fn support_of_point(g: &TreeGraph, z: &TorusPoint, tau_rank: f64) -> Result<Support> {
    let es = eigenspace(g, z, tau_rank)?;
    if es.dim == 0 {
        let ratio = es.singular_values.last().copied().unwrap_or(0.0) / es.sigma_max();
        return Err(Error::NotOnSecularManifold(ratio));
    }
    let vanishing_vertices: BTreeSet<VertexId> = g
        .vertices()
        .filter(|&(_, c)| c == Condition::Neumann)
        .map(|(v, _)| v)
        .filter(|&v| {
            let e = g.edge(g.incident(v)[0]).unwrap();
            let norm2: f64 = es
                .basis
                .iter()
                .map(|phi| edge_value(g, z, e, v, phi).norm_sqr())
                .sum();
            norm2.sqrt() < tau_rank
        })
        .collect();
    let vanishing_edges: BTreeSet<EdgeId> = g
        .edges()
        .iter()
        .map(|e| e.id)
        .filter(|&id| {
            let p = g.position(id).unwrap();
            let norm2: f64 = es
                .basis
                .iter()
                .map(|phi| {
                    let (a, b) = phi.pair(p);
                    a.norm_sqr() + b.norm_sqr()
                })
                .sum();
            norm2.sqrt() < tau_rank
        })
        .collect();
    let kept = components_after_deletion(g, &vanishing_vertices)?
        .into_iter()
        .filter(|c| c.iter().any(|e| !vanishing_edges.contains(e)))
        .collect();
    let subgraph = OpenSubgraph::assemble(g, vanishing_vertices.clone(), kept);
    Ok(Support {
        subgraph,
        vanishing_vertices,
        vanishing_edges,
        eigenspace: es,
    })
}
