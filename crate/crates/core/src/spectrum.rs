//! Eigenvalues of a metric tree along the path `k -> exp(i k l)`.
//!
//! The detector is `f(k) = sigma_min(S_G(exp(i k l)))`, scanned on a grid
//! and refined by golden-section search. Multiplicities are rank
//! deficiencies at the refined point. The secular polynomial is evaluated
//! alongside as an independent residual.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::TreeGraph;
use crate::lattice::RelationLattice;
use crate::linalg;
use crate::poly::MultiPoly;
use crate::secular::{scattering_matrix, secular_polynomial, PolyMatrix, TorusPoint, TAU_RANK};

/// Refined minima with `sigma_min / sigma_max` above this are not roots.
const ACCEPT: f64 = 1e-8;
/// Bound for `|P| / max_grid |P|` at a reported eigenvalue.
pub const DET_RESIDUAL_BOUND: f64 = 1e-6;
const GOLDEN: f64 = 0.618_033_988_749_894_8;
const MAX_LENGTH_DRAWS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    /// Grid step; `None` selects `pi / (8 sum l)`.
    pub dk: Option<f64>,
    pub tau_root: f64,
    pub tau_rank: f64,
    /// Rescan clusters with finer steps instead of failing.
    pub adaptive: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            dk: None,
            tau_root: 1e-10,
            tau_rank: TAU_RANK,
            adaptive: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub k: f64,
    pub multiplicity: usize,
    /// `sigma_min / sigma_max` at `k`.
    pub residual: f64,
    /// `|P_G(exp(i k l))| / max_grid |P_G|`.
    pub det_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Eigenvalue>,
    pub window: (f64, f64),
    /// Coarse grid step used by the scan.
    pub step: f64,
}

impl SpectrumReport {
    pub fn gaps(&self) -> Vec<f64> {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1].k - w[0].k)
            .collect()
    }

    /// Smallest gap between consecutive distinct eigenvalues.
    pub fn mingap_estimate(&self) -> Option<f64> {
        self.gaps().into_iter().reduce(f64::min)
    }

    /// Eigenvalues in `(0, K]` counted with multiplicity.
    pub fn count_up_to(&self, k: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|e| e.k <= k)
            .map(|e| e.multiplicity)
            .sum()
    }

    pub fn is_simple(&self) -> bool {
        self.eigenvalues.iter().all(|e| e.multiplicity == 1)
    }
}

fn check_lengths(g: &TreeGraph, lengths: &[f64]) -> Result<()> {
    if lengths.len() != g.ambient() {
        return Err(Error::DimensionMismatch {
            expected: g.ambient(),
            got: lengths.len(),
        });
    }
    if let Some((i, &l)) = lengths
        .iter()
        .enumerate()
        .find(|(_, &l)| !(l > 0.0 && l.is_finite()))
    {
        return Err(Error::NonPositiveLength {
            index: i + 1,
            value: l,
        });
    }
    Ok(())
}

struct Detector<'a> {
    lengths: &'a [f64],
    matrix: PolyMatrix,
    poly: MultiPoly,
}

impl Detector<'_> {
    fn point(&self, k: f64) -> TorusPoint {
        TorusPoint::along_path(k, self.lengths)
    }

    fn eval(&self, k: f64) -> DMatrix<Complex64> {
        self.matrix.eval(self.point(k).coords())
    }

    fn f(&self, k: f64) -> f64 {
        linalg::sigma_extremes(&self.eval(k)).0
    }

    fn ratio(&self, k: f64) -> f64 {
        let (lo, hi) = linalg::sigma_extremes(&self.eval(k));
        lo / hi
    }

    fn det(&self, k: f64) -> Complex64 {
        self.poly.eval(self.point(k).coords())
    }

    /// `exp(-i k L) P`, real or imaginary up to rounding depending on the
    /// reflection symmetry of `P`.
    fn aligned(&self, k: f64) -> Option<f64> {
        let total: f64 = self.lengths.iter().sum();
        let q = self.det(k) * Complex64::from_polar(1.0, -k * total);
        match self.poly.reciprocity_sign() {
            Some(1) => Some(q.re),
            Some(-1) => Some(q.im),
            _ => None,
        }
    }

    fn golden(&self, mut a: f64, mut b: f64) -> f64 {
        let mut c = b - GOLDEN * (b - a);
        let mut d = a + GOLDEN * (b - a);
        let (mut fc, mut fd) = (self.f(c), self.f(d));
        for _ in 0..200 {
            if b - a <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - GOLDEN * (b - a);
                fc = self.f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + GOLDEN * (b - a);
                fd = self.f(d);
            }
        }
        if fc < fd {
            c
        } else {
            d
        }
    }

    /// Bisection on a sign change of the aligned determinant in `[a, b]`.
    fn bisect(&self, a: f64, b: f64, tau: f64) -> Option<f64> {
        let samples = 16;
        let h = (b - a) / samples as f64;
        let mut lo = a;
        let mut flo = self.aligned(lo)?;
        for i in 1..=samples {
            let hi = a + h * i as f64;
            let fhi = self.aligned(hi)?;
            if flo == 0.0 {
                return Some(lo);
            }
            if flo.signum() != fhi.signum() {
                let (mut x, mut y, mut fx) = (lo, hi, flo);
                while y - x > tau {
                    let m = 0.5 * (x + y);
                    let fm = self.aligned(m)?;
                    if fm.signum() == fx.signum() {
                        x = m;
                        fx = fm;
                    } else {
                        y = m;
                    }
                }
                return Some(0.5 * (x + y));
            }
            lo = hi;
            flo = fhi;
        }
        None
    }

    /// Accepted roots in `[lo, hi]` from a scan with the given step.
    fn scan(&self, lo: f64, hi: f64, step: f64, tau_root: f64) -> Vec<f64> {
        let n = ((hi - lo) / step).ceil() as usize;
        let grid: Vec<f64> = (0..=n).map(|i| lo + step * i as f64).collect();
        let f: Vec<f64> = grid.iter().map(|&k| self.f(k)).collect();
        let mut roots = Vec::new();
        for i in 1..n {
            if !(f[i] <= f[i - 1] && f[i] <= f[i + 1]) {
                continue;
            }
            let (a, b) = (grid[i - 1], grid[i + 1]);
            let k = self.golden(a, b);
            if self.ratio(k) < ACCEPT {
                roots.push(k);
            } else if let Some(k) = self.bisect(a, b, tau_root) {
                if self.ratio(k) < ACCEPT {
                    roots.push(k);
                }
            }
        }
        roots
    }
}

/// Sorts and merges roots closer than `tol`, keeping the one with the
/// smaller detector value.
fn merge(det: &Detector, mut roots: Vec<f64>, tol: f64) -> Vec<f64> {
    roots.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for k in roots {
        match out.last_mut() {
            Some(last) if k - *last < tol => {
                if det.f(k) < det.f(*last) {
                    *last = k;
                }
            }
            _ => out.push(k),
        }
    }
    out
}

/// Eigenvalues `0 < k <= k_max` of `(g, lengths)`.
///
/// The neighbourhood of every root found on the coarse grid is rescanned
/// with an eight times finer step. In strict mode two distinct roots closer
/// than the grid step then raise `StepTooCoarse`. In adaptive mode the
/// rescan repeats around close pairs, each time eight times finer, until
/// every gap exceeds the step that resolved it.
pub fn compute_spectrum(
    g: &TreeGraph,
    lengths: &[f64],
    k_max: f64,
    opts: &SpectrumOptions,
) -> Result<SpectrumReport> {
    check_lengths(g, lengths)?;
    if !(k_max > 0.0 && k_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "k_max must be positive, got {k_max}"
        )));
    }
    let total: f64 = lengths.iter().sum();
    let step = opts.dk.unwrap_or(PI / (8.0 * total));
    if step.is_nan() || step <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    let det = Detector {
        lengths,
        matrix: scattering_matrix(g),
        poly: secular_polynomial(g)?,
    };
    let hi = k_max + 2.0 * step;
    let merge_tol = 10.0 * opts.tau_root;
    let mut roots = merge(&det, det.scan(0.0, hi, step, opts.tau_root), merge_tol);

    // Every neighbourhood is rescanned once with a finer step; a root that
    // shares a grid cell with another only shows up there.
    let mut local = step;
    let mut focus = roots.clone();
    loop {
        let fine = local / 8.0;
        let mut found = roots.clone();
        for &k in &focus {
            found.extend(det.scan(
                (k - 1.5 * local).max(0.0),
                k + 1.5 * local,
                fine,
                opts.tau_root,
            ));
        }
        let refined = merge(&det, found, merge_tol);
        if !opts.adaptive {
            if let Some(gap) = min_gap(&in_window(&refined, k_max, opts.tau_root)) {
                if gap < step {
                    return Err(Error::StepTooCoarse(gap, step));
                }
            }
            break;
        }
        roots = refined;
        local = fine;
        focus = close_pairs(&roots, local);
        if focus.is_empty() || local / 8.0 <= 1e3 * opts.tau_root {
            break;
        }
    }
    let roots = in_window(&roots, k_max, opts.tau_root);
    if let Some(w) = roots.windows(2).find(|w| w[1] - w[0] < local) {
        return Err(Error::StepTooCoarse(w[1] - w[0], local));
    }

    let n_grid = (hi / step).ceil() as usize;
    let det_scale = (0..=n_grid)
        .map(|i| det.det(step * i as f64).norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let eigenvalues = roots
        .into_iter()
        .map(|k| {
            let s = linalg::svd(&det.eval(k));
            Eigenvalue {
                k,
                multiplicity: s.rank_deficiency(opts.tau_rank).max(1),
                residual: s.sigma_min() / s.sigma_max(),
                det_residual: det.det(k).norm() / det_scale,
            }
        })
        .collect();
    Ok(SpectrumReport {
        eigenvalues,
        window: (0.0, k_max),
        step,
    })
}

fn in_window(roots: &[f64], k_max: f64, tau_root: f64) -> Vec<f64> {
    roots
        .iter()
        .copied()
        .filter(|&k| k > 1e3 * tau_root && k <= k_max)
        .collect()
}

fn min_gap(roots: &[f64]) -> Option<f64> {
    roots.windows(2).map(|w| w[1] - w[0]).reduce(f64::min)
}

/// Roots whose nearest neighbour is closer than `step`.
fn close_pairs(roots: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for (i, &k) in roots.iter().enumerate() {
        let left = i > 0 && k - roots[i - 1] < step;
        let right = i + 1 < roots.len() && roots[i + 1] - k < step;
        if left || right {
            out.push(k);
        }
    }
    out
}

/// Smallest gap between distinct consecutive eigenvalues in `[k0, k1]`.
///
/// This bounds the mingap from above: the mingap is a limit inferior over
/// ever higher windows, and a finite window can only over-estimate it.
pub fn mingap_estimate(
    g: &TreeGraph,
    lengths: &[f64],
    window: (f64, f64),
    opts: &SpectrumOptions,
) -> Result<f64> {
    let (k0, k1) = window;
    if !(k0 >= 0.0 && k1 > k0) {
        return Err(Error::EmptyWindow(k0, k1));
    }
    let rep = compute_spectrum(g, lengths, k1, opts)?;
    let ks: Vec<f64> = rep
        .eigenvalues
        .iter()
        .map(|e| e.k)
        .filter(|&k| k >= k0)
        .collect();
    ks.windows(2)
        .map(|w| w[1] - w[0])
        .reduce(f64::min)
        .ok_or(Error::EmptyWindow(k0, k1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericityReport {
    pub samples: usize,
    pub fully_simple: usize,
    pub fraction_fully_simple: f64,
    /// Smallest gap between distinct eigenvalues over all samples; how
    /// close any sample came to a double eigenvalue.
    pub worst_gap_to_double: f64,
    pub lengths: Vec<Vec<f64>>,
}

/// Random positive length vector satisfying the relations, scaled to
/// `sum l = n`.
pub fn sample_lengths<R: Rng + ?Sized>(rel: &RelationLattice, rng: &mut R) -> Result<Vec<f64>> {
    let basis = rel.solution_basis();
    if basis.is_empty() {
        return Err(Error::InfeasibleRelations);
    }
    let n = rel.n();
    for _ in 0..MAX_LENGTH_DRAWS {
        let mut l = vec![0.0; n];
        for b in &basis {
            let c: f64 = rng.random_range(-1.0..1.0);
            for (x, &v) in l.iter_mut().zip(b) {
                *x += c * v as f64;
            }
        }
        let max = l.iter().copied().fold(0.0, f64::max);
        if max > 0.0 && l.iter().all(|&x| x > 1e-3 * max) {
            let s: f64 = l.iter().sum();
            return Ok(l.iter().map(|x| x * n as f64 / s).collect());
        }
    }
    Err(Error::InfeasibleRelations)
}

/// Fraction of random length vectors in the relation family whose spectrum
/// up to `k_max` is simple. Scans run in adaptive mode; a sample whose
/// roots cannot be separated counts as not simple.
pub fn genericity_trial(
    g: &TreeGraph,
    rel: &RelationLattice,
    samples: usize,
    k_max: f64,
    seed: u64,
    opts: &SpectrumOptions,
) -> Result<GenericityReport> {
    if rel.n() != g.ambient() {
        return Err(Error::DimensionMismatch {
            expected: g.ambient(),
            got: rel.n(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = SpectrumOptions {
        adaptive: true,
        ..*opts
    };
    let mut fully_simple = 0;
    let mut worst = f64::INFINITY;
    let mut drawn = Vec::with_capacity(samples);
    for _ in 0..samples {
        let l = sample_lengths(rel, &mut rng)?;
        match compute_spectrum(g, &l, k_max, &opts) {
            Ok(rep) => {
                if rep.is_simple() {
                    fully_simple += 1;
                }
                if let Some(m) = rep.mingap_estimate() {
                    worst = worst.min(m);
                }
            }
            Err(Error::StepTooCoarse(gap, _)) => worst = worst.min(gap),
            Err(e) => return Err(e),
        }
        drawn.push(l);
    }
    Ok(GenericityReport {
        samples,
        fully_simple,
        fraction_fully_simple: if samples == 0 {
            1.0
        } else {
            fully_simple as f64 / samples as f64
        },
        worst_gap_to_double: worst,
        lengths: drawn,
    })
}

/// `k=<value> mult=<m> residual=<r>` lines and a `mingap_estimate=` footer.
pub fn write_spectrum_human(rep: &SpectrumReport) -> String {
    let mut out = String::new();
    for e in &rep.eigenvalues {
        writeln!(
            out,
            "k={:.12} mult={} residual={:.3e}",
            e.k, e.multiplicity, e.residual
        )
        .unwrap();
    }
    match rep.mingap_estimate() {
        Some(m) => writeln!(out, "mingap_estimate={m:.12}").unwrap(),
        None => writeln!(out, "mingap_estimate=none").unwrap(),
    }
    out
}

/// Tab-separated records, one per line:
///
/// ```text
/// window <k_min> <k_max>
/// step <dk>
/// eigenvalue <k> <multiplicity> <residual> <det_residual>
/// mingap_estimate <value | none>
/// ```
///
/// Floats use the shortest representation that parses back exactly.
pub fn write_spectrum_machine(rep: &SpectrumReport) -> String {
    let mut out = String::new();
    writeln!(out, "window\t{}\t{}", rep.window.0, rep.window.1).unwrap();
    writeln!(out, "step\t{}", rep.step).unwrap();
    for e in &rep.eigenvalues {
        writeln!(
            out,
            "eigenvalue\t{}\t{}\t{:e}\t{:e}",
            e.k, e.multiplicity, e.residual, e.det_residual
        )
        .unwrap();
    }
    match rep.mingap_estimate() {
        Some(m) => writeln!(out, "mingap_estimate\t{m}").unwrap(),
        None => writeln!(out, "mingap_estimate\tnone").unwrap(),
    }
    out
}

pub fn parse_spectrum_machine(text: &str) -> Result<SpectrumReport> {
    let mut window = None;
    let mut step = None;
    let mut eigenvalues = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let ln = idx + 1;
        let f: Vec<&str> = line.split('\t').collect();
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::parse(ln, format!("bad number `{s}`")))
        };
        match f.as_slice() {
            ["window", a, b] => window = Some((num(a)?, num(b)?)),
            ["step", s] => step = Some(num(s)?),
            ["eigenvalue", k, m, r, d] => eigenvalues.push(Eigenvalue {
                k: num(k)?,
                multiplicity: m
                    .parse()
                    .map_err(|_| Error::parse(ln, format!("bad multiplicity `{m}`")))?,
                residual: num(r)?,
                det_residual: num(d)?,
            }),
            ["mingap_estimate", _] => {}
            [""] => {}
            _ => return Err(Error::parse(ln, format!("unrecognised record `{line}`"))),
        }
    }
    Ok(SpectrumReport {
        eigenvalues,
        window: window.ok_or_else(|| Error::parse(1, "missing window record"))?,
        step: step.ok_or_else(|| Error::parse(1, "missing step record"))?,
    })
}
