//! Integer relation lattices among edge lengths.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A saturated sublattice of `Z^n`, stored by its Hermite normal form rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationLattice {
    n: usize,
    rows: Vec<Vec<i64>>,
}

impl RelationLattice {
    /// Saturates the span of `rows` inside `Z^n`. Zero rows are rejected;
    /// linearly dependent rows are allowed and reduce the rank.
    pub fn new(n: usize, rows: &[Vec<i64>]) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            if r.iter().all(|&x| x == 0) {
                return Err(Error::ZeroRow(i + 1));
            }
        }
        let wide: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let sat = saturate(&wide, n);
        Ok(RelationLattice {
            n,
            rows: sat
                .into_iter()
                .map(|r| r.into_iter().map(|x| x as i64).collect())
                .collect(),
        })
    }

    pub fn unconstrained(n: usize) -> Self {
        RelationLattice {
            n,
            rows: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Dimension of the family of length vectors obeying the relations.
    pub fn family_dim(&self) -> usize {
        self.n - self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Integer basis of the length vectors `l` with `A l = 0`.
    pub fn solution_basis(&self) -> Vec<Vec<i64>> {
        let wide: Vec<Vec<i128>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        hermite_rows(integer_kernel(&wide, self.n))
            .into_iter()
            .map(|r| r.into_iter().map(|x| x as i64).collect())
            .collect()
    }

    pub fn admits(&self, lengths: &[f64], tol: f64) -> bool {
        let scale = lengths.iter().map(|x| x.abs()).fold(0.0, f64::max);
        self.rows.iter().all(|r| {
            let s: f64 = r.iter().zip(lengths).map(|(&a, l)| a as f64 * l).sum();
            s.abs() <= tol * scale.max(1.0)
        })
    }
}

/// Basis of `{x in Z^n : M x = 0}` via unimodular column operations.
pub(crate) fn integer_kernel(m: &[Vec<i128>], n: usize) -> Vec<Vec<i128>> {
    let mut a: Vec<Vec<i128>> = m.to_vec();
    // u[j] is column j of the unimodular transform
    let mut u: Vec<Vec<i128>> = (0..n)
        .map(|j| (0..n).map(|i| i128::from(i == j)).collect())
        .collect();
    let mut pivot = 0;
    for i in 0..a.len() {
        if pivot == n {
            break;
        }
        loop {
            let best = (pivot..n)
                .filter(|&j| a[i][j] != 0)
                .min_by_key(|&j| a[i][j].abs());
            let Some(b) = best else { break };
            swap_cols(&mut a, &mut u, pivot, b);
            let p = a[i][pivot];
            let mut done = true;
            for j in pivot + 1..n {
                let q = a[i][j].div_euclid(p);
                if q != 0 {
                    sub_col(&mut a, &mut u, j, pivot, q);
                }
                if a[i][j] != 0 {
                    done = false;
                }
            }
            if done {
                pivot += 1;
                break;
            }
        }
    }
    u[pivot..].to_vec()
}

fn swap_cols(a: &mut [Vec<i128>], u: &mut [Vec<i128>], x: usize, y: usize) {
    if x == y {
        return;
    }
    for row in a.iter_mut() {
        row.swap(x, y);
    }
    u.swap(x, y);
}

/// Column `dst -= q * column src`.
fn sub_col(a: &mut [Vec<i128>], u: &mut [Vec<i128>], dst: usize, src: usize, q: i128) {
    for row in a.iter_mut() {
        row[dst] -= q * row[src];
    }
    let s = u[src].clone();
    for (d, x) in u[dst].iter_mut().zip(s) {
        *d -= q * x;
    }
}

/// Row Hermite normal form of the lattice spanned by `rows`, zero rows
/// dropped.
pub(crate) fn hermite_rows(mut rows: Vec<Vec<i128>>) -> Vec<Vec<i128>> {
    let Some(n) = rows.first().map(Vec::len) else {
        return rows;
    };
    let mut r = 0;
    for c in 0..n {
        loop {
            let best = (r..rows.len())
                .filter(|&i| rows[i][c] != 0)
                .min_by_key(|&i| rows[i][c].abs());
            let Some(b) = best else { break };
            rows.swap(r, b);
            let p = rows[r][c];
            let mut done = true;
            for i in r + 1..rows.len() {
                let q = rows[i][c].div_euclid(p);
                if q != 0 {
                    let pr = rows[r].clone();
                    for (x, y) in rows[i].iter_mut().zip(pr) {
                        *x -= q * y;
                    }
                }
                if rows[i][c] != 0 {
                    done = false;
                }
            }
            if done {
                if rows[r][c] < 0 {
                    rows[r].iter_mut().for_each(|x| *x = -*x);
                }
                let p = rows[r][c];
                let pr = rows[r].clone();
                for row in &mut rows[..r] {
                    let q = row[c].div_euclid(p);
                    if q != 0 {
                        for (x, y) in row.iter_mut().zip(&pr) {
                            *x -= q * y;
                        }
                    }
                }
                r += 1;
                break;
            }
        }
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    rows
}

/// `span_Q(rows) ∩ Z^n`, as the kernel of the kernel.
fn saturate(rows: &[Vec<i128>], n: usize) -> Vec<Vec<i128>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ker = integer_kernel(rows, n);
    let sat = if ker.is_empty() {
        (0..n)
            .map(|j| (0..n).map(|i| i128::from(i == j)).collect())
            .collect()
    } else {
        integer_kernel(&ker, n)
    };
    hermite_rows(sat)
}

/// One relation per line, `n` integers each; `#` starts a comment.
pub fn parse_relations(text: &str, n: usize) -> Result<RelationLattice> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::parse(idx + 1, format!("bad integer `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            return Err(Error::parse(
                idx + 1,
                format!("expected {n} entries, found {}", row.len()),
            ));
        }
        if row.iter().all(|&x| x == 0) {
            return Err(Error::ZeroRow(rows.len() + 1));
        }
        rows.push(row);
    }
    RelationLattice::new(n, &rows)
}

pub fn write_relations(rel: &RelationLattice) -> String {
    let mut out = String::new();
    for r in rel.rows() {
        let line: Vec<String> = r.iter().map(i64::to_string).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}
