//! Sparse multivariate polynomials with exact integer coefficients.
//!
//! Terms are stored in a `BTreeMap` keyed by exponent vectors, so iteration
//! follows lexicographic exponent order (`z1` most significant). Zero
//! coefficients are never stored.
//!
//! The text form lists terms in descending lexicographic order, each as
//! `<coeff> z1^<e1> ... zn^<en>` with zero exponents omitted, joined by
//! ` + ` / ` - `:
//!
//! ```text
//! 3 z1^2 z2^2 z3^2 + 1 z1^2 z2^2 - 1 z3^2 - 3
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Coeff = i128;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Coeff>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Coeff) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1)
    }

    /// The variable `z_j`, with `j` counted from 1.
    pub fn var(nvars: usize, j: usize) -> Self {
        assert!(j >= 1 && j <= nvars, "variable z{j} outside 1..={nvars}");
        let mut e = vec![0; nvars];
        e[j - 1] = 1;
        Self::monomial(e, 1)
    }

    pub fn monomial(exps: Vec<u32>, c: Coeff) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated monomials.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Coeff)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&[u32], Coeff)> + '_ {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn coeff(&self, exps: &[u32]) -> Coeff {
        self.terms.get(exps).copied().unwrap_or(0)
    }

    /// Lexicographically greatest term.
    pub fn leading(&self) -> Option<(&[u32], Coeff)> {
        self.terms
            .iter()
            .next_back()
            .map(|(e, &c)| (e.as_slice(), c))
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Coeff) {
        if c == 0 {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Maximal exponent of `z_j` (1-based); 0 for the zero polynomial.
    pub fn degree_in(&self, j: usize) -> u32 {
        self.terms.keys().map(|e| e[j - 1]).max().unwrap_or(0)
    }

    /// Variables (1-based) that occur with a positive exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        (1..=self.nvars)
            .filter(|&j| self.degree_in(j) > 0)
            .collect()
    }

    pub fn scale(&self, c: Coeff) -> Self {
        if c == 0 {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, &v)| (e.clone(), v * c))
                .collect(),
        }
    }

    /// `self -= c * z^exps * d`, in place.
    fn sub_scaled_shift(&mut self, c: Coeff, exps: &[u32], d: &MultiPoly) {
        for (de, &dc) in &d.terms {
            let e: Vec<u32> = de.iter().zip(exps).map(|(a, b)| a + b).collect();
            self.add_term(e, -c * dc);
        }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        assert_eq!(self.nvars, d.nvars);
        let (dlead, dc) = d.leading()?;
        let dlead = dlead.to_vec();
        let mut rem = self.clone();
        let mut q = MultiPoly::zero(self.nvars);
        while let Some((lead, lc)) = rem.leading() {
            if lc % dc != 0 {
                return None;
            }
            let mut shift = Vec::with_capacity(self.nvars);
            for (a, b) in lead.iter().zip(&dlead) {
                if a < b {
                    return None;
                }
                shift.push(a - b);
            }
            let c = lc / dc;
            rem.sub_scaled_shift(c, &shift, d);
            q.add_term(shift, c);
        }
        Some(q)
    }

    /// Partial derivative with respect to `z_j`.
    pub fn derivative(&self, j: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            let k = e[j - 1];
            if k > 0 {
                let mut e2 = e.clone();
                e2[j - 1] -= 1;
                out.add_term(e2, c * k as Coeff);
            }
        }
        out
    }

    /// Coefficient of `z_j^power`, as a polynomial in the remaining variables.
    pub fn coefficient_of(&self, j: usize, power: u32) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            if e[j - 1] == power {
                let mut e2 = e.clone();
                e2[j - 1] = 0;
                out.add_term(e2, c);
            }
        }
        out
    }

    /// Re-embeds the polynomial in a ring with `nvars` variables; variables
    /// beyond the current count are absent, dropped ones must not occur.
    pub fn with_nvars(&self, nvars: usize) -> Self {
        let mut out = Self::zero(nvars);
        for (e, &c) in &self.terms {
            let mut e2 = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    assert!(i < nvars, "variable z{} does not fit", i + 1);
                    e2[i] = k;
                }
            }
            out.add_term(e2, c);
        }
        out
    }

    /// Primitive representative up to `c z^a`: the common monomial factor and
    /// the integer content are stripped and the leading coefficient made
    /// positive.
    pub fn canonical(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut min = vec![u32::MAX; self.nvars];
        for e in self.terms.keys() {
            for (m, &k) in min.iter_mut().zip(e) {
                *m = (*m).min(k);
            }
        }
        let content = self
            .terms
            .values()
            .fold(0u128, |g, &c| gcd(g, c.unsigned_abs())) as Coeff;
        let sign = if self.leading().unwrap().1 < 0 { -1 } else { 1 };
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| {
                    (
                        e.iter().zip(&min).map(|(a, b)| a - b).collect(),
                        c / content * sign,
                    )
                })
                .collect(),
        }
    }

    /// Compares the polynomial with its reflection `z^d P(1/z)`, `d` being
    /// the per-variable degree. Returns `Some(±1)` when the reflection is
    /// `±P`. Assumes no common monomial factor.
    pub fn reciprocity_sign(&self) -> Option<i32> {
        let degs: Vec<u32> = (1..=self.nvars).map(|j| self.degree_in(j)).collect();
        let mut plus = true;
        let mut minus = true;
        for (e, &c) in &self.terms {
            let r: Vec<u32> = e.iter().zip(&degs).map(|(k, d)| d - k).collect();
            let rc = self.coeff(&r);
            plus &= rc == c;
            minus &= rc == -c;
        }
        match (plus, minus) {
            (true, _) => Some(1),
            (false, true) => Some(-1),
            _ => None,
        }
    }

    /// Sum of absolute coefficient values.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.unsigned_abs() as f64).sum()
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.nvars);
        let maxdeg = self.terms.keys().flatten().copied().max().unwrap_or(0) as usize;
        let pows: Vec<Vec<Complex64>> = z
            .iter()
            .map(|&zi| {
                let mut v = Vec::with_capacity(maxdeg + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=maxdeg {
                    v.push(acc);
                    acc *= zi;
                }
                v
            })
            .collect();
        self.terms
            .iter()
            .map(|(e, &c)| {
                e.iter()
                    .enumerate()
                    .fold(Complex64::new(c as f64, 0.0), |acc, (i, &k)| {
                        acc * pows[i][k as usize]
                    })
            })
            .sum()
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, &c)) in self.terms.iter().rev().enumerate() {
            if i == 0 {
                write!(f, "{c}")?;
            } else if c < 0 {
                write!(f, " - {}", c.unsigned_abs())?;
            } else {
                write!(f, " + {c}")?;
            }
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    write!(f, " z{}^{}", j + 1, k)?;
                }
            }
        }
        Ok(())
    }
}

/// Parses the text form. With `nvars = None` the ring size is the largest
/// variable index that occurs (at least 1).
pub fn parse_poly(text: &str, nvars: Option<usize>) -> Result<MultiPoly> {
    let err = |m: String| Error::parse(1, m);
    let mut raw: Vec<(Vec<(usize, u32)>, Coeff)> = Vec::new();
    let mut toks = text.split_whitespace().peekable();
    let mut sign: Coeff = 1;
    let mut first = true;
    loop {
        let Some(tok) = toks.next() else {
            if first {
                return Err(err("empty polynomial".into()));
            }
            return Err(err("dangling operator".into()));
        };
        let c: Coeff = tok
            .parse()
            .map_err(|_| err(format!("expected coefficient, found `{tok}`")))?;
        if !first && c < 0 {
            return Err(err(format!("signed coefficient `{tok}` after operator")));
        }
        let mut vars = Vec::new();
        while let Some(&t) = toks.peek() {
            let Some(rest) = t.strip_prefix('z') else {
                break;
            };
            let (idx, pow) = rest
                .split_once('^')
                .ok_or_else(|| err(format!("bad factor `{t}`")))?;
            let idx: usize = idx.parse().map_err(|_| err(format!("bad factor `{t}`")))?;
            let pow: u32 = pow.parse().map_err(|_| err(format!("bad factor `{t}`")))?;
            if idx == 0 {
                return Err(err(format!("bad factor `{t}`")));
            }
            vars.push((idx, pow));
            toks.next();
        }
        raw.push((vars, sign * c));
        first = false;
        match toks.next() {
            None => break,
            Some("+") => sign = 1,
            Some("-") => sign = -1,
            Some(t) => return Err(err(format!("expected `+` or `-`, found `{t}`"))),
        }
    }
    let maxvar = raw
        .iter()
        .flat_map(|(v, _)| v.iter().map(|&(i, _)| i))
        .max()
        .unwrap_or(1);
    let n = nvars.unwrap_or(maxvar.max(1));
    if maxvar > n && raw.iter().any(|(v, _)| !v.is_empty()) {
        return Err(err(format!("variable z{maxvar} exceeds ring size {n}")));
    }
    let mut p = MultiPoly::zero(n);
    for (vars, c) in raw {
        let mut e = vec![0; n];
        for (i, k) in vars {
            e[i - 1] += k;
        }
        p.add_term(e, c);
    }
    Ok(p)
}

impl std::str::FromStr for MultiPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s, None)
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = MultiPoly::zero(self.nvars);
        // Iterate the larger operand in the inner loop.
        let (small, big) = if self.terms.len() <= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        for (ea, &ca) in &small.terms {
            for (eb, &cb) in &big.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        self.scale(-1)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(n: usize, j: usize) -> MultiPoly {
        MultiPoly::var(n, j)
    }

    #[test]
    fn display_matches_grammar() {
        let p = &(&z(1, 1) * &z(1, 1)) - &MultiPoly::one(1);
        assert_eq!(p.to_string(), "1 z1^2 - 1");
        let q = &(&z(2, 1) * &z(2, 2)).scale(-3) + &z(2, 2);
        assert_eq!(q.to_string(), "-3 z1^1 z2^1 + 1 z2^1");
        assert_eq!(MultiPoly::zero(3).to_string(), "0");
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "1 z1^2 - 1",
            "3 z1^2 z2^2 z3^2 + 1 z1^2 z2^2 - 1 z3^2 - 3",
            "-2",
            "0",
        ] {
            let p = parse_poly(s, None).unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert_eq!(parse_poly("1 z2^1", None).unwrap().nvars(), 2);
        assert!(parse_poly("1 z1^2 +", None).is_err());
        assert!(parse_poly("1 z1^2 + -1", None).is_err());
        assert!(parse_poly("1 y1^2", None).is_err());
        assert!(parse_poly("1 z3^1", Some(2)).is_err());
    }

    #[test]
    fn canonical_strips_monomial_unit() {
        let p = parse_poly("-1 z1^3 z2^1 + 1 z1^1 z2^1", None).unwrap();
        assert_eq!(p.canonical().to_string(), "1 z1^2 - 1");
    }

    #[test]
    fn exact_division() {
        let a = parse_poly("1 z1^2 + 1", Some(2)).unwrap();
        let b = parse_poly("1 z1^1 z2^1 - 3 z2^1 + 2", Some(2)).unwrap();
        let ab = &a * &b;
        assert_eq!(ab.div_exact(&a).unwrap(), b);
        assert_eq!(ab.div_exact(&b).unwrap(), a);
        let c = parse_poly("2 z1^1 + 1", Some(2)).unwrap();
        assert!(ab.div_exact(&c).is_none());
        assert!(a.div_exact(&MultiPoly::zero(2)).is_none());
    }

    #[test]
    fn reciprocity() {
        assert_eq!(
            parse_poly("1 z1^2 - 1", None).unwrap().reciprocity_sign(),
            Some(-1)
        );
        assert_eq!(
            parse_poly("1 z1^2 + 1", None).unwrap().reciprocity_sign(),
            Some(1)
        );
        assert_eq!(
            parse_poly("1 z1^2 + 2", None).unwrap().reciprocity_sign(),
            None
        );
    }

    #[test]
    fn eval_and_derivative() {
        let p = parse_poly("1 z1^2 z2^1 - 2 z2^1 + 1", None).unwrap();
        let pt = [Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)];
        // (-1)*2 - 4 + 1
        assert!((p.eval(&pt) - Complex64::new(-5.0, 0.0)).norm() < 1e-14);
        assert_eq!(p.derivative(1).to_string(), "2 z1^1 z2^1");
        assert_eq!(p.coefficient_of(1, 0).to_string(), "-2 z2^1 + 1");
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec((prop::collection::vec(0u32..3, 3), -4i128..5), 0..6)
            .prop_map(|ts| MultiPoly::from_terms(3, ts))
    }

    proptest! {
        #[test]
        fn text_round_trip(p in arb_poly()) {
            let s = p.to_string();
            prop_assert_eq!(parse_poly(&s, Some(3)).unwrap(), p);
        }

        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !b.is_zero() {
                prop_assert_eq!((&a * &b).div_exact(&b), Some(a.clone()));
            }
        }
    }
}
