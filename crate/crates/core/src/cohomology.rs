//! Integer cohomology of the torus and the intersection-number obstruction
//! to uniform discreteness.
//!
//! `H*(T^n; Z)` is the exterior algebra on `a1, ..., an`. A class is stored
//! as a map from ascending index tuples to nonzero coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, OpenSubgraph, TreeGraph};
use crate::lattice::RelationLattice;
use crate::strata::{singular_components, Stratum};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExteriorClass {
    n: usize,
    terms: BTreeMap<Vec<usize>, i64>,
}

/// Sorts `idx` in place and returns the permutation sign, or `None` when an
/// index repeats.
fn sort_with_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl ExteriorClass {
    pub fn zero(n: usize) -> Self {
        ExteriorClass {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// The unit class in degree zero.
    pub fn one(n: usize) -> Self {
        let mut c = Self::zero(n);
        c.terms.insert(Vec::new(), 1);
        c
    }

    /// Generator `a_j`, 1-based.
    pub fn generator(n: usize, j: usize) -> Self {
        assert!((1..=n).contains(&j), "generator index out of range");
        let mut c = Self::zero(n);
        c.terms.insert(vec![j], 1);
        c
    }

    /// `sum_j coeffs[j-1] a_j`.
    pub fn linear_form(coeffs: &[i64]) -> Self {
        let mut c = Self::zero(coeffs.len());
        for (i, &a) in coeffs.iter().enumerate() {
            c.add_term(vec![i + 1], a);
        }
        c
    }

    /// Adds `coeff * a_{i1} ... a_{ik}` for indices in any order.
    pub fn add_term(&mut self, mut idx: Vec<usize>, coeff: i64) {
        assert!(
            idx.iter().all(|&i| (1..=self.n).contains(&i)),
            "index out of range"
        );
        let Some(sign) = sort_with_sign(&mut idx) else {
            return;
        };
        let v = self.terms.get(&idx).copied().unwrap_or(0) + sign * coeff;
        if v == 0 {
            self.terms.remove(&idx);
        } else {
            self.terms.insert(idx, v);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], i64)> + '_ {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn coeff(&self, idx: &[usize]) -> i64 {
        let mut idx = idx.to_vec();
        match sort_with_sign(&mut idx) {
            Some(sign) => sign * self.terms.get(&idx).copied().unwrap_or(0),
            None => 0,
        }
    }

    /// Degree when homogeneous; `None` for zero or mixed classes.
    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(Vec::len);
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    /// Coefficient of `a1 a2 ... an`.
    pub fn top_coefficient(&self) -> i64 {
        self.terms
            .get(&(1..=self.n).collect::<Vec<_>>())
            .copied()
            .unwrap_or(0)
    }

    pub fn scale(&self, s: i64) -> Self {
        let mut c = Self::zero(self.n);
        if s != 0 {
            c.terms = self
                .terms
                .iter()
                .map(|(k, &v)| (k.clone(), v * s))
                .collect();
        }
        c
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::MismatchedRank(self.n, other.n));
        }
        let mut out = Self::zero(self.n);
        for (x, &cx) in &self.terms {
            for (y, &cy) in &other.terms {
                let mut idx = x.clone();
                idx.extend(y);
                out.add_term(idx, cx * cy);
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl Add for &ExteriorClass {
    type Output = ExteriorClass;

    fn add(self, rhs: &ExteriorClass) -> ExteriorClass {
        assert_eq!(self.n, rhs.n, "classes live in different rings");
        let mut out = self.clone();
        for (k, &c) in &rhs.terms {
            out.add_term(k.clone(), c);
        }
        out
    }
}

impl Neg for &ExteriorClass {
    type Output = ExteriorClass;

    fn neg(self) -> ExteriorClass {
        self.scale(-1)
    }
}

/// Terms in ascending index-tuple order, e.g. `8 a1a2a3 - 8 a1a2a4`; a
/// degree-zero term prints as its bare coefficient and the zero class as `0`.
impl fmt::Display for ExteriorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (idx, &c)) in self.terms.iter().enumerate() {
            let mag = c.unsigned_abs();
            match (i, c < 0) {
                (0, false) => write!(f, "{mag}")?,
                (0, true) => write!(f, "-{mag}")?,
                (_, false) => write!(f, " + {mag}")?,
                (_, true) => write!(f, " - {mag}")?,
            }
            if !idx.is_empty() {
                write!(f, " ")?;
                for j in idx {
                    write!(f, "a{j}")?;
                }
            }
        }
        Ok(())
    }
}

/// Parses the [`Display`](fmt::Display) form in the ring with `n` generators.
pub fn parse_class(text: &str, n: usize) -> Result<ExteriorClass> {
    let bad = |m: String| Error::parse(1, m);
    let toks: Vec<&str> = text.split_whitespace().collect();
    let mut out = ExteriorClass::zero(n);
    if toks == ["0"] {
        return Ok(out);
    }
    let mut i = 0;
    let mut sign = 1;
    let mut first = true;
    while i < toks.len() {
        if !first {
            sign = match toks[i] {
                "+" => 1,
                "-" => -1,
                t => return Err(bad(format!("expected + or -, found `{t}`"))),
            };
            i += 1;
        }
        let c: i64 = toks
            .get(i)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("expected a coefficient".into()))?;
        i += 1;
        let mut idx = Vec::new();
        if let Some(mono) = toks.get(i).filter(|t| t.starts_with('a')) {
            for part in mono.split('a').skip(1) {
                let j: usize = part
                    .parse()
                    .map_err(|_| bad(format!("bad monomial `{mono}`")))?;
                if !(1..=n).contains(&j) {
                    return Err(bad(format!("generator a{j} outside 1..={n}")));
                }
                idx.push(j);
            }
            i += 1;
        }
        out.add_term(idx, sign * c);
        first = false;
    }
    if first {
        return Err(bad("empty class".into()));
    }
    Ok(out)
}

/// `2 sum_{j in edges} a_j`.
pub fn zero_locus_class<I: IntoIterator<Item = EdgeId>>(edges: I, n: usize) -> ExteriorClass {
    let mut c = ExteriorClass::zero(n);
    for j in edges {
        c.add_term(vec![j], 2);
    }
    c
}

/// Product of the zero-locus classes of the kept components.
pub fn stratum_class(h: &OpenSubgraph, n: usize) -> Result<ExteriorClass> {
    let mut seen = BTreeSet::new();
    let mut acc = ExteriorClass::one(n);
    for k in h.kept_components() {
        for &j in k {
            if !seen.insert(j) {
                return Err(Error::OverlappingVariables(j));
            }
        }
        acc = acc.wedge(&zero_locus_class(k.iter().copied(), n))?;
    }
    Ok(acc)
}

/// Class of the subtorus `{z : z^A = 1 for A in rel}`.
pub fn closure_class(rel: &RelationLattice) -> ExteriorClass {
    rel.rows()
        .iter()
        .fold(ExteriorClass::one(rel.n()), |acc, r| {
            acc.wedge(&ExteriorClass::linear_form(r))
                .expect("same ring")
        })
}

pub fn intersection_number(x: &ExteriorClass, y: &ExteriorClass) -> Result<i64> {
    Ok(x.wedge(y)?.top_coefficient())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Some product is nonzero, so the mingap vanishes for every length
    /// vector in the family.
    Obstructed,
    /// All products vanish; the test says nothing.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Obstructed => "OBSTRUCTED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pairing {
    pub stratum: Stratum,
    pub class: ExteriorClass,
    /// `None` when the degrees are not complementary.
    pub product: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionReport {
    pub closure: ExteriorClass,
    pub pairings: Vec<Pairing>,
    pub verdict: Verdict,
}

impl ObstructionReport {
    pub fn products(&self) -> Vec<i64> {
        self.pairings.iter().filter_map(|p| p.product).collect()
    }
}

pub fn discreteness_obstruction(g: &TreeGraph, rel: &RelationLattice) -> Result<ObstructionReport> {
    let n = g.ambient();
    if rel.n() != n {
        return Err(Error::MismatchedRank(n, rel.n()));
    }
    let closure = closure_class(rel);
    let pairings = singular_components(g)?
        .into_iter()
        .map(|s| {
            let class = stratum_class(&s.h, n)?;
            let product = if s.codim + rel.rank() == n {
                Some(intersection_number(&class, &closure)?)
            } else {
                None
            };
            Ok(Pairing {
                stratum: s,
                class,
                product,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict = if pairings.iter().any(|p| p.product.is_some_and(|x| x != 0)) {
        Verdict::Obstructed
    } else {
        Verdict::Inconclusive
    };
    Ok(ObstructionReport {
        closure,
        pairings,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families;
    use proptest::prelude::*;

    fn a(n: usize, j: usize) -> ExteriorClass {
        ExteriorClass::generator(n, j)
    }

    fn w(x: &ExteriorClass, y: &ExteriorClass) -> ExteriorClass {
        x.wedge(y).unwrap()
    }

    #[test]
    fn wedge_rules() {
        assert!(w(&a(2, 1), &a(2, 1)).is_zero());
        assert_eq!(w(&a(2, 2), &a(2, 1)).to_string(), "-1 a1a2");
        let x = ExteriorClass::linear_form(&[2, 2]);
        assert_eq!(w(&x, &a(2, 1)).to_string(), "-2 a1a2");
        assert_eq!(
            a(2, 1).wedge(&a(3, 1)).unwrap_err(),
            Error::MismatchedRank(2, 3)
        );
    }

    #[test]
    fn zero_locus_classes() {
        assert_eq!(zero_locus_class([1], 1).to_string(), "2 a1");
        assert_eq!(
            zero_locus_class(3..=7, 7).to_string(),
            "2 a3 + 2 a4 + 2 a5 + 2 a6 + 2 a7"
        );
        assert_eq!(zero_locus_class([4], 7), a(7, 4).scale(2));
    }

    #[test]
    fn star_class() {
        let g = families::star(3);
        let s = singular_components(&g).unwrap();
        assert_eq!(stratum_class(&s[0].h, 3).unwrap().to_string(), "8 a1a2a3");
    }

    #[test]
    fn closure_classes() {
        assert_eq!(
            closure_class(&RelationLattice::unconstrained(3)).to_string(),
            "1"
        );
        let r = RelationLattice::new(3, &[vec![1, 1, -2]]).unwrap();
        assert_eq!(closure_class(&r).to_string(), "1 a1 + 1 a2 - 2 a3");
        let r2 = RelationLattice::new(3, &[vec![2, 2, -4]]).unwrap();
        assert_eq!(closure_class(&r2), closure_class(&r));
    }

    #[test]
    fn intersection_numbers() {
        let x = a(3, 1).scale(8);
        let x = w(&w(&x, &a(3, 2)), &a(3, 3));
        assert_eq!(intersection_number(&x, &ExteriorClass::one(3)).unwrap(), 8);
        let y = w(&w(&a(4, 1).scale(8), &a(4, 2)), &a(4, 3));
        assert_eq!(intersection_number(&y, &a(4, 4)).unwrap(), 8);
        let z = w(&w(&a(4, 1).scale(8), &a(4, 2)), &a(4, 4));
        assert_eq!(intersection_number(&z, &a(4, 4)).unwrap(), 0);
    }

    #[test]
    fn obstruction_examples() {
        let g = families::star(4);
        let rel = RelationLattice::new(4, &[vec![0, 0, 0, 1]]).unwrap();
        let rep = discreteness_obstruction(&g, &rel).unwrap();
        let mut mags: Vec<i64> = rep.products().iter().map(|p| p.abs()).collect();
        mags.sort();
        assert_eq!(mags, [0, 0, 0, 8]);
        assert_eq!(
            rep.pairings.iter().filter(|p| p.product.is_none()).count(),
            1
        );
        assert_eq!(rep.verdict, Verdict::Obstructed);

        let rep = discreteness_obstruction(&families::star(3), &RelationLattice::unconstrained(3))
            .unwrap();
        assert_eq!(rep.products(), [8]);
        assert_eq!(rep.verdict, Verdict::Obstructed);

        let rel = RelationLattice::new(3, &[vec![1, -1, 0]]).unwrap();
        let rep = discreteness_obstruction(&families::path(3), &rel).unwrap();
        assert!(rep.pairings.is_empty());
        assert_eq!(rep.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn text_round_trip() {
        for s in [
            "0",
            "1",
            "-3",
            "8 a1a2a3",
            "1 a1 + 1 a2 - 2 a3",
            "2 + 5 a2a10",
        ] {
            let c = parse_class(s, 10).unwrap();
            assert_eq!(c.to_string(), s);
        }
        assert!(parse_class("1 a11", 10).is_err());
        assert_eq!(parse_class("1 a2a1", 2).unwrap().to_string(), "-1 a1a2");
    }

    fn class_strategy(n: usize) -> impl Strategy<Value = ExteriorClass> {
        prop::collection::vec((prop::collection::btree_set(1..=n, 0..=n), -4i64..=4), 0..5)
            .prop_map(move |ts| {
                let mut c = ExteriorClass::zero(n);
                for (idx, coeff) in ts {
                    c.add_term(idx.into_iter().collect(), coeff);
                }
                c
            })
    }

    fn homogeneous(n: usize) -> impl Strategy<Value = ExteriorClass> {
        (0..=n).prop_flat_map(move |d| {
            prop::collection::vec(
                (
                    prop::sample::subsequence((1..=n).collect::<Vec<_>>(), d),
                    -4i64..=4,
                ),
                0..4,
            )
            .prop_map(move |ts| {
                let mut c = ExteriorClass::zero(n);
                for (idx, coeff) in ts {
                    c.add_term(idx, coeff);
                }
                c
            })
        })
    }

    proptest! {
        #[test]
        fn associative(x in class_strategy(5), y in class_strategy(5), z in class_strategy(5)) {
            prop_assert_eq!(w(&w(&x, &y), &z), w(&x, &w(&y, &z)));
        }

        #[test]
        fn bilinear(x in class_strategy(5), y in class_strategy(5), z in class_strategy(5)) {
            prop_assert_eq!(w(&(&x + &y), &z), &w(&x, &z) + &w(&y, &z));
            prop_assert_eq!(w(&x.scale(3), &y), w(&x, &y).scale(3));
        }

        #[test]
        fn graded_commutative(x in homogeneous(5), y in homogeneous(5)) {
            let (dx, dy) = (x.degree().unwrap_or(0), y.degree().unwrap_or(0));
            let sign = if dx * dy % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(w(&x, &y), w(&y, &x).scale(sign));
        }

        #[test]
        fn text_form_round_trips(x in class_strategy(6)) {
            prop_assert_eq!(parse_class(&x.to_string(), 6).unwrap(), x);
        }
    }
}
