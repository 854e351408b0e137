//! Fixtures shared by the benchmarks.

use treesec::{families, RelationLattice, TreeGraph};

/// Named trees of increasing size.
pub fn trees() -> Vec<(&'static str, TreeGraph)> {
    vec![
        ("path6", families::path(6)),
        ("star4", families::star(4)),
        ("star6", families::star(6)),
        ("caterpillar7", families::caterpillar7()),
        ("star8", families::star(8)),
    ]
}

/// Rationally independent lengths near 1: `1 + sqrt(p) / 10` over primes.
pub fn lengths(n: usize) -> Vec<f64> {
    const PRIMES: [u32; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];
    PRIMES[..n]
        .iter()
        .map(|&p| 1.0 + f64::from(p).sqrt() / 10.0)
        .collect()
}

/// `n - 3` relations `l_j = l_{j+1}` for `j = 4..n`, the rank at which star
/// strata pair with the closure class.
pub fn star_relations(n: usize) -> RelationLattice {
    let rows: Vec<Vec<i64>> = (3..n - 1)
        .map(|j| {
            let mut r = vec![0; n];
            r[j] = 1;
            r[j + 1] = -1;
            r
        })
        .chain(std::iter::once({
            let mut r = vec![0; n];
            r[0] = 1;
            r[1] = -1;
            r
        }))
        .take(n - 3)
        .collect();
    RelationLattice::new(n, &rows).unwrap()
}
