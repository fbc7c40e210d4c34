#![allow(dead_code)]

use multiperm::Multiset;

/// Every count vector of length `h` with entries summing to `n` (zeros allowed).
pub fn compositions(n: u64, h: usize) -> Vec<Vec<u64>> {
    if h == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|first| {
            compositions(n - first, h - 1)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
        })
        .collect()
}

/// All count vectors with `1 <= n <= max_n` and `1 <= h <= max_h`, zero
/// counts included.
pub fn small_multisets(max_n: u64, max_h: usize) -> Vec<Multiset> {
    let mut out = Vec::new();
    for h in 1..=max_h {
        for n in 1..=max_n {
            for c in compositions(n, h) {
                out.push(Multiset::new(c).unwrap());
            }
        }
    }
    out
}
