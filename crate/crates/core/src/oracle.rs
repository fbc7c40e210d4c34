//! Exhaustive reference computations, used to check the closed forms and the
//! coupling on small multisets.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::alphabet::{next_permutation, Multiset, SymbolSequence};
use crate::coupling::apply_exchange;
use crate::error::{Error, Result};
use crate::stats::Statistic;

/// Largest number of distinct arrangements that will be enumerated.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;
/// Largest `n` for [`exact_coupling_distribution`].
pub const COUPLING_ENUMERATION_LIMIT: u64 = 8;

/// Number of distinct arrangements, `n! / prod n_x!`.
pub fn multinomial(m: &Multiset) -> BigUint {
    let mut result = BigUint::one();
    let mut placed = 0u64;
    for &c in m.counts() {
        for k in 1..=c {
            placed += 1;
            result = result * placed / k;
        }
    }
    result
}

fn check_enumerable(m: &Multiset) -> Result<u64> {
    let total = multinomial(m);
    match u64::try_from(&total) {
        Ok(t) if t <= ENUMERATION_LIMIT => Ok(t),
        _ => Err(Error::Capacity {
            what: format!("enumeration of {total} arrangements of {m}"),
            limit: format!("{ENUMERATION_LIMIT} arrangements"),
        }),
    }
}

/// Calls `visit` on every distinct arrangement, in lexicographic order.
pub fn for_each_permutation(m: &Multiset, mut visit: impl FnMut(&[u8])) -> Result<u64> {
    let total = check_enumerable(m)?;
    let mut pi = m.sorted_symbols();
    loop {
        visit(&pi);
        if !next_permutation(&mut pi) {
            break;
        }
    }
    Ok(total)
}

/// Every distinct arrangement, in lexicographic order.
pub fn enumerate_permutations(m: &Multiset) -> Result<Vec<Vec<u8>>> {
    let mut all = Vec::new();
    for_each_permutation(m, |pi| all.push(pi.to_vec()))?;
    Ok(all)
}

/// A probability law on the non-negative integers with exact masses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    pub support: BTreeMap<u64, BigRational>,
}

impl ExactDistribution {
    /// Normalizes integer weights.
    pub fn from_weights(weights: BTreeMap<u64, BigUint>) -> Result<Self> {
        let total: BigUint = weights.values().sum();
        if total.is_zero() {
            return Err(Error::InvalidInput("all weights are zero".into()));
        }
        let total = BigInt::from(total);
        Ok(Self {
            support: weights
                .into_iter()
                .filter(|(_, w)| !w.is_zero())
                .map(|(k, w)| (k, BigRational::new(BigInt::from(w), total.clone())))
                .collect(),
        })
    }

    pub fn probability(&self, value: u64) -> BigRational {
        self.support
            .get(&value)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total(&self) -> BigRational {
        self.support.values().sum()
    }

    pub fn moment(&self, k: u32) -> BigRational {
        self.support
            .iter()
            .map(|(&w, p)| p * BigRational::from_integer(BigInt::from(w).pow(k)))
            .sum()
    }

    pub fn mean(&self) -> BigRational {
        self.moment(1)
    }

    pub fn variance(&self) -> BigRational {
        let mu = self.mean();
        self.moment(2) - &mu * &mu
    }

    /// The size-biased law `P*(w) = w P(w) / E W`.
    pub fn size_biased(&self) -> Result<Self> {
        let mu = self.mean();
        if mu.is_zero() {
            return Err(Error::Degenerate("mean is zero".into()));
        }
        Ok(Self {
            support: self
                .support
                .iter()
                .filter(|(&w, _)| w > 0)
                .map(|(&w, p)| (w, p * BigRational::from_integer(w.into()) / &mu))
                .collect(),
        })
    }
}

/// Law of the statistic under a uniform arrangement, by enumeration.
pub fn exact_distribution(m: &Multiset, statistic: Statistic) -> Result<ExactDistribution> {
    let h = m.h();
    let mut weights: BTreeMap<u64, BigUint> = BTreeMap::new();
    for_each_permutation(m, |pi| {
        *weights.entry(statistic.evaluate(pi, h)).or_default() += 1u32;
    })?;
    ExactDistribution::from_weights(weights)
}

pub fn exact_size_biased_distribution(
    m: &Multiset,
    statistic: Statistic,
) -> Result<ExactDistribution> {
    exact_distribution(m, statistic)?.size_biased()
}

/// Joint law of `(W, W*)` under the coupling, over the full probability tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingLaw {
    pub joint: BTreeMap<(u64, u64), BigRational>,
}

impl CouplingLaw {
    pub fn marginal_w_star(&self) -> ExactDistribution {
        let mut support: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (&(_, ws), p) in &self.joint {
            *support.entry(ws).or_insert_with(BigRational::zero) += p;
        }
        ExactDistribution { support }
    }

    pub fn marginal_w(&self) -> ExactDistribution {
        let mut support: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (&(w, _), p) in &self.joint {
            *support.entry(w).or_insert_with(BigRational::zero) += p;
        }
        ExactDistribution { support }
    }

    /// `E (W* - W)^2`.
    pub fn mean_square_shift(&self) -> BigRational {
        self.joint
            .iter()
            .map(|(&(w, ws), p)| {
                let d = BigInt::from(ws) - BigInt::from(w);
                p * BigRational::from_integer(&d * &d)
            })
            .sum()
    }
}

fn index_pairs(statistic: Statistic, n: usize) -> Vec<(usize, usize)> {
    match statistic {
        Statistic::Inversions => (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect(),
        Statistic::Descents => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
    }
}

/// Visits every leaf `(pi*, weight)` of the coupling tree from `pi`. Weights
/// share the denominator `#I * sum_{a>b} n_a n_b`.
fn for_each_coupled(
    pi: &[u8],
    counts: &[u64],
    statistic: Statistic,
    mut leaf: impl FnMut(&[u8], u64),
) {
    let n = pi.len();
    let pair_weight: u64 = (0..counts.len())
        .flat_map(|a| (0..a).map(move |b| counts[a] * counts[b]))
        .sum();
    let mut star = pi.to_vec();
    for (i, j) in index_pairs(statistic, n) {
        if pi[i] > pi[j] {
            leaf(pi, pair_weight);
            continue;
        }
        for istar in 0..n {
            for jstar in 0..n {
                if pi[istar] <= pi[jstar] {
                    continue;
                }
                star.copy_from_slice(pi);
                apply_exchange(&mut star, i, j, istar, jstar);
                leaf(&star, 1);
            }
        }
    }
}

/// Exact joint law of `(W, W*)` for the coupling, for `n <= 8`.
pub fn exact_coupling_distribution(m: &Multiset, statistic: Statistic) -> Result<CouplingLaw> {
    if m.n() > COUPLING_ENUMERATION_LIMIT {
        return Err(Error::Capacity {
            what: format!("coupling enumeration for n = {}", m.n()),
            limit: format!("n <= {COUPLING_ENUMERATION_LIMIT}"),
        });
    }
    if m.distinct() < 2 {
        return Err(Error::Degenerate(format!("{m} has a single symbol")));
    }
    let h = m.h();
    let mut weights: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for_each_permutation(m, |pi| {
        let w = statistic.evaluate(pi, h);
        for_each_coupled(pi, m.counts(), statistic, |star, weight| {
            *weights.entry((w, statistic.evaluate(star, h))).or_default() += weight;
        });
    })?;
    let total = BigInt::from(weights.values().sum::<u64>());
    Ok(CouplingLaw {
        joint: weights
            .into_iter()
            .map(|(k, w)| (k, BigRational::new(BigInt::from(w), total.clone())))
            .collect(),
    })
}

/// `E(W* - W | pi)` by applying every exchange and recounting.
pub fn brute_force_mean_shift(seq: &SymbolSequence, statistic: Statistic) -> Result<BigRational> {
    let m = seq.multiset()?;
    if m.distinct() < 2 {
        return Err(Error::Degenerate(format!("{m} has a single symbol")));
    }
    let h = m.h();
    let pi = seq.as_slice();
    let w = BigInt::from(statistic.evaluate(pi, h));
    let mut numerator = BigInt::zero();
    let mut denominator = BigInt::zero();
    for_each_coupled(pi, m.counts(), statistic, |star, weight| {
        let d = BigInt::from(statistic.evaluate(star, h)) - &w;
        numerator += d * weight;
        denominator += weight;
    });
    Ok(BigRational::new(numerator, denominator))
}

/// Number of permutations of `1..=n` with `k` inversions, for `k = 0..=n(n-1)/2`.
pub fn classical_inversion_counts(n: usize) -> Result<Vec<BigUint>> {
    if n > 100 {
        return Err(Error::Capacity {
            what: format!("inversion table for n = {n}"),
            limit: "n <= 100".into(),
        });
    }
    let mut counts = vec![BigUint::one()];
    for m in 2..=n {
        // multiply by 1 + q + ... + q^{m-1} using a sliding window sum
        let len = counts.len() + m - 1;
        let mut next = vec![BigUint::zero(); len];
        let mut window = BigUint::zero();
        for (k, slot) in next.iter_mut().enumerate() {
            if k < counts.len() {
                window += &counts[k];
            }
            if k >= m && k - m < counts.len() {
                window -= &counts[k - m];
            }
            *slot = window.clone();
        }
        counts = next;
    }
    Ok(counts)
}

/// Law of inversions of a uniform permutation of `n` distinct symbols.
pub fn classical_inversion_distribution(n: usize) -> Result<ExactDistribution> {
    let counts = classical_inversion_counts(n)?;
    ExactDistribution::from_weights(
        counts
            .into_iter()
            .enumerate()
            .map(|(k, c)| (k as u64, c))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(c: &[u64]) -> Multiset {
        Multiset::new(c.to_vec()).unwrap()
    }

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn multinomial_counts() {
        assert_eq!(multinomial(&ms(&[2, 1, 1])), BigUint::from(12u32));
        assert_eq!(multinomial(&ms(&[1; 10])), BigUint::from(3_628_800u32));
        assert_eq!(
            enumerate_permutations(&ms(&[1, 2])).unwrap(),
            vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]
        );
    }

    #[test]
    fn enumeration_guard() {
        assert!(matches!(
            for_each_permutation(&ms(&[1; 12]), |_| {}),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn mahonian_numbers() {
        let c = classical_inversion_counts(4).unwrap();
        let expect: Vec<BigUint> = [1u32, 3, 5, 6, 5, 3, 1].iter().map(|&v| v.into()).collect();
        assert_eq!(c, expect);
        let d = classical_inversion_distribution(6).unwrap();
        assert_eq!(d.mean(), q(15, 2));
        // n(n-1)(2n+5)/72
        assert_eq!(d.variance(), q(6 * 5 * 17, 72));
    }

    #[test]
    fn small_distribution_by_hand() {
        // arrangements of {0, 1, 1}: 011, 101, 110 with inversions 0, 1, 2
        let d = exact_distribution(&ms(&[1, 2]), Statistic::Inversions).unwrap();
        assert_eq!(d.probability(1), q(1, 3));
        assert_eq!(d.total(), q(1, 1));
        let sb = d.size_biased().unwrap();
        assert_eq!(sb.probability(2), q(2, 3));
    }

    #[test]
    fn coupling_law_is_a_probability() {
        let law = exact_coupling_distribution(&ms(&[2, 1, 1]), Statistic::Descents).unwrap();
        let total: BigRational = law.joint.values().sum();
        assert_eq!(total, q(1, 1));
        assert_eq!(
            law.marginal_w(),
            exact_distribution(&ms(&[2, 1, 1]), Statistic::Descents).unwrap()
        );
    }
}
