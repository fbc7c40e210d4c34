//! Uniform sampling of multiset permutations and the size-bias couplings
//! `(W, W*)` for inversions and descents.
//!
//! Given a uniform arrangement `pi`, an index pair `I` is drawn (any `i < j`
//! for inversions, `(i, i+1)` for descents). If `pi(i) > pi(j)` nothing
//! changes. Otherwise a value pair `J = (a, b)`, `a > b`, is drawn with
//! probability proportional to `n_a n_b`, positions `i*`, `j*` are drawn
//! uniformly among the occurrences of `a` and `b`, and values are exchanged so
//! that `pi*(i) = a` and `pi*(j) = b`. The statistic of `pi*` is size-biased.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::alphabet::{Multiset, SymbolSequence};
use crate::error::{Error, Result};
use crate::moments::normal_cdf;
use crate::stats::{descents_of, inversions_of, PairTableBuilder, Statistic};

/// Largest `n` accepted by [`conditional_mean_shift`] for inversions (cost O(n^2 h^4)).
pub const INVERSION_SHIFT_LIMIT: usize = 2_000;
/// Largest `n` accepted by [`conditional_mean_shift`] for descents (cost O(n h^4)).
pub const DESCENT_SHIFT_LIMIT: usize = 100_000;

/// Reproducible randomness: identical `(seed, stream)` pairs give identical
/// draws, distinct streams give independent ChaCha8 keystreams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomSource {
    pub seed: u64,
    pub stream: u64,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Source for replicate `index` of an experiment driven by `self`. Work
    /// split across threads by replicate index stays bit-for-bit reproducible.
    pub fn replicate(&self, index: u64) -> Self {
        Self {
            seed: splitmix64(self.seed ^ splitmix64(self.stream ^ 0xD1B5_4A32_D192_ED03)),
            stream: index,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A uniformly random arrangement of the multiset (Fisher-Yates over its symbols).
pub fn sample_uniform_permutation<R: Rng + ?Sized>(m: &Multiset, rng: &mut R) -> SymbolSequence {
    let mut symbols = m.sorted_symbols();
    symbols.shuffle(rng);
    SymbolSequence::new(m.h(), symbols).expect("symbols drawn from the multiset")
}

/// One draw of the coupling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingOutcome {
    pub statistic: Statistic,
    pub w: u64,
    pub w_star: u64,
    /// The index pair `I = (i, j)`, zero-based.
    pub i_pair: (usize, usize),
    /// The value pair `J = (a, b)`, absent when `I` was already inverted.
    pub j_pair: Option<(u8, u8)>,
    pub istar: Option<usize>,
    pub jstar: Option<usize>,
}

impl CouplingOutcome {
    pub fn shift(&self) -> i64 {
        self.w_star as i64 - self.w as i64
    }
}

/// Largest possible `|W* - W|`: `4n` for inversions, 8 for descents.
pub fn shift_bound(statistic: Statistic, n: u64) -> u64 {
    match statistic {
        Statistic::Inversions => 4 * n,
        Statistic::Descents => 8,
    }
}

fn require_two_symbols(m: &Multiset) -> Result<()> {
    if m.distinct() < 2 {
        return Err(Error::Degenerate(format!(
            "{m} has a single symbol, so the statistic is identically 0 and has no size-biased version"
        )));
    }
    Ok(())
}

pub fn sample_inversion_coupling<R: Rng + ?Sized>(
    m: &Multiset,
    rng: &mut R,
) -> Result<CouplingOutcome> {
    sample_coupling(m, Statistic::Inversions, rng)
}

pub fn sample_descent_coupling<R: Rng + ?Sized>(
    m: &Multiset,
    rng: &mut R,
) -> Result<CouplingOutcome> {
    sample_coupling(m, Statistic::Descents, rng)
}

pub fn sample_coupling<R: Rng + ?Sized>(
    m: &Multiset,
    statistic: Statistic,
    rng: &mut R,
) -> Result<CouplingOutcome> {
    require_two_symbols(m)?;
    let pi = sample_uniform_permutation(m, rng);
    Ok(couple(&pi, m, statistic, rng).0)
}

/// Runs the coupling from a fixed arrangement; returns the outcome and `pi*`.
pub fn sample_coupling_from<R: Rng + ?Sized>(
    pi: &SymbolSequence,
    statistic: Statistic,
    rng: &mut R,
) -> Result<(CouplingOutcome, Vec<u8>)> {
    let m = pi.multiset()?;
    require_two_symbols(&m)?;
    Ok(couple(pi, &m, statistic, rng))
}

fn couple<R: Rng + ?Sized>(
    pi: &SymbolSequence,
    m: &Multiset,
    statistic: Statistic,
    rng: &mut R,
) -> (CouplingOutcome, Vec<u8>) {
    let h = m.h();
    let n = pi.len();
    let seq = pi.as_slice();
    let (i, j) = match statistic {
        Statistic::Inversions => {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            (i.min(j), i.max(j))
        }
        Statistic::Descents => {
            let i = rng.random_range(0..n - 1);
            (i, i + 1)
        }
    };
    let w = statistic.evaluate(seq, h);
    let mut outcome = CouplingOutcome {
        statistic,
        w,
        w_star: w,
        i_pair: (i, j),
        j_pair: None,
        istar: None,
        jstar: None,
    };
    let mut star = seq.to_vec();
    if seq[i] > seq[j] {
        return (outcome, star);
    }

    let counts = m.counts();
    let total: u64 = value_pairs(counts).map(|(_, _, w)| w).sum();
    let mut ticket = rng.random_range(0..total);
    let (a, b) = value_pairs(counts)
        .find_map(|(a, b, weight)| {
            if ticket < weight {
                Some((a, b))
            } else {
                ticket -= weight;
                None
            }
        })
        .expect("ticket below total weight");
    let istar = nth_position(seq, a, rng.random_range(0..counts[a as usize]));
    let jstar = nth_position(seq, b, rng.random_range(0..counts[b as usize]));
    apply_exchange(&mut star, i, j, istar, jstar);

    outcome.w_star = statistic.evaluate(&star, h);
    outcome.j_pair = Some((a, b));
    outcome.istar = Some(istar);
    outcome.jstar = Some(jstar);
    (outcome, star)
}

/// Value pairs `(a, b)` with `a > b` and their weights `n_a n_b` (zero weights skipped).
fn value_pairs(counts: &[u64]) -> impl Iterator<Item = (u8, u8, u64)> + '_ {
    (0..counts.len()).flat_map(move |a| {
        (0..a).filter_map(move |b| {
            let weight = counts[a] * counts[b];
            (weight > 0).then_some((a as u8, b as u8, weight))
        })
    })
}

fn nth_position(seq: &[u8], symbol: u8, k: u64) -> usize {
    seq.iter()
        .enumerate()
        .filter(|&(_, &s)| s == symbol)
        .nth(k as usize)
        .map(|(p, _)| p)
        .expect("symbol occurs at least k + 1 times")
}

/// Rearranges `pi` for index pair `(i, j)` (not inverted) and chosen positions
/// `istar`, `jstar` holding `a > b`, so that afterwards `pi(i) = a`, `pi(j) = b`.
pub fn apply_exchange(pi: &mut [u8], i: usize, j: usize, istar: usize, jstar: usize) {
    debug_assert!(i < j && pi[i] <= pi[j] && pi[istar] > pi[jstar]);
    let disjoint = i != istar && i != jstar && j != istar && j != jstar;
    if disjoint || (i == istar && j != jstar) || (i != istar && j == jstar) {
        pi.swap(i, istar);
        pi.swap(j, jstar);
    } else if i == jstar && j == istar {
        pi.swap(i, j);
    } else if i == jstar {
        let (old_i, old_j, old_istar) = (pi[i], pi[j], pi[istar]);
        pi[i] = old_istar;
        pi[j] = old_i;
        pi[istar] = old_j;
    } else {
        debug_assert!(j == istar);
        let (old_i, old_j, old_jstar) = (pi[i], pi[j], pi[jstar]);
        pi[i] = old_j;
        pi[j] = old_jstar;
        pi[jstar] = old_i;
    }
}

// Stand-ins for positions outside {i, j} that are only known by their value.
const FAR_FIRST: usize = usize::MAX - 1;
const FAR_SECOND: usize = usize::MAX;

/// The exchange for one `(I, J)` choice, used to evaluate `pi*` pairwise
/// without materializing it.
struct Exchange {
    i: usize,
    j: usize,
    u: u8,
    v: u8,
    a: u8,
    b: u8,
    na: u64,
    nb: u64,
}

impl Exchange {
    /// Value of `pi*` at `pos` (original value `orig`) when `i*`/`j*` are
    /// the given positions, or `None` when they are somewhere else.
    #[inline]
    fn value_after(&self, pos: usize, orig: u8, istar: Option<usize>, jstar: Option<usize>) -> u8 {
        if pos == self.i {
            self.a
        } else if pos == self.j {
            self.b
        } else if istar == Some(pos) {
            if jstar == Some(self.i) {
                self.v
            } else {
                self.u
            }
        } else if jstar == Some(pos) {
            if istar == Some(self.j) {
                self.u
            } else {
                self.v
            }
        } else {
            orig
        }
    }

    /// Number of `(i*, j*)` choices, out of `n_a n_b`, after which the pair of
    /// positions `first < second` is inverted.
    fn inverted_choices(&self, first: (usize, u8), second: (usize, u8)) -> u64 {
        let (ic, ilen) = candidates([first, second, (self.j, self.v)], self.a, self.na);
        let (jc, jlen) = candidates([first, second, (self.i, self.u)], self.b, self.nb);
        let mut total = 0;
        for &(istar, wi) in &ic[..ilen] {
            for &(jstar, wj) in &jc[..jlen] {
                let x = self.value_after(first.0, first.1, istar, jstar);
                let y = self.value_after(second.0, second.1, istar, jstar);
                if x > y {
                    total += wi * wj;
                }
            }
        }
        total
    }
}

/// Distinct positions among `slots` holding `want` (weight 1 each), plus `None`
/// standing for the remaining occurrences of `want`.
fn candidates(
    slots: [(usize, u8); 3],
    want: u8,
    occurrences: u64,
) -> ([(Option<usize>, u64); 4], usize) {
    let mut out = [(None, 0); 4];
    let mut len = 0;
    for (idx, &(pos, value)) in slots.iter().enumerate() {
        if value == want && !slots[..idx].iter().any(|&(q, _)| q == pos) {
            out[len] = (Some(pos), 1);
            len += 1;
        }
    }
    let named = len as u64;
    if occurrences > named {
        out[len] = (None, occurrences - named);
        len += 1;
    }
    (out, len)
}

/// `E(W* - W | pi)`, exactly.
///
/// Averages `W(pi*) - W(pi)` over every `(I, J, i*, j*)` with its coupling
/// probability. `W(pi*)` is a sum of pair indicators, so each `(I, J)` term is
/// accumulated pair by pair: pairs of positions away from `I` are grouped by
/// their values, pairs touching `I` are handled individually.
pub fn conditional_mean_shift(seq: &SymbolSequence, statistic: Statistic) -> Result<BigRational> {
    let n = seq.len();
    let limit = match statistic {
        Statistic::Inversions => INVERSION_SHIFT_LIMIT,
        Statistic::Descents => DESCENT_SHIFT_LIMIT,
    };
    if n > limit {
        return Err(Error::Capacity {
            what: format!("conditional mean shift of {statistic} at n = {n}"),
            limit: format!("n <= {limit}"),
        });
    }
    let m = seq.multiset()?;
    require_two_symbols(&m)?;
    let pi = seq.as_slice();
    let h = m.h();
    let counts = m.counts();

    let mut builder = PairTableBuilder::new(h);
    builder.extend_from_slice(pi);
    let tables = builder.finish();
    let pair_table: Vec<i128> = (0..h * h)
        .map(|xy| {
            let (x, y) = (xy / h, xy % h);
            match statistic {
                Statistic::Inversions => {
                    i128::try_from(tables.global(x, y)).expect("pair count fits i128")
                }
                Statistic::Descents => tables.adjacent(x, y) as i128,
            }
        })
        .collect();
    // before[p * h + x] = #{q < p : pi(q) = x}
    let mut before = vec![0u64; (n + 1) * h];
    for p in 0..n {
        let (head, tail) = before.split_at_mut((p + 1) * h);
        tail[..h].copy_from_slice(&head[p * h..]);
        tail[pi[p] as usize] += 1;
    }
    let count_before = |p: usize, x: usize| before[p * h + x];

    let w = statistic.evaluate(pi, h) as i128;
    let weight_total: u64 = value_pairs(counts).map(|(_, _, w)| w).sum();
    let index_pairs: u64 = match statistic {
        Statistic::Inversions => (n as u64) * (n as u64 - 1) / 2,
        Statistic::Descents => n as u64 - 1,
    };

    let mut total: i128 = 0;
    let mut far = vec![0i128; h * h];
    let mut visit = |i: usize, j: usize| {
        let (u, v) = (pi[i], pi[j]);
        if u > v {
            return;
        }
        // value classes of statistic pairs with neither endpoint in {i, j}
        far.copy_from_slice(&pair_table);
        // pairs with exactly one endpoint in {i, j}: (end, other value, end is first)
        let mut near_groups: Vec<(usize, u8, bool, u64)> = Vec::new();
        let mut near_pairs: Vec<(usize, usize)> = Vec::new();
        match statistic {
            Statistic::Inversions => {
                for x in 0..h {
                    let xb = x as u8;
                    let i_before = count_before(i, x);
                    let i_after = counts[x] - count_before(i + 1, x) - (v == xb) as u64;
                    let j_before = count_before(j, x) - (u == xb) as u64;
                    let j_after = counts[x] - count_before(j + 1, x);
                    near_groups.push((i, xb, false, i_before));
                    near_groups.push((i, xb, true, i_after));
                    near_groups.push((j, xb, false, j_before));
                    near_groups.push((j, xb, true, j_after));
                    far[x * h + u as usize] -= i_before as i128;
                    far[u as usize * h + x] -= i_after as i128;
                    far[x * h + v as usize] -= j_before as i128;
                    far[v as usize * h + x] -= j_after as i128;
                }
                near_pairs.push((i, j));
                far[u as usize * h + v as usize] -= 1;
            }
            Statistic::Descents => {
                let lo = i.saturating_sub(1);
                let hi = (j + 1).min(n - 1);
                for k in lo..hi {
                    near_pairs.push((k, k + 1));
                    far[pi[k] as usize * h + pi[k + 1] as usize] -= 1;
                }
            }
        }

        for (a, b, weight) in value_pairs(counts) {
            let ex = Exchange {
                i,
                j,
                u,
                v,
                a,
                b,
                na: counts[a as usize],
                nb: counts[b as usize],
            };
            let mut inverted: i128 = 0;
            for x in 0..h {
                for y in 0..h {
                    let c = far[x * h + y];
                    if c != 0 {
                        inverted += c * ex
                            .inverted_choices((FAR_FIRST, x as u8), (FAR_SECOND, y as u8))
                            as i128;
                    }
                }
            }
            for &(end, x, end_first, c) in &near_groups {
                if c == 0 {
                    continue;
                }
                let fixed = (end, pi[end]);
                let other = (FAR_SECOND, x);
                let hits = if end_first {
                    ex.inverted_choices(fixed, other)
                } else {
                    ex.inverted_choices(other, fixed)
                };
                inverted += c as i128 * hits as i128;
            }
            for &(k, l) in &near_pairs {
                inverted += ex.inverted_choices((k, pi[k]), (l, pi[l])) as i128;
            }
            total += inverted - w * weight as i128;
        }
    };
    match statistic {
        Statistic::Inversions => {
            for i in 0..n {
                for j in i + 1..n {
                    visit(i, j);
                }
            }
        }
        Statistic::Descents => {
            for i in 0..n - 1 {
                visit(i, i + 1);
            }
        }
    }
    Ok(BigRational::new(
        BigInt::from(total),
        BigInt::from(index_pairs) * BigInt::from(weight_total),
    ))
}

/// Moments of `W* - W` over independent coupling draws.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSummary {
    pub draws: usize,
    pub max_abs_shift: u64,
    pub mean_shift: f64,
    /// Estimate of `E (W* - W)^2`.
    pub mean_square_shift: f64,
    /// Standard error of `mean_shift`.
    pub mean_shift_se: f64,
}

/// Runs `draws` independent couplings; draw `r` uses `source.replicate(r)`.
pub fn summarize_couplings(
    m: &Multiset,
    statistic: Statistic,
    draws: usize,
    source: RandomSource,
) -> Result<ShiftSummary> {
    require_two_symbols(m)?;
    if draws < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 draws, got {draws}"
        )));
    }
    let bound = shift_bound(statistic, m.n());
    let shifts: Vec<i64> = (0..draws as u64)
        .into_par_iter()
        .map(|r| {
            let outcome = sample_coupling(m, statistic, &mut source.replicate(r).rng())?;
            debug_assert!(outcome.shift().unsigned_abs() <= bound);
            Ok(outcome.shift())
        })
        .collect::<Result<_>>()?;
    let total = draws as f64;
    let mean = shifts.iter().map(|&d| d as f64).sum::<f64>() / total;
    let mean_square = shifts.iter().map(|&d| (d * d) as f64).sum::<f64>() / total;
    let spread = shifts
        .iter()
        .map(|&d| (d as f64 - mean).powi(2))
        .sum::<f64>()
        / (total - 1.0);
    Ok(ShiftSummary {
        draws,
        max_abs_shift: shifts.iter().map(|d| d.unsigned_abs()).max().unwrap_or(0),
        mean_shift: mean,
        mean_square_shift: mean_square,
        mean_shift_se: (spread / total).sqrt(),
    })
}

/// Sample variance with a jackknife standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Jackknife estimate of the unbiased sample variance of `values` (at least 3).
pub fn jackknife_variance(values: &[f64]) -> Result<VarianceEstimate> {
    let r = values.len();
    if r < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 replicates, got {r}"
        )));
    }
    let rf = r as f64;
    let mean = values.iter().sum::<f64>() / rf;
    let centered: Vec<f64> = values.iter().map(|x| x - mean).collect();
    let s1: f64 = centered.iter().sum();
    let s2: f64 = centered.iter().map(|d| d * d).sum();
    let estimate = (s2 - s1 * s1 / rf) / (rf - 1.0);
    let leave_out: Vec<f64> = centered
        .iter()
        .map(|d| {
            let t1 = s1 - d;
            let t2 = s2 - d * d;
            (t2 - t1 * t1 / (rf - 1.0)) / (rf - 2.0)
        })
        .collect();
    let loo_mean = leave_out.iter().sum::<f64>() / rf;
    let spread: f64 = leave_out.iter().map(|t| (t - loo_mean).powi(2)).sum();
    Ok(VarianceEstimate {
        estimate,
        std_error: ((rf - 1.0) / rf * spread).sqrt(),
    })
}

/// Monte Carlo estimate of `Var(E(W* - W | pi))` from `replicates` independent
/// uniform arrangements. Replicate `r` uses `source.replicate(r)`.
pub fn estimate_var_e(
    m: &Multiset,
    statistic: Statistic,
    replicates: usize,
    source: RandomSource,
) -> Result<VarianceEstimate> {
    require_two_symbols(m)?;
    let shifts = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let pi = sample_uniform_permutation(m, &mut source.replicate(r).rng());
            conditional_mean_shift(&pi, statistic).map(|q| ratio_to_f64(&q))
        })
        .collect::<Result<Vec<f64>>>()?;
    jackknife_variance(&shifts)
}

pub(crate) fn ratio_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Descents and inversions of independent uniform arrangements; sample `r`
/// uses `source.replicate(r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonteCarloSample {
    pub descents: Vec<u64>,
    pub inversions: Vec<u64>,
}

impl MonteCarloSample {
    pub fn values(&self, statistic: Statistic) -> &[u64] {
        match statistic {
            Statistic::Descents => &self.descents,
            Statistic::Inversions => &self.inversions,
        }
    }
}

pub fn monte_carlo(m: &Multiset, samples: usize, source: RandomSource) -> MonteCarloSample {
    let h = m.h();
    let pairs: Vec<(u64, u64)> = (0..samples as u64)
        .into_par_iter()
        .map(|r| {
            let pi = sample_uniform_permutation(m, &mut source.replicate(r).rng());
            (descents_of(pi.as_slice()), inversions_of(pi.as_slice(), h))
        })
        .collect();
    let (descents, inversions) = pairs.into_iter().unzip();
    MonteCarloSample {
        descents,
        inversions,
    }
}

/// Kolmogorov distance between the empirical law of `(x - mu) / sigma` and
/// the standard normal.
pub fn ks_distance(samples: &[f64], mu: f64, sigma: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("no samples".into()));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Degenerate(format!("sigma = {sigma}")));
    }
    let mut z: Vec<f64> = samples.iter().map(|x| (x - mu) / sigma).collect();
    if z.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("NaN sample".into()));
    }
    z.sort_unstable_by(f64::total_cmp);
    let total = z.len() as f64;
    Ok(z.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let f = normal_cdf(x);
        let above = (i + 1) as f64 / total - f;
        let below = f - i as f64 / total;
        acc.max(above).max(below)
    }))
}
