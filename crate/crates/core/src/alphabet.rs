//! Alphabets, symbol counts, concrete sequences and orderings of the alphabet.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};

use crate::error::{Error, Result};

/// Symbols are stored as single bytes, so an alphabet holds at most 256 labels.
pub const MAX_ALPHABET: usize = 256;

/// An ordered list of distinct symbol labels. Index `i` is the symbol's identity;
/// which symbol counts as "smaller" is decided separately by an [`Ordering`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidInput(
                "alphabet must contain at least one symbol".into(),
            ));
        }
        if symbols.len() > MAX_ALPHABET {
            return Err(Error::Capacity {
                what: format!("alphabet of {} symbols", symbols.len()),
                limit: MAX_ALPHABET.to_string(),
            });
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidInput("empty symbol label".into()));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate symbol label {s:?}")));
            }
        }
        Ok(Self { symbols, index })
    }

    /// One symbol per character, e.g. `"ACGT"`.
    pub fn from_chars(chars: &str) -> Result<Self> {
        Self::new(chars.chars().map(String::from))
    }

    pub fn dna() -> Self {
        Self::from_chars("ACGT").expect("static alphabet")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn label(&self, index: usize) -> &str {
        &self.symbols[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Renders an ordering smallest-first, e.g. `"A,C,G,T"` for A < C < G < T.
    pub fn ordering_label(&self, ord: &Ordering) -> String {
        ord.increasing()
            .iter()
            .map(|&s| self.symbols[s].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses the comma-separated smallest-first form produced by [`Alphabet::ordering_label`].
    pub fn parse_ordering(&self, text: &str) -> Result<Ordering> {
        let increasing = text
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                self.index_of(tok).ok_or_else(|| {
                    Error::InvalidInput(format!("unknown symbol {tok:?} in ordering {text:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if increasing.len() != self.len() {
            return Err(Error::InvalidInput(format!(
                "ordering {text:?} names {} symbols, alphabet has {}",
                increasing.len(),
                self.len()
            )));
        }
        Ordering::from_increasing(&increasing)
    }
}

/// Symbol counts `(n_1, ..., n_h)` of a multiset `{1^{n_1}, ..., h^{n_h}}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multiset {
    counts: Vec<u64>,
    n: u64,
}

impl Multiset {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidInput(
                "multiset needs at least one symbol".into(),
            ));
        }
        if counts.len() > MAX_ALPHABET {
            return Err(Error::Capacity {
                what: format!("multiset over {} symbols", counts.len()),
                limit: MAX_ALPHABET.to_string(),
            });
        }
        let n = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::InvalidInput("total count overflows u64".into()))?;
        if n == 0 {
            return Err(Error::InvalidInput(
                "multiset must contain at least one element".into(),
            ));
        }
        Ok(Self { counts, n })
    }

    /// Counts the symbols of a sequence over an alphabet of size `h`.
    pub fn of_symbols(h: usize, symbols: impl IntoIterator<Item = u8>) -> Result<Self> {
        let mut counts = vec![0u64; h];
        for (position, s) in symbols.into_iter().enumerate() {
            let slot = counts.get_mut(s as usize).ok_or(Error::SymbolOutOfRange {
                symbol: s as usize,
                position,
                alphabet_size: h,
            })?;
            *slot += 1;
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Alphabet size, including symbols with a zero count.
    pub fn h(&self) -> usize {
        self.counts.len()
    }

    /// Number of symbols that actually occur.
    pub fn distinct(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn max_count(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// `sum_a n_a^k`
    pub fn power_sum(&self, k: u32) -> BigInt {
        self.counts.iter().map(|&c| BigInt::from(c).pow(k)).sum()
    }

    /// `sum_{a<b} n_a n_b`: the number of position pairs holding unequal symbols,
    /// which is also the number of inversions achievable under some ordering.
    pub fn unequal_pairs(&self) -> BigUint {
        let n = BigUint::from(self.n);
        let sq: BigUint = self.counts.iter().map(|&c| BigUint::from(c) * c).sum();
        (&n * &n - sq) >> 1
    }

    /// The sorted arrangement `1^{n_1} 2^{n_2} ...` as symbol indices.
    pub fn sorted_symbols(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.n as usize);
        for (a, &c) in self.counts.iter().enumerate() {
            out.extend(std::iter::repeat_n(a as u8, c as usize));
        }
        out
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (a, c) in self.counts.iter().enumerate() {
            if a > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}^{}", a + 1, c)?;
        }
        write!(f, "}}")
    }
}

/// A concrete arrangement: symbol indices in `[0, h)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolSequence {
    alphabet_size: usize,
    data: Vec<u8>,
}

impl SymbolSequence {
    pub fn new(alphabet_size: usize, data: Vec<u8>) -> Result<Self> {
        if alphabet_size == 0 || alphabet_size > MAX_ALPHABET {
            return Err(Error::InvalidInput(format!(
                "alphabet size {alphabet_size} out of range"
            )));
        }
        if let Some((position, &s)) = data
            .iter()
            .enumerate()
            .find(|(_, &s)| s as usize >= alphabet_size)
        {
            return Err(Error::SymbolOutOfRange {
                symbol: s as usize,
                position,
                alphabet_size,
            });
        }
        Ok(Self {
            alphabet_size,
            data,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.data.iter().copied()
    }

    pub fn multiset(&self) -> Result<Multiset> {
        Multiset::of_symbols(self.alphabet_size, self.iter())
    }
}

/// A total order on the alphabet: `rank[symbol]` is the symbol's position in
/// increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ordering {
    rank: Vec<usize>,
}

impl Ordering {
    pub fn identity(h: usize) -> Self {
        Self {
            rank: (0..h).collect(),
        }
    }

    pub fn from_ranks(rank: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; rank.len()];
        for &r in &rank {
            match seen.get_mut(r) {
                Some(slot) if !*slot => *slot = true,
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "ranks {rank:?} are not a permutation"
                    )))
                }
            }
        }
        if rank.is_empty() {
            return Err(Error::InvalidInput("empty ordering".into()));
        }
        Ok(Self { rank })
    }

    /// Builds an ordering from the symbols listed smallest-first.
    pub fn from_increasing(symbols: &[usize]) -> Result<Self> {
        let mut rank = vec![usize::MAX; symbols.len()];
        for (r, &s) in symbols.iter().enumerate() {
            match rank.get_mut(s) {
                Some(slot) if *slot == usize::MAX => *slot = r,
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "{symbols:?} is not a permutation of the alphabet"
                    )))
                }
            }
        }
        Self::from_ranks(rank)
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn rank(&self, symbol: usize) -> usize {
        self.rank[symbol]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    /// Symbols listed smallest-first.
    pub fn increasing(&self) -> Vec<usize> {
        let mut out = vec![0; self.rank.len()];
        for (s, &r) in self.rank.iter().enumerate() {
            out[r] = s;
        }
        out
    }

    pub fn reverse(&self) -> Self {
        let top = self.rank.len() - 1;
        Self {
            rank: self.rank.iter().map(|&r| top - r).collect(),
        }
    }

    /// Whether `x` is strictly greater than `y` under this ordering.
    #[inline]
    pub fn greater(&self, x: usize, y: usize) -> bool {
        self.rank[x] > self.rank[y]
    }

    /// All `h!` orderings, by lexicographic order of their smallest-first lists.
    pub fn all(h: usize) -> impl Iterator<Item = Ordering> {
        let mut next: Option<Vec<usize>> = Some((0..h).collect());
        std::iter::from_fn(move || {
            let current = next.take()?;
            let mut succ = current.clone();
            if next_permutation(&mut succ) {
                next = Some(succ);
            }
            Some(Ordering::from_increasing(&current).expect("permutation of 0..h"))
        })
    }
}

/// Advances `v` to its lexicographic successor among the distinct arrangements
/// of its elements. Returns `false` (leaving `v` unchanged) at the last one.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
