//! Streaming descent, inversion and pair-table counting over concrete sequences.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::alphabet::{Multiset, Ordering, SymbolSequence};
use crate::error::{Error, Result};

/// Which permutation statistic is being studied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    Inversions,
    Descents,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Inversions => "inversions",
            Statistic::Descents => "descents",
        }
    }

    /// Value of the statistic on `seq` under the identity ordering of symbol indices.
    pub fn evaluate(self, seq: &[u8], h: usize) -> u64 {
        match self {
            Statistic::Inversions => inversions_of(seq, h),
            Statistic::Descents => descents_of(seq),
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "inversions" | "inv" => Ok(Statistic::Inversions),
            "descents" | "des" => Ok(Statistic::Descents),
            other => Err(Error::InvalidInput(format!("unknown statistic {other:?}"))),
        }
    }
}

/// Number of `i` with `rank(seq[i]) > rank(seq[i+1])`. Single pass, O(1) extra space.
pub fn count_descents(symbols: impl IntoIterator<Item = u8>, ord: &Ordering) -> Result<u64> {
    let h = ord.len();
    let mut prev: Option<usize> = None;
    let mut descents = 0u64;
    let mut seen = 0usize;
    for s in symbols {
        let s = check_symbol(s, seen, h)?;
        if let Some(p) = prev {
            descents += ord.greater(p, s) as u64;
        }
        prev = Some(s);
        seen += 1;
    }
    if seen == 0 {
        return Err(Error::InvalidInput(
            "cannot count descents of an empty sequence".into(),
        ));
    }
    Ok(descents)
}

/// Number of pairs `i < j` with `rank(seq[i]) > rank(seq[j])`.
///
/// One pass with a Fenwick tree over ranks holding how many symbols of each
/// rank have been seen, so O(n log h) time and O(h) space.
pub fn count_inversions(symbols: impl IntoIterator<Item = u8>, ord: &Ordering) -> Result<BigUint> {
    let h = ord.len();
    let mut seen_by_rank = Fenwick::new(h);
    let mut seen = 0u64;
    let mut inversions = 0u128;
    for s in symbols {
        let s = check_symbol(s, seen as usize, h)?;
        let r = ord.rank(s);
        inversions += (seen - seen_by_rank.prefix(r + 1)) as u128;
        seen_by_rank.add(r, 1);
        seen += 1;
    }
    if seen == 0 {
        return Err(Error::InvalidInput(
            "cannot count inversions of an empty sequence".into(),
        ));
    }
    Ok(BigUint::from(inversions))
}

/// Descents under the identity ordering of symbol indices. No validation.
pub fn descents_of(seq: &[u8]) -> u64 {
    seq.windows(2).map(|w| (w[0] > w[1]) as u64).sum()
}

/// Inversions under the identity ordering of symbol indices, for symbols in `[0, h)`.
pub fn inversions_of(seq: &[u8], h: usize) -> u64 {
    let mut seen = vec![0u64; h];
    let mut inversions = 0u64;
    for &s in seq {
        let s = s as usize;
        inversions += seen[s + 1..].iter().sum::<u64>();
        seen[s] += 1;
    }
    inversions
}

#[inline]
fn check_symbol(s: u8, position: usize, h: usize) -> Result<usize> {
    let s = s as usize;
    if s >= h {
        return Err(Error::SymbolOutOfRange {
            symbol: s,
            position,
            alphabet_size: h,
        });
    }
    Ok(s)
}

struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(len: usize) -> Self {
        Self {
            tree: vec![0; len + 1],
        }
    }

    fn add(&mut self, index: usize, delta: u64) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over indices `[0, end)`.
    fn prefix(&self, end: usize) -> u64 {
        let mut i = end;
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i &= i - 1;
        }
        sum
    }
}

/// Adjacent and global ordered-pair counts of a sequence.
///
/// `adjacent[x][y]` counts positions `i` with `seq[i] = x, seq[i+1] = y`
/// (pairs straddling a segment break excluded); `global[x][y]` counts pairs
/// `i < j` with `seq[i] = x, seq[j] = y` over the whole sequence. Adjacent
/// counts are bounded by `n` and kept in `u64`; global counts grow like `n^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTables {
    h: usize,
    counts: Vec<u64>,
    adjacent: Vec<u64>,
    global: Vec<BigUint>,
}

impl PairTables {
    /// Assembles tables from row-major `h x h` matrices and validates them.
    pub fn from_parts(counts: Vec<u64>, adjacent: Vec<u64>, global: Vec<BigUint>) -> Result<Self> {
        let h = counts.len();
        if h == 0 {
            return Err(Error::InconsistentTables("empty alphabet".into()));
        }
        if adjacent.len() != h * h || global.len() != h * h {
            return Err(Error::InconsistentTables(format!(
                "expected {h}x{h} matrices, got {} adjacent and {} global entries",
                adjacent.len(),
                global.len()
            )));
        }
        let tables = Self {
            h,
            counts,
            adjacent,
            global,
        };
        tables.validate()?;
        Ok(tables)
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn multiset(&self) -> Result<Multiset> {
        Multiset::new(self.counts.clone())
    }

    pub fn adjacent(&self, x: usize, y: usize) -> u64 {
        self.adjacent[x * self.h + y]
    }

    pub fn global(&self, x: usize, y: usize) -> &BigUint {
        &self.global[x * self.h + y]
    }

    pub fn adjacent_total(&self) -> u64 {
        self.adjacent.iter().sum()
    }

    /// Checks the identities every table built from a real sequence satisfies:
    /// `global[x][x] = C(n_x, 2)`, `global[x][y] + global[y][x] = n_x n_y`, and
    /// at most `n - 1` adjacent pairs.
    pub fn validate(&self) -> Result<()> {
        let h = self.h;
        let n = self.n();
        if n == 0 {
            return Err(Error::InconsistentTables("no symbols counted".into()));
        }
        let adjacent_total = self.adjacent_total();
        if adjacent_total > n - 1 {
            return Err(Error::InconsistentTables(format!(
                "{adjacent_total} adjacent pairs in a sequence of length {n}"
            )));
        }
        for x in 0..h {
            let nx = BigUint::from(self.counts[x]);
            let diag = if self.counts[x] == 0 {
                BigUint::zero()
            } else {
                &nx * (&nx - 1u32) / 2u32
            };
            if self.global(x, x) != &diag {
                return Err(Error::InconsistentTables(format!(
                    "global[{x}][{x}] = {} but C(n_{x}, 2) = {diag}",
                    self.global(x, x)
                )));
            }
            for y in x + 1..h {
                let product = &nx * self.counts[y];
                if self.global(x, y) + self.global(y, x) != product {
                    return Err(Error::InconsistentTables(format!(
                        "global[{x}][{y}] + global[{y}][{x}] != n_{x} n_{y} = {product}"
                    )));
                }
            }
            let row_out: u64 = (0..h).map(|y| self.adjacent(x, y)).sum();
            let col_in: u64 = (0..h).map(|y| self.adjacent(y, x)).sum();
            if row_out > self.counts[x] || col_in > self.counts[x] {
                return Err(Error::InconsistentTables(format!(
                    "symbol {x} occurs {} times but appears in {} adjacent pairs",
                    self.counts[x],
                    row_out.max(col_in)
                )));
            }
        }
        Ok(())
    }
}

/// Incremental pair-table construction: feed symbols one at a time, mark
/// segment breaks, then [`finish`](PairTableBuilder::finish). Memory is O(h^2)
/// regardless of sequence length.
#[derive(Debug, Clone)]
pub struct PairTableBuilder {
    h: usize,
    counts: Vec<u64>,
    adjacent: Vec<u64>,
    // column-major: global_by_second[y * h + x] counts pairs (x before y)
    global_by_second: Vec<u128>,
    prev: Option<u8>,
}

impl PairTableBuilder {
    pub fn new(h: usize) -> Self {
        Self {
            h,
            counts: vec![0; h],
            adjacent: vec![0; h * h],
            global_by_second: vec![0; h * h],
            prev: None,
        }
    }

    /// Appends one symbol. Panics if `symbol >= h`.
    #[inline]
    pub fn push(&mut self, symbol: u8) {
        let y = symbol as usize;
        let h = self.h;
        if let Some(p) = self.prev {
            self.adjacent[p as usize * h + y] += 1;
        }
        let column = &mut self.global_by_second[y * h..(y + 1) * h];
        for (g, &c) in column.iter_mut().zip(&self.counts) {
            *g += c as u128;
        }
        self.counts[y] += 1;
        self.prev = Some(symbol);
    }

    pub fn extend_from_slice(&mut self, symbols: &[u8]) {
        for &s in symbols {
            self.push(s);
        }
    }

    /// The next symbol will not form an adjacent pair with the previous one.
    pub fn segment_break(&mut self) {
        self.prev = None;
    }

    pub fn len(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn finish(self) -> PairTables {
        let h = self.h;
        let mut global = vec![BigUint::zero(); h * h];
        for y in 0..h {
            for x in 0..h {
                global[x * h + y] = BigUint::from(self.global_by_second[y * h + x]);
            }
        }
        PairTables {
            h,
            counts: self.counts,
            adjacent: self.adjacent,
            global,
        }
    }
}

/// Builds both pair tables in one pass. `segment_breaks` are positions `p`
/// (sorted, in `[0, n]`) such that the pair `(p - 1, p)` is not adjacent.
pub fn build_pair_tables(seq: &SymbolSequence, segment_breaks: &[usize]) -> Result<PairTables> {
    let n = seq.len();
    if segment_breaks.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidInput("segment breaks must be sorted".into()));
    }
    if let Some(&last) = segment_breaks.last() {
        if last > n {
            return Err(Error::InvalidInput(format!(
                "segment break {last} beyond sequence length {n}"
            )));
        }
    }
    let mut builder = PairTableBuilder::new(seq.alphabet_size());
    let mut breaks = segment_breaks.iter().peekable();
    for (i, s) in seq.iter().enumerate() {
        let mut cut = false;
        while breaks.next_if(|&&b| b <= i).is_some() {
            cut = true;
        }
        if cut {
            builder.segment_break();
        }
        builder.push(s);
    }
    Ok(builder.finish())
}

/// Descents and inversions read off the pair tables in O(h^2).
pub fn stats_from_pair_tables(tables: &PairTables, ord: &Ordering) -> Result<(u64, BigUint)> {
    tables.validate()?;
    if ord.len() != tables.h() {
        return Err(Error::InvalidInput(format!(
            "ordering over {} symbols applied to tables over {}",
            ord.len(),
            tables.h()
        )));
    }
    let h = tables.h();
    let mut descents = 0u64;
    let mut inversions = BigUint::zero();
    for x in 0..h {
        for y in 0..h {
            if ord.greater(x, y) {
                descents += tables.adjacent(x, y);
                inversions += tables.global(x, y);
            }
        }
    }
    Ok((descents, inversions))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(h: usize, data: &[u8]) -> SymbolSequence {
        SymbolSequence::new(h, data.to_vec()).unwrap()
    }

    #[test]
    fn two_one_one() {
        let id = Ordering::identity(2);
        assert_eq!(count_descents([1, 0, 0], &id).unwrap(), 1);
        assert_eq!(
            count_inversions([1, 0, 0], &id).unwrap(),
            BigUint::from(2u32)
        );
        let tables = build_pair_tables(&seq(2, &[1, 0, 0]), &[]).unwrap();
        assert_eq!(
            stats_from_pair_tables(&tables, &id).unwrap(),
            (1, BigUint::from(2u32))
        );
    }

    #[test]
    fn sorted_sequences_have_no_descents_or_inversions() {
        let ord = Ordering::from_increasing(&[2, 0, 1]).unwrap();
        let data = [2u8, 2, 0, 0, 0, 1, 1];
        assert_eq!(count_descents(data, &ord).unwrap(), 0);
        assert!(count_inversions(data, &ord).unwrap().is_zero());
    }

    #[test]
    fn empty_and_out_of_range_inputs() {
        let id = Ordering::identity(2);
        assert!(matches!(
            count_descents([], &id),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            count_inversions([], &id),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            count_descents([0, 3], &id),
            Err(Error::SymbolOutOfRange {
                symbol: 3,
                position: 1,
                ..
            })
        ));
        assert!(matches!(
            count_inversions([5], &id),
            Err(Error::SymbolOutOfRange { .. })
        ));
    }

    #[test]
    fn zero_one_zero_tables() {
        let t = build_pair_tables(&seq(2, &[0, 1, 0]), &[]).unwrap();
        assert_eq!(t.adjacent(0, 1), 1);
        assert_eq!(t.adjacent(1, 0), 1);
        assert_eq!(t.adjacent(0, 0), 0);
        assert_eq!(t.global(0, 1), &BigUint::from(1u32));
        assert_eq!(t.global(1, 0), &BigUint::from(1u32));
        assert_eq!(t.global(0, 0), &BigUint::from(1u32));
        assert!(t.global(1, 1).is_zero());
    }

    #[test]
    fn single_symbol_tables_are_zero() {
        let t = build_pair_tables(&seq(3, &[1]), &[]).unwrap();
        assert_eq!(t.adjacent_total(), 0);
        assert!((0..3).all(|x| (0..3).all(|y| t.global(x, y).is_zero())));
    }

    #[test]
    fn breaks_only_affect_adjacent_counts() {
        let s = seq(2, &[0, 1, 1, 0, 1]);
        let plain = build_pair_tables(&s, &[]).unwrap();
        let split = build_pair_tables(&s, &[0, 2, 2, 5]).unwrap();
        assert_eq!(plain.adjacent_total(), 4);
        assert_eq!(split.adjacent_total(), 3);
        assert_eq!(split.adjacent(0, 1), 2);
        assert_eq!(split.adjacent(1, 1), 0);
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(plain.global(x, y), split.global(x, y));
            }
        }
        assert!(build_pair_tables(&s, &[3, 1]).is_err());
        assert!(build_pair_tables(&s, &[6]).is_err());
    }

    #[test]
    fn inconsistent_tables_are_rejected() {
        let g = |v: &[u64]| v.iter().map(|&x| BigUint::from(x)).collect::<Vec<_>>();
        // counts (2,1): global diag (1,0), off-diagonal sums to 2
        assert!(PairTables::from_parts(vec![2, 1], vec![1, 1, 0, 0], g(&[1, 1, 1, 0])).is_ok());
        assert!(PairTables::from_parts(vec![2, 1], vec![1, 1, 0, 0], g(&[0, 1, 1, 0])).is_err());
        assert!(PairTables::from_parts(vec![2, 1], vec![1, 1, 0, 0], g(&[1, 2, 1, 0])).is_err());
        assert!(PairTables::from_parts(vec![2, 1], vec![2, 1, 0, 0], g(&[1, 1, 1, 0])).is_err());
        assert!(PairTables::from_parts(vec![2, 1], vec![1, 1, 0], g(&[1, 1, 1, 0])).is_err());
    }

    #[test]
    fn statistic_parsing() {
        assert_eq!(
            "Descents".parse::<Statistic>().unwrap(),
            Statistic::Descents
        );
        assert_eq!("inv".parse::<Statistic>().unwrap(), Statistic::Inversions);
        assert!("runs".parse::<Statistic>().is_err());
    }
}
