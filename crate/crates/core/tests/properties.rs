mod support;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::strategy::ValueTree;

use multiperm::stats::{descents_of, inversions_of};
use multiperm::{
    beta_bound_check, build_pair_tables, count_descents, count_inversions, moments,
    stats_from_pair_tables, Multiset, Ordering, Statistic, SymbolSequence,
};

fn brute_inversions(seq: &[u8], ord: &Ordering) -> u64 {
    let mut total = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if ord.greater(seq[i] as usize, seq[j] as usize) {
                total += 1;
            }
        }
    }
    total
}

fn ordering(h: usize, seed: u64) -> Ordering {
    let all: Vec<Ordering> = Ordering::all(h).collect();
    all[(seed % all.len() as u64) as usize].clone()
}

fn sequence() -> impl Strategy<Value = (usize, Vec<u8>)> {
    (1usize..=6).prop_flat_map(|h| (Just(h), prop::collection::vec(0..h as u8, 1..300)))
}

fn counts(max_h: usize, max_count: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0..=max_count, 1..=max_h)
        .prop_filter("non-empty", |c| c.iter().sum::<u64>() > 0)
}

#[test]
fn pair_tables_agree_with_direct_counts_exhaustively() {
    // every sequence of length <= 8 over <= 4 symbols is an arrangement of one of these
    for m in support::small_multisets(8, 4) {
        let h = m.h();
        let orderings: Vec<Ordering> = Ordering::all(h).collect();
        multiperm::oracle::for_each_permutation(&m, |pi| {
            let seq = SymbolSequence::new(h, pi.to_vec()).unwrap();
            let tables = build_pair_tables(&seq, &[]).unwrap();
            tables.validate().unwrap();
            for ord in &orderings {
                let (des, inv) = stats_from_pair_tables(&tables, ord).unwrap();
                assert_eq!(des, count_descents(pi.iter().copied(), ord).unwrap());
                assert_eq!(inv, count_inversions(pi.iter().copied(), ord).unwrap());
                assert_eq!(inv, BigUint::from(brute_inversions(pi, ord)));
            }
        })
        .unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn streaming_inversions_match_quadratic_count((h, seq) in sequence(), pick in any::<u64>()) {
        let ord = ordering(h, pick);
        let fast = count_inversions(seq.iter().copied(), &ord).unwrap();
        prop_assert_eq!(fast, BigUint::from(brute_inversions(&seq, &ord)));
        prop_assert_eq!(
            inversions_of(&seq, h),
            brute_inversions(&seq, &Ordering::identity(h))
        );
    }

    #[test]
    fn reversal_identity_for_inversions((h, seq) in sequence(), pick in any::<u64>()) {
        let ord = ordering(h, pick);
        let m = Multiset::of_symbols(h, seq.iter().copied()).unwrap();
        let forward = count_inversions(seq.iter().copied(), &ord).unwrap();
        let backward = count_inversions(seq.iter().copied(), &ord.reverse()).unwrap();
        prop_assert_eq!(forward + backward, m.unequal_pairs());
        prop_assert_eq!(ord.reverse().reverse(), ord);
    }

    #[test]
    fn descents_and_ascents_cover_unequal_neighbours((h, seq) in sequence(), pick in any::<u64>()) {
        let ord = ordering(h, pick);
        let ties = seq.windows(2).filter(|w| w[0] == w[1]).count() as u64;
        let forward = count_descents(seq.iter().copied(), &ord).unwrap();
        let backward = count_descents(seq.iter().copied(), &ord.reverse()).unwrap();
        prop_assert_eq!(forward + backward, seq.len() as u64 - 1 - ties);
        if ord == Ordering::identity(h) {
            prop_assert_eq!(forward, descents_of(&seq));
        }
    }

    #[test]
    fn segment_breaks_only_drop_adjacent_pairs(
        (h, seq) in sequence(),
        raw_breaks in prop::collection::vec(any::<prop::sample::Index>(), 0..5),
        pick in any::<u64>(),
    ) {
        let n = seq.len();
        let mut breaks: Vec<usize> = raw_breaks.iter().map(|ix| ix.index(n + 1)).collect();
        breaks.sort_unstable();
        let s = SymbolSequence::new(h, seq.clone()).unwrap();
        let whole = build_pair_tables(&s, &[]).unwrap();
        let cut = build_pair_tables(&s, &breaks).unwrap();
        cut.validate().unwrap();
        let interior: std::collections::BTreeSet<usize> =
            breaks.iter().copied().filter(|&b| b > 0 && b < n).collect();
        prop_assert_eq!(cut.adjacent_total(), (n as u64 - 1) - interior.len() as u64);
        for x in 0..h {
            for y in 0..h {
                prop_assert_eq!(cut.global(x, y), whole.global(x, y));
            }
        }
        let ord = ordering(h, pick);
        let expected_des = (1..n)
            .filter(|p| !interior.contains(p) && ord.greater(seq[p - 1] as usize, seq[*p] as usize))
            .count() as u64;
        prop_assert_eq!(stats_from_pair_tables(&cut, &ord).unwrap().0, expected_des);
    }

    #[test]
    fn moments_are_ordering_free(c in counts(5, 40), perm in any::<prop::sample::Index>()) {
        let m = Multiset::new(c.clone()).unwrap();
        let all: Vec<Ordering> = Ordering::all(c.len()).collect();
        let ord = &all[perm.index(all.len())];
        let relabeled: Vec<u64> = (0..c.len()).map(|a| c[ord.increasing()[a]]).collect();
        let r = Multiset::new(relabeled).unwrap();
        for s in [Statistic::Inversions, Statistic::Descents] {
            prop_assert_eq!(moments(&m, s).mu, moments(&r, s).mu);
            prop_assert_eq!(moments(&m, s).sigma2, moments(&r, s).sigma2);
        }
    }
}

#[test]
fn variance_is_never_negative() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strategy = counts(8, 10_000);
    for _ in 0..10_000 {
        let c = strategy.new_tree(&mut runner).unwrap().current();
        let m = Multiset::new(c).unwrap();
        for s in [Statistic::Inversions, Statistic::Descents] {
            let summary = moments(&m, s);
            assert!(summary.sigma2 >= BigRational::zero(), "{s} of {m}");
            assert_eq!(summary.sigma2.is_zero(), m.distinct() < 2, "{s} of {m}");
        }
    }
}

#[test]
fn bound_inequalities_hold_on_random_counts() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for (num, den) in [(1, 2), (3, 5), (4, 5), (19, 20)] {
        let beta = num as f64 / den as f64;
        let strategy = counts(6, 500);
        let mut checked = 0;
        while checked < 2_500 {
            let c = strategy.new_tree(&mut runner).unwrap().current();
            let m = Multiset::new(c).unwrap();
            if m.max_count() * den > num * m.n() {
                continue;
            }
            let report = beta_bound_check(&m, beta).unwrap();
            assert!(report.satisfied(), "{m} at beta {beta}");
            checked += 1;
        }
        // extremal pair {beta n, (1 - beta) n}
        let m = Multiset::new(vec![num * 7, (den - num) * 7]).unwrap();
        let report = beta_bound_check(&m, beta).unwrap();
        assert_eq!(report.square.lower, report.square.value);
        assert_eq!(report.cube.lower, report.cube.value);
        assert!(report.satisfied());
    }
}

#[test]
fn bound_check_examples() {
    let k = Multiset::new(vec![6, 6]).unwrap();
    let report = beta_bound_check(&k, 0.5).unwrap();
    assert_eq!(
        report.square.value,
        BigRational::from_integer(BigInt::from(72))
    );
    assert_eq!(report.square.lower, report.square.value);

    let four = Multiset::new(vec![1, 1, 1, 1]).unwrap();
    let report = beta_bound_check(&four, 0.25).unwrap();
    assert_eq!(report.beta, 0.5);
    for ineq in [&report.square, &report.cube, &report.quartic] {
        assert!(ineq.strict(), "{ineq:?}");
    }

    let chr19 = Multiset::new(vec![14383026, 13473774, 13506612, 14422243]).unwrap();
    assert!(beta_bound_check(&chr19, 0.26).unwrap().satisfied());
    let err = beta_bound_check(&chr19, 0.2).unwrap_err();
    assert!(err.to_string().contains("symbol 0"), "{err}");
}
