//! Descents and inversions of random arrangements of a multiset: exact
//! moments, pair tables, size-bias couplings and Stein-type normal
//! approximation bounds.

pub mod alphabet;
pub mod coupling;
pub mod decimal;
pub mod error;
pub mod moments;
pub mod oracle;
pub mod stats;

pub use alphabet::{Alphabet, Multiset, Ordering, SymbolSequence};
pub use coupling::{
    conditional_mean_shift, estimate_var_e, ks_distance, monte_carlo, sample_coupling,
    sample_descent_coupling, sample_inversion_coupling, sample_uniform_permutation,
    summarize_couplings, CouplingOutcome, RandomSource, ShiftSummary, VarianceEstimate,
};
pub use error::{Error, Result};
pub use moments::{
    beta_bound_check, descent_moments, inversion_moments, kolmogorov_formula,
    kolmogorov_shift_limit, moments, normal_cdf, pair_probabilities, stein_kolmogorov_bound,
    stein_smooth_bound, two_sided_p_value, zscore, BoundReport, MomentSummary, PairProbabilities,
};
pub use stats::{
    build_pair_tables, count_descents, count_inversions, stats_from_pair_tables, PairTableBuilder,
    PairTables, Statistic,
};
