//! Coupling diagnostics and the two normal-approximation bounds they feed.

use serde_json::{json, Value};

use multiperm::coupling::shift_bound;
use multiperm::decimal::to_scientific;
use multiperm::moments::{kolmogorov_formula, kolmogorov_shift_limit};
use multiperm::{
    estimate_var_e, moments, stein_kolmogorov_bound, stein_smooth_bound, summarize_couplings,
    Error, MomentSummary, Multiset, RandomSource, ShiftSummary, Statistic, VarianceEstimate,
};

use crate::error::Result;
use crate::render;

/// The Kolmogorov bound, or why it does not apply.
#[derive(Debug, Clone, PartialEq)]
pub enum KolmogorovBound {
    Applicable(f64),
    /// `B` exceeds `sigma^{3/2} / sqrt(6 mu)`; `formula` is the right-hand side
    /// evaluated anyway, which is not a bound.
    NotApplicable {
        shift_limit: f64,
        formula: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReport {
    pub multiset: Multiset,
    pub statistic: Statistic,
    pub seed: u64,
    pub exact: MomentSummary,
    pub var_e: VarianceEstimate,
    pub replicates: usize,
    pub shifts: ShiftSummary,
    pub shift_bound: u64,
    pub smooth_bound: f64,
    pub kolmogorov: KolmogorovBound,
}

impl CouplingReport {
    pub fn to_json(&self) -> Value {
        let kolmogorov = match &self.kolmogorov {
            KolmogorovBound::Applicable(v) => json!({ "applicable": true, "bound": v }),
            KolmogorovBound::NotApplicable {
                shift_limit,
                formula,
            } => json!({
                "applicable": false,
                "bound": "not applicable",
                "shift_limit": shift_limit,
                "formula_value": formula,
            }),
        };
        json!({
            "counts": self.multiset.counts(),
            "n": self.multiset.n(),
            "statistic": self.statistic.name(),
            "seed": self.seed,
            "exact": render::moments(&self.exact, render::DIGITS),
            "expected_mean_shift": to_scientific(&(&self.exact.sigma2 / &self.exact.mu), render::DIGITS),
            "var_e": {
                "estimate": self.var_e.estimate,
                "std_error": self.var_e.std_error,
                "replicates": self.replicates,
            },
            "shift": {
                "draws": self.shifts.draws,
                "max_abs": self.shifts.max_abs_shift,
                "bound": self.shift_bound,
                "mean": self.shifts.mean_shift,
                "mean_std_error": self.shifts.mean_shift_se,
                "mean_square": self.shifts.mean_square_shift,
            },
            "smooth_bound": {
                "h_norm": 1.0,
                "dh_norm": 1.0,
                "value": self.smooth_bound,
            },
            "kolmogorov_bound": kolmogorov,
        })
    }
}

/// `replicates` arrangements estimate `Var E(W* - W | pi)` (stream 1); `draws`
/// couplings estimate the moments of `W* - W` (stream 2). Test functions are
/// normalized to `|h| = |Dh| = 1`.
pub fn couple(
    m: &Multiset,
    statistic: Statistic,
    replicates: usize,
    draws: usize,
    seed: u64,
) -> Result<CouplingReport> {
    let exact = moments(m, statistic);
    if exact.is_degenerate() {
        return Err(Error::Degenerate(format!("{statistic} of {m} is constant")).into());
    }
    let var_e = estimate_var_e(m, statistic, replicates, RandomSource::new(seed, 1))?;
    let shifts = summarize_couplings(m, statistic, draws, RandomSource::new(seed, 2))?;
    let (mu, sigma) = (exact.mu_f, exact.sigma_f);
    let b = shift_bound(statistic, m.n());
    let smooth_bound = stein_smooth_bound(
        mu,
        sigma,
        var_e.estimate,
        shifts.mean_square_shift,
        1.0,
        1.0,
    )?;
    let kolmogorov = match stein_kolmogorov_bound(mu, sigma, b as f64, var_e.estimate) {
        Ok(v) => KolmogorovBound::Applicable(v),
        Err(Error::Precondition(_)) => KolmogorovBound::NotApplicable {
            shift_limit: kolmogorov_shift_limit(mu, sigma),
            formula: kolmogorov_formula(mu, sigma, b as f64, var_e.estimate),
        },
        Err(e) => return Err(e.into()),
    };
    Ok(CouplingReport {
        multiset: m.clone(),
        statistic,
        seed,
        exact,
        var_e,
        replicates,
        shifts,
        shift_bound: b,
        smooth_bound,
        kolmogorov,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_descent_report() {
        let m = Multiset::new(vec![5, 5]).unwrap();
        let r = couple(&m, Statistic::Descents, 200, 2_000, 3).unwrap();
        assert!(r.shifts.max_abs_shift <= 8);
        assert!(matches!(
            r.kolmogorov,
            KolmogorovBound::NotApplicable { .. }
        ));
        let v = r.to_json();
        assert_eq!(v["kolmogorov_bound"]["bound"], json!("not applicable"));
        assert_eq!(
            v,
            couple(&m, Statistic::Descents, 200, 2_000, 3)
                .unwrap()
                .to_json()
        );
    }
}
