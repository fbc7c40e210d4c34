//! Exact moments of inversions and descents of a uniformly random multiset
//! permutation, the concentration inequalities behind the normal
//! approximation, and the two Stein-type error bounds.
//!
//! Everything is evaluated in arbitrary-precision rationals; floats appear
//! only in the projections handed to reporting code.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use statrs::function::erf::erfc;

use crate::alphabet::Multiset;
use crate::decimal::{sqrt_to_scientific, to_scientific};
use crate::error::{Error, Result};
use crate::stats::Statistic;

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn ratio(p: impl Into<BigInt>, q: impl Into<BigInt>) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// `C(n, k)` as a rational.
fn binomial(n: u64, k: u64) -> BigRational {
    if k > n {
        return BigRational::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    int(acc)
}

/// Joint inversion-indicator probabilities for a uniform arrangement, with
/// `X_ij = 1` iff `pi(i) > pi(j)`:
///
/// * `p1 = P(X_ij = 1)`
/// * `p234 = p2 + p3 + p4`, where `p2` shares the left index, `p3` the right
///   index and `p4 = P(X_ik = 1, X_kj = 1)` for `i < k < j`
/// * `p5`: two index pairs with no index in common
///
/// Each needs enough positions for its denominator: `p1` needs `n >= 2`,
/// `p234` and `p4` need `n >= 3`, `p5` needs `n >= 4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairProbabilities {
    n: u64,
    p1: BigRational,
    p234: Option<BigRational>,
    p4: Option<BigRational>,
    p5: Option<BigRational>,
}

impl PairProbabilities {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p1(&self) -> &BigRational {
        &self.p1
    }

    pub fn p234(&self) -> Result<&BigRational> {
        self.p234.as_ref().ok_or(Error::Domain {
            quantity: "p2+p3+p4",
            min_n: 3,
            n: self.n,
        })
    }

    pub fn p4(&self) -> Result<&BigRational> {
        self.p4.as_ref().ok_or(Error::Domain {
            quantity: "p4",
            min_n: 3,
            n: self.n,
        })
    }

    pub fn p5(&self) -> Result<&BigRational> {
        self.p5.as_ref().ok_or(Error::Domain {
            quantity: "p5",
            min_n: 4,
            n: self.n,
        })
    }
}

pub fn pair_probabilities(m: &Multiset) -> Result<PairProbabilities> {
    let n = m.n();
    if n < 2 {
        return Err(Error::Domain {
            quantity: "p1",
            min_n: 2,
            n,
        });
    }
    let nn = int(n);
    let s2 = int(m.power_sum(2));
    let s3 = int(m.power_sum(3));
    let n2 = &nn * &nn;
    let n3 = &n2 * &nn;
    let n4 = &n3 * &nn;

    let p1 = (&n2 - &s2) / int(2 * n * (n - 1));

    let (p234, p4) = if n >= 3 {
        let falling3 = int(BigInt::from(n) * (n - 1) * (n - 2));
        let p234 =
            (ratio(5, 6) * &n3 - &n2 + (ratio(-3, 2) * &nn + int(1)) * &s2 + ratio(2, 3) * &s3)
                / &falling3;
        let p4 = (ratio(1, 6) * &n3 - ratio(1, 2) * &nn * &s2 + ratio(1, 3) * &s3) / &falling3;
        (Some(p234), Some(p4))
    } else {
        (None, None)
    };

    let p5 = if n >= 4 {
        let falling4 = int(BigInt::from(n) * (n - 1) * (n - 2) * (n - 3));
        let numer = ratio(1, 4) * &n4 - &n3
            + ratio(1, 2) * &n2
            + ratio(1, 4) * &s2 * &s2
            + (ratio(-1, 2) * &n2 + int(2) * &nn - ratio(1, 2)) * &s2
            - &s3;
        Some(numer / falling4)
    } else {
        None
    };

    Ok(PairProbabilities {
        n,
        p1,
        p234,
        p4,
        p5,
    })
}

/// Exact mean and variance of a statistic, with float projections.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSummary {
    pub statistic: Statistic,
    pub mu: BigRational,
    pub sigma2: BigRational,
    /// `mu` rounded to the nearest double.
    pub mu_f: f64,
    /// `sqrt(sigma2)` rounded to the nearest double.
    pub sigma_f: f64,
}

impl MomentSummary {
    fn new(statistic: Statistic, mu: BigRational, sigma2: BigRational) -> Self {
        let mu_f = to_scientific(&mu, 20).parse().expect("decimal literal");
        let sigma_f = sqrt_to_scientific(&sigma2, 20)
            .parse()
            .expect("decimal literal");
        Self {
            statistic,
            mu,
            sigma2,
            mu_f,
            sigma_f,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.sigma2.is_zero()
    }
}

pub fn moments(m: &Multiset, statistic: Statistic) -> MomentSummary {
    match statistic {
        Statistic::Inversions => inversion_moments(m),
        Statistic::Descents => descent_moments(m),
    }
}

/// Mean `(n^2 - sum n_a^2) / 4` and the exact variance
/// `C(n,2)(p1 - p1^2) + 2 C(n,3)(p234 - 3 p1^2) + 6 C(n,4)(p5 - p1^2)`.
///
/// For `n < 4` the terms whose coefficient vanishes are dropped, so the
/// result stays exact down to `n = 1`.
pub fn inversion_moments(m: &Multiset) -> MomentSummary {
    let n = m.n();
    if n < 2 {
        return MomentSummary::new(
            Statistic::Inversions,
            BigRational::zero(),
            BigRational::zero(),
        );
    }
    let p = pair_probabilities(m).expect("n >= 2");
    let mu = (int(BigInt::from(n) * n) - int(m.power_sum(2))) / int(4);
    let p1sq = p.p1() * p.p1();
    let mut sigma2 = binomial(n, 2) * (p.p1() - &p1sq);
    if let Ok(p234) = p.p234() {
        sigma2 += int(2) * binomial(n, 3) * (p234 - int(3) * &p1sq);
    }
    if let Ok(p5) = p.p5() {
        sigma2 += int(6) * binomial(n, 4) * (p5 - &p1sq);
    }
    MomentSummary::new(Statistic::Inversions, mu, sigma2)
}

/// Mean `(n^2 - sum n_a^2) / (2n)` and the exact variance
/// `(n-1)(p1 - p1^2) + 2(n-2)(p4 - p1^2) + (n-2)(n-3)(p5 - p1^2)`.
pub fn descent_moments(m: &Multiset) -> MomentSummary {
    let n = m.n();
    if n < 2 {
        return MomentSummary::new(
            Statistic::Descents,
            BigRational::zero(),
            BigRational::zero(),
        );
    }
    let p = pair_probabilities(m).expect("n >= 2");
    let mu = (int(BigInt::from(n) * n) - int(m.power_sum(2))) / int(2 * n);
    let p1sq = p.p1() * p.p1();
    let mut sigma2 = int(n - 1) * (p.p1() - &p1sq);
    if let Ok(p4) = p.p4() {
        sigma2 += int(2 * (n - 2)) * (p4 - &p1sq);
    }
    if let Ok(p5) = p.p5() {
        sigma2 += int((n - 2) * (n - 3)) * (p5 - &p1sq);
    }
    MomentSummary::new(Statistic::Descents, mu, sigma2)
}

/// `(value - mu) / sigma`, kept exact until the final square root.
pub fn zscore(value: &BigInt, ms: &MomentSummary) -> Result<f64> {
    if ms.sigma2.is_zero() {
        return Err(Error::Degenerate(format!(
            "{} has zero variance",
            ms.statistic
        )));
    }
    let diff = int(value.clone()) - &ms.mu;
    let z2 = &diff * &diff / &ms.sigma2;
    let magnitude = z2.to_f64().unwrap_or(f64::INFINITY).sqrt();
    Ok(if diff.is_negative() {
        -magnitude
    } else {
        magnitude
    })
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `2 (1 - Phi(|z|))`, computed through `erfc` so far tails do not cancel.
pub fn two_sided_p_value(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// A plain decimal such as `0.95`, read exactly.
struct DecimalText(BigRational);

impl std::str::FromStr for DecimalText {
    type Err = ();

    fn from_str(text: &str) -> std::result::Result<Self, ()> {
        let (whole, frac) = text.split_once('.').unwrap_or((text, ""));
        let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| ())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        Ok(Self(BigRational::new(digits, scale)))
    }
}

/// One exact two-sided inequality `lower <= value <= upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inequality {
    pub lower: BigRational,
    pub value: BigRational,
    pub upper: BigRational,
}

impl Inequality {
    pub fn holds(&self) -> bool {
        self.lower <= self.value && self.value <= self.upper
    }

    pub fn lower_is_tight(&self) -> bool {
        self.lower == self.value
    }

    pub fn strict(&self) -> bool {
        self.lower < self.value && self.value < self.upper
    }
}

/// The power-sum inequalities that keep both variances of order `n^3` and `n`
/// when no symbol exceeds a `beta` share of the multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// `max(1/2, alpha)`
    pub beta: f64,
    pub beta_exact: BigRational,
    /// `2 beta (1-beta) n^2 <= n^2 - sum n_a^2 <= n^2`
    pub square: Inequality,
    /// `3 beta (1-beta) n^3 <= n^3 - sum n_a^3 <= n^3`
    pub cube: Inequality,
    /// `(beta^4 - 4 beta^2 + 4 beta - 1) n^4 <= n^4/3 + (sum n_a^2)^2 - (4n/3) sum n_a^3 <= n^4/3`
    pub quartic: Inequality,
}

impl BoundReport {
    pub fn satisfied(&self) -> bool {
        self.square.holds() && self.cube.holds() && self.quartic.holds()
    }
}

pub fn beta_bound_check(m: &Multiset, alpha: f64) -> Result<BoundReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Precondition(format!(
            "alpha = {alpha} is not in (0, 1)"
        )));
    }
    // the shortest decimal that round-trips, so 0.6 means 3/5
    let alpha_exact: BigRational = format!("{alpha}")
        .parse::<DecimalText>()
        .map(|d| d.0)
        .map_err(|_| Error::InvalidInput(format!("alpha = {alpha}")))?;
    beta_bound_check_exact(m, &alpha_exact)
}

/// [`beta_bound_check`] with an exact `alpha`.
pub fn beta_bound_check_exact(m: &Multiset, alpha: &BigRational) -> Result<BoundReport> {
    let one = BigRational::one();
    if !(alpha > &BigRational::zero() && alpha < &one) {
        return Err(Error::Precondition(format!(
            "alpha = {alpha} is not in (0, 1)"
        )));
    }
    let nn = int(m.n());
    for (a, &count) in m.counts().iter().enumerate() {
        if int(count) > alpha * &nn {
            return Err(Error::Precondition(format!(
                "symbol {a} occurs {count} times, more than alpha * n = {alpha} * {}",
                m.n()
            )));
        }
    }
    let half = ratio(1, 2);
    let beta = if alpha > &half { alpha.clone() } else { half };
    let spread = &beta * (&one - &beta);
    let s2 = int(m.power_sum(2));
    let s3 = int(m.power_sum(3));
    let n2 = &nn * &nn;
    let n3 = &n2 * &nn;
    let n4 = &n3 * &nn;
    let b2 = &beta * &beta;
    let quartic_coeff = &b2 * &b2 - int(4) * &b2 + int(4) * &beta - &one;
    Ok(BoundReport {
        beta: beta.to_f64().expect("finite"),
        square: Inequality {
            lower: int(2) * &spread * &n2,
            value: &n2 - &s2,
            upper: n2.clone(),
        },
        cube: Inequality {
            lower: int(3) * &spread * &n3,
            value: &n3 - &s3,
            upper: n3.clone(),
        },
        quartic: Inequality {
            lower: quartic_coeff * &n4,
            value: &n4 / int(3) + &s2 * &s2 - ratio(4, 3) * &nn * &s3,
            upper: &n4 / int(3),
        },
        beta_exact: beta,
    })
}

fn check_non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{name} = {v} must be finite and non-negative"
        )))
    }
}

/// Smooth-test-function bound
/// `2 |h| mu/sigma^2 sqrt(varE) + |Dh| mu/sigma^3 E(W*-W)^2`.
pub fn stein_smooth_bound(
    mu: f64,
    sigma: f64,
    var_e: f64,
    e_delta_sq: f64,
    h_norm: f64,
    dh_norm: f64,
) -> Result<f64> {
    for (name, v) in [
        ("mu", mu),
        ("sigma", sigma),
        ("varE", var_e),
        ("E(W*-W)^2", e_delta_sq),
        ("|h|", h_norm),
        ("|Dh|", dh_norm),
    ] {
        check_non_negative(name, v)?;
    }
    if sigma == 0.0 {
        return Err(Error::Degenerate("sigma = 0".into()));
    }
    Ok(2.0 * h_norm * mu / (sigma * sigma) * var_e.sqrt()
        + dh_norm * mu / sigma.powi(3) * e_delta_sq)
}

/// Largest shift bound `B` for which the Kolmogorov bound applies: `sigma^{3/2} / sqrt(6 mu)`.
pub fn kolmogorov_shift_limit(mu: f64, sigma: f64) -> f64 {
    sigma.powf(1.5) / (6.0 * mu).sqrt()
}

/// Kolmogorov-distance bound `0.4 A + mu/sigma (64 A^2 + 4 A^3) + 23 mu/sigma^2 sqrt(varE)`
/// with `A = B / sigma`, valid only when `B <= sigma^{3/2} / sqrt(6 mu)`.
pub fn stein_kolmogorov_bound(mu: f64, sigma: f64, shift_bound: f64, var_e: f64) -> Result<f64> {
    for (name, v) in [
        ("mu", mu),
        ("sigma", sigma),
        ("B", shift_bound),
        ("varE", var_e),
    ] {
        check_non_negative(name, v)?;
    }
    if sigma == 0.0 {
        return Err(Error::Degenerate("sigma = 0".into()));
    }
    let limit = kolmogorov_shift_limit(mu, sigma);
    if shift_bound > limit {
        return Err(Error::Precondition(format!(
            "shift bound B = {shift_bound} exceeds sigma^(3/2)/sqrt(6 mu) = {limit}"
        )));
    }
    Ok(kolmogorov_formula(mu, sigma, shift_bound, var_e))
}

/// The right-hand side of the Kolmogorov bound without its precondition. Only
/// a bound when `shift_bound <= kolmogorov_shift_limit(mu, sigma)`.
pub fn kolmogorov_formula(mu: f64, sigma: f64, shift_bound: f64, var_e: f64) -> f64 {
    let a = shift_bound / sigma;
    0.4 * a
        + mu / sigma * (64.0 * a * a + 4.0 * a.powi(3))
        + 23.0 * mu / (sigma * sigma) * var_e.sqrt()
}
