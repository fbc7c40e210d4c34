//! Decimal rendering of exact rationals and their square roots.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn pow10(k: u32) -> BigInt {
    BigInt::from(10u32).pow(k)
}

fn scale10(r: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        r * BigRational::from_integer(pow10(k as u32))
    } else {
        r / BigRational::from_integer(pow10((-k) as u32))
    }
}

/// `floor(log10 |r|)` for non-zero `r`.
fn exponent10(r: &BigRational) -> i64 {
    let r = r.abs();
    let guess = r.numer().to_string().len() as i64 - r.denom().to_string().len() as i64;
    let mut e = guess;
    // guess is within one of the answer
    while scale10(&r, -e) >= BigRational::from_integer(BigInt::from(10)) {
        e += 1;
    }
    while scale10(&r, -e) < BigRational::one() {
        e -= 1;
    }
    e
}

/// Rounds `r` to `significant` digits (half to even) and renders it as
/// `d.ddd…e<exp>`, e.g. `2.0912146861e7`.
pub fn to_scientific(r: &BigRational, significant: usize) -> String {
    assert!(significant >= 1);
    if r.is_zero() {
        return "0".into();
    }
    let negative = r.is_negative();
    let mut e = exponent10(r);
    let scaled = scale10(&r.abs(), significant as i64 - 1 - e);
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let twice = rem * 2u32;
    let mut digits = match twice.cmp(scaled.denom()) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1u32,
        std::cmp::Ordering::Equal if q.is_even() => q,
        std::cmp::Ordering::Equal => q + 1u32,
    };
    if digits == pow10(significant as u32) {
        digits /= 10u32;
        e += 1;
    }
    let text = digits.to_string();
    let mut out = String::with_capacity(significant + 8);
    if negative {
        out.push('-');
    }
    out.push_str(&text[..1]);
    if significant > 1 {
        out.push('.');
        out.push_str(&text[1..]);
    }
    out.push('e');
    out.push_str(&e.to_string());
    out
}

/// `sqrt(r)` for `r >= 0` rendered like [`to_scientific`]. The root is computed
/// with integer square roots carrying three guard digits.
pub fn sqrt_to_scientific(r: &BigRational, significant: usize) -> String {
    assert!(!r.is_negative(), "square root of a negative rational");
    if r.is_zero() {
        return "0".into();
    }
    let k = significant as i64 + 3 - exponent10(r).div_euclid(2);
    let scaled = scale10(r, 2 * k);
    let floor = scaled.numer() / scaled.denom();
    let root = floor.magnitude().sqrt();
    let approx = scale10(
        &BigRational::from_integer(BigInt::from_biguint(Sign::Plus, root)),
        -k,
    );
    to_scientific(&approx, significant)
}

/// Exact `p/q` form (just `p` for integers).
pub fn to_fraction(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
