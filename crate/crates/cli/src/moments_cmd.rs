//! Exact moments of both statistics for a count vector.

use serde_json::{json, Value};

use multiperm::decimal::to_fraction;
use multiperm::{descent_moments, inversion_moments, pair_probabilities, Multiset};

use crate::error::{CliError, Result};
use crate::render;

/// Fewest significant digits accepted for decimal output.
pub const MIN_DIGITS: usize = 11;

pub fn moments_report(m: &Multiset, digits: usize) -> Result<Value> {
    if digits < MIN_DIGITS {
        return Err(CliError::Usage(format!(
            "at least {MIN_DIGITS} significant digits"
        )));
    }
    let probabilities = pair_probabilities(m)?;
    let fraction = |r: multiperm::Result<&_>| r.ok().map(to_fraction);
    Ok(json!({
        "counts": m.counts(),
        "n": m.n(),
        "descents": render::moments(&descent_moments(m), digits),
        "inversions": render::moments(&inversion_moments(m), digits),
        "pair_probabilities": {
            "p1": to_fraction(probabilities.p1()),
            "p2+p3+p4": fraction(probabilities.p234()),
            "p4": fraction(probabilities.p4()),
            "p5": fraction(probabilities.p5()),
        },
    }))
}
