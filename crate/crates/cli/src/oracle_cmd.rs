//! Exact laws by enumeration, for small inputs.

use serde_json::{json, Value};

use multiperm::decimal::to_fraction;
use multiperm::oracle::{
    classical_inversion_distribution, exact_coupling_distribution, exact_distribution,
    ExactDistribution,
};
use multiperm::{Multiset, Statistic};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    /// The statistic under a uniform arrangement.
    Uniform,
    /// `w P(W = w) / E W`.
    SizeBiased,
    /// `W*` produced by the coupling, over its whole probability tree.
    Coupling,
}

impl std::str::FromStr for Law {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Self::Uniform),
            "size-biased" | "size_biased" => Ok(Self::SizeBiased),
            "coupling" => Ok(Self::Coupling),
            other => Err(CliError::Usage(format!("unknown law {other:?}"))),
        }
    }
}

fn distribution_json(d: &ExactDistribution) -> Value {
    let support: Vec<Value> = d
        .support
        .iter()
        .map(|(v, p)| json!({ "value": v, "probability": to_fraction(p) }))
        .collect();
    json!({
        "support": support,
        "mean": to_fraction(&d.mean()),
        "variance": to_fraction(&d.variance()),
    })
}

pub fn oracle_report(m: &Multiset, statistic: Statistic, law: Law) -> Result<Value> {
    let d = match law {
        Law::Uniform => exact_distribution(m, statistic)?,
        Law::SizeBiased => exact_distribution(m, statistic)?.size_biased()?,
        Law::Coupling => exact_coupling_distribution(m, statistic)?.marginal_w_star(),
    };
    let name = match law {
        Law::Uniform => "uniform",
        Law::SizeBiased => "size-biased",
        Law::Coupling => "coupling",
    };
    Ok(json!({
        "counts": m.counts(),
        "statistic": statistic.name(),
        "law": name,
        "distribution": distribution_json(&d),
    }))
}

/// Inversions of a uniform permutation of `n` distinct symbols.
pub fn classical_report(n: usize) -> Result<Value> {
    Ok(json!({
        "n": n,
        "statistic": "inversions",
        "law": "classical",
        "distribution": distribution_json(&classical_inversion_distribution(n)?),
    }))
}
