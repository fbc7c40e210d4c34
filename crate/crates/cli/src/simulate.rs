//! Monte Carlo distribution of a statistic over uniform arrangements,
//! compared with the normal law fitted by the exact moments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use multiperm::{
    ks_distance, moments, monte_carlo, MomentSummary, Multiset, RandomSource, Statistic,
};

use crate::error::{CliError, Result};
use crate::render;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub multiset: Multiset,
    pub statistic: Statistic,
    pub samples: usize,
    pub seed: u64,
    pub exact: MomentSummary,
    pub sample_mean: f64,
    pub sample_variance: f64,
    pub ks_distance: f64,
    pub histogram: BTreeMap<u64, u64>,
}

impl SimulationReport {
    /// `(sample mean - mu) / (sample sd / sqrt(samples))`.
    pub fn mean_z(&self) -> f64 {
        (self.sample_mean - self.exact.mu_f) / (self.sample_variance / self.samples as f64).sqrt()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "counts": self.multiset.counts(),
            "n": self.multiset.n(),
            "statistic": self.statistic.name(),
            "samples": self.samples,
            "seed": self.seed,
            "exact": render::moments(&self.exact, render::DIGITS),
            "sample_mean": self.sample_mean,
            "sample_variance": self.sample_variance,
            "mean_z": self.mean_z(),
            "ks_distance": self.ks_distance,
        })
    }

    /// `value,count` rows in increasing order of value.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("value,count\n");
        for (v, c) in &self.histogram {
            let _ = writeln!(out, "{v},{c}");
        }
        out
    }
}

/// Draws `samples` arrangements from `RandomSource::new(seed, 0)`.
pub fn simulate(
    m: &Multiset,
    statistic: Statistic,
    samples: usize,
    seed: u64,
) -> Result<SimulationReport> {
    if samples < 2 {
        return Err(CliError::Usage("simulate needs at least 2 samples".into()));
    }
    let exact = moments(m, statistic);
    if exact.is_degenerate() {
        return Err(multiperm::Error::Degenerate(format!("{statistic} of {m} is constant")).into());
    }
    let draws = monte_carlo(m, samples, RandomSource::new(seed, 0));
    let values = draws.values(statistic);
    let as_f64: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    let total = samples as f64;
    let sample_mean = as_f64.iter().sum::<f64>() / total;
    let sample_variance = as_f64
        .iter()
        .map(|v| (v - sample_mean).powi(2))
        .sum::<f64>()
        / (total - 1.0);
    let mut histogram = BTreeMap::new();
    for &v in values {
        *histogram.entry(v).or_insert(0) += 1;
    }
    Ok(SimulationReport {
        multiset: m.clone(),
        statistic,
        samples,
        seed,
        ks_distance: ks_distance(&as_f64, exact.mu_f, exact.sigma_f)?,
        exact,
        sample_mean,
        sample_variance,
        histogram,
    })
}
