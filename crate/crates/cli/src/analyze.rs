//! Ordering sweep over a sequence: descents and inversions under each
//! requested ordering of the alphabet, standardized by the exact moments of a
//! uniformly random arrangement of the same symbols.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde_json::{json, Value};

use multiperm::{
    descent_moments, inversion_moments, stats_from_pair_tables, two_sided_p_value, zscore,
    Alphabet, MomentSummary, Ordering, PairTables,
};

use crate::error::{CliError, Result};
use crate::ingest::{ingest_pair_tables, IngestSummary, SequenceFormat, UnknownPolicy};
use crate::render;
use crate::tables::{read_tables, tables_to_json};

/// Largest alphabet for which every ordering is swept (7! = 5040 rows).
pub const MAX_SWEEP_ALPHABET: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderingRequest {
    All,
    /// Smallest-first labels, e.g. `"A,C,G,T"`.
    List(Vec<String>),
}

impl OrderingRequest {
    /// `"all"`, or orderings separated by `;`.
    pub fn parse(text: &str) -> Self {
        if text.trim().eq_ignore_ascii_case("all") {
            Self::All
        } else {
            Self::List(
                text.split(';')
                    .map(|s| s.trim().to_owned())
                    .filter(|s| !s.is_empty())
                    .collect(),
            )
        }
    }

    fn resolve(&self, alphabet: &Alphabet) -> Result<Vec<Ordering>> {
        match self {
            Self::All if alphabet.len() > MAX_SWEEP_ALPHABET => Err(CliError::Usage(format!(
                "{} symbols have too many orderings to sweep; list the orderings to evaluate",
                alphabet.len()
            ))),
            Self::All => Ok(Ordering::all(alphabet.len()).collect()),
            Self::List(items) if items.is_empty() => {
                Err(CliError::Usage("no orderings requested".into()))
            }
            Self::List(items) => Ok(items
                .iter()
                .map(|s| alphabet.parse_ordering(s))
                .collect::<multiperm::Result<_>>()?),
        }
    }
}

/// Where the tables came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputInfo {
    pub file: PathBuf,
    pub format: &'static str,
    pub ingest: Option<IngestSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingRow {
    pub label: String,
    pub descents: u64,
    pub inversions: BigUint,
    /// Absent when the statistic is constant.
    pub z_des: Option<f64>,
    pub z_inv: Option<f64>,
    pub p_des: Option<f64>,
    pub p_inv: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub alphabet: Alphabet,
    pub tables: PairTables,
    pub descent_moments: MomentSummary,
    pub inversion_moments: MomentSummary,
    pub rows: Vec<OrderingRow>,
    pub input: InputInfo,
}

impl AnalysisReport {
    pub fn n(&self) -> u64 {
        self.tables.n()
    }

    pub fn degenerate(&self) -> bool {
        self.descent_moments.is_degenerate() || self.inversion_moments.is_degenerate()
    }

    pub fn row(&self, label: &str) -> Option<&OrderingRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn to_json(&self) -> Value {
        let counts: serde_json::Map<String, Value> = self
            .alphabet
            .symbols()
            .iter()
            .zip(self.tables.counts())
            .map(|(s, &c)| (s.clone(), json!(c)))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "ordering": r.label,
                    "descents": r.descents,
                    "inversions": r.inversions.to_string(),
                    "z_des": r.z_des,
                    "z_inv": r.z_inv,
                    "p_des": r.p_des.map(render::p_value),
                    "p_inv": r.p_inv.map(render::p_value),
                })
            })
            .collect();
        let ingest = self.input.ingest.map(|s| {
            json!({
                "records": s.records,
                "symbols": s.symbols,
                "skipped": s.skipped,
                "segment_breaks": s.segment_breaks,
            })
        });
        json!({
            "alphabet": self.alphabet.symbols(),
            "counts": counts,
            "n": self.n(),
            "degenerate": self.degenerate(),
            "moments": {
                "descents": render::moments(&self.descent_moments, render::DIGITS),
                "inversions": render::moments(&self.inversion_moments, render::DIGITS),
            },
            "orderings": rows,
            "pair_tables": tables_to_json(&self.alphabet, &self.tables),
            "input": {
                "file": self.input.file.display().to_string(),
                "format": self.input.format,
                "ingest": ingest,
            },
        })
    }

    /// `ordering,descents,inversions,z_des,z_inv,p_des,p_inv`, z-scores to two decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ordering,descents,inversions,z_des,z_inv,p_des,p_inv\n");
        let z = |v: Option<f64>| v.map(|z| format!("{z:.2}")).unwrap_or_default();
        let p = |v: Option<f64>| match v {
            Some(p) if p < render::P_VALUE_FLOOR => "<1e-300".to_owned(),
            Some(p) => format!("{p:e}"),
            None => String::new(),
        };
        for r in &self.rows {
            let _ = writeln!(
                out,
                "\"{}\",{},{},{},{},{},{}",
                r.label,
                r.descents,
                r.inversions,
                z(r.z_des),
                z(r.z_inv),
                p(r.p_des),
                p(r.p_inv)
            );
        }
        out
    }
}

fn standardize(value: BigInt, summary: &MomentSummary) -> (Option<f64>, Option<f64>) {
    if summary.is_degenerate() {
        return (None, None);
    }
    let z = zscore(&value, summary).expect("non-degenerate summary");
    (Some(z), Some(two_sided_p_value(z)))
}

/// Sweeps `orderings` over already built tables.
pub fn analyze_tables(
    alphabet: Alphabet,
    tables: PairTables,
    orderings: &OrderingRequest,
    input: InputInfo,
) -> Result<AnalysisReport> {
    if alphabet.len() != tables.h() {
        return Err(CliError::Usage(format!(
            "alphabet has {} symbols, tables have {}",
            alphabet.len(),
            tables.h()
        )));
    }
    tables.validate()?;
    let multiset = tables.multiset()?;
    let des = descent_moments(&multiset);
    let inv = inversion_moments(&multiset);
    let orderings = orderings.resolve(&alphabet)?;
    let rows = orderings
        .par_iter()
        .map(|ord| {
            let (descents, inversions) = stats_from_pair_tables(&tables, ord)?;
            let (z_des, p_des) = standardize(BigInt::from(descents), &des);
            let (z_inv, p_inv) = standardize(BigInt::from(inversions.clone()), &inv);
            Ok(OrderingRow {
                label: alphabet.ordering_label(ord),
                descents,
                inversions,
                z_des,
                z_inv,
                p_des,
                p_inv,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalysisReport {
        alphabet,
        tables,
        descent_moments: des,
        inversion_moments: inv,
        rows,
        input,
    })
}

/// Input accepted by [`analyze`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Sequence(SequenceFormat),
    /// Pair tables as JSON (see [`crate::tables`]).
    Tables,
}

impl std::str::FromStr for InputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("tables") || s.eq_ignore_ascii_case("json") {
            Ok(Self::Tables)
        } else {
            s.parse().map(Self::Sequence)
        }
    }
}

/// Reads `path` and sweeps the orderings. For [`InputFormat::Tables`] the
/// alphabet comes from the file.
pub fn analyze(
    path: &Path,
    format: InputFormat,
    alphabet: &Alphabet,
    orderings: &OrderingRequest,
    policy: UnknownPolicy,
) -> Result<AnalysisReport> {
    match format {
        InputFormat::Tables => {
            let (alphabet, tables) = read_tables(path)?;
            let info = InputInfo {
                file: path.to_path_buf(),
                format: "tables",
                ingest: None,
            };
            analyze_tables(alphabet, tables, orderings, info)
        }
        InputFormat::Sequence(seq_format) => {
            let (tables, summary) = ingest_pair_tables(path, seq_format, alphabet, policy)?;
            let info = InputInfo {
                file: path.to_path_buf(),
                format: match seq_format {
                    SequenceFormat::Fasta => "fasta",
                    SequenceFormat::Plain => "plain",
                },
                ingest: Some(summary),
            };
            analyze_tables(alphabet.clone(), tables, orderings, info)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use multiperm::{build_pair_tables, SymbolSequence};

    fn info() -> InputInfo {
        InputInfo {
            file: PathBuf::from("mem"),
            format: "plain",
            ingest: None,
        }
    }

    fn report(data: Vec<u8>, h: usize, request: OrderingRequest) -> Result<AnalysisReport> {
        let alphabet = Alphabet::from_chars(&"ACGTUVWX"[..h]).unwrap();
        let seq = SymbolSequence::new(h, data).unwrap();
        analyze_tables(
            alphabet,
            build_pair_tables(&seq, &[]).unwrap(),
            &request,
            info(),
        )
    }

    #[test]
    fn sweep_rows_and_reversal() {
        let r = report(vec![2, 0, 3, 3, 0, 1, 0, 2, 1], 4, OrderingRequest::All).unwrap();
        assert_eq!(r.rows.len(), 24);
        for row in &r.rows {
            let reversed: Vec<&str> = row.label.split(',').rev().collect();
            let back = r.row(&reversed.join(",")).unwrap();
            assert!((row.z_inv.unwrap() + back.z_inv.unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn explicit_orderings_and_guard() {
        let r = report(vec![0, 1, 1, 0], 2, OrderingRequest::parse("A,C; C,A")).unwrap();
        assert_eq!(
            r.rows.iter().map(|r| r.label.as_str()).collect::<Vec<_>>(),
            vec!["A,C", "C,A"]
        );
        assert_eq!(r.rows[0].descents, 1);
        assert_eq!(r.rows[0].inversions, BigUint::from(2u32));
        let wide = report(vec![0, 1, 2, 3, 4, 5, 6, 7], 8, OrderingRequest::All);
        assert!(matches!(wide, Err(CliError::Usage(_))));
        assert!(report(vec![0, 1], 2, OrderingRequest::parse("A,G")).is_err());
    }

    #[test]
    fn constant_input_is_degenerate() {
        let r = report(vec![1; 6], 2, OrderingRequest::All).unwrap();
        assert!(r.degenerate());
        assert!(r
            .rows
            .iter()
            .all(|row| row.z_des.is_none() && row.z_inv.is_none()));
        assert_eq!(r.to_json()["degenerate"], json!(true));
    }
}
