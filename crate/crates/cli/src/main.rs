use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use multiperm::{Alphabet, Multiset, Statistic};
use multiperm_cli::analyze::{analyze, InputFormat, OrderingRequest};
use multiperm_cli::couple::couple;
use multiperm_cli::ingest::UnknownPolicy;
use multiperm_cli::moments_cmd::{moments_report, MIN_DIGITS};
use multiperm_cli::oracle_cmd::{classical_report, oracle_report, Law};
use multiperm_cli::render::to_text;
use multiperm_cli::simulate::simulate;

/// Descents and inversions of sequences under orderings of their alphabet.
#[derive(Debug, Parser)]
#[command(name = "multiperm", version)]
struct Cli {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CountsArg {
    /// Symbol counts, e.g. `3 3` or `3,3`.
    #[arg(required = true, value_delimiter = ',')]
    counts: Vec<u64>,
}

impl CountsArg {
    fn multiset(&self) -> multiperm::Result<Multiset> {
        Multiset::new(self.counts.clone())
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Z-scores of descents and inversions for each ordering of the alphabet.
    Analyze {
        /// Sequence file, or `-` for standard input.
        input: PathBuf,
        /// fasta, plain, or tables (pair tables as JSON).
        #[arg(long, default_value = "fasta")]
        format: InputFormat,
        /// Symbols as characters (`ACGT`) or a comma list (`A,C,G,T`).
        #[arg(long, default_value = "ACGT")]
        alphabet: String,
        /// `all`, or orderings separated by `;`, smallest first (`A,C,G,T;T,G,C,A`).
        #[arg(long, default_value = "all")]
        orderings: String,
        /// skip or error.
        #[arg(long, default_value = "skip")]
        unknown_policy: UnknownPolicy,
        /// Also write the ordering table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Monte Carlo law of a statistic against its normal approximation.
    Simulate {
        #[command(flatten)]
        counts: CountsArg,
        #[arg(long, default_value = "descents")]
        statistic: Statistic,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the histogram as CSV.
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
    /// Size-bias coupling diagnostics and error bounds.
    Couple {
        #[command(flatten)]
        counts: CountsArg,
        #[arg(long, default_value = "descents")]
        statistic: Statistic,
        /// Arrangements used to estimate the variance of the conditional mean shift.
        #[arg(long, default_value_t = 200)]
        replicates: usize,
        /// Coupling draws.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact means and variances of both statistics.
    Moments {
        #[command(flatten)]
        counts: CountsArg,
        /// Significant digits in decimal output.
        #[arg(long, default_value_t = MIN_DIGITS)]
        digits: usize,
    },
    /// Exact laws by enumeration.
    Oracle {
        /// Symbol counts; omit with `--classical`.
        #[arg(value_delimiter = ',', required_unless_present = "classical")]
        counts: Vec<u64>,
        #[arg(long, default_value = "inversions")]
        statistic: Statistic,
        /// uniform, size-biased, or coupling.
        #[arg(long, default_value = "uniform")]
        law: Law,
        /// Inversions of a permutation of N distinct symbols instead.
        #[arg(long, value_name = "N", conflicts_with = "counts")]
        classical: Option<usize>,
    },
}

fn parse_alphabet(text: &str) -> multiperm::Result<Alphabet> {
    if text.contains(',') {
        Alphabet::new(text.split(',').map(str::trim))
    } else {
        Alphabet::from_chars(text)
    }
}

fn write(path: &PathBuf, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let report: Value = match cli.command {
        Command::Analyze {
            input,
            format,
            alphabet,
            orderings,
            unknown_policy,
            csv,
        } => {
            let alphabet = parse_alphabet(&alphabet)?;
            let report = analyze(
                &input,
                format,
                &alphabet,
                &OrderingRequest::parse(&orderings),
                unknown_policy,
            )?;
            if let Some(path) = csv {
                write(&path, &report.to_csv())?;
            }
            report.to_json()
        }
        Command::Simulate {
            counts,
            statistic,
            samples,
            seed,
            histogram,
        } => {
            let report = simulate(&counts.multiset()?, statistic, samples, seed)?;
            if let Some(path) = histogram {
                write(&path, &report.histogram_csv())?;
            }
            report.to_json()
        }
        Command::Couple {
            counts,
            statistic,
            replicates,
            samples,
            seed,
        } => couple(&counts.multiset()?, statistic, replicates, samples, seed)?.to_json(),
        Command::Moments { counts, digits } => moments_report(&counts.multiset()?, digits)?,
        Command::Oracle {
            counts,
            statistic,
            law,
            classical,
        } => match classical {
            Some(n) => classical_report(n)?,
            None if counts.is_empty() => bail!("counts required"),
            None => oracle_report(&Multiset::new(counts)?, statistic, law)?,
        },
    };
    let text = to_text(&report);
    match &cli.output {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
