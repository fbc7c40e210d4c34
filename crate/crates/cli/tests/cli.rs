use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use multiperm::oracle::exact_distribution;
use multiperm::{
    count_descents, count_inversions, Alphabet, Multiset, Ordering, Statistic, SymbolSequence,
};
use multiperm_cli::analyze::{analyze, InputFormat, OrderingRequest};
use multiperm_cli::couple::couple;
use multiperm_cli::ingest::{ingest, ingest_pair_tables, SequenceFormat, UnknownPolicy};
use multiperm_cli::simulate::simulate;
use multiperm_cli::CliError;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn multiperm(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_multiperm"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn gattaca() {
    let f = temp_file("GATTACA\n");
    let alphabet = Alphabet::dna();
    let report = analyze(
        f.path(),
        InputFormat::Sequence(SequenceFormat::Plain),
        &alphabet,
        &OrderingRequest::parse("A,C,G,T"),
        UnknownPolicy::Error,
    )
    .unwrap();
    let row = &report.rows[0];
    // G A T T A C A: descents G>A, T>A, C>A; inversions 4 + 3 + 3 + 1.
    assert_eq!(row.descents, 3);
    assert_eq!(row.inversions, BigUint::from(11u32));
    assert_eq!(report.tables.counts(), &[3, 1, 1, 2]);
}

#[test]
fn fasta_records_break_adjacency() {
    let f = temp_file(">one\nACG\n>two\nTACG\n");
    let (tables, summary) = ingest_pair_tables(
        f.path(),
        SequenceFormat::Fasta,
        &Alphabet::dna(),
        UnknownPolicy::Error,
    )
    .unwrap();
    assert_eq!(summary.records, 2);
    assert_eq!(summary.symbols, 7);
    assert_eq!(tables.adjacent_total(), 5);
    let global: BigUint = (0..4)
        .flat_map(|x| (0..4).map(move |y| (x, y)))
        .map(|(x, y)| tables.global(x, y))
        .sum();
    assert_eq!(global, BigUint::from(21u32));
}

#[test]
fn unknown_symbols_skip_or_fail() {
    let f = temp_file("AC-GT");
    let skipped = ingest(
        f.path(),
        SequenceFormat::Plain,
        &Alphabet::dna(),
        UnknownPolicy::Skip,
    )
    .unwrap();
    assert_eq!(skipped.sequence.as_slice(), &[0, 1, 2, 3]);
    assert_eq!(skipped.segment_breaks, vec![2]);
    assert_eq!(skipped.summary.skipped, 1);
    let failed = ingest(
        f.path(),
        SequenceFormat::Plain,
        &Alphabet::dna(),
        UnknownPolicy::Error,
    );
    assert!(matches!(
        failed,
        Err(CliError::UnknownSymbol {
            symbol: '-',
            line: 1,
            column: 3
        })
    ));
}

#[test]
fn golden_path_matches_direct_counts() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let data: Vec<u8> = (0..5_000).map(|_| rng.random_range(0..4u8)).collect();
    let text: String = data.iter().map(|&s| b"ACGT"[s as usize] as char).collect();
    let wrapped: String = text
        .as_bytes()
        .chunks(60)
        .map(|c| format!("{}\n", std::str::from_utf8(c).unwrap()))
        .collect();
    let f = temp_file(&format!(">synthetic\n{wrapped}"));
    let alphabet = Alphabet::dna();
    let report = analyze(
        f.path(),
        InputFormat::Sequence(SequenceFormat::Fasta),
        &alphabet,
        &OrderingRequest::All,
        UnknownPolicy::Error,
    )
    .unwrap();
    assert_eq!(report.rows.len(), 24);
    let m = SymbolSequence::new(4, data.clone())
        .unwrap()
        .multiset()
        .unwrap();
    for ord in Ordering::all(4) {
        let row = report.row(&alphabet.ordering_label(&ord)).unwrap();
        assert_eq!(
            row.descents,
            count_descents(data.iter().copied(), &ord).unwrap()
        );
        assert_eq!(
            row.inversions,
            count_inversions(data.iter().copied(), &ord).unwrap()
        );
        let z = multiperm::zscore(
            &row.inversions.clone().into(),
            &multiperm::inversion_moments(&m),
        )
        .unwrap();
        assert_eq!(row.z_inv, Some(z));
    }
}

#[test]
fn reversed_ordering_negates_inversion_z() {
    let report = analyze(
        &fixture("chr19_pair_tables.json"),
        InputFormat::Tables,
        &Alphabet::dna(),
        &OrderingRequest::All,
        UnknownPolicy::Skip,
    )
    .unwrap();
    for row in &report.rows {
        let reversed: Vec<&str> = row.label.split(',').rev().collect();
        let other = report.row(&reversed.join(",")).unwrap();
        let (a, b) = (row.z_inv.unwrap(), other.z_inv.unwrap());
        assert!(
            (a + b).abs() <= 1e-9 * a.abs().max(1.0),
            "{} {a} {b}",
            row.label
        );
    }
}

#[test]
fn reports_are_byte_identical() {
    let tables = fixture("chr19_pair_tables.json");
    let tables = tables.to_str().unwrap();
    let runs: Vec<[&str; 7]> = vec![
        [
            "simulate",
            "40,40",
            "--statistic",
            "inversions",
            "--samples",
            "3000",
            "--seed=9",
        ],
        [
            "couple",
            "20,20",
            "--statistic",
            "descents",
            "--samples",
            "3000",
            "--seed=9",
        ],
        [
            "analyze",
            tables,
            "--format",
            "tables",
            "--orderings",
            "all",
            "--unknown-policy=skip",
        ],
    ];
    for args in runs {
        let first = multiperm(&args);
        assert!(
            first.status.success(),
            "{}",
            String::from_utf8_lossy(&first.stderr)
        );
        let second = multiperm(&args);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn binary_writes_output_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let csv = dir.path().join("rows.csv");
    let status = multiperm(&[
        "analyze",
        fixture("chr19_pair_tables.json").to_str().unwrap(),
        "--format",
        "tables",
        "--orderings",
        "A,C,G,T;T,G,C,A",
        "--csv",
        csv.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["orderings"].as_array().unwrap().len(), 2);
    assert_eq!(report["n"], json!(55_785_655u64));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 3);
    assert!(
        rows.lines().nth(1).unwrap().starts_with("\"A,C,G,T\",") && rows.contains(",36.13,-11.64,")
    );
}

#[test]
fn binary_rejects_bad_input() {
    let f = temp_file("ACGU");
    let path = f.path().to_str().unwrap();
    let out = multiperm(&[
        "analyze",
        path,
        "--format",
        "plain",
        "--unknown-policy",
        "error",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains('U'));
    assert!(!multiperm(&["simulate", "5", "--samples", "100"])
        .status
        .success());
    assert!(!multiperm(&["moments", "3", "--digits", "4"])
        .status
        .success());
}

#[test]
fn coupling_variance_matches_oracle() {
    let m = Multiset::new(vec![3, 3]).unwrap();
    let exact = {
        let mut shifts = Vec::new();
        multiperm::oracle::for_each_permutation(&m, |pi| {
            let seq = SymbolSequence::new(2, pi.to_vec()).unwrap();
            shifts.push(multiperm::conditional_mean_shift(&seq, Statistic::Inversions).unwrap());
        })
        .unwrap();
        let k = BigRational::from_integer(shifts.len().into());
        let mean = shifts.iter().sum::<BigRational>() / &k;
        let var = shifts
            .iter()
            .map(|s| (s - &mean) * (s - &mean))
            .sum::<BigRational>()
            / &k;
        num_traits::ToPrimitive::to_f64(&var).unwrap()
    };
    let r = couple(&m, Statistic::Inversions, 4_000, 10_000, 21).unwrap();
    assert!(
        (r.var_e.estimate - exact).abs() <= 4.0 * r.var_e.std_error,
        "{} vs {exact} (se {})",
        r.var_e.estimate,
        r.var_e.std_error
    );
}

#[test]
fn descent_shifts_stay_within_eight() {
    let m = Multiset::new(vec![30, 30, 30]).unwrap();
    let r = couple(&m, Statistic::Descents, 50, 100_000, 5).unwrap();
    assert_eq!(r.shifts.draws, 100_000);
    assert!(r.shifts.max_abs_shift <= 8);
    let expected = num_traits::ToPrimitive::to_f64(&(&r.exact.sigma2 / &r.exact.mu)).unwrap();
    assert!((r.shifts.mean_shift - expected).abs() <= 4.0 * r.shifts.mean_shift_se);
}

#[test]
fn simulation_fits_exact_moments() {
    let m = Multiset::new(vec![500, 500]).unwrap();
    let des = simulate(&m, Statistic::Descents, 20_000, 17).unwrap();
    assert!(des.mean_z().abs() <= 4.0, "{}", des.mean_z());
    let inv = simulate(&m, Statistic::Inversions, 20_000, 17).unwrap();
    assert!(inv.ks_distance <= 0.05, "{}", inv.ks_distance);
    let small = Multiset::new(vec![2, 2]).unwrap();
    let law = exact_distribution(&small, Statistic::Inversions).unwrap();
    let sim = simulate(&small, Statistic::Inversions, 60_000, 3).unwrap();
    for (&value, p) in &law.support {
        let p = num_traits::ToPrimitive::to_f64(p).unwrap();
        let freq = *sim.histogram.get(&value).unwrap_or(&0) as f64 / 60_000.0;
        assert!((freq - p).abs() <= 4.0 * (p * (1.0 - p) / 60_000.0).sqrt());
    }
}
