//! Streaming readers for FASTA and plain-text symbol files.
//!
//! Input is scanned byte by byte through a lookup table and handed to a
//! [`SymbolSink`], so pair tables for a whole chromosome are built in O(h^2)
//! memory. Whitespace is ignored everywhere. A FASTA header (`>` at the start
//! of a line) ends the current record; records are joined with a segment break.
//! Characters outside the alphabet either abort ingestion or are dropped, in
//! which case each run of them becomes one segment break.

use std::fs::File;
use std::io::{self, Read};
use std::path::Path;
use std::str::FromStr;

use multiperm::{Alphabet, PairTableBuilder, PairTables, SymbolSequence};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceFormat {
    Fasta,
    Plain,
}

impl FromStr for SequenceFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fasta" | "fa" => Ok(Self::Fasta),
            "plain" | "txt" => Ok(Self::Plain),
            other => Err(CliError::Usage(format!(
                "unknown sequence format {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownPolicy {
    #[default]
    Skip,
    Error,
}

impl FromStr for UnknownPolicy {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "skip" => Ok(Self::Skip),
            "error" => Ok(Self::Error),
            other => Err(CliError::Usage(format!("unknown symbol policy {other:?}"))),
        }
    }
}

/// Receiver of ingested symbols.
pub trait SymbolSink {
    fn push(&mut self, symbol: u8);
    fn segment_break(&mut self);
}

impl SymbolSink for PairTableBuilder {
    #[inline]
    fn push(&mut self, symbol: u8) {
        PairTableBuilder::push(self, symbol);
    }

    fn segment_break(&mut self) {
        PairTableBuilder::segment_break(self);
    }
}

/// Keeps the whole sequence and its break positions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CollectingSink {
    pub symbols: Vec<u8>,
    pub breaks: Vec<usize>,
}

impl SymbolSink for CollectingSink {
    fn push(&mut self, symbol: u8) {
        self.symbols.push(symbol);
    }

    fn segment_break(&mut self) {
        self.breaks.push(self.symbols.len());
    }
}

/// What ingestion saw.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestSummary {
    pub records: u64,
    pub symbols: u64,
    pub skipped: u64,
    /// Breaks that separate two symbols, i.e. adjacent pairs not counted.
    pub segment_breaks: u64,
}

const UNKNOWN: u8 = 0xFF;
const SPACE: u8 = 0xFE;

/// Byte-level ingestion settings.
#[derive(Debug, Clone)]
pub struct Ingester {
    format: SequenceFormat,
    policy: UnknownPolicy,
    table: [u8; 256],
}

impl Ingester {
    /// Symbols must be single ASCII characters; matching ignores case.
    pub fn new(alphabet: &Alphabet, format: SequenceFormat, policy: UnknownPolicy) -> Result<Self> {
        let mut table = [UNKNOWN; 256];
        for b in [b' ', b'\t', b'\r', b'\n', 0x0B, 0x0C] {
            table[b as usize] = SPACE;
        }
        for (index, label) in alphabet.symbols().iter().enumerate() {
            let byte = match label.as_bytes() {
                [b] if b.is_ascii_graphic() && *b != b'>' => *b,
                _ => {
                    return Err(CliError::Usage(format!(
                        "sequence files need single printable ASCII symbols, got {label:?}"
                    )))
                }
            };
            for variant in [byte.to_ascii_uppercase(), byte.to_ascii_lowercase()] {
                let slot = &mut table[variant as usize];
                if *slot != UNKNOWN && *slot != index as u8 {
                    return Err(CliError::Usage(format!(
                        "symbols {:?} and {label:?} coincide when case is ignored",
                        alphabet.label(*slot as usize)
                    )));
                }
                *slot = index as u8;
            }
        }
        Ok(Self {
            format,
            policy,
            table,
        })
    }

    /// Streams `reader` into `sink`.
    pub fn run<R: Read, S: SymbolSink>(&self, mut reader: R, sink: &mut S) -> io::Result<Scan> {
        let mut scan = Scan::default();
        let mut state = State {
            line: 1,
            line_start: 0,
            offset: 0,
            at_line_start: true,
            in_header: false,
            pending_break: false,
            in_record: false,
        };
        let mut buf = vec![0u8; 1 << 16];
        loop {
            let len = match reader.read(&mut buf) {
                Ok(0) => break,
                Ok(len) => len,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e),
            };
            if let Some(unknown) = self.scan_chunk(&buf[..len], &mut state, &mut scan, sink) {
                scan.unknown = Some(unknown);
                return Ok(scan);
            }
        }
        Ok(scan)
    }

    fn scan_chunk<S: SymbolSink>(
        &self,
        chunk: &[u8],
        st: &mut State,
        scan: &mut Scan,
        sink: &mut S,
    ) -> Option<(char, u64, u64)> {
        let fasta = self.format == SequenceFormat::Fasta;
        let mut local = *st;
        let mut summary = scan.summary;
        let mut unknown = None;
        for (i, &byte) in chunk.iter().enumerate() {
            let symbol = self.table[byte as usize];
            if symbol < SPACE && !local.in_header {
                // common case: a symbol inside a sequence line
                local.at_line_start = false;
                if !local.in_record {
                    local.in_record = true;
                    summary.records += 1;
                }
                if local.pending_break {
                    local.pending_break = false;
                    if summary.symbols > 0 {
                        sink.segment_break();
                        summary.segment_breaks += 1;
                    }
                }
                sink.push(symbol);
                summary.symbols += 1;
                continue;
            }
            let offset = local.offset + i as u64;
            if byte == b'\n' {
                local.line += 1;
                local.line_start = offset + 1;
                local.at_line_start = true;
                local.in_header = false;
                continue;
            }
            if local.in_header {
                continue;
            }
            if fasta && local.at_line_start && byte == b'>' {
                local.in_header = true;
                local.at_line_start = false;
                local.pending_break = true;
                local.in_record = false;
                continue;
            }
            local.at_line_start = false;
            if symbol == UNKNOWN {
                match self.policy {
                    UnknownPolicy::Skip => {
                        summary.skipped += 1;
                        local.pending_break = true;
                    }
                    UnknownPolicy::Error => {
                        unknown = Some((byte as char, local.line, offset - local.line_start + 1));
                        break;
                    }
                }
            }
        }
        local.offset += chunk.len() as u64;
        *st = local;
        scan.summary = summary;
        unknown
    }
}

#[derive(Clone, Copy)]
struct State {
    line: u64,
    line_start: u64,
    offset: u64,
    at_line_start: bool,
    in_header: bool,
    pending_break: bool,
    in_record: bool,
}

/// Result of [`Ingester::run`]: counts so far and the first rejected symbol
/// under [`UnknownPolicy::Error`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Scan {
    pub summary: IngestSummary,
    pub unknown: Option<(char, u64, u64)>,
}

fn open(path: &Path) -> Result<Box<dyn Read>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(io::stdin().lock()));
    }
    File::open(path)
        .map(|f| Box::new(f) as Box<dyn Read>)
        .map_err(|e| CliError::io(path, e))
}

fn finish(scan: Scan) -> Result<IngestSummary> {
    if let Some((symbol, line, column)) = scan.unknown {
        return Err(CliError::UnknownSymbol {
            symbol,
            line,
            column,
        });
    }
    if scan.summary.symbols == 0 {
        return Err(CliError::EmptyInput);
    }
    Ok(scan.summary)
}

/// Streams a file into `sink`. `"-"` reads standard input.
pub fn ingest_into<S: SymbolSink>(
    path: &Path,
    format: SequenceFormat,
    alphabet: &Alphabet,
    policy: UnknownPolicy,
    sink: &mut S,
) -> Result<IngestSummary> {
    let ingester = Ingester::new(alphabet, format, policy)?;
    let scan = ingester
        .run(open(path)?, sink)
        .map_err(|e| CliError::io(path, e))?;
    finish(scan)
}

/// The ingested sequence held in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ingested {
    pub sequence: SymbolSequence,
    /// Positions `p` such that symbols `p - 1` and `p` are not adjacent.
    pub segment_breaks: Vec<usize>,
    pub summary: IngestSummary,
}

pub fn ingest(
    path: &Path,
    format: SequenceFormat,
    alphabet: &Alphabet,
    policy: UnknownPolicy,
) -> Result<Ingested> {
    let mut sink = CollectingSink::default();
    let summary = ingest_into(path, format, alphabet, policy, &mut sink)?;
    Ok(Ingested {
        sequence: SymbolSequence::new(alphabet.len(), sink.symbols)?,
        segment_breaks: sink.breaks,
        summary,
    })
}

/// Pair tables of a file in one pass, without keeping the sequence.
pub fn ingest_pair_tables(
    path: &Path,
    format: SequenceFormat,
    alphabet: &Alphabet,
    policy: UnknownPolicy,
) -> Result<(PairTables, IngestSummary)> {
    let mut builder = PairTableBuilder::new(alphabet.len());
    let summary = ingest_into(path, format, alphabet, policy, &mut builder)?;
    Ok((builder.finish(), summary))
}
