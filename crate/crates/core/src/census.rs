//! Spectrum censuses over graph streams, the persistent result store, reports,
//! and the prime-order MOP conjecture check.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{canonical_form_capped, CanonError, CanonicalCode};
use crate::config::Caps;
use crate::generators::{generate_mops_coded, GenError};
use crate::graph::Graph;
use crate::graph6::{emit_graph6, parse_graph6};
use crate::solver::{counting_condition, counting_filter, decide, verify_labeling, KOutcome, KSpectrum, Witness};

/// Stored rows carry this tag; rows written by another solver version are ignored.
pub const SOLVER_VERSION: &str = "kem-solver/1";

/// Orders for which the MOP classification is established outright.
pub const PROVED_ORDERS: [usize; 3] = [4, 5, 7];

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("{0} is not prime")]
    NotPrime(usize),
    #[error("the conjecture check needs a prime order of at least 5, got {0}")]
    OrderTooSmall(usize),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("store {path}: line {line}: {message}")]
    Store { path: PathBuf, line: usize, message: String },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A source record that could not be read; the census skips it and goes on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceError {
    pub line: usize,
    pub message: String,
}

/// Which residues `k` a census examines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CensusMode {
    /// Every residue `0..p`.
    Spectrum,
    /// Only the given `k`, each reduced mod `p`.
    KList(Vec<u64>),
}

impl CensusMode {
    pub fn residues(&self, p: usize) -> BTreeSet<usize> {
        match self {
            CensusMode::Spectrum => (0..p).collect(),
            CensusMode::KList(ks) => ks.iter().map(|&k| (k % p as u64) as usize).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Skipped,
}

/// Why a residue is missing from a row's spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rejection {
    /// Excluded by the counting condition.
    Filter,
    /// Exhaustive search found nothing.
    Search,
}

/// Census result for one isomorphism class. The row describes the canonical
/// representative: `graph6` is its record and witnesses label its edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub code: CanonicalCode,
    pub graph6: String,
    pub p: usize,
    pub q: usize,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Residues that were examined.
    pub checked: BTreeSet<usize>,
    pub spectrum: KSpectrum,
    pub witnesses: BTreeMap<usize, Witness>,
    pub rejected: BTreeMap<usize, Rejection>,
}

impl CensusRow {
    fn skipped(g: &Graph, reason: String) -> Self {
        let graph6 = emit_graph6(g);
        Self {
            code: CanonicalCode::from_raw(graph6.clone()),
            graph6,
            p: g.p(),
            q: g.q(),
            status: RowStatus::Skipped,
            reason: Some(reason),
            checked: BTreeSet::new(),
            spectrum: KSpectrum::new(g.p(), []),
            witnesses: BTreeMap::new(),
            rejected: BTreeMap::new(),
        }
    }

    /// Classifies the canonical representative of `code` at each residue in `residues`.
    pub fn compute(code: &CanonicalCode, residues: &BTreeSet<usize>) -> Self {
        let g = code.to_graph();
        let mut witnesses = BTreeMap::new();
        let mut rejected = BTreeMap::new();
        for &k in residues {
            match decide(&g, k as u64) {
                KOutcome::Magic(w) => {
                    witnesses.insert(k, w);
                }
                KOutcome::FilteredOut => {
                    rejected.insert(k, Rejection::Filter);
                }
                KOutcome::Exhausted => {
                    rejected.insert(k, Rejection::Search);
                }
            }
        }
        Self {
            code: code.clone(),
            graph6: code.as_str().to_string(),
            p: g.p(),
            q: g.q(),
            status: RowStatus::Ok,
            reason: None,
            checked: residues.clone(),
            spectrum: KSpectrum::new(g.p(), witnesses.keys().copied()),
            witnesses,
            rejected,
        }
    }

    /// The same row restricted to `residues`, or `None` if some of them were never examined.
    fn project(&self, residues: &BTreeSet<usize>) -> Option<Self> {
        if self.status != RowStatus::Ok || !residues.is_subset(&self.checked) {
            return None;
        }
        let keep = |k: &usize| residues.contains(k);
        Some(Self {
            checked: residues.clone(),
            spectrum: KSpectrum::new(self.p, self.spectrum.members.iter().copied().filter(keep)),
            witnesses: self.witnesses.iter().filter(|(k, _)| keep(k)).map(|(&k, w)| (k, w.clone())).collect(),
            rejected: self.rejected.iter().filter(|(k, _)| keep(k)).map(|(&k, &r)| (k, r)).collect(),
            ..self.clone()
        })
    }

    fn merge(&mut self, other: CensusRow) {
        self.checked.extend(other.checked);
        self.spectrum.members.extend(other.spectrum.members);
        self.witnesses.extend(other.witnesses);
        self.rejected.extend(other.rejected);
    }

    /// Checks the row against its graph: every spectrum member has a verifying
    /// witness at that `k`, and every other examined residue is either excluded
    /// by the counting condition or was searched (and is not excluded).
    pub fn audit(&self) -> Result<(), String> {
        if self.status == RowStatus::Skipped {
            return Ok(());
        }
        let g = parse_graph6(&self.graph6).map_err(|e| format!("bad graph6: {e}"))?;
        if (g.p(), g.q()) != (self.p, self.q) {
            return Err("p or q disagrees with graph6".into());
        }
        for &k in &self.checked {
            let in_spectrum = self.spectrum.members.contains(&k);
            match (in_spectrum, self.witnesses.get(&k), self.rejected.get(&k)) {
                (true, Some(w), None) => {
                    if w.k() % self.p as u64 != k as u64 {
                        return Err(format!("witness for k={k} uses base {}", w.k()));
                    }
                    let verdict = verify_labeling(&g, &w.labeling).map_err(|e| e.to_string())?;
                    if !verdict.is_valid() {
                        return Err(format!("witness for k={k} does not verify: {verdict:?}"));
                    }
                }
                (false, None, Some(Rejection::Filter)) if !counting_filter(&g, k as u64) => {}
                (false, None, Some(Rejection::Search)) if counting_filter(&g, k as u64) => {}
                _ => return Err(format!("inconsistent record for k={k}")),
            }
        }
        if !self.spectrum.members.is_subset(&self.checked) {
            return Err("spectrum lists an unexamined residue".into());
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct StoreRecord {
    solver: String,
    row: CensusRow,
}

/// Append-only JSONL store of computed rows, keyed by canonical code.
pub struct Store {
    path: PathBuf,
    rows: HashMap<CanonicalCode, CensusRow>,
    writer: BufWriter<File>,
}

impl Store {
    /// Opens (or creates) the store at `path` and loads its rows. Later lines
    /// for the same code extend earlier ones.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, CensusError> {
        let path = path.as_ref().to_path_buf();
        let mut rows: HashMap<CanonicalCode, CensusRow> = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: StoreRecord = serde_json::from_str(&line).map_err(|e| CensusError::Store {
                    path: path.clone(),
                    line: i + 1,
                    message: e.to_string(),
                })?;
                if record.solver != SOLVER_VERSION || record.row.status != RowStatus::Ok {
                    continue;
                }
                match rows.get_mut(&record.row.code) {
                    Some(existing) => existing.merge(record.row),
                    None => {
                        rows.insert(record.row.code.clone(), record.row);
                    }
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self {
            path,
            rows,
            writer: BufWriter::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn lookup(&self, code: &CanonicalCode, residues: &BTreeSet<usize>) -> Option<CensusRow> {
        self.rows.get(code)?.project(residues)
    }

    fn append(&mut self, row: &CensusRow) -> Result<(), CensusError> {
        let record = StoreRecord {
            solver: SOLVER_VERSION.to_string(),
            row: row.clone(),
        };
        serde_json::to_writer(&mut self.writer, &record).map_err(io::Error::from)?;
        self.writer.write_all(b"\n")?;
        self.writer.flush()?;
        match self.rows.get_mut(&row.code) {
            Some(existing) => existing.merge(row.clone()),
            None => {
                self.rows.insert(row.code.clone(), row.clone());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    pub caps: Caps,
    /// Worker threads used for classification; at least 1.
    pub jobs: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            caps: Caps::default(),
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CensusOutcome {
    /// One row per isomorphism class, ordered by canonical code.
    pub rows: Vec<CensusRow>,
    pub errors: Vec<SourceError>,
    /// Rows taken from the store instead of being recomputed.
    pub reused: usize,
}

/// Reads graph6 records one per line, numbering lines from 1 and skipping blank ones.
pub fn read_graph6_stream<R: BufRead>(reader: R) -> impl Iterator<Item = Result<Graph, SourceError>> {
    reader.lines().enumerate().filter_map(|(i, line)| {
        let line_no = i + 1;
        match line {
            Err(e) => Some(Err(SourceError {
                line: line_no,
                message: e.to_string(),
            })),
            Ok(text) if text.trim().is_empty() => None,
            Ok(text) => Some(parse_graph6(text.trim_end()).map_err(|e| SourceError {
                line: line_no,
                message: e.to_string(),
            })),
        }
    })
}

/// Classifies every isomorphism class in `source`. Classes already in `store`
/// (for the needed residues) are reused; new rows are appended to it.
pub fn run_census<I>(
    source: I,
    mode: &CensusMode,
    options: &CensusOptions,
    mut store: Option<&mut Store>,
) -> Result<CensusOutcome, CensusError>
where
    I: IntoIterator<Item = Result<Graph, SourceError>>,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.max(1))
        .build()
        .map_err(|e| CensusError::Pool(e.to_string()))?;
    let mut errors = Vec::new();
    let mut graphs = Vec::new();
    for item in source {
        match item {
            Ok(g) => graphs.push(g),
            Err(e) => errors.push(e),
        }
    }

    let p_max = options.caps.p_max;
    let codes: Vec<Result<CanonicalCode, CanonError>> =
        pool.install(|| graphs.par_iter().map(|g| canonical_form_capped(g, p_max)).collect());

    let mut rows: BTreeMap<CanonicalCode, CensusRow> = BTreeMap::new();
    let mut pending: BTreeMap<CanonicalCode, BTreeSet<usize>> = BTreeMap::new();
    let mut reused = 0;
    for (g, code) in graphs.iter().zip(codes) {
        let code = match code {
            Ok(code) => code,
            Err(e) => {
                let row = CensusRow::skipped(g, e.to_string());
                rows.entry(row.code.clone()).or_insert(row);
                continue;
            }
        };
        if rows.contains_key(&code) || pending.contains_key(&code) {
            continue;
        }
        let residues = mode.residues(g.p());
        match store.as_deref().and_then(|s| s.lookup(&code, &residues)) {
            Some(row) => {
                reused += 1;
                rows.insert(code, row);
            }
            None => {
                pending.insert(code, residues);
            }
        }
    }

    let computed: Vec<CensusRow> = pool.install(|| {
        pending
            .par_iter()
            .map(|(code, residues)| CensusRow::compute(code, residues))
            .collect()
    });
    for row in computed {
        if let Some(store) = store.as_deref_mut() {
            store.append(&row)?;
        }
        rows.insert(row.code.clone(), row);
    }

    Ok(CensusOutcome {
        rows: rows.into_values().collect(),
        errors,
        reused,
    })
}

/// Rows whose spectrum contains `k` (reduced mod each row's order).
pub fn magic_sublist(rows: &[CensusRow], k: u64) -> Vec<&CensusRow> {
    rows.iter()
        .filter(|r| r.status == RowStatus::Ok && r.spectrum.contains(k))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Jsonl,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "jsonl" => Ok(ReportFormat::Jsonl),
            other => Err(format!("unknown report format {other:?} (expected csv or jsonl)")),
        }
    }
}

pub const CSV_HEADER: &str = "graph6,p,q,spectrum";

/// Writes the rows as CSV (`graph6,p,q,spectrum`, spectrum `;`-joined, `-` when
/// empty, `skipped` for skipped rows) or as one JSON row per line.
pub fn report_emit<W: Write>(rows: &[CensusRow], format: ReportFormat, mut out: W) -> io::Result<()> {
    match format {
        ReportFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for row in rows {
                let spectrum = match row.status {
                    RowStatus::Ok => row.spectrum.to_string(),
                    RowStatus::Skipped => "skipped".to_string(),
                };
                writeln!(out, "{},{},{},{}", row.graph6, row.p, row.q, spectrum)?;
            }
        }
        ReportFormat::Jsonl => {
            for row in rows {
                serde_json::to_writer(&mut out, row)?;
                out.write_all(b"\n")?;
            }
        }
    }
    out.flush()
}

pub fn load_jsonl<R: BufRead>(reader: R) -> io::Result<Vec<CensusRow>> {
    reader
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|line| serde_json::from_str(&line?).map_err(io::Error::from))
        .collect()
}

/// Outcome of checking that every MOP of a prime order `p` has spectrum `{2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureVerdict {
    pub p: usize,
    pub holds: bool,
    pub mop_count: usize,
    /// MOPs whose spectrum differs from `{2 mod p}`.
    pub counterexamples: Vec<(CanonicalCode, KSpectrum)>,
    /// Residues admitted by the counting condition at `q = 2p - 3`.
    pub filter_admits: Vec<usize>,
    /// True for orders outside the established cases.
    pub beyond_proved_range: bool,
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Residues `k` that pass the counting condition for a MOP of order `p`.
pub fn mop_filter_residues(p: usize) -> Vec<usize> {
    let q = 2 * p - 3;
    (0..p).filter(|&k| counting_condition(p, q, k as u64)).collect()
}

pub fn check_mop_conjecture(p: usize, options: &CensusOptions) -> Result<ConjectureVerdict, CensusError> {
    if !is_prime(p) {
        return Err(CensusError::NotPrime(p));
    }
    if p < 5 {
        return Err(CensusError::OrderTooSmall(p));
    }
    let mops = generate_mops_coded(p, &options.caps)?;
    let outcome = run_census(
        mops.iter().map(|(_, g)| Ok(g.clone())),
        &CensusMode::Spectrum,
        options,
        None,
    )?;
    let expected = KSpectrum::new(p, [2 % p]);
    let counterexamples: Vec<_> = outcome
        .rows
        .iter()
        .filter(|r| r.status != RowStatus::Ok || r.spectrum != expected)
        .map(|r| (r.code.clone(), r.spectrum.clone()))
        .collect();
    Ok(ConjectureVerdict {
        p,
        holds: counterexamples.is_empty(),
        mop_count: outcome.rows.len(),
        counterexamples,
        filter_admits: mop_filter_residues(p),
        beyond_proved_range: !PROVED_ORDERS.contains(&p),
    })
}
