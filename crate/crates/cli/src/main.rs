//! `kem`: solve, classify, generate, census and conjecture workflows for
//! k-edge-magic labelings.
//!
//! Exit status: 0 on success (or a positive answer), 1 on a negative answer,
//! 2 on usage or input errors (every error path).

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kem_core::census::{self, CensusMode, CensusOptions, ReportFormat, Store};
use kem_core::generators::{self, Family, SparseSpec};
use kem_core::{classify, emit_graph6, enumerate_labelings, is_k_em, parse_graph6, Caps};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "kem", version, about = "Exact k-edge-magic labeling solver and census")]
struct Cli {
    #[command(flatten)]
    caps: CapArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CapArgs {
    /// Largest order accepted by canonicalization, generators and censuses.
    #[arg(long, global = true, env = "KEM_P_MAX", default_value_t = 10, value_parser = clap::value_parser!(u16).range(1..=64))]
    p_max: u16,
    /// Largest order accepted by the sparse-graph generator.
    #[arg(long, global = true, env = "KEM_P_SPARSE", default_value_t = 8, value_parser = clap::value_parser!(u16).range(1..))]
    p_sparse: u16,
    /// Largest edge count for the brute-force oracle.
    #[arg(long, global = true, env = "KEM_Q_BRUTE", default_value_t = 8, value_parser = clap::value_parser!(u16).range(1..))]
    q_brute: u16,
    /// Largest edge count for `solve --all`.
    #[arg(long, global = true, env = "KEM_Q_ENUM", default_value_t = 12, value_parser = clap::value_parser!(u16).range(1..))]
    q_enum: u16,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps {
            p_max: self.p_max.into(),
            p_sparse: self.p_sparse.into(),
            q_brute: self.q_brute.into(),
            q_enum: self.q_enum.into(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Find a k-edge-magic labeling of one graph6 record.
    Solve {
        graph6: String,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        /// Print every residue-distinct witness instead of the first one.
        #[arg(long)]
        all: bool,
        /// Stop after this many witnesses with --all.
        #[arg(long, requires = "all")]
        limit: Option<usize>,
    },
    /// Print "graph6<TAB>spectrum" for each record of a graph6 stream.
    Classify {
        /// Input file, or "-" for standard input.
        #[arg(default_value = "-")]
        source: String,
    },
    /// Write graphs as graph6 lines.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Classify a graph6 stream and write a report.
    Census(CensusArgs),
    /// Check that every maximal outerplanar graph of prime order p has spectrum {2}.
    Conjecture {
        #[arg(conflicts_with = "p_flag", required_unless_present = "p_flag")]
        p: Option<usize>,
        #[arg(long = "p", id = "p_flag")]
        p_flag: Option<usize>,
        #[arg(long, env = "KEM_JOBS", default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
    },
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Maximal outerplanar graphs of order p, one per isomorphism class.
    Mop {
        #[arg(conflicts_with = "p_flag", required_unless_present = "p_flag")]
        p: Option<usize>,
        #[arg(long = "p", id = "p_flag")]
        p_flag: Option<usize>,
    },
    /// Graphs with p vertices and p - h edges, one per isomorphism class.
    Sparse {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        connected_only: bool,
    },
    /// A named family: path, cycle, star, complete, fan, wheel, friendship.
    Family { name: String, n: usize },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Spectrum,
    KList,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Args)]
struct CensusArgs {
    /// Input file, or "-" for standard input.
    #[arg(default_value = "-")]
    source: String,
    #[arg(long, value_enum, default_value = "spectrum")]
    mode: Mode,
    /// Values of k for --mode=k-list (repeatable).
    #[arg(long = "k")]
    ks: Vec<u64>,
    #[arg(long, value_enum, env = "KEM_FORMAT", default_value = "csv")]
    format: Format,
    /// Persistent JSONL store of computed rows.
    #[arg(long, env = "KEM_STORE")]
    store: Option<PathBuf>,
    /// Report destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "KEM_JOBS", default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
}

fn open_source(source: &str) -> Result<Box<dyn BufRead>> {
    if source == "-" {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let file = File::open(source).with_context(|| format!("cannot open {source}"))?;
    Ok(Box::new(BufReader::new(file)))
}

fn solve(graph6: &str, k: i64, all: bool, limit: Option<usize>, caps: &Caps) -> Result<u8> {
    if k < 0 {
        bail!("k must be nonnegative, got {k}");
    }
    let g = parse_graph6(graph6).context("malformed graph6 record")?;
    let k = k as u64;
    let mut out = io::stdout().lock();
    if all {
        if g.q() > caps.q_enum {
            bail!("graph has {} edges; --all is limited to {} (see --q-enum)", g.q(), caps.q_enum);
        }
        let witnesses = enumerate_labelings(&g, k, limit.unwrap_or(usize::MAX));
        for w in &witnesses {
            writeln!(out, "{}", w.to_json())?;
        }
        if witnesses.is_empty() {
            writeln!(out, "none")?;
            return Ok(EXIT_NEGATIVE);
        }
        return Ok(0);
    }
    match is_k_em(&g, k) {
        Some(w) => {
            writeln!(out, "{}", w.to_json())?;
            Ok(0)
        }
        None => {
            writeln!(out, "none")?;
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn classify_stream(source: &str) -> Result<u8> {
    let reader = open_source(source)?;
    let mut out = BufWriter::new(io::stdout().lock());
    let mut bad = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let record = line.trim_end();
        if record.trim().is_empty() {
            continue;
        }
        match parse_graph6(record) {
            Ok(g) => writeln!(out, "{record}\t{}", classify(&g))?,
            Err(e) => {
                bad += 1;
                eprintln!("line {}: {e}", i + 1);
            }
        }
    }
    out.flush()?;
    Ok(if bad > 0 { EXIT_USAGE } else { 0 })
}

fn generate(kind: GenerateKind, caps: &Caps) -> Result<u8> {
    let graphs = match kind {
        GenerateKind::Mop { p, p_flag } => {
            let p = p.or(p_flag).expect("clap requires one of them");
            generators::generate_mops(p, caps)?
        }
        GenerateKind::Sparse { p, h, connected_only } => {
            generators::generate_sparse_graphs(SparseSpec::new(p, h)?, connected_only, caps)?
        }
        GenerateKind::Family { name, n } => vec![generators::named_family(name.parse::<Family>()?, n)?],
    };
    let mut out = BufWriter::new(io::stdout().lock());
    for g in &graphs {
        writeln!(out, "{}", emit_graph6(g))?;
    }
    out.flush()?;
    Ok(0)
}

fn run_census(args: CensusArgs, caps: Caps) -> Result<u8> {
    let mode = match args.mode {
        Mode::Spectrum => {
            if !args.ks.is_empty() {
                bail!("--k is only meaningful with --mode=k-list");
            }
            CensusMode::Spectrum
        }
        Mode::KList => {
            if args.ks.is_empty() {
                bail!("--mode=k-list needs at least one --k");
            }
            CensusMode::KList(args.ks.clone())
        }
    };
    let format = match args.format {
        Format::Csv => ReportFormat::Csv,
        Format::Jsonl => ReportFormat::Jsonl,
    };
    let options = CensusOptions {
        caps,
        jobs: args.jobs.into(),
    };
    let mut store = args.store.as_ref().map(Store::open).transpose()?;
    let reader = open_source(&args.source)?;
    let outcome = census::run_census(census::read_graph6_stream(reader), &mode, &options, store.as_mut())?;
    for e in &outcome.errors {
        eprintln!("line {}: {}", e.line, e.message);
    }

    match &args.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
            census::report_emit(&outcome.rows, format, BufWriter::new(file))?;
        }
        None => census::report_emit(&outcome.rows, format, BufWriter::new(io::stdout().lock()))?,
    }
    eprintln!(
        "{} rows ({} from store), {} unreadable records",
        outcome.rows.len(),
        outcome.reused,
        outcome.errors.len()
    );
    Ok(if outcome.errors.is_empty() { 0 } else { EXIT_USAGE })
}

fn conjecture(p: usize, jobs: u16, caps: Caps) -> Result<u8> {
    let options = CensusOptions {
        caps,
        jobs: jobs.into(),
    };
    let verdict = census::check_mop_conjecture(p, &options)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{}", if verdict.holds { "HOLDS" } else { "FAILS" })?;
    let admits: Vec<String> = verdict.filter_admits.iter().map(|k| k.to_string()).collect();
    writeln!(out, "p={} mops={} filter-admits={}", p, verdict.mop_count, admits.join(";"))?;
    for (code, spectrum) in &verdict.counterexamples {
        writeln!(out, "counterexample {code}\t{spectrum}")?;
    }
    if verdict.beyond_proved_range {
        writeln!(out, "note: order {p} is beyond the established cases; this is computed evidence")?;
    }
    Ok(if verdict.holds { 0 } else { EXIT_NEGATIVE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = cli.caps.caps();
    let result = match cli.command {
        Command::Solve { graph6, k, all, limit } => solve(&graph6, k, all, limit, &caps),
        Command::Classify { source } => classify_stream(&source),
        Command::Generate { kind } => generate(kind, &caps),
        Command::Census(args) => run_census(args, caps),
        Command::Conjecture { p, p_flag, jobs } => {
            conjecture(p.or(p_flag).expect("clap requires one of them"), jobs, caps)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
