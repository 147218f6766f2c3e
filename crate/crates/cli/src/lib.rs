//! Command-line harness: matrix generation, timing, verification, rank.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use f2lu::format::{self, Format};
use f2lu::verify::check_factorization;
use f2lu::{decompose, BitMatrix, DecomposeOptions, LuFactors, RowPermutation, Variant, WordWidth};

/// Largest size accepted without `--allow-large`.
pub const DEFAULT_SIZE_LIMIT: usize = 16384;

pub const CSV_HEADER: &str = "n,b,c,variant,time_ms,rank";

#[derive(Debug, Parser)]
#[command(name = "f2lu", version, about = "Dense GF(2) factorization toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write random matrices to disk.
    Gen(GenArgs),
    /// Time decompositions and print CSV.
    Bench(BenchArgs),
    /// Check factorization invariants on a file or on generated matrices.
    Verify(VerifyArgs),
    /// Print the rank of a matrix file.
    Rank(RankArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Binary,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Binary => Format::Binary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Block,
    Recursive,
    Both,
}

impl VariantArg {
    pub fn variants(self) -> Vec<Variant> {
        match self {
            VariantArg::Block => vec![Variant::Block],
            VariantArg::Recursive => vec![Variant::Recursive],
            VariantArg::Both => vec![Variant::Block, Variant::Recursive],
        }
    }
}

/// Table size: `auto` or an integer in `2..=16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableSize(pub Option<usize>);

impl std::str::FromStr for TableSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(TableSize(None));
        }
        match s.parse::<usize>() {
            Ok(c) if (2..=16).contains(&c) => Ok(TableSize(Some(c))),
            _ => Err(format!("expected auto or an integer in 2..=16, got {s:?}")),
        }
    }
}

impl fmt::Display for TableSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(c) => write!(f, "{c}"),
            None => f.write_str("auto"),
        }
    }
}

/// Nonzeros per row: one count `K` or an inclusive range `A..=B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OnesSpec {
    pub lo: usize,
    pub hi: usize,
}

impl OnesSpec {
    pub fn counts(self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }

    pub fn is_range(self) -> bool {
        self.lo != self.hi
    }
}

impl std::str::FromStr for OnesSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad count {t:?}"));
        if let Some((a, b)) = s.split_once("..=") {
            let (lo, hi) = (num(a)?, num(b)?);
            if lo > hi {
                return Err(format!("empty range {s:?}"));
            }
            Ok(OnesSpec { lo, hi })
        } else {
            let k = num(s)?;
            Ok(OnesSpec { lo: k, hi: k })
        }
    }
}

fn parse_width(s: &str) -> Result<WordWidth, String> {
    s.parse::<u32>()
        .ok()
        .and_then(|b| WordWidth::new(b).ok())
        .ok_or_else(|| format!("expected one of 8, 16, 32, 64, got {s:?}"))
}

/// How matrices are generated.
#[derive(Debug, Clone, Args)]
pub struct MatrixSource {
    /// Columns (defaults to the row count).
    #[arg(long)]
    pub m: Option<usize>,
    /// Probability of a one.
    #[arg(long, default_value_t = 0.5, conflicts_with = "per_row_ones")]
    pub density: f64,
    /// Exactly K ones per row, or a sweep A..=B.
    #[arg(long)]
    pub per_row_ones: Option<OnesSpec>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub source: MatrixSource,
    #[arg(long, default_value = "64", value_parser = parse_width)]
    pub b: WordWidth,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    /// Output file, or output directory for a per-row-ones sweep.
    #[arg(long)]
    pub out: PathBuf,
    /// Permit sizes above 16384.
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Comma-separated row counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[command(flatten)]
    pub source: MatrixSource,
    #[arg(long, default_value = "64", value_parser = parse_width)]
    pub b: WordWidth,
    #[arg(long, default_value = "auto")]
    pub c: TableSize,
    #[arg(long, value_enum, default_value_t = VariantArg::Both)]
    pub variant: VariantArg,
    /// Repetitions per measurement; the minimum is reported.
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Matrix file to check; when absent, matrices are generated.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub source: MatrixSource,
    /// Number of generated matrices, with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long, default_value = "64", value_parser = parse_width)]
    pub b: WordWidth,
    #[arg(long, default_value = "auto")]
    pub c: TableSize,
    #[arg(long, value_enum, default_value_t = VariantArg::Both)]
    pub variant: VariantArg,
    /// Flip one bit of L before checking (exercises the failure path).
    #[arg(long, hide = true)]
    pub corrupt_l: bool,
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RankArgs {
    pub path: PathBuf,
    /// Word width used to pack text input.
    #[arg(long, default_value = "64", value_parser = parse_width)]
    pub b: WordWidth,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] f2lu::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0} invariant violation(s)")]
    Violations(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violations(_) => 1,
            _ => 2,
        }
    }
}

/// Measures the duration of a closure.
pub trait Clock {
    fn measure(&mut self, f: &mut dyn FnMut()) -> Duration;
}

pub struct WallClock;

impl Clock for WallClock {
    fn measure(&mut self, f: &mut dyn FnMut()) -> Duration {
        let start = Instant::now();
        f();
        start.elapsed()
    }
}

/// Runs the closure and reports a fixed duration.
pub struct FixedClock(pub Duration);

impl Clock for FixedClock {
    fn measure(&mut self, f: &mut dyn FnMut()) -> Duration {
        f();
        self.0
    }
}

/// One generated matrix with its sweep label.
pub struct Sample {
    pub n: usize,
    pub ones: Option<usize>,
    pub matrix: BitMatrix,
}

fn check_size(n: usize, m: usize, allow_large: bool) -> Result<(), CliError> {
    if n == 0 || m == 0 {
        return Err(CliError::Usage("sizes must be positive".into()));
    }
    if !allow_large && n.max(m) > DEFAULT_SIZE_LIMIT {
        return Err(CliError::Usage(format!(
            "size {} exceeds {DEFAULT_SIZE_LIMIT}; pass --allow-large to proceed",
            n.max(m)
        )));
    }
    Ok(())
}

/// All matrices described by `source` for `n` rows and the given seed.
pub fn generate(
    n: usize,
    source: &MatrixSource,
    seed: u64,
    width: WordWidth,
    allow_large: bool,
) -> Result<Vec<Sample>, CliError> {
    let m = source.m.unwrap_or(n);
    check_size(n, m, allow_large)?;
    match source.per_row_ones {
        Some(spec) => spec
            .counts()
            .map(|i| {
                Ok(Sample {
                    n,
                    ones: Some(i),
                    matrix: BitMatrix::random_sparse_rows(n, m, i, seed, width)?,
                })
            })
            .collect(),
        None => Ok(vec![Sample {
            n,
            ones: None,
            matrix: BitMatrix::random_dense(n, m, source.density, seed, width)?,
        }]),
    }
}

pub fn cmd_gen(args: &GenArgs, log: &mut dyn Write) -> Result<(), CliError> {
    let samples = generate(args.n, &args.source, args.source.seed, args.b, args.allow_large)?;
    let fmt = Format::from(args.format);
    let sweep = args.source.per_row_ones.is_some_and(OnesSpec::is_range);
    if sweep {
        fs::create_dir_all(&args.out)?;
    }
    let ext = match args.format {
        FormatArg::Text => "txt",
        FormatArg::Binary => "f2mx",
    };
    for s in &samples {
        let path = if sweep {
            args.out
                .join(format!("sparse_n{}_i{}.{ext}", s.n, s.ones.expect("sweep sample")))
        } else {
            args.out.clone()
        };
        format::save(&s.matrix, &path, fmt)?;
        writeln!(log, "wrote {}", path.display())?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub b: usize,
    pub c: TableSize,
    pub variant: Variant,
    pub time_ms: f64,
    pub rank: usize,
}

impl BenchRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{:.3},{}",
            self.n,
            self.b,
            self.c,
            self.variant.name(),
            self.time_ms,
            self.rank
        )
    }
}

/// Minimum over `reps` timed decompositions (generation excluded).
pub fn time_decomposition(
    a: &BitMatrix,
    variant: Variant,
    opts: &DecomposeOptions,
    reps: usize,
    clock: &mut dyn Clock,
) -> (Duration, usize) {
    let mut best = Duration::MAX;
    let mut rank = 0;
    for _ in 0..reps.max(1) {
        let mut run = || rank = decompose(a, variant, opts).rank();
        best = best.min(clock.measure(&mut run));
    }
    (best, rank)
}

/// Benchmark rows in order: sizes, then per-row-ones counts, then variants.
pub fn bench_rows(args: &BenchArgs, clock: &mut dyn Clock) -> Result<Vec<BenchRow>, CliError> {
    if args.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    let opts = DecomposeOptions {
        table_size: args.c.0,
        ..DecomposeOptions::default()
    };
    let mut rows = Vec::new();
    for &n in &args.n {
        for sample in generate(n, &args.source, args.source.seed, args.b, args.allow_large)? {
            for variant in args.variant.variants() {
                let (t, rank) = time_decomposition(&sample.matrix, variant, &opts, args.reps, clock);
                rows.push(BenchRow {
                    n,
                    b: args.b.bits(),
                    c: args.c,
                    variant,
                    time_ms: t.as_secs_f64() * 1e3,
                    rank,
                });
            }
        }
    }
    Ok(rows)
}

pub fn cmd_bench(args: &BenchArgs, clock: &mut dyn Clock, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = bench_rows(args, clock)?;
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for row in &rows {
        text.push_str(&row.csv());
        text.push('\n');
    }
    match &args.out {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Flips one entry of `L` inside its lower triangle.
fn corrupt(f: LuFactors) -> LuFactors {
    let (p, mut l, u, ranks): (RowPermutation, BitMatrix, BitMatrix, Vec<usize>) = f.into_parts();
    if l.n_rows() > 0 && l.n_cols() > 0 {
        let i = l.n_rows() - 1;
        let v = l.get(i, 0);
        l.set(i, 0, !v);
    }
    LuFactors::from_parts(p, l, u, ranks)
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut cases: Vec<(String, BitMatrix)> = Vec::new();
    match (&args.input, args.n) {
        (Some(path), None) => cases.push((path.display().to_string(), format::load(path, args.b)?)),
        (None, Some(n)) => {
            for t in 0..args.count {
                let seed = args.source.seed.wrapping_add(t);
                for s in generate(n, &args.source, seed, args.b, args.allow_large)? {
                    let label = match s.ones {
                        Some(i) => format!("n={n} i={i} seed={seed}"),
                        None => format!("n={n} density={} seed={seed}", args.source.density),
                    };
                    cases.push((label, s.matrix));
                }
            }
        }
        _ => return Err(CliError::Usage("give exactly one of --input or --n".into())),
    }
    let opts = DecomposeOptions {
        table_size: args.c.0,
        ..DecomposeOptions::default()
    };
    let mut failures = 0;
    for (label, a) in &cases {
        for variant in args.variant.variants() {
            let mut f = decompose(a, variant, &opts);
            if args.corrupt_l {
                f = corrupt(f);
            }
            let issues = check_factorization(a, &f);
            if issues.is_empty() {
                writeln!(out, "PASS {label} variant={} rank={}", variant.name(), f.rank())?;
            } else {
                failures += issues.len();
                for issue in issues {
                    writeln!(out, "FAIL {label} variant={}: {issue}", variant.name())?;
                }
            }
        }
    }
    if failures > 0 {
        Err(CliError::Violations(failures))
    } else {
        Ok(())
    }
}

pub fn cmd_rank(args: &RankArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let a = format::load(&args.path, args.b)?;
    writeln!(out, "{}", f2lu::rank(&a))?;
    Ok(())
}

/// Runs a parsed command, writing results to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen(args) => cmd_gen(args, out),
        Command::Bench(args) => cmd_bench(args, &mut WallClock, out),
        Command::Verify(args) => cmd_verify(args, out),
        Command::Rank(args) => cmd_rank(args, out),
    }
}
