//! `binrlt`: kernels, sequences, verification and OEIS comparison from the
//! command line.
//!
//! Exit codes: 0 success, 1 verification failure or mismatch, 2 usage
//! error, 3 I/O or network error.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};

use binrlt::oeis::{self, OeisError};
use binrlt::parity::{binom_parity, f_value, DEFAULT_ORACLE_BOUND};
use binrlt::registry::{self, builtin_entries, RegistryEntry};
use binrlt::transform::{mu, rlt_by_runs, BaseSequence, TransformError};
use binrlt::verifier::{self, VerificationReport, VerifyError};
use binrlt::{CoefficientVector, Oracle, RuleSystem};

#[derive(Parser)]
#[command(
    name = "binrlt",
    version,
    about = "Sums of binomial-coefficient products mod 2 and run length transforms"
)]
struct Cli {
    /// Largest n the direct-summation oracle will accept.
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_BOUND)]
    oracle_bound: u64,
    /// b-file cache directory (default: $BINRLT_CACHE, else the bundled b-files).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parity of C(n, k).
    Parity { n: BigUint, k: BigUint },
    /// F(n, k) for a coefficient vector.
    F {
        #[arg(long, allow_hyphen_values = true)]
        coeffs: CoefficientVector,
        n: BigUint,
        k: BigUint,
    },
    /// Print a(0..count) (or a single a(n)) in b-file format.
    Seq(SeqArgs),
    /// Run length transform of a base sequence, in b-file format.
    Rlt {
        /// Registry name, or a file of base terms S(0), S(1), ...
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = 64)]
        count: u64,
    },
    /// Split an odd n at its most significant 0-bit: prints "a b m".
    Mu { n: BigUint },
    /// Check the identity corpus or a registry entry.
    Verify(VerifyArgs),
    /// Guess residue rules for a coefficient vector from direct sums.
    Conjecture {
        #[arg(long, allow_hyphen_values = true)]
        coeffs: CoefficientVector,
        /// Modulus exponent m: rules are found for a(2^m n + r).
        #[arg(long, default_value_t = 2)]
        max_mod: u32,
        /// Validation bound.
        #[arg(long, default_value_t = 4096)]
        bound: u64,
        /// Fit on indices up to this bound (default: bound / 8, at least 64).
        #[arg(long)]
        samples: Option<u64>,
    },
    /// OEIS b-file operations.
    Oeis {
        #[command(subcommand)]
        command: OeisCommand,
    },
    /// Pascal's triangle mod 2.
    Triangle {
        #[arg(long, default_value_t = 16)]
        rows: u64,
        #[arg(long, value_enum, default_value_t = TriangleFormat::Ascii)]
        format: TriangleFormat,
    },
    /// List registry entries.
    Catalog {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct SeqArgs {
    /// Registry name, nickname or A-number.
    #[arg(long, conflicts_with = "coeffs", required_unless_present = "coeffs")]
    entry: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<CoefficientVector>,
    #[arg(long, value_enum, default_value_t = Method::Rules)]
    method: Method,
    #[arg(long, default_value_t = 64, conflicts_with = "at")]
    count: u64,
    /// Print only a(n); n may have any number of digits.
    #[arg(long)]
    at: Option<BigUint>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Check every statement of the bundled identity corpus.
    #[arg(long, conflicts_with = "entry", required_unless_present = "entry")]
    corpus: bool,
    /// Check that direct sums, rules and the transform agree for an entry.
    #[arg(long)]
    entry: Option<String>,
    /// Use this rule system file instead of the entry's own.
    #[arg(long, requires = "entry")]
    rules: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    bound: u64,
    /// Print every report, not just failures.
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Subcommand)]
enum OeisCommand {
    /// Compare an entry's transform against a b-file.
    Compare {
        #[arg(long)]
        id: String,
        #[arg(long)]
        entry: String,
        #[arg(long, default_value_t = 1000)]
        count: u64,
        /// Never touch the network.
        #[arg(long)]
        offline: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Oracle,
    Rules,
    Rlt,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TriangleFormat {
    Ascii,
    Pbm,
}

/// Check failures are not errors: they print a report and exit 1.
enum CliError {
    /// Exit 2.
    Usage(String),
    /// Exit 3.
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) => m,
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<binrlt::ParityError> for CliError {
    fn from(e: binrlt::ParityError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<binrlt::RuleError> for CliError {
    fn from(e: binrlt::RuleError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<OeisError> for CliError {
    fn from(e: OeisError) -> Self {
        match e {
            OeisError::BadId(_) => CliError::Usage(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

/// Output plus whether a check failed; failures still print their report.
type Outcome = Result<(String, bool), CliError>;

fn ok(out: String) -> Outcome {
    Ok((out, false))
}

fn find_entry(key: &str) -> Result<RegistryEntry, CliError> {
    registry::lookup(key).map_err(|e| CliError::Usage(e.to_string()))
}

fn entry_for_coeffs(c: &CoefficientVector) -> Option<RegistryEntry> {
    builtin_entries()
        .into_iter()
        .find(|e| e.all_coefficients().contains(c))
}

fn bline(out: &mut String, n: impl std::fmt::Display, v: impl std::fmt::Display) {
    let _ = writeln!(out, "{n} {v}");
}

fn run_seq(args: SeqArgs, oracle_bound: u64) -> Outcome {
    let (coeffs, entry) = match (&args.entry, args.coeffs) {
        (Some(key), _) => {
            let e = find_entry(key)?;
            (e.coefficients, Some(e))
        }
        (None, Some(c)) => (c, entry_for_coeffs(&c)),
        (None, None) => unreachable!("clap requires one of --entry, --coeffs"),
    };
    let need_entry = || {
        entry.clone().ok_or_else(|| {
            CliError::Usage(format!(
                "no registry entry has coefficients {coeffs}; use --method oracle"
            ))
        })
    };
    let mut out = String::new();
    if let Some(n) = args.at {
        let value: BigInt = match args.method {
            Method::Oracle => {
                let n64 = u64::try_from(&n).map_err(|_| {
                    CliError::Usage(format!("n = {n} exceeds the oracle bound {oracle_bound}"))
                })?;
                Oracle::new(oracle_bound).sum(&coeffs, n64)?.into()
            }
            Method::Rules => need_entry()?.rules.eval(&n)?.into(),
            Method::Rlt => rlt_by_runs(&need_entry()?.base, &n)?,
        };
        bline(&mut out, &n, value);
        return ok(out);
    }
    match args.method {
        Method::Oracle => {
            for (n, v) in Oracle::new(oracle_bound)
                .sums(&coeffs, args.count)?
                .iter()
                .enumerate()
            {
                bline(&mut out, n, v);
            }
        }
        Method::Rules => {
            for (n, v) in need_entry()?
                .rules
                .first_terms(args.count)?
                .iter()
                .enumerate()
            {
                bline(&mut out, n, v);
            }
        }
        Method::Rlt => {
            let base = need_entry()?.base;
            for n in 0..args.count {
                bline(&mut out, n, rlt_by_runs(&base, &BigUint::from(n))?);
            }
        }
    }
    ok(out)
}

/// Base terms from a file: one integer per line or a b-file.
fn read_base_file(path: &str) -> Result<BaseSequence, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let value = t.split_whitespace().last().unwrap_or(t);
        values.push(value.parse::<BigInt>().map_err(|_| {
            CliError::Usage(format!("{path}:{}: not an integer: {value:?}", i + 1))
        })?);
    }
    Ok(BaseSequence::explicit(values)?)
}

fn run_rlt(base: &str, count: u64) -> Outcome {
    let base = match registry::lookup(base) {
        Ok(e) => e.base,
        Err(_) if std::path::Path::new(base).exists() => read_base_file(base)?,
        Err(e) => return Err(CliError::Usage(format!("{e}, and no such file"))),
    };
    let mut out = String::new();
    for n in 0..count {
        bline(&mut out, n, rlt_by_runs(&base, &BigUint::from(n))?);
    }
    ok(out)
}

fn report_lines(reports: &[VerificationReport], verbose: bool, out: &mut String) -> bool {
    let mut bad = 0;
    for r in reports {
        if !r.as_expected() {
            bad += 1;
        }
        if verbose || !r.as_expected() {
            let _ = writeln!(out, "{r}");
        }
    }
    let _ = writeln!(
        out,
        "{} of {} checks as expected",
        reports.len() - bad,
        reports.len()
    );
    bad > 0
}

fn run_verify(args: VerifyArgs, oracle_bound: u64) -> Outcome {
    let mut out = String::new();
    if args.corpus {
        let reports = verifier::check_lemma_corpus(args.bound);
        let failed = report_lines(&reports, args.verbose, &mut out);
        return Ok((out, failed));
    }
    let entry = find_entry(args.entry.as_deref().expect("clap requires --entry"))?;
    let oracle = Oracle::new(oracle_bound);
    let reports = match &args.rules {
        None => verifier::check_triple_equivalence_with(&entry, args.bound, &oracle)?,
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let rules: RuleSystem = text.parse().map_err(|e: binrlt::RuleError| {
                CliError::Usage(format!("{}: {e}", path.display()))
            })?;
            entry
                .all_coefficients()
                .iter()
                .map(|c| verifier::check_triple(c, &rules, &entry.base, args.bound, &oracle))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let failed = report_lines(&reports, true, &mut out);
    Ok((out, failed))
}

fn run_conjecture(coeffs: CoefficientVector, m: u32, bound: u64, samples: Option<u64>) -> Outcome {
    let samples = samples.unwrap_or((bound / 8).max(64).min(bound));
    let res = verifier::conjecture_rules(&coeffs, m, samples, bound)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# coefficients {coeffs}, modulus 2^{m}, fitted to {samples}, validated to {bound}"
    );
    if res.is_complete() {
        let _ = write!(out, "{}", res.rule_system()?);
        return ok(out);
    }
    if !res.even_rule {
        let _ = writeln!(out, "# a(2n) = a(n) does not hold");
    }
    for rule in &res.discovered_rules {
        let _ = writeln!(out, "{rule}");
    }
    for r in &res.missing {
        let _ = writeln!(out, "# no rule for a({}n+{r})", 1u64 << m);
    }
    ok(out)
}

fn run_oeis(cmd: OeisCommand, cache_dir: Option<PathBuf>) -> Outcome {
    let OeisCommand::Compare {
        id,
        entry,
        count,
        offline,
    } = cmd;
    oeis::validate_anumber(&id)?;
    let entry = find_entry(&entry)?;
    let cache = cache_dir.unwrap_or_else(oeis::default_cache_dir);
    let b = oeis::fetch_bfile(&id, &cache, offline)?;
    let computed: Vec<BigInt> = entry
        .rules
        .first_terms(count)?
        .into_iter()
        .map(BigInt::from)
        .collect();
    let offset = b.first_index().unwrap_or(0);
    let cmp = oeis::compare(&b, &computed, offset);
    let mut out = String::new();
    match &cmp.first_mismatch {
        None => {
            let _ = writeln!(out, "{id}: {} terms match {}", cmp.matched, entry.name);
            ok(out)
        }
        Some(m) => {
            let expected = m
                .expected
                .as_ref()
                .map_or("<end of b-file>".to_string(), |v| v.to_string());
            let _ = writeln!(
                out,
                "{id}: mismatch at index {} (b-file {expected}, computed {}) after {} matching terms",
                m.index, m.computed, cmp.matched
            );
            Ok((out, true))
        }
    }
}

fn run_triangle(rows: u64, format: TriangleFormat) -> Outcome {
    let mut out = String::new();
    if format == TriangleFormat::Pbm {
        let _ = writeln!(out, "P1\n{rows} {rows}");
    }
    let mut row: Vec<u8> = Vec::with_capacity(rows as usize);
    for n in 0..rows as usize {
        // Pascal's rule mod 2, updated in place from the right.
        row.push(1);
        for k in (1..n).rev() {
            row[k] ^= row[k - 1];
        }
        let width = if format == TriangleFormat::Pbm {
            rows as usize
        } else {
            n + 1
        };
        let cells: Vec<&str> = (0..width)
            .map(|k| if k <= n && row[k] == 1 { "1" } else { "0" })
            .collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    ok(out)
}

fn run_catalog(json: bool) -> Outcome {
    if json {
        return ok(registry::catalog_json() + "\n");
    }
    let mut out = String::new();
    for e in builtin_entries() {
        let _ = writeln!(
            out,
            "{:<22} {:<12} {:<8} {:<8} {}",
            e.name,
            e.coefficients.to_string(),
            e.oeis_sequence.as_deref().unwrap_or("-"),
            e.oeis_transform.as_deref().unwrap_or("-"),
            e.description
        );
    }
    ok(out)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Parity { n, k } => ok(format!("{}\n", binom_parity(&n, &k).bit())),
        Command::F { coeffs, n, k } => ok(format!("{}\n", f_value(&coeffs, &n, &k).bit())),
        Command::Seq(args) => run_seq(args, cli.oracle_bound),
        Command::Rlt { base, count } => run_rlt(&base, count),
        Command::Mu { n } => ok(format!("{}\n", mu(&n)?)),
        Command::Verify(args) => run_verify(args, cli.oracle_bound),
        Command::Conjecture {
            coeffs,
            max_mod,
            bound,
            samples,
        } => run_conjecture(coeffs, max_mod, bound, samples),
        Command::Oeis { command } => run_oeis(command, cli.cache_dir),
        Command::Triangle { rows, format } => run_triangle(rows, format),
        Command::Catalog { json } => run_catalog(json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok((out, failed)) => {
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(3);
            }
            ExitCode::from(u8::from(failed))
        }
        Err(e) => {
            eprintln!("binrlt: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
