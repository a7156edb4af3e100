//! Batch driver for the certification chain.
//!
//! Subcommands cover the full reporting surface: `verify` runs the five-link
//! chain plus the prime gap bound over a range of `n`, `scan` encloses the
//! empirical irrationality exponents, `table` lines the bound up against the
//! Bertrand baseline, `enclosure` and `trajectory` print the underlying
//! constants and partial products, and `replay` re-checks a previously
//! written JSON report comparison by comparison.
//!
//! Exit codes form the machine contract:
//!
//! * 0: everything requested was certified (or the report is clean),
//! * 1: at least one verdict falsified, or a replay disagreement,
//! * 2: usage error (bad flag, malformed rational, empty range),
//! * 3: verdicts left inconclusive at the configured ceilings,
//! * 4: operational failure (sieve cap, unreadable input, unwritable output).
//!
//! JSON and CSV serialize every rational as an exact "num/den" string.
//! Decimal approximations appear only in the human table format, in columns
//! marked with `~`.

use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use euler_gap::chain::{
    bound_digit_count, theorem_check, verify_chain, ChainContext, ChainReport, MuCandidate,
    Policy, TheoremModeChoice, VerifyOptions, DEFAULT_EXACT_THEOREM_THRESHOLD,
};
use euler_gap::exponent;
use euler_gap::primes::PrimeTable;
use euler_gap::report::{
    self, ConfigEcho, Document, EnclosureRow, ReplayOutcome, RunReport, ScanRow, TableRow,
    TrajectoryRow,
};
use euler_gap::zeta;
use euler_gap::{Error, Rational, Verdict};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

const EXIT_CERTIFIED: i32 = 0;
const EXIT_FALSIFIED: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_INCONCLUSIVE: i32 = 3;
const EXIT_OPERATIONAL: i32 = 4;

const SIEVE_CAP_VAR: &str = "EULER_GAP_SIEVE_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Table => "table",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "euler-gap", version)]
#[command(about = "Certify the prime gap bound p_{n+1} < (p_1...p_n)^{2 mu} with exact rationals")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,

    /// Write output to this path instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Increase detail in table output (-v bounds, -vv comparisons).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every link of the chain and the gap bound for each n in a range.
    Verify {
        /// Range of indices, inclusive: "a..b" or a single "n".
        #[arg(long, value_name = "RANGE")]
        n: String,

        /// Candidate irrationality measure as "P/Q" (or an integer).
        #[arg(long, value_name = "P/Q")]
        mu: String,

        /// Tail truncation index K: "auto" deepens on demand, a number fixes it.
        #[arg(long, default_value = "auto", value_name = "auto|K")]
        truncation: String,

        /// Zeta enclosure term count N: "auto" tightens on demand, a number fixes it.
        #[arg(long, default_value = "auto", value_name = "auto|N")]
        terms: String,
    },

    /// Enclose the empirical irrationality exponent mu_n for each n in a range.
    Scan {
        /// Range of indices, inclusive: "a..b" or a single "n".
        #[arg(long, value_name = "RANGE")]
        n: String,

        /// Target enclosure width as a positive rational.
        #[arg(long, default_value = "1/1000", value_name = "P/Q")]
        precision: String,
    },

    /// Tabulate p_n, p_{n+1}, the Bertrand baseline, and the certified bound.
    Table {
        /// Range of indices, inclusive: "a..b" or a single "n".
        #[arg(long, value_name = "RANGE")]
        n: String,

        /// Candidate irrationality measure as "P/Q" (or an integer).
        #[arg(long, value_name = "P/Q")]
        mu: String,
    },

    /// Print the zeta(2) and 6/pi^2 enclosures at a term count or target width.
    Enclosure {
        /// Number of partial-sum terms.
        #[arg(long, value_name = "N", conflicts_with = "width")]
        terms: Option<u64>,

        /// Target width as a positive rational; terms are doubled until met.
        #[arg(long, value_name = "P/Q")]
        width: Option<String>,
    },

    /// Report reduced partial products a_n/b_n and the cofactor b_n * c = primorial^2.
    Trajectory {
        /// Range of indices, inclusive: "a..b" or a single "n".
        #[arg(long, value_name = "RANGE")]
        n: String,
    },

    /// Re-check every witness comparison and verdict in a JSON verify report.
    Replay {
        /// Path to a report previously written with `verify --format json`.
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}

type CmdResult = Result<i32, (i32, String)>;

fn run(cli: Cli) -> CmdResult {
    let table = prime_table_from_env()?;
    match &cli.command {
        Command::Verify {
            n,
            mu,
            truncation,
            terms,
        } => cmd_verify(&cli, table, n, mu, truncation, terms),
        Command::Scan { n, precision } => cmd_scan(&cli, table, n, precision),
        Command::Table { n, mu } => cmd_table(&cli, table, n, mu),
        Command::Enclosure { terms, width } => cmd_enclosure(&cli, *terms, width.as_deref()),
        Command::Trajectory { n } => cmd_trajectory(&cli, table, n),
        Command::Replay { input } => cmd_replay(&cli, input),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing

fn prime_table_from_env() -> Result<PrimeTable, (i32, String)> {
    match std::env::var(SIEVE_CAP_VAR) {
        Ok(raw) => match raw.parse::<u64>() {
            Ok(cap) if cap > 0 => Ok(PrimeTable::with_cap(cap)),
            _ => Err((
                EXIT_USAGE,
                format!("{SIEVE_CAP_VAR} must be a positive integer, got '{raw}'"),
            )),
        },
        Err(std::env::VarError::NotPresent) => Ok(PrimeTable::new()),
        Err(e) => Err((EXIT_USAGE, format!("{SIEVE_CAP_VAR}: {e}"))),
    }
}

/// Inclusive "a..b" or a single "n"; indices start at 1.
fn parse_range(raw: &str) -> Result<(u64, u64), (i32, String)> {
    let bad = || {
        (
            EXIT_USAGE,
            format!("--n expects 'a..b' (inclusive, a >= 1) or a single index, got '{raw}'"),
        )
    };
    let (lo, hi) = match raw.split_once("..") {
        Some((a, b)) => (
            a.trim().parse::<u64>().map_err(|_| bad())?,
            b.trim().parse::<u64>().map_err(|_| bad())?,
        ),
        None => {
            let n = raw.trim().parse::<u64>().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_mu(raw: &str) -> Result<MuCandidate, (i32, String)> {
    raw.parse::<MuCandidate>()
        .map_err(|e| (EXIT_USAGE, format!("--mu: {e} (got '{raw}')")))
}

fn parse_policy(raw: &str, flag: &str) -> Result<Policy, (i32, String)> {
    if raw == "auto" {
        return Ok(Policy::Auto);
    }
    match raw.parse::<u64>() {
        Ok(v) if v > 0 => Ok(Policy::Fixed(v)),
        _ => Err((
            EXIT_USAGE,
            format!("{flag} expects 'auto' or a positive integer, got '{raw}'"),
        )),
    }
}

fn parse_positive_rational(raw: &str, flag: &str) -> Result<Rational, (i32, String)> {
    let value: Rational = raw
        .parse()
        .map_err(|e| (EXIT_USAGE, format!("{flag}: {e}")))?;
    if !value.is_positive() {
        return Err((
            EXIT_USAGE,
            format!("{flag} must be a positive rational, got '{raw}'"),
        ));
    }
    Ok(value)
}

fn operational(e: Error) -> (i32, String) {
    (EXIT_OPERATIONAL, e.to_string())
}

fn emit(cli: &Cli, content: &str) -> Result<(), (i32, String)> {
    match &cli.out {
        Some(path) => std::fs::write(path, content).map_err(|e| {
            (
                EXIT_OPERATIONAL,
                format!("cannot write {}: {e}", path.display()),
            )
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn config_echo(cli: &Cli, subcommand: &str, n: &str) -> ConfigEcho {
    ConfigEcho {
        subcommand: subcommand.to_string(),
        n: n.to_string(),
        mu: None,
        precision: None,
        truncation: "-".to_string(),
        enclosure_terms: "-".to_string(),
        format: cli.format.as_str().to_string(),
        out: cli.out.as_ref().map(|p| p.display().to_string()),
        verbosity: cli.verbose,
    }
}

fn csv_string(header: &[&str], records: &[Vec<String>]) -> Result<String, (i32, String)> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let step = |e: csv::Error| (EXIT_OPERATIONAL, format!("csv: {e}"));
    writer.write_record(header).map_err(step)?;
    for record in records {
        writer.write_record(record).map_err(step)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| (EXIT_OPERATIONAL, format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| (EXIT_OPERATIONAL, format!("csv: {e}")))
}

fn json_string<T: serde::Serialize>(value: &T) -> Result<String, (i32, String)> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| (EXIT_OPERATIONAL, format!("json: {e}")))
}

/// Left-aligned plain-text table with a dash rule under the header.
fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let render_row = |out: &mut String, cells: &[String]| {
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            let _ = write!(out, "{cell:<width$}", width = widths[i]);
        }
        while out.ends_with(' ') {
            out.pop();
        }
        out.push('\n');
    };
    let header_cells: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    render_row(&mut out, &header_cells);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    render_row(&mut out, &rule);
    for row in rows {
        render_row(&mut out, row);
    }
    out
}

const APPROX_NOTE: &str = "columns marked ~ are non-certified decimal approximations\n";

fn verdict_cell(v: Verdict) -> String {
    format!("{v}")
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify(
    cli: &Cli,
    table: PrimeTable,
    n_raw: &str,
    mu_raw: &str,
    truncation_raw: &str,
    terms_raw: &str,
) -> CmdResult {
    let (lo, hi) = parse_range(n_raw)?;
    let mu = parse_mu(mu_raw)?;
    if mu.below_definition_threshold() {
        eprintln!(
            "warning: mu = {mu} is at most 2; every irrational number has measure >= 2, \
             so the chain is expected to falsify"
        );
    }
    let truncation = parse_policy(truncation_raw, "--truncation")?;
    if let Policy::Fixed(k) = truncation {
        if k <= hi {
            return Err((
                EXIT_USAGE,
                format!("--truncation {k} must exceed the largest index in --n (got {hi})"),
            ));
        }
    }
    let enclosure_terms = parse_policy(terms_raw, "--terms")?;
    let options = VerifyOptions {
        truncation,
        enclosure_terms,
        ..VerifyOptions::default()
    };

    let ctx = ChainContext::new(Arc::new(table));
    let mut reports: Vec<ChainReport> = Vec::with_capacity((hi - lo + 1) as usize);
    for n in lo..=hi {
        reports.push(verify_chain(&ctx, n, &mu, &options).map_err(operational)?);
    }

    let mut config = config_echo(cli, "verify", n_raw);
    config.mu = Some(mu.to_string());
    config.truncation = truncation_raw.to_string();
    config.enclosure_terms = terms_raw.to_string();
    let run = report::run_report(config, &reports);

    let content = match cli.format {
        Format::Json => json_string(&run)?,
        Format::Csv => {
            let mut records = Vec::with_capacity(run.reports.len());
            for row in &run.reports {
                records.push(report::csv_record(row).map_err(operational)?);
            }
            csv_string(&report::csv_header(), &records)?
        }
        Format::Table => render_verify(cli, &run),
    };
    emit(cli, &content)?;

    if run.summary.falsified > 0 {
        Ok(EXIT_FALSIFIED)
    } else if run.summary.inconclusive > 0 {
        Ok(EXIT_INCONCLUSIVE)
    } else {
        Ok(EXIT_CERTIFIED)
    }
}

fn render_verify(cli: &Cli, run: &RunReport) -> String {
    let header = [
        "n", "K", "N", "L1", "L2", "identity", "L3", "L4", "theorem", "mode",
    ];
    let rows: Vec<Vec<String>> = run
        .reports
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.k.to_string(),
                r.n_terms.to_string(),
                verdict_cell(r.links.l1.status),
                verdict_cell(r.links.l2.status),
                verdict_cell(r.links.identity.status),
                verdict_cell(r.links.l3.status),
                verdict_cell(r.links.l4.status),
                verdict_cell(r.theorem.status),
                r.theorem.mode.clone(),
            ]
        })
        .collect();
    let mut out = render_table(&header, &rows);
    let s = &run.summary;
    let _ = writeln!(
        out,
        "mu = {}: {} certified, {} falsified, {} inconclusive of {}",
        run.config.mu.as_deref().unwrap_or("?"),
        s.certified,
        s.falsified,
        s.inconclusive,
        s.total
    );
    if cli.verbose > 0 {
        for r in &run.reports {
            let _ = writeln!(out, "\nn = {}", r.n);
            let links = [
                ("L1", &r.links.l1),
                ("L2", &r.links.l2),
                ("identity", &r.links.identity),
                ("L3", &r.links.l3),
                ("L4", &r.links.l4),
            ];
            for (label, link) in links {
                let _ = writeln!(out, "  {label}: {}", link.status);
                for (name, value) in &link.witnesses.bounds {
                    let _ = writeln!(out, "    {name} = {value}");
                }
                if cli.verbose > 1 {
                    for c in &link.witnesses.comparisons {
                        let _ = writeln!(
                            out,
                            "    {}: {} {} {} [{}]",
                            c.name, c.lhs, c.relation, c.rhs, c.holds
                        );
                    }
                }
            }
            let _ = writeln!(out, "  theorem ({}): {}", r.theorem.mode, r.theorem.status);
            for (name, value) in &r.theorem.witnesses.bounds {
                let _ = writeln!(out, "    {name} = {value}");
            }
            if cli.verbose > 1 {
                for c in &r.theorem.witnesses.comparisons {
                    let _ = writeln!(
                        out,
                        "    {}: {} {} {} [{}]",
                        c.name, c.lhs, c.relation, c.rhs, c.holds
                    );
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// scan

fn cmd_scan(cli: &Cli, table: PrimeTable, n_raw: &str, precision_raw: &str) -> CmdResult {
    let (lo, hi) = parse_range(n_raw)?;
    let precision = parse_positive_rational(precision_raw, "--precision")?;

    let ctx = ChainContext::new(Arc::new(table));
    let records = exponent::scan(&ctx, lo, hi, &precision).map_err(operational)?;
    let running_max = exponent::running_max_hi(&records);

    let rows: Vec<ScanRow> = records
        .iter()
        .zip(&running_max)
        .map(|(rec, max_hi)| ScanRow {
            n: rec.n,
            b_n: rec.b_n.to_string(),
            gap_lo: rec.gap.lo().to_string(),
            gap_hi: rec.gap.hi().to_string(),
            mu_lo: rec.mu.lo().to_string(),
            mu_hi: rec.mu.hi().to_string(),
            midpoint: rec.midpoint().to_string(),
            width_ok: rec.width_ok,
            running_max_mu_hi: max_hi.to_string(),
        })
        .collect();

    let mut config = config_echo(cli, "scan", n_raw);
    config.precision = Some(precision_raw.to_string());

    let content = match cli.format {
        Format::Json => json_string(&Document::new(config, rows))?,
        Format::Csv => {
            let records: Vec<Vec<String>> = rows.iter().map(report::scan_csv_record).collect();
            csv_string(&report::scan_csv_header(), &records)?
        }
        Format::Table => {
            let header = ["n", "digits(b_n)", "mu_lo~", "mu_hi~", "mid~", "width_ok", "max~"];
            let body: Vec<Vec<String>> = records
                .iter()
                .zip(&running_max)
                .map(|(rec, max_hi)| {
                    vec![
                        rec.n.to_string(),
                        rec.b_n.to_string().len().to_string(),
                        rec.mu.lo().to_decimal(4),
                        rec.mu.hi().to_decimal(4),
                        rec.midpoint().to_decimal(4),
                        rec.width_ok.to_string(),
                        max_hi.to_decimal(4),
                    ]
                })
                .collect();
            let mut out = render_table(&header, &body);
            out.push_str(APPROX_NOTE);
            out
        }
    };
    emit(cli, &content)?;
    Ok(EXIT_CERTIFIED)
}

// ---------------------------------------------------------------------------
// table

fn cmd_table(cli: &Cli, table: PrimeTable, n_raw: &str, mu_raw: &str) -> CmdResult {
    let (lo, hi) = parse_range(n_raw)?;
    let mu = parse_mu(mu_raw)?;

    let ctx = ChainContext::new(Arc::new(table));
    let choice = TheoremModeChoice::Auto {
        exact_threshold: DEFAULT_EXACT_THEOREM_THRESHOLD,
    };
    let mut rows: Vec<TableRow> = Vec::with_capacity((hi - lo + 1) as usize);
    for n in lo..=hi {
        let p_n = ctx.table().nth_prime(n).map_err(operational)?;
        let p_next = ctx.table().nth_prime(n + 1).map_err(operational)?;
        let theorem = theorem_check(&ctx, n, &mu, choice).map_err(operational)?;
        let digits = bound_digit_count(&ctx, n, &mu, DEFAULT_EXACT_THEOREM_THRESHOLD)
            .map_err(operational)?;
        rows.push(TableRow {
            n,
            p_n,
            p_next,
            twice_p_n: 2 * p_n,
            bertrand_holds: p_next < 2 * p_n,
            bound_digits: digits,
            theorem_status: theorem.verdict,
            theorem_mode: theorem.mode.as_str().to_string(),
        });
    }

    let mut config = config_echo(cli, "table", n_raw);
    config.mu = Some(mu.to_string());

    let content = match cli.format {
        Format::Json => json_string(&Document::new(config, rows))?,
        Format::Csv => {
            let records: Vec<Vec<String>> = rows.iter().map(report::table_csv_record).collect();
            csv_string(&report::table_csv_header(), &records)?
        }
        Format::Table => {
            let header = [
                "n",
                "p_n",
                "p_next",
                "2*p_n",
                "bertrand",
                "bound_digits",
                "theorem",
                "mode",
            ];
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.p_n.to_string(),
                        r.p_next.to_string(),
                        r.twice_p_n.to_string(),
                        r.bertrand_holds.to_string(),
                        r.bound_digits.clone(),
                        verdict_cell(r.theorem_status),
                        r.theorem_mode.clone(),
                    ]
                })
                .collect();
            render_table(&header, &body)
        }
    };
    emit(cli, &content)?;
    Ok(EXIT_CERTIFIED)
}

// ---------------------------------------------------------------------------
// enclosure

fn cmd_enclosure(cli: &Cli, terms: Option<u64>, width: Option<&str>) -> CmdResult {
    let enclosure = match (terms, width) {
        (Some(n), None) => zeta::zeta2_enclosure(n)
            .map_err(|e| (EXIT_USAGE, format!("--terms: {e}")))?,
        (None, Some(w)) => {
            let target = parse_positive_rational(w, "--width")?;
            zeta::adaptive_enclosure(&target).map_err(operational)?
        }
        _ => {
            return Err((
                EXIT_USAGE,
                "exactly one of --terms or --width is required".to_string(),
            ))
        }
    };

    let row = EnclosureRow {
        terms: enclosure.terms,
        zeta2_lo: enclosure.zeta2.lo().to_string(),
        zeta2_hi: enclosure.zeta2.hi().to_string(),
        zeta2_width: enclosure.zeta2.width().to_string(),
        six_lo: enclosure.six_over_pi2.lo().to_string(),
        six_hi: enclosure.six_over_pi2.hi().to_string(),
        six_width: enclosure.six_over_pi2.width().to_string(),
    };

    let mut config = config_echo(cli, "enclosure", "-");
    config.enclosure_terms = match terms {
        Some(n) => n.to_string(),
        None => "auto".to_string(),
    };
    config.precision = width.map(|w| w.to_string());

    let content = match cli.format {
        Format::Json => json_string(&Document::new(config, vec![row]))?,
        Format::Csv => csv_string(
            &report::enclosure_csv_header(),
            &[report::enclosure_csv_record(&row)],
        )?,
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(out, "terms      {}", row.terms);
            let _ = writeln!(
                out,
                "zeta(2)    [{}, {}]  width {}  ~[{}, {}]",
                row.zeta2_lo,
                row.zeta2_hi,
                row.zeta2_width,
                enclosure.zeta2.lo().to_decimal(8),
                enclosure.zeta2.hi().to_decimal(8),
            );
            let _ = writeln!(
                out,
                "6/pi^2     [{}, {}]  width {}  ~[{}, {}]",
                row.six_lo,
                row.six_hi,
                row.six_width,
                enclosure.six_over_pi2.lo().to_decimal(8),
                enclosure.six_over_pi2.hi().to_decimal(8),
            );
            out.push_str(APPROX_NOTE);
            out
        }
    };
    emit(cli, &content)?;
    Ok(EXIT_CERTIFIED)
}

// ---------------------------------------------------------------------------
// trajectory

fn cmd_trajectory(cli: &Cli, table: PrimeTable, n_raw: &str) -> CmdResult {
    let (lo, hi) = parse_range(n_raw)?;

    let ctx = ChainContext::new(Arc::new(table));
    let mut rows: Vec<TrajectoryRow> = Vec::with_capacity((hi - lo + 1) as usize);
    for n in lo..=hi {
        let pp = ctx.trajectory().partial_product(n).map_err(operational)?;
        let ds = ctx
            .trajectory()
            .denominator_structure(n)
            .map_err(operational)?;
        rows.push(TrajectoryRow {
            n,
            a_n: pp.value.numer().to_string(),
            b_n: pp.value.denom().to_string(),
            primorial: pp.primorial.to_string(),
            cofactor: ds.cofactor.to_string(),
        });
    }

    let config = config_echo(cli, "trajectory", n_raw);
    let content = match cli.format {
        Format::Json => json_string(&Document::new(config, rows))?,
        Format::Csv => {
            let records: Vec<Vec<String>> =
                rows.iter().map(report::trajectory_csv_record).collect();
            csv_string(&report::trajectory_csv_header(), &records)?
        }
        Format::Table => {
            let header = ["n", "a_n", "b_n", "primorial", "cofactor"];
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.a_n.clone(),
                        r.b_n.clone(),
                        r.primorial.clone(),
                        r.cofactor.clone(),
                    ]
                })
                .collect();
            render_table(&header, &body)
        }
    };
    emit(cli, &content)?;
    Ok(EXIT_CERTIFIED)
}

// ---------------------------------------------------------------------------
// replay

fn cmd_replay(cli: &Cli, input: &PathBuf) -> CmdResult {
    let raw = std::fs::read_to_string(input).map_err(|e| {
        (
            EXIT_OPERATIONAL,
            format!("cannot read {}: {e}", input.display()),
        )
    })?;
    let run: RunReport = serde_json::from_str(&raw).map_err(|e| {
        (
            EXIT_OPERATIONAL,
            format!("malformed report {}: {e}", input.display()),
        )
    })?;
    let disagreements = report::replay_verify(&run).map_err(operational)?;

    let outcome = ReplayOutcome {
        schema: run.schema.clone(),
        input: input.display().to_string(),
        rows_checked: run.reports.len(),
        clean: disagreements.is_empty(),
        disagreements,
    };

    let content = match cli.format {
        Format::Json => json_string(&outcome)?,
        Format::Csv => csv_string(
            &["input", "rows_checked", "clean", "disagreements"],
            &[vec![
                outcome.input.clone(),
                outcome.rows_checked.to_string(),
                outcome.clean.to_string(),
                outcome.disagreements.join("; "),
            ]],
        )?,
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "replayed {}: {} rows, clean = {}",
                outcome.input, outcome.rows_checked, outcome.clean
            );
            for d in &outcome.disagreements {
                let _ = writeln!(out, "  disagreement: {d}");
            }
            out
        }
    };
    emit(cli, &content)?;

    if outcome.clean {
        Ok(EXIT_CERTIFIED)
    } else {
        Ok(EXIT_FALSIFIED)
    }
}
