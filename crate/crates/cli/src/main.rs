//! `isodense`: exact and empirical densities of primes where two isogenous
//! curves have isomorphic reductions.
//!
//! Exit codes: 0 ok, 1 usage, 2 data (unreadable dataset, unknown pair,
//! missing profile), 3 a sweep invariant failed.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use isodense_core::dataset::{bundled, load_pairs, PairRecord};
use isodense_core::density::{eval_density, format_rational, to_decimal, ExactRational};
use isodense_core::sweep::{
    anomalous_density, empirical_d, empirical_p, render_outcomes_csv, render_text, DEstimate, SweepError,
    SweepOptions, SweepReport, DEFAULT_M_MAX,
};

const DIGITS: usize = 20;

#[derive(Parser)]
#[command(name = "isodense", version, about = "Isomorphism densities for isogenous elliptic curves over Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact density of each selected pair from its profile.
    Theoretical(Common),
    /// Sweep all primes up to X and count isomorphic reductions.
    Empirical(SweepArgs),
    /// Tabulate the empirical d-values per level.
    Dvalues(DvaluesArgs),
    /// Proportion of primes where the groups agree over F_p but not over F_p^2.
    Anomalous(SweepArgs),
}

#[derive(Args)]
struct Common {
    /// Dataset in JSON Lines format (default: the bundled pairs).
    #[arg(long, env = "ISODENSE_DATASET")]
    dataset: Option<PathBuf>,
    /// Pair label; repeat for several (default: every pair in the dataset).
    #[arg(long = "pair")]
    pairs: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Sweep bound (inclusive).
    #[arg(long = "X", value_parser = clap::value_parser!(u64).range(5..))]
    x: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    /// Highest level m for the l^m-torsion tallies.
    #[arg(long = "m-max", default_value_t = DEFAULT_M_MAX, value_parser = clap::value_parser!(u32).range(1..=40))]
    m_max: u32,
    /// Also compare the groups over F_p^2.
    #[arg(long)]
    anomalous: bool,
}

#[derive(Args)]
struct DvaluesArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    /// Tabulate levels 1..=m (default: --m-max).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=40))]
    m: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

enum CliError {
    Usage(String),
    Data(String),
    Invariant(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Invariant(m) => m,
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::BoundTooSmall(_) | SweepError::NoWorkers => CliError::Usage(e.to_string()),
            SweepError::Pool(_) => CliError::Data(e.to_string()),
            _ => CliError::Invariant(format!("invariant violated: {e}")),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("isodense: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, output) = match &cli.command {
        Command::Theoretical(c) => (c, theoretical(c)?),
        Command::Empirical(s) => (&s.common, empirical(s)?),
        Command::Dvalues(d) => (&d.sweep.common, dvalues(d)?),
        Command::Anomalous(s) => (&s.common, anomalous(s)?),
    };
    match &common.out {
        Some(path) => std::fs::write(path, output)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}

fn select(common: &Common) -> Result<Vec<PairRecord>, CliError> {
    let records = match &common.dataset {
        Some(path) => load_pairs(path).map_err(|e| CliError::Data(e.to_string()))?,
        None => bundled(),
    };
    if common.pairs.is_empty() {
        return Ok(records);
    }
    common
        .pairs
        .iter()
        .map(|label| {
            records.iter().find(|r| &r.label == label).cloned().ok_or_else(|| {
                let known: Vec<&str> = records.iter().map(|r| r.label.as_str()).collect();
                CliError::Data(format!("unknown pair {label:?} (dataset has: {})", known.join(", ")))
            })
        })
        .collect()
}

fn options(s: &SweepArgs, m_max: u32, anomalous: bool, record_outcomes: bool) -> SweepOptions {
    let workers = s
        .workers
        .map(|w| w as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    SweepOptions {
        seed: s.seed,
        workers,
        m_max,
        anomalous,
        record_outcomes,
    }
}

fn sweep(rec: &PairRecord, x: u64, opts: &SweepOptions) -> Result<isodense_core::sweep::SweepRun, CliError> {
    let pair = rec
        .to_pair()
        .map_err(|e| CliError::Data(format!("pair {}: {e}", rec.label)))?;
    Ok(empirical_p(&pair, x, opts)?)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

fn float(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| format!("{v:.6}"))
}

// ---------------------------------------------------------------- theoretical

#[derive(Serialize)]
struct TheoreticalEntry {
    label: String,
    ell: u64,
    density: String,
    decimal: String,
    density_source: Option<String>,
    /// Expected value stored with the record, when it differs from `density`.
    published: Option<String>,
    published_decimal: Option<String>,
    discrepancy: bool,
}

#[derive(Serialize)]
struct TheoreticalOutput {
    command: &'static str,
    pairs: Vec<TheoreticalEntry>,
}

fn exact_density(rec: &PairRecord) -> Result<ExactRational, CliError> {
    let profile = rec
        .profile
        .as_ref()
        .ok_or_else(|| CliError::Data(format!("pair {} has no density profile", rec.label)))?;
    eval_density(profile).map_err(|e| CliError::Data(format!("pair {}: {e}", rec.label)))
}

fn theoretical(c: &Common) -> Result<String, CliError> {
    let mut entries = Vec::new();
    for rec in select(c)? {
        let value = exact_density(&rec)?;
        let discrepancy = rec.density_discrepancy();
        entries.push(TheoreticalEntry {
            label: rec.label.clone(),
            ell: rec.ell,
            density: format_rational(&value),
            decimal: to_decimal(&value, DIGITS),
            density_source: rec.expected.as_ref().and_then(|e| e.density_source.clone()),
            published: discrepancy.as_ref().map(|(p, _)| format_rational(p)),
            published_decimal: discrepancy.as_ref().map(|(p, _)| to_decimal(p, DIGITS)),
            discrepancy: discrepancy.is_some(),
        });
    }
    Ok(match c.format {
        Format::Json => json(&TheoreticalOutput {
            command: "theoretical",
            pairs: entries,
        }),
        Format::Csv => {
            let mut s = String::from("label,ell,density,decimal,published,discrepancy\n");
            for e in &entries {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    e.label,
                    e.ell,
                    e.density,
                    e.decimal,
                    e.published.clone().unwrap_or_default(),
                    e.discrepancy
                );
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for e in &entries {
                let _ = writeln!(s, "{:<8} ell={:<3} {} ≈ {}", e.label, e.ell, e.density, e.decimal);
                if let (Some(p), Some(pd)) = (&e.published, &e.published_decimal) {
                    let _ = writeln!(
                        s,
                        "{:<8} FLAG published value {} ≈ {} disagrees with the profile value {}",
                        "", p, pd, e.density
                    );
                }
            }
            s
        }
    })
}

// ------------------------------------------------------------------ empirical

#[derive(Serialize)]
struct ExpectedDelta {
    #[serde(rename = "X")]
    x: u64,
    iso_count: Option<u64>,
    ratio: Option<f64>,
    source: String,
    delta_count: Option<i64>,
    delta_ratio: Option<f64>,
}

#[derive(Serialize)]
struct EmpiricalEntry {
    report: SweepReport,
    theoretical: Option<String>,
    theoretical_decimal: Option<String>,
    expected: Option<ExpectedDelta>,
}

#[derive(Serialize)]
struct EmpiricalOutput {
    command: &'static str,
    runs: Vec<EmpiricalEntry>,
}

fn empirical(s: &SweepArgs) -> Result<String, CliError> {
    let csv = s.common.format == Format::Csv;
    let opts = options(s, s.m_max, s.anomalous, csv);
    let mut runs = Vec::new();
    let mut csv_out = String::from("pair,p,status,n1,n2,n1',n2'\n");
    for rec in select(&s.common)? {
        let run = sweep(&rec, s.x, &opts)?;
        if csv {
            for line in render_outcomes_csv(&run.outcomes).lines().skip(1) {
                let _ = writeln!(csv_out, "{},{line}", rec.label);
            }
        }
        let report = run.report;
        let theory = rec.profile.as_ref().and_then(|p| eval_density(p).ok());
        let expected = rec.expected_sweep(s.x).map(|e| ExpectedDelta {
            x: e.x,
            iso_count: e.iso_count,
            ratio: e.ratio,
            source: e.source.clone(),
            delta_count: e.iso_count.map(|c| report.iso_count as i64 - c as i64),
            delta_ratio: e.ratio.map(|r| report.iso_ratio - r),
        });
        runs.push(EmpiricalEntry {
            report,
            theoretical: theory.as_ref().map(format_rational),
            theoretical_decimal: theory.as_ref().map(|t| to_decimal(t, DIGITS)),
            expected,
        });
    }
    Ok(match s.common.format {
        Format::Csv => csv_out,
        Format::Json => json(&EmpiricalOutput {
            command: "empirical",
            runs,
        }),
        Format::Text => {
            let mut out = String::new();
            for (i, r) in runs.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                out.push_str(&render_text(&r.report));
                if let (Some(t), Some(d)) = (&r.theoretical, &r.theoretical_decimal) {
                    let _ = writeln!(out, "{:<22} {} ≈ {}", "theoretical", t, d);
                }
                if let Some(e) = &r.expected {
                    if let (Some(c), Some(dc)) = (e.iso_count, e.delta_count) {
                        let _ = writeln!(out, "{:<22} {:>12} (delta {:+}; {})", "expected count", c, dc, e.source);
                    }
                    if let (Some(q), Some(dq)) = (e.ratio, e.delta_ratio) {
                        let _ = writeln!(out, "{:<22} {:>12} (delta {:+.6}; {})", "expected ratio", q, dq, e.source);
                    }
                }
            }
            out
        }
    })
}

// ------------------------------------------------------------------- dvalues

#[derive(Serialize)]
struct DRow {
    m: u32,
    level: u64,
    support_e: u64,
    defect_e: u64,
    d_hat: Option<f64>,
    sigma_e: Option<f64>,
    support_ep: u64,
    defect_ep: u64,
    dp_hat: Option<f64>,
    sigma_ep: Option<f64>,
    profile_d: Option<String>,
    profile_dp: Option<String>,
}

#[derive(Serialize)]
struct DTable {
    label: String,
    ell: u64,
    #[serde(rename = "X")]
    x: u64,
    seed: u64,
    reference_values: [String; 2],
    rows: Vec<DRow>,
}

#[derive(Serialize)]
struct DvaluesOutput {
    command: &'static str,
    pairs: Vec<DTable>,
}

fn standard_error(hat: Option<f64>, support: u64) -> Option<f64> {
    hat.map(|q| DEstimate::sigma(q, support))
}

fn dvalues(d: &DvaluesArgs) -> Result<String, CliError> {
    let s = &d.sweep;
    let levels = d.m.unwrap_or(s.m_max);
    let opts = options(s, levels, s.anomalous, false);
    let mut tables = Vec::new();
    for rec in select(&s.common)? {
        let report = sweep(&rec, s.x, &opts)?.report;
        let mut rows = Vec::new();
        for m in 1..=levels {
            let Some(est) = empirical_d(&report, m) else { continue };
            let (pd, pdp) = match &rec.profile {
                Some(p) => {
                    let (a, b) = p.d_at(m);
                    (Some(format_rational(&a)), Some(format_rational(&b)))
                }
                None => (None, None),
            };
            rows.push(DRow {
                m,
                level: rec.ell.checked_pow(m).unwrap_or(u64::MAX),
                support_e: est.support_e,
                defect_e: est.defect_e,
                d_hat: est.d_hat,
                sigma_e: standard_error(est.d_hat, est.support_e),
                support_ep: est.support_ep,
                defect_ep: est.defect_ep,
                dp_hat: est.dp_hat,
                sigma_ep: standard_error(est.dp_hat, est.support_ep),
                profile_d: pd,
                profile_dp: pdp,
            });
        }
        tables.push(DTable {
            label: rec.label.clone(),
            ell: rec.ell,
            x: s.x,
            seed: s.seed,
            reference_values: ["0/1".into(), format!("{}/{}", rec.ell - 1, rec.ell)],
            rows,
        });
    }
    Ok(match s.common.format {
        Format::Json => json(&DvaluesOutput {
            command: "dvalues",
            pairs: tables,
        }),
        Format::Csv => {
            let mut out = String::from(
                "pair,m,level,support_e,defect_e,d_hat,support_ep,defect_ep,dp_hat,profile_d,profile_dp\n",
            );
            for t in &tables {
                for r in &t.rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{},{}",
                        t.label,
                        r.m,
                        r.level,
                        r.support_e,
                        r.defect_e,
                        float(r.d_hat),
                        r.support_ep,
                        r.defect_ep,
                        float(r.dp_hat),
                        r.profile_d.clone().unwrap_or_default(),
                        r.profile_dp.clone().unwrap_or_default()
                    );
                }
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for (i, t) in tables.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                let _ = writeln!(
                    out,
                    "pair {}  ell={}  X={}  seed={}  reference values {{{}, {}}}",
                    t.label, t.ell, t.x, t.seed, t.reference_values[0], t.reference_values[1]
                );
                let _ = writeln!(
                    out,
                    "{:>3} {:>10} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>8} {:>8}",
                    "m", "l^m", "#E full", "d", "+-", "#E' full", "d'", "+-", "prof d", "prof d'"
                );
                for r in &t.rows {
                    let _ = writeln!(
                        out,
                        "{:>3} {:>10} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>8} {:>8}",
                        r.m,
                        r.level,
                        r.support_e,
                        float(r.d_hat),
                        float(r.sigma_e),
                        r.support_ep,
                        float(r.dp_hat),
                        float(r.sigma_ep),
                        r.profile_d.clone().unwrap_or_default(),
                        r.profile_dp.clone().unwrap_or_default()
                    );
                }
            }
            out
        }
    })
}

// ----------------------------------------------------------------- anomalous

#[derive(Serialize)]
struct AnomalousEntry {
    label: String,
    ell: u64,
    #[serde(rename = "X")]
    x: u64,
    seed: u64,
    pi_x: u64,
    anomalous_count: u64,
    ratio: f64,
    sigma: f64,
}

#[derive(Serialize)]
struct AnomalousOutput {
    command: &'static str,
    pairs: Vec<AnomalousEntry>,
}

fn anomalous(s: &SweepArgs) -> Result<String, CliError> {
    let opts = options(s, s.m_max, true, false);
    let mut entries = Vec::new();
    for rec in select(&s.common)? {
        let report = sweep(&rec, s.x, &opts)?.report;
        let (ratio, sigma) = anomalous_density(&report).expect("anomalous mode was on");
        entries.push(AnomalousEntry {
            label: rec.label.clone(),
            ell: rec.ell,
            x: s.x,
            seed: s.seed,
            pi_x: report.pi_x,
            anomalous_count: report.anomalous_count.unwrap_or(0),
            ratio,
            sigma,
        });
    }
    Ok(match s.common.format {
        Format::Json => json(&AnomalousOutput {
            command: "anomalous",
            pairs: entries,
        }),
        Format::Csv => {
            let mut out = String::from("pair,ell,X,seed,pi_x,anomalous_count,ratio,sigma\n");
            for e in &entries {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{:.6},{:.6}",
                    e.label, e.ell, e.x, e.seed, e.pi_x, e.anomalous_count, e.ratio, e.sigma
                );
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for e in &entries {
                let _ = writeln!(
                    out,
                    "{:<8} ell={:<3} X={} anomalous {}/{} = {:.6} +- {:.6} (1 sigma)",
                    e.label,
                    e.ell,
                    e.x,
                    e.anomalous_count,
                    e.pi_x,
                    e.ratio,
                    e.sigma
                );
            }
            out
        }
    })
}
