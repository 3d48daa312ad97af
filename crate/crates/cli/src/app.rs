//! Command surface. [`run`] parses arguments, dispatches and returns the
//! text written to stdout and stderr together with the exit code, so that
//! the binary and the tests share one code path.

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use motive_workbench::chow_ring::hasse_edges;
use motive_workbench::motive::{
    confluence, decompose_chain, gensb_expand, krull_schmidt_report, obstruction_report, poincare_polynomial,
    BaseMotive, FlagDescriptor, GroupDescriptor, MotiveExpr, PoincareTable, Series,
};
use motive_workbench::sb2::{run_all, RunOptions, VerificationReport};
use motive_workbench::{CoefficientRing, GrassmannSpace};
use serde::Serialize;
use thiserror::Error;

use crate::eval::{eval, Context, EvalError};
use crate::expr::{parse, SyntaxError};
use crate::props::{run_properties, PropertyReport};

pub const MAX_RANK_VAR: &str = "MOTIVE_WORKBENCH_MAX_RANK";
const DEFAULT_MAX_RANK: u32 = 8;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "motive-workbench", version, about = "Exact Schubert calculus and motivic decompositions")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Coefficient ring: Z, Z/m or Q.
    #[arg(long, global = true, default_value = "Z", value_parser = parse_ring)]
    pub ring: CoefficientRing,
    /// Seed for randomized property checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Grassmannian Gr(d,n) for expressions, written `d,n`.
    #[arg(long, global = true, default_value = "2,5", value_parser = parse_space)]
    pub space: (u32, u32),
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Schubert basis of a Grassmannian.
    Ring {
        #[command(subcommand)]
        family: RingFamily,
    },
    /// Evaluate a cycle expression.
    Mult { expr: String },
    /// Apply the decomposition rules to a flag variety.
    Decompose {
        #[command(flatten)]
        flag: FlagArgs,
        /// Dimensions to remove, in order.
        #[arg(long, value_delimiter = ',', required = true)]
        remove: Vec<u32>,
        /// Rename base motives (X(1) of type A as SB(A), and so on).
        #[arg(long)]
        canonical: bool,
    },
    /// Poincaré polynomial of a flag variety and of its decompositions.
    Poincare {
        #[command(flatten)]
        flag: FlagArgs,
        #[arg(long, value_delimiter = ',')]
        remove: Vec<u32>,
        /// Compare every admissible removal order.
        #[arg(long)]
        confluence: bool,
    },
    /// Run verification suites.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Print derived reports.
    Report {
        #[command(subcommand)]
        report: ReportKind,
    },
}

#[derive(Debug, Subcommand)]
pub enum RingFamily {
    /// Gr(d,n), d-planes in n-space.
    Gr {
        d: u32,
        n: u32,
        /// Print the Hasse diagram of the Schubert cells.
        #[arg(long)]
        hasse: bool,
    },
}

#[derive(Debug, Args)]
pub struct FlagArgs {
    #[arg(long, value_parser = parse_series)]
    pub series: Series,
    #[arg(long)]
    pub rank: u32,
    /// Index of the underlying algebra (types A and C).
    #[arg(long)]
    pub index: Option<u32>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub flag: Vec<u32>,
}

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// The decomposition of the motive of SB₂(A), A of degree 5.
    Sb2 {
        /// Modulus for the diagonal identity.
        #[arg(long, default_value_t = 5)]
        modulus: u64,
        /// Record timings (output is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Randomized algebraic laws of the correspondence engine.
    Props {
        #[arg(long, default_value_t = 100)]
        trials: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReportKind {
    /// Failure of Krull–Schmidt for motives of PGL₁(A)-homogeneous varieties.
    Ks,
    /// Expansion of SB_d(A) for an algebra of degree n+1.
    Gensb { n: u32, d: u32 },
    /// Index reduction obstruction for X(1,d).
    Obstruction { ind: u64, d: u64 },
}

fn parse_ring(s: &str) -> Result<CoefficientRing, String> {
    s.parse().map_err(|e: motive_workbench::Error| e.to_string())
}

fn parse_series(s: &str) -> Result<Series, String> {
    s.parse().map_err(|e: motive_workbench::Error| e.to_string())
}

fn parse_space(s: &str) -> Result<(u32, u32), String> {
    let (d, n) = s.split_once(',').ok_or_else(|| format!("expected `d,n`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("`{t}`: {e}"));
    Ok((parse(d)?, parse(n)?))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Syntax(#[from] SyntaxError),
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Algebra(#[from] motive_workbench::Error),
    #[error("{what} {value} exceeds {MAX_RANK_VAR} = {cap}")]
    TooLarge { what: &'static str, value: u32, cap: u32 },
    #[error("invalid {MAX_RANK_VAR}: {0}")]
    BadEnv(String),
    #[error("JSON encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}

/// What a command printed and how it wants the process to exit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

struct Settings {
    format: Format,
    max_rank: u32,
}

impl Settings {
    fn cap(&self, what: &'static str, value: u32) -> Result<(), CliError> {
        if value > self.max_rank {
            return Err(CliError::TooLarge { what, value, cap: self.max_rank });
        }
        Ok(())
    }

    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) -> Result<String, CliError> {
        Ok(match self.format {
            Format::Json => serde_json::to_string_pretty(value)? + "\n",
            Format::Text => text(),
        })
    }
}

fn max_rank_from_env() -> Result<u32, CliError> {
    match std::env::var(MAX_RANK_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::BadEnv(v)),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_MAX_RANK),
        Err(e) => Err(CliError::BadEnv(e.to_string())),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome { stderr: rendered, code: EXIT_USAGE, ..Outcome::default() }
            } else {
                Outcome { stdout: rendered, code: EXIT_OK, ..Outcome::default() }
            };
        }
    };
    let settings = match max_rank_from_env() {
        Ok(max_rank) => Settings { format: cli.format, max_rank },
        Err(e) => return Outcome { stderr: format!("error: {e}\n"), code: EXIT_USAGE, ..Outcome::default() },
    };
    match dispatch(&cli, &settings) {
        Ok((stdout, code)) => Outcome { stdout, code, ..Outcome::default() },
        Err(e) => Outcome { stderr: format!("error: {e}\n"), code: EXIT_USAGE, ..Outcome::default() },
    }
}

fn dispatch(cli: &Cli, s: &Settings) -> Result<(String, i32), CliError> {
    match &cli.command {
        Command::Ring { family: RingFamily::Gr { d, n, hasse } } => ring(s, *d, *n, *hasse).map(|o| (o, EXIT_OK)),
        Command::Mult { expr } => {
            let (d, n) = cli.space;
            s.cap("n", n)?;
            let ctx = Context::new(GrassmannSpace::new(d, n)?, cli.ring);
            let value = eval(&parse(expr)?, &ctx)?;
            Ok((s.emit(&value, || format!("{value}\n"))?, EXIT_OK))
        }
        Command::Decompose { flag, remove, canonical } => {
            let flag = build_flag(s, flag)?;
            let mut expr = decompose_chain(&flag, remove)?;
            if *canonical {
                expr = expr.canonical();
            }
            Ok((s.emit(&expr, || format!("{expr}\n"))?, EXIT_OK))
        }
        Command::Poincare { flag, remove, confluence: all_orders } => poincare(s, &build_flag(s, flag)?, remove, *all_orders),
        Command::Verify { suite: Suite::Sb2 { modulus, timings } } => {
            let options = RunOptions {
                delta_modulus: *modulus,
                include_localized: cli.ring == CoefficientRing::Rationals,
                timings: *timings,
            };
            let report = run_all(&options)?;
            let code = if report.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED };
            Ok((s.emit(&report, || render_report(&report))?, code))
        }
        Command::Verify { suite: Suite::Props { trials } } => {
            let report = run_properties(cli.seed, *trials);
            let code = if report.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED };
            Ok((s.emit(&report, || render_props(&report))?, code))
        }
        Command::Report { report } => report_command(s, report).map(|o| (o, EXIT_OK)),
    }
}

fn build_flag(s: &Settings, args: &FlagArgs) -> Result<FlagDescriptor, CliError> {
    s.cap("rank", args.rank)?;
    let group = GroupDescriptor::new(args.series, args.rank, args.index)?;
    Ok(FlagDescriptor::new(group, args.flag.clone())?)
}

#[derive(Serialize)]
struct BasisEntry {
    partition: Vec<u32>,
    name: String,
    codim: u32,
}

#[derive(Serialize)]
struct RingReport {
    space: GrassmannSpace,
    dim: u32,
    basis: Vec<BasisEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hasse: Option<Vec<(String, String)>>,
}

fn ring(s: &Settings, d: u32, n: u32, hasse: bool) -> Result<String, CliError> {
    s.cap("n", n)?;
    let space = GrassmannSpace::new(d, n)?;
    let basis: Vec<BasisEntry> = space
        .basis()
        .into_iter()
        .map(|p| BasisEntry { partition: p.parts().to_vec(), name: space.class_name(&p), codim: p.weight() })
        .collect();
    let edges: Vec<(String, String)> =
        hasse_edges(space).into_iter().map(|(a, b)| (space.class_name(&a), space.class_name(&b))).collect();
    let report = RingReport { space, dim: space.dim(), basis, hasse: hasse.then(|| edges.clone()) };
    s.emit(&report, || {
        let mut out = String::new();
        let _ = writeln!(out, "{space}: dimension {}, {} Schubert classes", space.dim(), report.basis.len());
        for codim in (0..=space.dim()).rev() {
            let names: Vec<&str> = report.basis.iter().filter(|b| b.codim == codim).map(|b| b.name.as_str()).collect();
            let _ = writeln!(out, "{codim:>3}  {}", names.join("  "));
        }
        if hasse {
            let _ = writeln!(out, "Hasse diagram, {} covering relations:", edges.len());
            for (a, b) in &edges {
                let _ = writeln!(out, "  {a} -- {b}");
            }
        }
        out
    })
}

#[derive(Serialize)]
struct PoincareReport {
    flag: FlagDescriptor,
    poincare: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposition: Option<MotiveExpr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposition_poincare: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    confluence: Option<motive_workbench::motive::ConfluenceReport>,
    consistent: bool,
}

fn poincare(s: &Settings, flag: &FlagDescriptor, remove: &[u32], all_orders: bool) -> Result<(String, i32), CliError> {
    let table = PoincareTable::builtin();
    let own = table.lookup(&BaseMotive::Flag(flag.clone()))?;
    let mut report = PoincareReport {
        flag: flag.clone(),
        poincare: own.to_string(),
        decomposition: None,
        decomposition_poincare: None,
        confluence: None,
        consistent: true,
    };
    if !remove.is_empty() {
        let expr = decompose_chain(flag, remove)?;
        let p = poincare_polynomial(&expr, &table)?;
        report.consistent &= p == own;
        report.decomposition_poincare = Some(p.to_string());
        report.decomposition = Some(expr);
    }
    if all_orders {
        let c = confluence(flag, &table)?;
        report.consistent &= c.consistent;
        report.confluence = Some(c);
    }
    let code = if report.consistent { EXIT_OK } else { EXIT_CHECK_FAILED };
    let out = s.emit(&report, || {
        let mut out = format!("P({flag}) = {own}\n");
        if let (Some(e), Some(p)) = (&report.decomposition, &report.decomposition_poincare) {
            let _ = writeln!(out, "P({e}) = {p}");
        }
        if let Some(c) = &report.confluence {
            let _ = writeln!(out, "removal orders checked: {}, blocked by guards: {}", c.orders_checked.len(), c.orders_blocked.len());
        }
        let _ = writeln!(out, "consistent: {}", report.consistent);
        out
    })?;
    Ok((out, code))
}

fn render_report(report: &VerificationReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let _ = writeln!(out, "{}  {:<24} [{}]", c.status, c.check_id, c.ring);
        if !c.passed() {
            let _ = writeln!(out, "      claim: {}", c.citation);
            let _ = writeln!(out, "      lhs:   {}", c.lhs);
            let _ = writeln!(out, "      rhs:   {}", c.rhs);
            for note in &c.notes {
                let _ = writeln!(out, "      note:  {note}");
            }
        }
    }
    let _ = writeln!(out, "{} passed, {} failed", report.passed(), report.failed().len());
    out
}

fn render_props(report: &PropertyReport) -> String {
    let mut out = String::new();
    for p in &report.properties {
        let status = if p.failures == 0 { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status}  {:<32} {} trials, {} failures", p.name, p.trials, p.failures);
        if let Some(example) = &p.counterexample {
            let _ = writeln!(out, "      counterexample: {example}");
        }
    }
    let _ = writeln!(out, "seed {}", report.seed);
    out
}

fn report_command(s: &Settings, report: &ReportKind) -> Result<String, CliError> {
    match report {
        ReportKind::Ks => {
            let r = krull_schmidt_report()?;
            s.emit(&r, || {
                let mut out = String::new();
                let _ = writeln!(out, "M({}) for {}:", r.flag, r.group);
                let _ = writeln!(out, "  removing 2: {}", r.via_sb);
                let _ = writeln!(out, "  removing 1: {}", r.via_sb2);
                let _ = writeln!(out, "  with {} = {}: {}", r.substitution_from, r.substitution_to, r.leaves_f);
                let _ = writeln!(out, "  Poincaré polynomials {} and {} (equal: {})", r.poincare_sb, r.poincare_f, r.poincare_equal);
                for c in &r.citations {
                    let _ = writeln!(out, "  * {} ({})", c.fact, c.reference);
                }
                out
            })
        }
        ReportKind::Gensb { n, d } => {
            s.cap("n", *n)?;
            let r = gensb_expand(*n, *d)?;
            s.emit(&r, || {
                let mut out = format!("SB_{d}(A), deg A = {}: {}\n", n + 1, r.expansion);
                let _ = writeln!(out, "polynomial: {}", r.polynomial);
                for h in &r.hypotheses {
                    let _ = writeln!(out, "assumes: {h}");
                }
                out
            })
        }
        ReportKind::Obstruction { ind, d } => {
            let r = obstruction_report(*ind, *d)?;
            s.emit(&r, || {
                format!(
                    "ind {}, X(1,{}): via flag Z/{}Z, via SB(A) Z/{}Z, consistent: {}\n{}\n",
                    r.ind, r.d, r.via_flag, r.via_sb, r.consistent, r.explanation
                )
            })
        }
    }
}
