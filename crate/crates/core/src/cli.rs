//! Command-line interface.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;

use crate::appendix_check::{parse_certificate, AppendixChecker, Outcome, DEFAULT_TERM_BUDGET};
use crate::cache::{load_or_generate, Origin, CACHE_ENV};
use crate::decimal::round_half_even;
use crate::entropy::{bounds, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::evolve::{check_ratio_dynamics, evolve_to_capped, ratios, BoundaryClassVector, DEFAULT_DIGIT_CAP};
use crate::hanoi_graph::{HanoiGraph, DEFAULT_VERTEX_CAP};
use crate::matching_oracle::{
    boundary_class_vector, CornerConstraint, MatchingCounter, OracleLimits, DEFAULT_MAX_VERTICES, DEFAULT_MEMO_CAP,
};
use crate::recursion_gen::{RecursionSystem, DEFAULT_CENSUS_MAX_D};
use crate::reproduce;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hanoi-dimer", version, about = "Exact dimer-monomer counts and entropy bounds on Tower of Hanoi graphs")]
pub struct Cli {
    /// Directory for cached recursion systems.
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache_dir: Option<PathBuf>,
    /// Largest explicit graph, in vertices.
    #[arg(long, global = true, default_value_t = DEFAULT_VERTEX_CAP, value_parser = positive_usize)]
    pub vertex_cap: usize,
    /// Largest graph handed to the brute-force counter, in vertices.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_VERTICES, value_parser = positive_usize)]
    pub oracle_max_vertices: usize,
    /// Memo-table entry cap of the brute-force counter.
    #[arg(long, global = true, default_value_t = DEFAULT_MEMO_CAP, value_parser = positive_usize)]
    pub memo_cap: usize,
    /// Abort evolution when a class is predicted to exceed this many digits.
    #[arg(long, global = true, default_value_t = DEFAULT_DIGIT_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    pub digit_cap: u64,
    /// Term budget for symbolic certificate expansions.
    #[arg(long, global = true, default_value_t = DEFAULT_TERM_BUDGET, value_parser = positive_usize)]
    pub term_budget: usize,
    /// Largest dimension whose connector subsets are enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_CENSUS_MAX_D, value_parser = positive_usize)]
    pub census_max_d: usize,
    #[command(subcommand)]
    pub command: Command,
}

fn positive_usize(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn dimension(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(d) if d >= 2 => Ok(d),
        Ok(d) => Err(format!("dimension must be at least 2, got {d}")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate (or load) the recursion system and print it in cache format.
    GenRecursions {
        #[arg(long, value_parser = dimension)]
        d: usize,
    },
    /// Boundary classes and total count at stage n, from the recursion.
    Count {
        #[arg(long, value_parser = dimension)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Brute-force counts on the explicit graph.
    Oracle {
        #[arg(long, value_parser = dimension)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// One letter per corner: m (monomer), d (dimer), f (free).
        #[arg(long)]
        constraint: Option<String>,
        /// Write the edge list as CSV to this file.
        #[arg(long)]
        emit_graph: Option<PathBuf>,
    },
    /// Compare recursion and brute force stage by stage.
    Verify {
        #[arg(long, value_parser = dimension)]
        d: usize,
        #[arg(long = "n-max", visible_alias = "n")]
        n_max: usize,
    },
    /// Consecutive class ratios, contraction ratios and their limit.
    Ratios {
        #[arg(long, value_parser = dimension)]
        d: usize,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value_t = 15)]
        digits: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Certified lower and upper bounds on the entropy per site.
    Entropy {
        #[arg(long, value_parser = dimension)]
        d: usize,
        #[arg(long, default_value_t = 6, value_parser = positive_usize)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_PRECISION, value_parser = positive_usize)]
        precision: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Symbolic positivity certificates for the ratio dynamics.
    AppendixCheck {
        #[arg(long, value_parser = dimension)]
        d: usize,
        /// omega, alpha, contraction or all.
        #[arg(long, default_value = "all")]
        which: String,
    },
    /// Recompute every reference value for d = 2, 3, 4 and compare.
    Reproduce,
}

/// Run with explicit streams; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                e if e.is_resource_limit() => EXIT_RESOURCE,
                Error::InvalidArgument(_) => EXIT_USAGE,
                _ => EXIT_MISMATCH,
            }
        }
    }
}

pub(crate) fn load_system(cli: &Cli, d: usize, err: &mut dyn Write) -> Result<RecursionSystem> {
    let (sys, origin) = load_or_generate(d, cli.cache_dir.as_deref(), cli.census_max_d)?;
    if let Origin::Regenerated { reason } = origin {
        let _ = writeln!(err, "warning: cached recursion for d={d} was unusable ({reason}); regenerated");
    }
    Ok(sys)
}

fn oracle_limits(cli: &Cli) -> OracleLimits {
    OracleLimits { max_vertices: cli.oracle_max_vertices, memo_cap: cli.memo_cap }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn strings(xs: &[BigInt]) -> Vec<String> {
    xs.iter().map(BigInt::to_string).collect()
}

#[derive(Serialize)]
struct CountJson {
    d: usize,
    n: usize,
    c: Vec<String>,
    #[serde(rename = "M")]
    total: String,
}

#[derive(Serialize)]
struct OracleJson {
    d: usize,
    n: usize,
    #[serde(rename = "M")]
    total: String,
    c: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    constraint: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<String>,
}

#[derive(Serialize)]
struct StageJson {
    n: usize,
    ratios: Vec<String>,
}

#[derive(Serialize)]
struct EpsilonJson {
    n: usize,
    value: String,
}

#[derive(Serialize)]
struct RatiosJson {
    d: usize,
    max_n: usize,
    digits: usize,
    stages: Vec<StageJson>,
    epsilon_ratios: Vec<EpsilonJson>,
    checked_from: usize,
    limit_prefix: String,
}

#[derive(Serialize)]
struct EntropyJson {
    d: usize,
    k: usize,
    precision: usize,
    lower: String,
    upper: String,
    certified_digits: usize,
    certified_prefix: String,
    lambda_digits: usize,
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::GenRecursions { d } => {
            let sys = load_system(cli, *d, err)?;
            emit(out, &sys.to_cache_text())?;
            Ok(EXIT_OK)
        }
        Command::Count { d, n, format } => {
            let sys = load_system(cli, *d, err)?;
            let stages = evolve_to_capped(&sys, *n, cli.digit_cap)?;
            let v = stages.last().expect("stage n");
            emit(out, &format_count(v, *format))?;
            Ok(EXIT_OK)
        }
        Command::Oracle { d, n, constraint, emit_graph } => {
            let g = HanoiGraph::build_capped(*d, *n, cli.vertex_cap)?;
            if let Some(path) = emit_graph {
                std::fs::write(path, g.to_csv())?;
            }
            let v = boundary_class_vector(&g, oracle_limits(cli))?;
            let (constraint, count) = match constraint {
                None => (None, None),
                Some(text) => {
                    let c: CornerConstraint = text.parse()?;
                    let mut counter = MatchingCounter::new(g.graph(), oracle_limits(cli))?;
                    let count = counter.count_constrained(g.corners(), &c)?;
                    (Some(c.to_string()), Some(count.to_string()))
                }
            };
            let json = OracleJson {
                d: *d,
                n: *n,
                total: v.total().to_string(),
                c: strings(v.counts()),
                constraint,
                count,
            };
            emit(out, &json_line(&json))?;
            Ok(EXIT_OK)
        }
        Command::Verify { d, n_max } => {
            let sys = load_system(cli, *d, err)?;
            let stages = evolve_to_capped(&sys, *n_max, cli.digit_cap)?;
            let (code, report) = verify_stages(cli, *d, &stages)?;
            emit(out, &report)?;
            Ok(code)
        }
        Command::Ratios { d, max_n, digits, format } => {
            if *max_n < 2 {
                return Err(Error::InvalidArgument("--max-n must be at least 2".into()));
            }
            let sys = load_system(cli, *d, err)?;
            let stages = evolve_to_capped(&sys, *max_n, cli.digit_cap)?;
            let trace = ratios(&stages[1..])?;
            let from = trace
                .ordered_from()
                .filter(|&s| s < *max_n)
                .ok_or_else(|| Error::Integrity("ratios are not ordered at the last two stages".into()))?;
            let report = check_ratio_dynamics(&trace.from_stage(from))?;
            let json = RatiosJson {
                d: *d,
                max_n: *max_n,
                digits: *digits,
                stages: trace.rendered(*digits).into_iter().map(|(n, ratios)| StageJson { n, ratios }).collect(),
                epsilon_ratios: trace
                    .epsilon_ratios()
                    .into_iter()
                    .map(|(n, v)| EpsilonJson { n, value: round_half_even(&v, *digits) })
                    .collect(),
                checked_from: from,
                limit_prefix: report.limit_prefix,
            };
            let text = match format {
                Format::Json => json_line(&json),
                _ => format_ratios_text(&json),
            };
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Entropy { d, k, precision, format } => {
            let sys = load_system(cli, *d, err)?;
            let stages = evolve_to_capped(&sys, *k, cli.digit_cap)?;
            let b = bounds(&stages, *k, *precision)?;
            if let Some(w) = &b.warning {
                let _ = writeln!(err, "warning: {w}");
            }
            let json = EntropyJson {
                d: b.d,
                k: b.k,
                precision: b.precision,
                lower: b.lower.to_string(),
                upper: b.upper.to_string(),
                certified_digits: b.certified_digits,
                certified_prefix: b.certified_prefix.clone(),
                lambda_digits: b.lambda_digits,
            };
            let text = match format {
                Format::Json => json_line(&json),
                _ => format!(
                    "d={} k={} precision={}\nlower {}\nupper {}\ncertified {} digits: {}\n",
                    json.d, json.k, json.precision, json.lower, json.upper, json.certified_digits, json.certified_prefix
                ),
            };
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
        Command::AppendixCheck { d, which } => {
            let certs = parse_certificate(which)?;
            let sys = load_system(cli, *d, err)?;
            let checker = AppendixChecker::with_budget(&sys, cli.term_budget);
            let mut code = EXIT_OK;
            let mut text = String::new();
            for cert in certs {
                let r = checker.run(cert);
                let terms: Vec<String> = r.expansions.iter().map(|p| p.len().to_string()).collect();
                let detail = if terms.is_empty() { String::new() } else { format!(" [terms {}]", terms.join(",")) };
                writeln!(text, "d={d} {cert}: {}{detail}", r.outcome).unwrap();
                code = code.max(match r.outcome {
                    Outcome::Passed => EXIT_OK,
                    Outcome::Failed { .. } => EXIT_MISMATCH,
                    Outcome::NotAttempted { .. } => EXIT_RESOURCE,
                });
            }
            emit(out, &text)?;
            Ok(code)
        }
        Command::Reproduce => {
            let report = reproduce::run(cli, err)?;
            emit(out, &report.text)?;
            Ok(if report.all_passed() { EXIT_OK } else { EXIT_MISMATCH })
        }
    }
}

fn format_count(v: &BoundaryClassVector, format: Format) -> String {
    let c = strings(v.counts());
    match format {
        Format::Json => json_line(&CountJson { d: v.d(), n: v.stage(), c, total: v.total().to_string() }),
        Format::Csv => {
            let header: Vec<String> = (0..c.len()).map(|k| format!("c{k}")).collect();
            format!("d,n,{},M\n{},{},{},{}\n", header.join(","), v.d(), v.stage(), c.join(","), v.total())
        }
        Format::Text => {
            let mut s = format!("d={} n={}\n", v.d(), v.stage());
            for (k, x) in c.iter().enumerate() {
                writeln!(s, "c{k} = {x}").unwrap();
            }
            writeln!(s, "M = {}", v.total()).unwrap();
            s
        }
    }
}

fn format_ratios_text(r: &RatiosJson) -> String {
    let mut s = format!("d={} ratios r0..r{} ({} digits)\n", r.d, r.d, r.digits);
    for st in &r.stages {
        writeln!(s, "n={} {}", st.n, st.ratios.join(" ")).unwrap();
    }
    writeln!(s, "eps(n+1)/eps(n)^2").unwrap();
    for e in &r.epsilon_ratios {
        writeln!(s, "n={} {}", e.n, e.value).unwrap();
    }
    writeln!(s, "ordering and monotonicity hold from stage {}", r.checked_from).unwrap();
    writeln!(s, "common limit starts {}", r.limit_prefix).unwrap();
    s
}

/// Oracle-versus-recursion comparison; returns the exit code and report.
pub(crate) fn verify_stages(cli: &Cli, d: usize, stages: &[BoundaryClassVector]) -> Result<(i32, String)> {
    let mut report = String::new();
    for v in stages {
        let g = HanoiGraph::build_capped(d, v.stage(), cli.vertex_cap)?;
        let truth = boundary_class_vector(&g, oracle_limits(cli))?;
        if let Some(k) = (0..v.counts().len()).find(|&k| v.count(k) != truth.count(k)) {
            writeln!(
                report,
                "d={d} stage {}: c{k} differs: recursion {} oracle {}",
                v.stage(),
                v.count(k),
                truth.count(k)
            )
            .unwrap();
            return Ok((EXIT_MISMATCH, report));
        }
        writeln!(report, "d={d} stage {}: match (M = {})", v.stage(), v.total()).unwrap();
    }
    Ok((EXIT_OK, report))
}

pub fn cache_dir_of(cli: &Cli) -> Option<&Path> {
    cli.cache_dir.as_deref()
}
