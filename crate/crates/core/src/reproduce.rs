//! Recompute the reference values for d = 2, 3, 4 and compare them with the
//! embedded fixtures. The report is deterministic: no timings, fixed order.

use std::fmt::Write as _;
use std::io::Write;

use num_rational::BigRational;

use crate::appendix_check::{leading_omega_block, AppendixChecker, Certificate};
use crate::cli::{load_system, verify_stages, Cli, EXIT_OK};
use crate::decimal::{floor_digits, round_half_even};
use crate::entropy::{bounds, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::evolve::{check_ratio_dynamics, evolve_to_capped, ratios, BoundaryClassVector, RatioTrace};
use crate::fixtures::{d3_gap_renames, reference, DimensionReference};
use crate::multipoly::{Polynomial, VarSet};
use crate::recursion_gen::{basis_vars, RecursionSystem};

/// Deepest stage evolved; the bounds use `k = 6`.
const STAGES: usize = 6;

/// Oracle cross-check depth per dimension.
const ORACLE_DEPTH: [(usize, usize); 3] = [(2, 2), (3, 1), (4, 1)];

pub struct Report {
    pub text: String,
    pub checks: usize,
    pub mismatches: usize,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.mismatches == 0
    }

    fn record(&mut self, label: &str, outcome: std::result::Result<String, String>) {
        self.checks += 1;
        match outcome {
            Ok(detail) => writeln!(self.text, "ok       {label}: {detail}").unwrap(),
            Err(diff) => {
                self.mismatches += 1;
                writeln!(self.text, "MISMATCH {label}: {diff}").unwrap();
            }
        }
    }
}

fn same(expected: &str, got: &str) -> std::result::Result<String, String> {
    if expected == got {
        Ok(got.to_string())
    } else {
        Err(format!("expected {expected}, got {got}"))
    }
}

fn starts_with(expected: &str, got: &str) -> std::result::Result<String, String> {
    if got.starts_with(expected) {
        Ok(expected.to_string())
    } else {
        Err(format!("expected prefix {expected}, got {got}"))
    }
}

/// The printed contraction ratios are ten times the value with the leading
/// zero dropped, and cut rather than rounded.
fn epsilon_as_printed(trace: &RatioTrace, digits: usize) -> Vec<String> {
    trace
        .epsilon_ratios()
        .into_iter()
        .map(|(_, v)| {
            floor_digits(&(v * BigRational::from_integer(10.into())), digits)
        })
        .collect()
}

fn compare_stages(report: &mut Report, d: usize, fixture: &DimensionReference, stages: &[BoundaryClassVector]) {
    for row in &fixture.stages {
        let got: Vec<String> = stages[row.n].counts().iter().map(|c| c.to_string()).collect();
        report.record(&format!("d={d} classes at stage {}", row.n), same(&row.c.join(" "), &got.join(" ")));
        report.record(&format!("d={d} total at stage {}", row.n), same(&row.total, &stages[row.n].total().to_string()));
    }
}

fn compare_ratios(report: &mut Report, d: usize, fixture: &DimensionReference, trace: &RatioTrace) {
    for (i, row) in fixture.ratios.iter().enumerate() {
        let n = i + 1;
        let got = trace
            .at_stage(n)
            .map(|s| s.ratios.iter().map(|r| round_half_even(r, fixture.ratio_digits)).collect::<Vec<_>>().join(" "))
            .unwrap_or_default();
        report.record(&format!("d={d} ratios at stage {n}"), same(&row.join(" "), &got));
    }
    if let (Some(digits), Some(rows)) = (fixture.epsilon_digits, &fixture.epsilon_ratios) {
        let got = epsilon_as_printed(trace, digits);
        for (i, expected) in rows.iter().enumerate() {
            let g = got.get(i).map(String::as_str).unwrap_or("");
            report.record(&format!("d={d} contraction ratio at stage {}", i + 1), same(expected, g));
        }
    }
}

fn compare_entropy(report: &mut Report, d: usize, stages: &[BoundaryClassVector], k: usize, prefix: &str, min: usize) -> Result<()> {
    let b = bounds(stages, k, DEFAULT_PRECISION)?;
    report.record(&format!("d={d} entropy prefix at k={k}"), starts_with(prefix, &b.certified_prefix));
    let certified = if b.certified_digits >= min {
        Ok(format!("{} digits", b.certified_digits))
    } else {
        Err(format!("expected at least {min} digits, got {}", b.certified_digits))
    };
    report.record(&format!("d={d} certified digits at k={k}"), certified);
    Ok(())
}

fn compare_appendix(report: &mut Report, sys: &RecursionSystem) {
    let d = sys.d();
    let checker = AppendixChecker::new(sys);
    let mut omega_block = None;
    let mut contraction = None;
    for cert in Certificate::ALL {
        let r = checker.run(cert);
        let outcome = if r.outcome.passed() { Ok("pass".to_string()) } else { Err(r.outcome.to_string()) };
        report.record(&format!("d={d} certificate {cert}"), outcome);
        match cert {
            Certificate::OmegaAscending => omega_block = r.expansions.into_iter().next(),
            Certificate::Contraction => contraction = r.expansions.into_iter().next(),
            _ => {}
        }
    }
    let Some(appendix) = (d == 3).then(|| reference().d3.appendix.as_ref()).flatten() else { return };
    let printed_vars = VarSet::new(["omega", "a", "b", "c"]);
    let renamed = |p: &Polynomial| p.rename(&d3_gap_renames()).with_vars(&printed_vars).expect("gap variables");
    let parsed = |text: &str| Polynomial::parse(text, &printed_vars);
    match (omega_block, parsed(&appendix.omega_difference)) {
        (Some(got), Ok(expected)) => {
            let got = renamed(&got);
            let outcome = if got == expected { Ok(format!("{} terms", got.len())) } else { Err("expansions differ".into()) };
            report.record("d=3 omega difference expansion", outcome);
        }
        (_, Err(e)) => report.record("d=3 omega difference expansion", Err(e.to_string())),
        (None, _) => report.record("d=3 omega difference expansion", Err("not computed".into())),
    }
    match (contraction, parsed(&appendix.contraction_leading)) {
        (Some(got), Ok(expected)) => {
            let (top, block) = leading_omega_block(&renamed(&got));
            let omega = Polynomial::var(&printed_vars, "omega").pow(top);
            let lead = &omega * &block;
            report.record("d=3 contraction leading term", same(&expected.to_string(), &lead.to_string()));
        }
        (_, Err(e)) => report.record("d=3 contraction leading term", Err(e.to_string())),
        (None, _) => report.record("d=3 contraction leading term", Err("not computed".into())),
    }
}

fn compare_recursion(report: &mut Report, sys: &RecursionSystem) -> Result<()> {
    let Some(printed) = reference().d3.recursion_system()? else { return Ok(()) };
    let outcome = if printed.to_cache_text() == sys.to_cache_text() {
        Ok(format!("{} polynomials", basis_vars(3).len() + 1))
    } else {
        Err("generated system differs from the printed one".into())
    };
    report.record("d=3 recursion system", outcome);
    Ok(())
}

pub fn run(cli: &Cli, err: &mut dyn Write) -> Result<Report> {
    let mut report = Report { text: String::new(), checks: 0, mismatches: 0 };
    let fixtures = reference();
    for (d, oracle_n) in ORACLE_DEPTH {
        writeln!(report.text, "== d={d}").unwrap();
        let sys = load_system(cli, d, err)?;
        let stages = evolve_to_capped(&sys, STAGES, cli.digit_cap)?;
        let (code, text) = verify_stages(cli, d, &stages[..=oracle_n])?;
        report.record(
            &format!("d={d} brute force through stage {oracle_n}"),
            if code == EXIT_OK { Ok("match".into()) } else { Err(text.trim_end().to_string()) },
        );
        let trace = ratios(&stages[1..])?;
        let from = trace.ordered_from();
        let dynamics = match from {
            Some(from) if from < STAGES => check_ratio_dynamics(&trace.from_stage(from)).map(|r| (from, r)),
            _ => Err(Error::Integrity("ratios never settle into order".into())),
        };
        match &dynamics {
            Ok((from, _)) => report.record(&format!("d={d} ratio ordering"), Ok(format!("holds from stage {from}"))),
            Err(e) => report.record(&format!("d={d} ratio ordering"), Err(e.to_string())),
        }
        let fixture = match d {
            3 => Some(&fixtures.d3),
            4 => Some(&fixtures.d4),
            _ => None,
        };
        match fixture {
            Some(f) => {
                if d == 3 {
                    compare_recursion(&mut report, &sys)?;
                }
                compare_stages(&mut report, d, f, &stages);
                compare_ratios(&mut report, d, f, &trace);
                let limit = dynamics.as_ref().map(|(_, r)| r.limit_prefix.clone()).unwrap_or_default();
                report.record(&format!("d={d} ratio limit"), starts_with(&f.ratio_limit, &limit));
                compare_entropy(&mut report, d, &stages, f.entropy_k, &f.entropy_prefix, f.entropy_min_certified)?;
            }
            None => {
                let f = &fixtures.d2;
                compare_entropy(&mut report, d, &stages, f.entropy_k, &f.entropy_prefix, 1)?;
            }
        }
        compare_appendix(&mut report, &sys);
    }
    writeln!(report.text, "== {} checks, {} mismatches", report.checks, report.mismatches).unwrap();
    Ok(report)
}
