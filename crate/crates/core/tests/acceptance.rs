//! Acceptance suite: one line per criterion, exit status 1 if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_rational::BigRational;

use hanoi_dimer_core::appendix_check::{leading_omega_block, AppendixChecker, Certificate};
use hanoi_dimer_core::decimal::{floor_digits, round_half_even};
use hanoi_dimer_core::entropy::{bounds, finite_sandwich_check};
use hanoi_dimer_core::evolve::{evolve_to, ratios, BoundaryClassVector};
use hanoi_dimer_core::fixtures::{d3_gap_renames, reference, DimensionReference};
use hanoi_dimer_core::hanoi_graph::HanoiGraph;
use hanoi_dimer_core::matching_oracle::{boundary_class_vector, OracleLimits};
use hanoi_dimer_core::multipoly::{Polynomial, VarSet};
use hanoi_dimer_core::recursion_gen::generate;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn stages(d: usize, n: usize) -> Result<Vec<BoundaryClassVector>, String> {
    let sys = generate(d).map_err(|e| e.to_string())?;
    evolve_to(&sys, n).map_err(|e| e.to_string())
}

fn exact_integers(fixture: &DimensionReference, stages: &[BoundaryClassVector], rows: &[usize]) -> Check {
    let mut compared = 0;
    for &n in rows {
        let row = fixture.stages.iter().find(|r| r.n == n).ok_or(format!("no reference row {n}"))?;
        let v = &stages[n];
        for (k, expected) in row.c.iter().enumerate() {
            ensure(v.count(k).to_string() == *expected, || format!("stage {n} c{k}: expected {expected}, got {}", v.count(k)))?;
            compared += 1;
        }
        ensure(v.total().to_string() == row.total, || format!("stage {n} total: expected {}, got {}", row.total, v.total()))?;
        compared += 1;
    }
    Ok(format!("{compared} integers equal"))
}

fn d3_counts() -> Check {
    let s = stages(3, 2)?;
    exact_integers(&reference().d3, &s, &[1, 2])
}

fn d4_counts() -> Check {
    let s = stages(4, 2)?;
    exact_integers(&reference().d4, &s, &[1, 2])
}

fn oracle_equivalence() -> Check {
    let mut compared = Vec::new();
    for (d, n_max) in [(2, 2), (3, 1), (4, 1)] {
        let evolved = stages(d, n_max)?;
        for v in &evolved {
            let g = HanoiGraph::build(d, v.stage()).map_err(|e| e.to_string())?;
            let truth = boundary_class_vector(&g, OracleLimits::default()).map_err(|e| e.to_string())?;
            ensure(truth.counts() == v.counts(), || {
                format!("d={d} n={}: oracle {:?} vs recursion {:?}", v.stage(), truth.counts(), v.counts())
            })?;
        }
        compared.push(format!("d={d} n<={n_max}"));
    }
    Ok(compared.join(", "))
}

fn golden_system() -> Check {
    let printed = reference().d3.recursion_system().map_err(|e| e.to_string())?.ok_or("no printed recursion")?;
    let generated = generate(3).map_err(|e| e.to_string())?;
    let (a, b) = (printed.to_cache_text(), generated.to_cache_text());
    ensure(a == b, || "serializations differ".into())?;
    Ok(format!("{} bytes identical", a.len()))
}

fn ratio_values() -> Check {
    let f = reference();
    let s3 = stages(3, 5)?;
    let s4 = stages(4, 5)?;
    let start = Instant::now();
    let mut values = 0;
    for (fixture, s) in [(&f.d3, &s3), (&f.d4, &s4)] {
        let trace = ratios(&s[1..]).map_err(|e| e.to_string())?;
        for (i, row) in fixture.ratios.iter().enumerate() {
            let st = trace.at_stage(i + 1).ok_or("missing stage")?;
            for (j, expected) in row.iter().enumerate() {
                let got = round_half_even(&st.ratios[j], fixture.ratio_digits);
                ensure(&got == expected, || format!("d={} n={} r{j}: expected {expected}, got {got}", fixture.d(), i + 1))?;
                values += 1;
            }
        }
        if let (Some(digits), Some(rows)) = (fixture.epsilon_digits, &fixture.epsilon_ratios) {
            let eps = trace.epsilon_ratios();
            for (i, expected) in rows.iter().enumerate() {
                let (_, v) = eps.get(i).ok_or("missing contraction ratio")?;
                // printed at ten times the value and cut, not rounded
                let got = floor_digits(&(v * BigRational::from_integer(10.into())), digits);
                ensure(&got == expected, || format!("eps n={}: expected {expected}, got {got}", i + 1))?;
                values += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("comparison took {elapsed:?}"))?;
    Ok(format!("{values} printed values agree"))
}

fn entropy_case(d: usize, prefix: &str, min_digits: usize) -> Check {
    let s = stages(d, 6)?;
    let b = bounds(&s, 6, 160).map_err(|e| e.to_string())?;
    ensure(b.certified_prefix.starts_with(prefix), || format!("prefix {}", b.certified_prefix))?;
    ensure(b.certified_digits >= min_digits, || format!("only {} digits", b.certified_digits))?;
    Ok(format!("{} certified digits", b.certified_digits))
}

fn sandwich() -> Check {
    let mut done = 0;
    for d in [3, 4] {
        let s = stages(d, 3)?;
        for (k, n) in [(1, 2), (1, 3), (2, 3)] {
            let r = finite_sandwich_check(&s, k, n).map_err(|e| e.to_string())?;
            ensure(r.lower < BigRational::from_integer(r.total.clone()), || format!("d={d} k={k} n={n} lower"))?;
            ensure(BigRational::from_integer(r.total.clone()) < r.upper, || format!("d={d} k={k} n={n} upper"))?;
            done += 1;
        }
    }
    Ok(format!("{done} exact inequalities hold"))
}

fn certificates() -> Check {
    for d in [2, 3, 4] {
        let checker = AppendixChecker::new(&generate(d).map_err(|e| e.to_string())?);
        for cert in Certificate::ALL {
            let r = checker.run(cert);
            ensure(r.outcome.passed(), || format!("d={d} {cert}: {}", r.outcome))?;
        }
    }
    let checker = AppendixChecker::new(&generate(3).map_err(|e| e.to_string())?);
    let printed = VarSet::new(["omega", "a", "b", "c"]);
    let rename = |p: &Polynomial| p.rename(&d3_gap_renames()).with_vars(&printed).unwrap();
    let omega = rename(&checker.omega_ascending().expansions[0]);
    let (top, block) = leading_omega_block(&omega);
    ensure(top == 11 && block.to_string() == "64*a + 64*b + 64*c", || format!("omega^{top} block {block}"))?;
    let appendix = reference().d3.appendix.as_ref().ok_or("no appendix reference")?;
    let full = Polynomial::parse(&appendix.omega_difference, &printed).map_err(|e| e.to_string())?;
    ensure(omega == full, || "omega difference differs from the printed expansion".into())?;
    let contraction = rename(&checker.contraction().expansions[0]);
    let (top, block) = leading_omega_block(&contraction);
    let lead = &Polynomial::var(&printed, "omega").pow(top) * &block;
    ensure(lead.to_string() == appendix.contraction_leading, || format!("leading term {lead}"))?;
    Ok("d=2,3,4 pass; spot coefficients match".into())
}

fn narrowing_probe() -> Check {
    let s = stages(5, 3)?;
    let mut prev: Option<(BigRational, BigRational)> = None;
    let mut widths = Vec::new();
    for k in 1..=3 {
        let b = bounds(&s, k, 160).map_err(|e| e.to_string())?;
        let (lo, hi) = (b.lower.to_rational(), b.upper.to_rational());
        ensure(lo < hi, || format!("k={k}: bounds not ordered"))?;
        if let Some((plo, phi)) = &prev {
            ensure(&lo >= plo, || format!("k={k}: lower decreased"))?;
            ensure(&hi <= phi, || format!("k={k}: upper increased"))?;
            ensure(&hi - &lo < phi - plo, || format!("k={k}: width did not shrink"))?;
        }
        widths.push(b.certified_digits.to_string());
        prev = Some((lo, hi));
    }
    Ok(format!("certified digits {}", widths.join(", ")))
}

fn determinism() -> Check {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_hanoi-dimer"))
            .arg("reproduce")
            .env_remove("HANOI_DIMER_CACHE")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success(), || format!("reproduce exited with {}:\n{}", a.status, String::from_utf8_lossy(&a.stdout)))?;
    ensure(a.stdout == b.stdout, || "outputs differ".into())?;
    Ok(format!("{} identical bytes, exit 0", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, u64, fn() -> Check)> = vec![
        ("d=3 class counts at n=1,2", 1, d3_counts),
        ("d=4 class counts at n=1,2", 1, d4_counts),
        ("recursion agrees with brute force", 300, oracle_equivalence),
        ("d=3 recursion matches the printed system", 60, golden_system),
        ("ratio and contraction tables", 60, ratio_values),
        ("d=3 entropy bounds at k=6", 30, || entropy_case(3, "0.65719921144295911522", 101)),
        ("d=4 entropy bounds at k=6", 120, || entropy_case(4, "0.72291383087181938879", 120)),
        ("d=2 entropy bounds at k=6", 10, || entropy_case(2, "0.5764643016", 10)),
        ("finite sandwich for d=3,4", 60, sandwich),
        ("symbolic certificates", 600, certificates),
        ("d=5 bounds narrow with k", 600, narrowing_probe),
        ("reproduce is deterministic", 600, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(limit) => Err(format!("{detail}, but over the {limit}s limit")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({:.2}s): {detail}", i + 1, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({:.2}s): {why}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
