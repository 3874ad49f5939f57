//! Mechanical generation of the boundary-class recursion for any dimension.
//!
//! Stage `n + 1` is `d + 1` copies of stage `n` joined by the edges of a
//! `K_{d+1}`. For a subset `S` of connecting edges placed in the matching,
//! copy `i` sees `deg_S(i)` of its non-global corners forced to be monomers
//! (they are matched through the connector instead), its global corner
//! constrained by the class being counted, and every other corner free. The
//! copy therefore contributes a mixed count `N(a, b)` (`a` forced monomers,
//! `b` forced dimers), and each mixed count is a binomial combination of the
//! boundary classes `c_0..c_{d+1}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::binomial;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::hanoi_graph::connector_edges;
use crate::multipoly::{Monomial, Polynomial, VarSet};

/// Largest dimension enumerated without an explicit override (2^21 subsets).
pub const DEFAULT_CENSUS_MAX_D: usize = 6;
const HARD_CENSUS_MAX_D: usize = 10;

/// Boundary-class variables `c0..c{d+1}`.
pub fn basis_vars(d: usize) -> VarSet {
    VarSet::new((0..=d + 1).map(|k| format!("c{k}")))
}

/// Name of the mixed-count variable with `a` forced monomers and `b` forced dimers.
pub fn mixed_name(a: usize, b: usize) -> String {
    format!("N{a}_{b}")
}

/// Mixed-count variables `N{a}_{b}` for `b <= 1`, `a + b <= d + 1`.
pub fn mixed_vars(d: usize) -> VarSet {
    let names = (0..=1).flat_map(|b| (0..=d + 1 - b).map(move |a| mixed_name(a, b)));
    VarSet::new(names)
}

fn check_census_cap(d: usize, max_d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension d must be at least 2, got {d}")));
    }
    if d > max_d.min(HARD_CENSUS_MAX_D) {
        return Err(Error::CensusCap {
            d,
            subsets: 1u128 << ((d + 1) * d / 2),
            max_d: max_d.min(HARD_CENSUS_MAX_D),
        });
    }
    Ok(())
}

/// Number of connector subsets realizing each labeled degree sequence
/// `(deg_S(0), ..., deg_S(d))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledCensus {
    d: usize,
    entries: BTreeMap<Vec<u8>, u64>,
}

impl LabeledCensus {
    pub fn compute(d: usize, max_d: usize) -> Result<Self> {
        check_census_cap(d, max_d)?;
        let edges = connector_edges(d);
        let m = edges.len();
        // degrees packed four bits per copy; d <= 10 keeps every degree below 16
        let mut deg = vec![0u8; d + 1];
        let pack = |deg: &[u8]| deg.iter().rev().fold(0u64, |acc, &x| (acc << 4) | x as u64);
        let mut counts: FxHashMap<u64, u64> = FxHashMap::default();
        counts.insert(0, 1);
        // Gray-code walk: one edge toggles per step
        let mut gray: u64 = 0;
        for step in 1u64..(1u64 << m) {
            let bit = step.trailing_zeros() as usize;
            gray ^= 1 << bit;
            let (i, j) = edges[bit].copies;
            if gray >> bit & 1 == 1 {
                deg[i] += 1;
                deg[j] += 1;
            } else {
                deg[i] -= 1;
                deg[j] -= 1;
            }
            *counts.entry(pack(&deg)).or_default() += 1;
        }
        let entries = counts
            .into_iter()
            .map(|(key, n)| ((0..=d).map(|i| (key >> (4 * i) & 0xf) as u8).collect(), n))
            .collect();
        Ok(LabeledCensus { d, entries })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &BTreeMap<Vec<u8>, u64> {
        &self.entries
    }

    pub fn total(&self) -> u128 {
        self.entries.values().map(|&n| n as u128).sum()
    }
}

/// Connector subsets grouped by their unlabeled (sorted) degree multiset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeCensus {
    d: usize,
    entries: BTreeMap<Vec<u8>, u64>,
}

impl DegreeCensus {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &BTreeMap<Vec<u8>, u64> {
        &self.entries
    }

    pub fn get(&self, multiset: &[u8]) -> u64 {
        let mut key = multiset.to_vec();
        key.sort_unstable();
        self.entries.get(&key).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u128 {
        self.entries.values().map(|&n| n as u128).sum()
    }
}

pub fn census(d: usize) -> Result<DegreeCensus> {
    census_capped(d, DEFAULT_CENSUS_MAX_D)
}

pub fn census_capped(d: usize, max_d: usize) -> Result<DegreeCensus> {
    let labeled = LabeledCensus::compute(d, max_d)?;
    let mut entries = BTreeMap::new();
    for (deg, &n) in labeled.entries() {
        let mut key = deg.clone();
        key.sort_unstable();
        *entries.entry(key).or_default() += n;
    }
    Ok(DegreeCensus { d, entries })
}

/// `N(a, b) = sum_j C(d+1-a-b, j) c_{b+j}` over the basis variables.
pub fn mixed_count_expansion(d: usize, monomers: usize, dimers: usize) -> Result<Polynomial> {
    if monomers + dimers > d + 1 {
        return Err(Error::InvalidArgument(format!(
            "{monomers} monomer and {dimers} dimer corners exceed the {} corners of TH_{d}",
            d + 1
        )));
    }
    let vars = basis_vars(d);
    let free = d + 1 - monomers - dimers;
    let terms = (0..=free).map(|j| {
        let mut exps = vec![0u32; d + 2];
        exps[dimers + j] = 1;
        (Monomial::from_exponents(exps), BigInt::from(binomial(free as u64, j as u64)))
    });
    Ok(Polynomial::from_terms(&vars, terms))
}

/// Which count of stage `n + 1` a recursion polynomial produces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// Matchings whose dimer-covered global corners are exactly `forced`;
    /// every other global corner is a monomer.
    Class { forced: Vec<usize> },
    /// All matchings.
    Total,
}

impl Target {
    pub fn class(d: usize, k: usize) -> Target {
        assert!(k <= d + 1);
        Target::Class { forced: (0..k).collect() }
    }
}

/// The recursion for `target` written over the mixed-count variables, before
/// expanding them into boundary classes.
pub fn mixed_recursion(census: &LabeledCensus, target: &Target) -> Polynomial {
    let d = census.d();
    let vars = mixed_vars(d);
    let slot = |a: usize, b: usize| vars.index_of(&mixed_name(a, b)).expect("declared mixed count");
    let mut out = Polynomial::zero(&vars);
    for (deg, &n) in census.entries() {
        let mut exps = vec![0u32; vars.len()];
        for (copy, &dg) in deg.iter().enumerate() {
            let dg = dg as usize;
            let (a, b) = match target {
                Target::Total => (dg, 0),
                Target::Class { forced } if forced.contains(&copy) => (dg, 1),
                Target::Class { .. } => (dg + 1, 0),
            };
            exps[slot(a, b)] += 1;
        }
        out.add_term(Monomial::from_exponents(exps), BigInt::from(n));
    }
    out
}

/// Bindings from mixed-count variables to their boundary-class expansions.
pub fn mixed_bindings(d: usize) -> HashMap<String, Polynomial> {
    let mut out = HashMap::new();
    for b in 0..=1 {
        for a in 0..=d + 1 - b {
            out.insert(mixed_name(a, b), mixed_count_expansion(d, a, b).expect("a + b <= d + 1"));
        }
    }
    out
}

/// Expand a mixed-count polynomial into the boundary-class basis.
pub fn expand_mixed(d: usize, p: &Polynomial) -> Polynomial {
    p.substitute(&mixed_bindings(d))
        .with_vars(&basis_vars(d))
        .expect("expansions only use basis variables")
}

/// Boundary-class recursion for one dimension: `classes[k]` gives `c_k` at
/// stage `n + 1` and `total` gives `M` at stage `n + 1`, both as polynomials
/// in the stage-`n` classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionSystem {
    d: usize,
    classes: Vec<Polynomial>,
    total: Polynomial,
}

pub fn generate(d: usize) -> Result<RecursionSystem> {
    generate_capped(d, DEFAULT_CENSUS_MAX_D)
}

pub fn generate_capped(d: usize, max_d: usize) -> Result<RecursionSystem> {
    let census = LabeledCensus::compute(d, max_d)?;
    Ok(generate_from_census(&census))
}

pub fn generate_from_census(census: &LabeledCensus) -> RecursionSystem {
    use rayon::prelude::*;
    let d = census.d();
    let mut targets: Vec<Target> = (0..=d + 1).map(|k| Target::class(d, k)).collect();
    targets.push(Target::Total);
    let mut polys: Vec<Polynomial> = targets
        .par_iter()
        .map(|t| expand_mixed(d, &mixed_recursion(census, t)))
        .collect();
    let total = polys.pop().expect("total polynomial");
    RecursionSystem { d, classes: polys, total }
}

impl RecursionSystem {
    pub fn new(d: usize, classes: Vec<Polynomial>, total: Polynomial) -> Result<Self> {
        if classes.len() != d + 2 {
            return Err(Error::InvalidArgument(format!(
                "expected {} class polynomials, got {}",
                d + 2,
                classes.len()
            )));
        }
        let vars = basis_vars(d);
        let classes = classes.iter().map(|p| p.with_vars(&vars)).collect::<Result<Vec<_>>>()?;
        let total = total.with_vars(&vars)?;
        Ok(RecursionSystem { d, classes, total })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vars(&self) -> VarSet {
        basis_vars(self.d)
    }

    pub fn classes(&self) -> &[Polynomial] {
        &self.classes
    }

    pub fn class(&self, k: usize) -> &Polynomial {
        &self.classes[k]
    }

    pub fn total(&self) -> &Polynomial {
        &self.total
    }

    /// Checks homogeneity of degree `d + 1`, nonnegative coefficients, and
    /// the coefficient sums predicted by the census.
    pub fn check_structure(&self, census: &LabeledCensus) -> Result<()> {
        let d = self.d;
        let ones: HashMap<String, BigInt> =
            self.vars().names().iter().map(|n| (n.clone(), BigInt::from(1))).collect();
        let free_slots = |a: usize, b: usize| -> BigInt { BigInt::from(1u64 << (d + 1 - a - b)) };
        for (idx, p) in self.classes.iter().chain(std::iter::once(&self.total)).enumerate() {
            let name = if idx <= d + 1 { format!("c{idx}") } else { "M".to_string() };
            if p.homogeneous_degree() != Some(d as u32 + 1) {
                return Err(Error::Integrity(format!("{name} is not homogeneous of degree {}", d + 1)));
            }
            if !p.all_coefficients_nonnegative() {
                return Err(Error::Integrity(format!("{name} has a negative coefficient")));
            }
            let target = if idx <= d + 1 { Target::class(d, idx) } else { Target::Total };
            let mut expected = BigInt::from(0);
            for (deg, &n) in census.entries() {
                let mut prod = BigInt::from(n);
                for (copy, &dg) in deg.iter().enumerate() {
                    let dg = dg as usize;
                    prod *= match &target {
                        Target::Total => free_slots(dg, 0),
                        Target::Class { forced } if forced.contains(&copy) => free_slots(dg, 1),
                        Target::Class { .. } => free_slots(dg + 1, 0),
                    };
                }
                expected += prod;
            }
            let actual = p.evaluate_int(&ones)?;
            if actual != expected {
                return Err(Error::Integrity(format!(
                    "{name} coefficient sum {actual} differs from census prediction {expected}"
                )));
            }
        }
        Ok(())
    }

    /// Cache-file text: a header line, then one `label: polynomial` line per
    /// class and one for `M`.
    pub fn to_cache_text(&self) -> String {
        let mut out = format!("# d={} basis=c0..c{}\n", self.d, self.d + 1);
        for (k, p) in self.classes.iter().enumerate() {
            writeln!(out, "c{k}: {p}").unwrap();
        }
        writeln!(out, "M: {}", self.total).unwrap();
        out
    }

    pub fn from_cache_text(text: &str) -> Result<Self> {
        let bad = |reason: String| Error::Domain(format!("malformed recursion text: {reason}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty".into()))?;
        let d: usize = header
            .strip_prefix("# d=")
            .and_then(|rest| rest.split_whitespace().next())
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(format!("bad header `{header}`")))?;
        if d < 2 || d > HARD_CENSUS_MAX_D {
            return Err(bad(format!("dimension {d} out of range")));
        }
        if header != format!("# d={} basis=c0..c{}", d, d + 1) {
            return Err(bad(format!("bad header `{header}`")));
        }
        let vars = basis_vars(d);
        let mut classes = Vec::new();
        let mut total = None;
        for (i, line) in lines.enumerate() {
            let (label, body) = line.split_once(": ").ok_or_else(|| bad(format!("line {} has no label", i + 2)))?;
            let p = Polynomial::parse(body, &vars)?;
            if label == "M" && classes.len() == d + 2 && total.is_none() {
                total = Some(p);
            } else if label == format!("c{}", classes.len()) && total.is_none() {
                classes.push(p);
            } else {
                return Err(bad(format!("unexpected label `{label}` on line {}", i + 2)));
            }
        }
        let total = total.ok_or_else(|| bad("missing `M` line".into()))?;
        RecursionSystem::new(d, classes, total)
    }
}

/// Ratio variables `r0..r{d}`, with `r_j = c_j / c_{j+1}`.
pub fn ratio_vars(d: usize) -> VarSet {
    VarSet::new((0..=d).map(|j| format!("r{j}")))
}

/// The recursion rewritten in ratio variables.
///
/// Substituting `c_k = (r_k r_{k+1} ... r_d) c_{d+1}` turns each class
/// polynomial into `c_{d+1}^(d+1) * r_d^(omega_power[k]) * forms[k]`, where
/// `forms[k]` is not divisible by `r_d`. Consecutive ratios at the next stage
/// are then `r_k(n+1) = r_d(n) * forms[k] / forms[k+1]`.
#[derive(Clone, Debug)]
pub struct RatioForms {
    d: usize,
    forms: Vec<Polynomial>,
    omega_power: Vec<u32>,
    total: Polynomial,
}

pub fn ratio_form(sys: &RecursionSystem) -> RatioForms {
    let d = sys.d();
    let rv = ratio_vars(d);
    let mut bindings = HashMap::new();
    for k in 0..=d + 1 {
        let mut exps = vec![0u32; d + 1];
        for e in exps.iter_mut().skip(k) {
            *e = 1;
        }
        bindings.insert(
            format!("c{k}"),
            Polynomial::from_terms(&rv, [(Monomial::from_exponents(exps), BigInt::from(1))]),
        );
    }
    let to_ratio = |p: &Polynomial| p.substitute(&bindings).with_vars(&rv).expect("ratio variables only");
    let omega = format!("r{d}");
    let mut forms = Vec::with_capacity(d + 2);
    let mut omega_power = Vec::with_capacity(d + 2);
    for p in sys.classes() {
        let full = to_ratio(p);
        let pw = full.min_degree_in(&omega);
        forms.push(strip_power(&full, d, pw));
        omega_power.push(pw);
    }
    RatioForms { d, forms, omega_power, total: to_ratio(sys.total()) }
}

fn strip_power(p: &Polynomial, var: usize, pw: u32) -> Polynomial {
    let terms = p.terms().map(|(m, c)| {
        let mut exps = m.exponents().to_vec();
        exps[var] -= pw;
        (Monomial::from_exponents(exps), c.clone())
    });
    Polynomial::from_terms(p.vars(), terms)
}

impl RatioForms {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vars(&self) -> VarSet {
        ratio_vars(self.d)
    }

    /// Forms with the largest power of `r_d` divided out.
    pub fn forms(&self) -> &[Polynomial] {
        &self.forms
    }

    pub fn omega_powers(&self) -> &[u32] {
        &self.omega_power
    }

    /// The full image of class `k`: `r_d^(omega_power[k]) * forms[k]`.
    pub fn full_form(&self, k: usize) -> Polynomial {
        let mut exps = vec![0u32; self.d + 1];
        exps[self.d] = self.omega_power[k];
        let mono = Polynomial::from_terms(&self.vars(), [(Monomial::from_exponents(exps), BigInt::from(1))]);
        &mono * &self.forms[k]
    }

    /// Image of the total-count polynomial.
    pub fn total(&self) -> &Polynomial {
        &self.total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_d3() {
        let c = census(3).unwrap();
        assert_eq!(c.get(&[1, 1, 1, 3]), 4);
        assert_eq!(c.get(&[0, 2, 2, 2]), 4);
        assert_eq!(c.get(&[1, 1, 2, 2]), 12);
        assert_eq!(c.total(), 64);
        assert!(c.entries().keys().all(|k| k.iter().all(|&x| x <= 3)));
    }

    #[test]
    fn census_totals() {
        let c2 = census(2).unwrap();
        assert_eq!(c2.total(), 8);
        // 1 empty + 3 single edges + 3 paths + 1 triangle
        assert_eq!(c2.get(&[0, 0, 0]), 1);
        assert_eq!(c2.get(&[0, 1, 1]), 3);
        assert_eq!(c2.get(&[1, 1, 2]), 3);
        assert_eq!(c2.get(&[2, 2, 2]), 1);
        assert_eq!(census(4).unwrap().total(), 1024);
    }

    #[test]
    fn census_cap() {
        assert!(matches!(census_capped(5, 4), Err(Error::CensusCap { d: 5, .. })));
        assert!(census(1).is_err());
    }

    #[test]
    fn mixed_counts_d3() {
        let v = basis_vars(3);
        let p = |s: &str| Polynomial::parse(s, &v).unwrap();
        assert_eq!(mixed_count_expansion(3, 1, 0).unwrap(), p("c0 + 3*c1 + 3*c2 + c3"));
        assert_eq!(mixed_count_expansion(3, 2, 1).unwrap(), p("c1 + c2"));
        assert_eq!(mixed_count_expansion(3, 4, 0).unwrap(), p("c0"));
        assert!(mixed_count_expansion(3, 3, 2).is_err());
    }

    #[test]
    fn generated_structure() {
        for d in 2..=4 {
            let census = LabeledCensus::compute(d, DEFAULT_CENSUS_MAX_D).unwrap();
            let sys = generate_from_census(&census);
            sys.check_structure(&census).unwrap();
        }
    }

    #[test]
    fn cache_text_round_trip() {
        let sys = generate(3).unwrap();
        let text = sys.to_cache_text();
        assert!(text.starts_with("# d=3 basis=c0..c4\nc0: 64*c0^4 + "));
        let back = RecursionSystem::from_cache_text(&text).unwrap();
        assert_eq!(back, sys);
        assert_eq!(back.to_cache_text(), text);
    }

    #[test]
    fn corrupt_cache_text_is_rejected() {
        let text = generate(2).unwrap().to_cache_text();
        assert!(RecursionSystem::from_cache_text(&text.replace("c1:", "c7:")).is_err());
        assert!(RecursionSystem::from_cache_text(&text.replace("*c0", "*q0")).is_err());
        let truncated: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
        assert!(RecursionSystem::from_cache_text(&truncated).is_err());
        assert!(RecursionSystem::from_cache_text("").is_err());
    }

    #[test]
    fn ratio_form_strips_expected_powers() {
        for d in 2..=4 {
            let rf = ratio_form(&generate(d).unwrap());
            let expected: Vec<u32> = (0..=d as u32 + 1).map(|k| d as u32 + 1 - k).collect();
            assert_eq!(rf.omega_powers(), expected.as_slice());
            for f in rf.forms() {
                assert_eq!(f.coefficient(&[]), BigInt::from(1), "constant term of every form is 1");
            }
        }
    }
}
