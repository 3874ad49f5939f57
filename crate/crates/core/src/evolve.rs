//! Exact iteration of a recursion system, ratio traces and the ordering and
//! contraction checks on them.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::decimal::{common_prefix, integer_digits, round_half_even};
use crate::error::{Error, Result};
use crate::multipoly::Polynomial;
use crate::recursion_gen::RecursionSystem;

pub const DEFAULT_DIGIT_CAP: u64 = 10_000_000;

/// Boundary classes `c_0..c_{d+1}` of TH_d(n) together with the total
/// matching count `M = sum_k C(d+1, k) c_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryClassVector {
    d: usize,
    stage: usize,
    counts: Vec<BigInt>,
    total: BigInt,
}

impl BoundaryClassVector {
    pub fn new(d: usize, stage: usize, counts: Vec<BigInt>) -> Self {
        assert_eq!(counts.len(), d + 2, "expected c_0..c_{{d+1}}");
        let total = weighted_total(d, &counts);
        BoundaryClassVector { d, stage, counts, total }
    }

    /// Stage 0 on `K_{d+1}`: `c_k` is the number of perfect matchings of
    /// `K_k`, i.e. `(k-1)!!` for even `k` and 0 for odd `k`.
    pub fn initial(d: usize) -> Self {
        let counts = (0..=d + 1)
            .map(|k| {
                if k % 2 == 1 {
                    BigInt::zero()
                } else {
                    (1..k).step_by(2).fold(BigInt::one(), |acc, j| acc * j)
                }
            })
            .collect();
        BoundaryClassVector::new(d, 0, counts)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn counts(&self) -> &[BigInt] {
        &self.counts
    }

    pub fn count(&self, k: usize) -> &BigInt {
        &self.counts[k]
    }

    /// All corners dimer-covered: `c_{d+1}`.
    pub fn all_dimer(&self) -> &BigInt {
        &self.counts[self.d + 1]
    }

    pub fn total(&self) -> &BigInt {
        &self.total
    }

    /// Nonnegativity, and from stage 1 on a strictly monotone sequence
    /// `c_0, ..., c_{d+1}`: increasing for `d >= 3`, decreasing for `d = 2`.
    pub fn check_invariants(&self) -> Result<()> {
        if let Some(k) = self.counts.iter().position(|c| c.is_negative()) {
            return Err(Error::Integrity(format!("c{k} is negative at stage {}", self.stage)));
        }
        if self.stage >= 1 && self.monotonicity().is_none() {
            return Err(Error::Integrity(format!(
                "classes of d={} are not strictly monotone at stage {}",
                self.d, self.stage
            )));
        }
        Ok(())
    }

    /// `Some(Ordering::Less)` if the classes strictly increase with `k`,
    /// `Some(Ordering::Greater)` if they strictly decrease.
    pub fn monotonicity(&self) -> Option<std::cmp::Ordering> {
        let first = self.counts[0].cmp(&self.counts[1]);
        (first != std::cmp::Ordering::Equal && self.counts.windows(2).all(|w| w[0].cmp(&w[1]) == first))
            .then_some(first)
    }
}

fn weighted_total(d: usize, counts: &[BigInt]) -> BigInt {
    counts
        .iter()
        .enumerate()
        .map(|(k, c)| c * BigInt::from(binomial(d as u64 + 1, k as u64)))
        .sum()
}

/// Evaluates `p` by nested grouping on the variables in order, so that each
/// large power multiplies an already-summed cofactor.
fn eval_nested(p: &Polynomial, powers: &[Vec<BigInt>]) -> BigInt {
    let mut terms: Vec<(&[u32], &BigInt)> = p.terms().map(|(m, c)| (m.exponents(), c)).collect();
    terms.sort_unstable_by(|a, b| a.0.cmp(b.0));
    fn go(terms: &[(&[u32], &BigInt)], var: usize, powers: &[Vec<BigInt>]) -> BigInt {
        if var == powers.len() {
            return terms.iter().map(|(_, c)| (*c).clone()).sum();
        }
        let mut acc = BigInt::zero();
        let mut start = 0;
        while start < terms.len() {
            let e = terms[start].0[var];
            let end = start + terms[start..].iter().take_while(|t| t.0[var] == e).count();
            let sub = go(&terms[start..end], var + 1, powers);
            if e == 0 {
                acc += sub;
            } else {
                acc += &powers[var][e as usize] * sub;
            }
            start = end;
        }
        acc
    }
    go(&terms, 0, powers)
}

/// One application of the recursion.
pub fn step(sys: &RecursionSystem, v: &BoundaryClassVector) -> Result<BoundaryClassVector> {
    if sys.d() != v.d() {
        return Err(Error::InvalidArgument(format!(
            "recursion for d={} applied to a d={} vector",
            sys.d(),
            v.d()
        )));
    }
    let deg = sys.d() + 1;
    let powers: Vec<Vec<BigInt>> = v
        .counts()
        .iter()
        .map(|c| {
            let mut row = vec![BigInt::one(), c.clone()];
            for e in 2..=deg {
                let next = &row[e - 1] * c;
                row.push(next);
            }
            row
        })
        .collect();
    let polys: Vec<&Polynomial> = sys.classes().iter().chain(std::iter::once(sys.total())).collect();
    let mut values: Vec<BigInt> = polys.par_iter().map(|p| eval_nested(p, &powers)).collect();
    let total = values.pop().expect("total value");
    let next = BoundaryClassVector::new(sys.d(), v.stage() + 1, values);
    if next.total != total {
        return Err(Error::Integrity(format!(
            "total polynomial gives {total} but the class sum is {} at stage {}",
            next.total,
            next.stage
        )));
    }
    next.check_invariants()?;
    Ok(next)
}

/// Upper bound on the decimal digits of any class at `stage`, from the
/// digits at the current stage and the largest coefficient sum.
fn predict_digits(sys: &RecursionSystem, v: &BoundaryClassVector, stage: usize) -> u64 {
    let ones: HashMap<String, BigInt> = sys.vars().names().iter().map(|n| (n.clone(), BigInt::one())).collect();
    let coef_sum = sys
        .classes()
        .iter()
        .map(|p| p.evaluate_int(&ones).expect("all basis variables bound"))
        .max()
        .unwrap_or_else(BigInt::one);
    let growth = integer_digits(&coef_sum) as u64;
    let mut digits = v.counts().iter().map(|c| integer_digits(c) as u64).max().unwrap_or(1);
    for _ in v.stage()..stage {
        digits = digits.saturating_mul(sys.d() as u64 + 1).saturating_add(growth);
    }
    digits
}

/// Stages `0..=n_max` starting from the stage-0 vector.
pub fn evolve_to(sys: &RecursionSystem, n_max: usize) -> Result<Vec<BoundaryClassVector>> {
    evolve_to_capped(sys, n_max, DEFAULT_DIGIT_CAP)
}

pub fn evolve_to_capped(sys: &RecursionSystem, n_max: usize, digit_cap: u64) -> Result<Vec<BoundaryClassVector>> {
    let start = BoundaryClassVector::initial(sys.d());
    let predicted = predict_digits(sys, &start, n_max);
    if predicted > digit_cap {
        return Err(Error::DigitCap { n: n_max, predicted, cap: digit_cap });
    }
    let mut out = vec![start];
    for _ in 0..n_max {
        let next = step(sys, out.last().expect("nonempty"))?;
        out.push(next);
    }
    Ok(out)
}

/// Consecutive class ratios of one stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRatios {
    pub stage: usize,
    /// `r_j = c_j / c_{j+1}` for `j = 0..=d`.
    pub ratios: Vec<BigRational>,
}

impl StageRatios {
    /// `r_0`, the largest ratio.
    pub fn alpha(&self) -> &BigRational {
        &self.ratios[0]
    }

    /// `r_d`, the smallest ratio.
    pub fn omega(&self) -> &BigRational {
        self.ratios.last().expect("d + 1 ratios")
    }

    /// `r_0 - r_d`.
    pub fn epsilon(&self) -> BigRational {
        self.alpha() - self.omega()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioTrace {
    d: usize,
    stages: Vec<StageRatios>,
}

pub fn ratios(vectors: &[BoundaryClassVector]) -> Result<RatioTrace> {
    let d = vectors.first().ok_or_else(|| Error::InvalidArgument("no stages given".into()))?.d();
    let mut stages = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.d() != d {
            return Err(Error::InvalidArgument("stages of different dimensions".into()));
        }
        let mut rs = Vec::with_capacity(d + 1);
        for j in 0..=d {
            if v.count(j + 1).is_zero() {
                return Err(Error::Domain(format!(
                    "ratio c{j}/c{} undefined at stage {}: denominator is zero",
                    j + 1,
                    v.stage()
                )));
            }
            rs.push(BigRational::new(v.count(j).clone(), v.count(j + 1).clone()));
        }
        stages.push(StageRatios { stage: v.stage(), ratios: rs });
    }
    Ok(RatioTrace { d, stages })
}

impl RatioTrace {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn stages(&self) -> &[StageRatios] {
        &self.stages
    }

    pub fn at_stage(&self, n: usize) -> Option<&StageRatios> {
        self.stages.iter().find(|s| s.stage == n)
    }

    /// `(n, eps(n+1)/eps(n)^2)` for each pair of consecutive stages present.
    pub fn epsilon_ratios(&self) -> Vec<(usize, BigRational)> {
        self.stages
            .windows(2)
            .filter(|w| w[1].stage == w[0].stage + 1)
            .filter_map(|w| {
                let e0 = w[0].epsilon();
                if e0.is_zero() {
                    return None;
                }
                Some((w[0].stage, w[1].epsilon() / (&e0 * &e0)))
            })
            .collect()
    }

    /// First stage from which `r_d <= ... <= r_0` holds at every later
    /// stage in the trace, if any.
    pub fn ordered_from(&self) -> Option<usize> {
        let ordered = |s: &StageRatios| s.ratios.windows(2).all(|w| w[0] >= w[1]);
        let bad = self.stages.iter().rposition(|s| !ordered(s));
        match bad {
            None => self.stages.first().map(|s| s.stage),
            Some(i) => self.stages.get(i + 1).map(|s| s.stage),
        }
    }

    /// The trace restricted to stages `>= from`.
    pub fn from_stage(&self, from: usize) -> RatioTrace {
        RatioTrace { d: self.d, stages: self.stages.iter().filter(|s| s.stage >= from).cloned().collect() }
    }

    /// Ratios of every stage rendered to `digits` places, ties to even.
    pub fn rendered(&self, digits: usize) -> Vec<(usize, Vec<String>)> {
        self.stages
            .iter()
            .map(|s| (s.stage, s.ratios.iter().map(|r| round_half_even(r, digits)).collect()))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioDynamicsReport {
    pub stages_checked: usize,
    /// Whether every ratio lies below 1 (true for `d >= 3`; the `d = 2`
    /// classes decrease, so its ratios exceed 1).
    pub ratios_below_one: bool,
    /// Decimal prefix shared by `r_0` and `r_d` at the last stage; the
    /// common limit of all ratios starts with it.
    pub limit_prefix: String,
}

/// Checks `0 < r_d <= ... <= r_0` at every stage, `r_0` strictly
/// decreasing, `r_d` strictly increasing, and `eps(n+1) < 3 eps(n)^2`.
pub fn check_ratio_dynamics(trace: &RatioTrace) -> Result<RatioDynamicsReport> {
    let stages = trace.stages();
    if stages.len() < 2 {
        return Err(Error::InvalidArgument("at least two stages are needed".into()));
    }
    let one = BigRational::one();
    let mut ratios_below_one = true;
    for s in stages {
        let rs = &s.ratios;
        if !rs.last().is_some_and(|r| r.is_positive()) {
            return Err(Error::Integrity(format!("nonpositive ratio at stage {}", s.stage)));
        }
        ratios_below_one &= rs[0] < one;
        if let Some(j) = rs.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::Integrity(format!("r{j} < r{} at stage {}", j + 1, s.stage)));
        }
    }
    for w in stages.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.alpha() >= a.alpha() {
            return Err(Error::Integrity(format!(
                "r0 does not decrease from stage {} to {}",
                a.stage, b.stage
            )));
        }
        if b.omega() <= a.omega() {
            return Err(Error::Integrity(format!(
                "r{} does not increase from stage {} to {}",
                trace.d(),
                a.stage,
                b.stage
            )));
        }
        let ea = a.epsilon();
        if b.epsilon() >= BigRational::from_integer(3.into()) * &ea * &ea {
            return Err(Error::Integrity(format!(
                "eps({}) is not below 3 eps({})^2",
                b.stage, a.stage
            )));
        }
    }
    let last = stages.last().expect("nonempty");
    let digits = 400;
    let hi = crate::decimal::floor_digits(last.alpha(), digits);
    let lo = crate::decimal::floor_digits(last.omega(), digits);
    let limit_prefix = common_prefix(&hi, &lo).to_string();
    Ok(RatioDynamicsReport { stages_checked: stages.len(), ratios_below_one, limit_prefix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion_gen::generate;

    fn ints(xs: &[u64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn initial_vectors() {
        assert_eq!(BoundaryClassVector::initial(3).counts(), ints(&[1, 0, 1, 0, 3]).as_slice());
        assert_eq!(BoundaryClassVector::initial(3).total(), &BigInt::from(10));
        assert_eq!(BoundaryClassVector::initial(4).counts(), ints(&[1, 0, 1, 0, 3, 0]).as_slice());
        assert_eq!(BoundaryClassVector::initial(6).counts(), ints(&[1, 0, 1, 0, 3, 0, 15, 0]).as_slice());
    }

    #[test]
    fn d3_first_step() {
        let sys = generate(3).unwrap();
        let v = step(&sys, &BoundaryClassVector::initial(3)).unwrap();
        assert_eq!(v.counts(), ints(&[1010, 1242, 1556, 1983, 2571]).as_slice());
        assert_eq!(v.total(), &BigInt::from(25817));
        assert_eq!(v.stage(), 1);
    }

    #[test]
    fn d4_first_step() {
        let sys = generate(4).unwrap();
        let v = step(&sys, &BoundaryClassVector::initial(4)).unwrap();
        assert_eq!(v.total(), &BigInt::from(48_645_865));
        assert_eq!(v.count(5), &BigInt::from(3_779_500));
    }

    #[test]
    fn evolve_zero_is_initial() {
        let sys = generate(3).unwrap();
        let vs = evolve_to(&sys, 0).unwrap();
        assert_eq!(vs, vec![BoundaryClassVector::initial(3)]);
    }

    #[test]
    fn digit_guard() {
        let sys = generate(3).unwrap();
        match evolve_to(&sys, 20) {
            Err(Error::DigitCap { predicted, .. }) => assert!(predicted > DEFAULT_DIGIT_CAP),
            other => panic!("expected digit cap, got {other:?}"),
        }
    }

    #[test]
    fn mismatched_dimension() {
        let sys = generate(2).unwrap();
        assert!(step(&sys, &BoundaryClassVector::initial(3)).is_err());
    }

    #[test]
    fn stage_zero_ratio_is_undefined() {
        let v = BoundaryClassVector::initial(3);
        assert!(matches!(ratios(&[v]), Err(Error::Domain(_))));
    }

    #[test]
    fn invariant_violation_is_reported() {
        let v = BoundaryClassVector::new(3, 1, ints(&[1, 3, 2, 4, 5]));
        assert!(matches!(v.check_invariants(), Err(Error::Integrity(_))));
    }
}
