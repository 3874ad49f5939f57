//! Symbolic certificates for the ratio dynamics.
//!
//! One recursion step maps the ratios `r_0 >= ... >= r_d` to
//! `r_j' = r_d * X_j / X_{j+1}`, where `X_0..X_{d+1}` are the ratio forms
//! with the power of `r_d` removed. Writing `r_d = omega` and
//! `r_j = omega + g_{j+1} + ... + g_d` with nonnegative gaps `g`, each claim
//! below reduces to a polynomial identity in `(omega, g_1..g_d)`:
//!
//! * `omega' - omega = omega (X_d - X_{d+1}) / X_{d+1}`: all coefficients of
//!   `X_d - X_{d+1}` are nonnegative.
//! * `r_0 - r_0' = (r_0 X_1 - omega X_0) / X_1`: all coefficients of the
//!   numerator are nonnegative.
//! * `r_j' - r_{j+1}' = omega (X_j X_{j+2} - X_{j+1}^2) / (X_{j+1} X_{j+2})`:
//!   every monomial of the numerator has degree at least 2 in the gaps.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::multipoly::{Monomial, Polynomial, VarSet};
use crate::recursion_gen::{ratio_form, ratio_vars, RatioForms, RecursionSystem};

pub const DEFAULT_TERM_BUDGET: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Certificate {
    OmegaAscending,
    AlphaDescending,
    Contraction,
}

impl Certificate {
    pub const ALL: [Certificate; 3] =
        [Certificate::OmegaAscending, Certificate::AlphaDescending, Certificate::Contraction];

    pub fn name(self) -> &'static str {
        match self {
            Certificate::OmegaAscending => "omega",
            Certificate::AlphaDescending => "alpha",
            Certificate::Contraction => "contraction",
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    Failed { reason: String },
    NotAttempted { terms: usize, budget: usize },
}

impl Outcome {
    pub fn passed(&self) -> bool {
        matches!(self, Outcome::Passed)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Passed => f.write_str("pass"),
            Outcome::Failed { reason } => write!(f, "FAIL: {reason}"),
            Outcome::NotAttempted { terms, budget } => {
                write!(f, "not attempted: {terms} terms exceed the budget of {budget}")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub d: usize,
    pub certificate: Certificate,
    pub outcome: Outcome,
    /// Expansions in `(omega, g1..gd)`; one per adjacent ratio pair for the
    /// contraction certificate, a single one otherwise. Empty when not attempted.
    pub expansions: Vec<Polynomial>,
}

/// Gap-space variables `omega, g1..gd`.
pub fn gap_vars(d: usize) -> VarSet {
    VarSet::new(std::iter::once("omega".to_string()).chain((1..=d).map(|j| format!("g{j}"))))
}

struct OverBudget(usize);

/// Rewrites a polynomial in `r0..r{d}` into `(omega, g1..gd)`, one linear
/// shift `r_j -> r_{j+1} + g_{j+1}` at a time.
fn to_gap_space(p: &Polynomial, d: usize, budget: usize) -> std::result::Result<Polynomial, OverBudget> {
    let mut cur = p.clone();
    for j in 0..d {
        let next = VarSet::new([format!("r{}", j + 1), format!("g{}", j + 1)]);
        let shift = &Polynomial::var(&next, &format!("r{}", j + 1)) + &Polynomial::var(&next, &format!("g{}", j + 1));
        let bindings = HashMap::from([(format!("r{j}"), shift)]);
        cur = cur.substitute(&bindings);
        if cur.len() > budget {
            return Err(OverBudget(cur.len()));
        }
    }
    let cur = cur.rename(&[(&format!("r{d}"), "omega")]);
    Ok(cur.with_vars(&gap_vars(d)).expect("only omega and gaps remain"))
}

fn first_negative(p: &Polynomial) -> Option<String> {
    p.sorted_terms()
        .into_iter()
        .find(|(_, c)| c.sign() == num_bigint::Sign::Minus)
        .map(|(m, c)| format!("coefficient {c} on {}", describe(p.vars(), m)))
}

fn describe(vars: &VarSet, m: &Monomial) -> String {
    let parts: Vec<String> = m
        .factors()
        .map(|(i, e)| if e == 1 { vars.names()[i].clone() } else { format!("{}^{e}", vars.names()[i]) })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// Degree of `m` in the gap variables (all but the first, `omega`).
fn gap_degree(m: &Monomial) -> u32 {
    m.exponents().iter().skip(1).sum()
}

/// Checker bound to one recursion system.
pub struct AppendixChecker {
    d: usize,
    forms: RatioForms,
    budget: usize,
}

impl AppendixChecker {
    pub fn new(sys: &RecursionSystem) -> Self {
        Self::with_budget(sys, DEFAULT_TERM_BUDGET)
    }

    pub fn with_budget(sys: &RecursionSystem, budget: usize) -> Self {
        AppendixChecker { d: sys.d(), forms: ratio_form(sys), budget }
    }

    pub fn forms(&self) -> &RatioForms {
        &self.forms
    }

    fn report(&self, certificate: Certificate, outcome: Outcome, expansions: Vec<Polynomial>) -> CertificateReport {
        CertificateReport { d: self.d, certificate, outcome, expansions }
    }

    fn not_attempted(&self, certificate: Certificate, terms: usize) -> CertificateReport {
        self.report(certificate, Outcome::NotAttempted { terms, budget: self.budget }, Vec::new())
    }

    /// Numerator of `omega(n+1) - omega(n)` over `omega`, in ratio variables.
    pub fn omega_difference(&self) -> Polynomial {
        let x = self.forms.forms();
        &x[self.d] - &x[self.d + 1]
    }

    /// Numerator of `r_0(n) - r_0(n+1)`, in ratio variables.
    pub fn alpha_difference(&self) -> Polynomial {
        let rv = ratio_vars(self.d);
        let x = self.forms.forms();
        let alpha = Polynomial::var(&rv, "r0");
        let omega = Polynomial::var(&rv, &format!("r{}", self.d));
        &(&alpha * &x[1]) - &(&omega * &x[0])
    }

    /// `X_j X_{j+2} - X_{j+1}^2` for `j = 0..d-1`, in ratio variables.
    pub fn contraction_numerators(&self) -> Vec<Polynomial> {
        let x = self.forms.forms();
        (0..self.d).map(|j| &(&x[j] * &x[j + 2]) - &(&x[j + 1] * &x[j + 1])).collect()
    }

    fn nonnegative(&self, certificate: Certificate, p: &Polynomial) -> CertificateReport {
        if p.len() > self.budget {
            return self.not_attempted(certificate, p.len());
        }
        let g = match to_gap_space(p, self.d, self.budget) {
            Ok(g) => g,
            Err(OverBudget(n)) => return self.not_attempted(certificate, n),
        };
        let outcome = match first_negative(&g) {
            None => Outcome::Passed,
            Some(reason) => Outcome::Failed { reason },
        };
        self.report(certificate, outcome, vec![g])
    }

    pub fn omega_ascending(&self) -> CertificateReport {
        self.nonnegative(Certificate::OmegaAscending, &self.omega_difference())
    }

    pub fn alpha_descending(&self) -> CertificateReport {
        self.nonnegative(Certificate::AlphaDescending, &self.alpha_difference())
    }

    pub fn contraction(&self) -> CertificateReport {
        let mut expansions = Vec::new();
        let mut failure = None;
        for (j, p) in self.contraction_numerators().into_iter().enumerate() {
            if p.len() > self.budget {
                return self.not_attempted(Certificate::Contraction, p.len());
            }
            let g = match to_gap_space(&p, self.d, self.budget) {
                Ok(g) => g,
                Err(OverBudget(n)) => return self.not_attempted(Certificate::Contraction, n),
            };
            if failure.is_none() {
                if let Some((m, c)) = g.sorted_terms().into_iter().find(|(m, _)| gap_degree(m) < 2) {
                    failure = Some(format!(
                        "pair ({j},{}) has term {c}*{} of gap degree {}",
                        j + 1,
                        describe(g.vars(), m),
                        gap_degree(m)
                    ));
                }
            }
            expansions.push(g);
        }
        let outcome = match failure {
            None => Outcome::Passed,
            Some(reason) => Outcome::Failed { reason },
        };
        self.report(Certificate::Contraction, outcome, expansions)
    }

    pub fn run(&self, certificate: Certificate) -> CertificateReport {
        match certificate {
            Certificate::OmegaAscending => self.omega_ascending(),
            Certificate::AlphaDescending => self.alpha_descending(),
            Certificate::Contraction => self.contraction(),
        }
    }
}

/// Leading term in `omega` of a gap-space expansion: the block multiplying
/// the highest power of `omega`.
pub fn leading_omega_block(p: &Polynomial) -> (u32, Polynomial) {
    let top = p.degree_in("omega");
    (top, p.coefficient_of_power("omega", top))
}

pub fn parse_certificate(name: &str) -> Result<Vec<Certificate>> {
    match name {
        "all" => Ok(Certificate::ALL.to_vec()),
        other => Certificate::ALL
            .into_iter()
            .find(|c| c.name() == other)
            .map(|c| vec![c])
            .ok_or_else(|| Error::InvalidArgument(format!("unknown certificate `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion_gen::generate;
    use num_bigint::BigInt;

    #[test]
    fn gap_shift_of_single_ratio() {
        // r0 = omega + g1 + g2 for d = 2
        let rv = ratio_vars(2);
        let p = Polynomial::var(&rv, "r0");
        let g = to_gap_space(&p, 2, 100).ok().unwrap();
        assert_eq!(g.to_string(), "1*omega + 1*g1 + 1*g2");
    }

    #[test]
    fn zero_gaps_vanish() {
        let checker = AppendixChecker::new(&generate(3).unwrap());
        for r in [checker.omega_ascending(), checker.alpha_descending(), checker.contraction()] {
            for g in &r.expansions {
                let at_zero: HashMap<String, BigInt> = g
                    .vars()
                    .names()
                    .iter()
                    .map(|n| (n.clone(), BigInt::from(if n == "omega" { 7 } else { 0 })))
                    .collect();
                assert_eq!(g.evaluate_int(&at_zero).unwrap(), BigInt::from(0), "{}", r.certificate);
            }
        }
    }

    #[test]
    fn budget_reports_not_attempted() {
        let checker = AppendixChecker::with_budget(&generate(3).unwrap(), 50);
        let r = checker.contraction();
        assert!(matches!(r.outcome, Outcome::NotAttempted { budget: 50, .. }));
        assert!(r.expansions.is_empty());
    }

    #[test]
    fn certificate_names() {
        assert_eq!(parse_certificate("all").unwrap().len(), 3);
        assert_eq!(parse_certificate("omega").unwrap(), vec![Certificate::OmegaAscending]);
        assert!(parse_certificate("beta").is_err());
    }
}
