//! Sparse multivariate polynomials with arbitrary-precision integer
//! coefficients.
//!
//! Every polynomial carries its own ordered variable set and stores monomials
//! as dense exponent vectors over that set. Canonical text order is graded
//! lexicographic: higher total degree first, ties broken by comparing exponent
//! vectors left to right in declared variable order.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::error::{Error, Result};

/// Ordered list of variable names shared by polynomials that live together.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarSet(Arc<[String]>);

impl VarSet {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, a) in names.iter().enumerate() {
            assert!(is_identifier(a), "invalid variable name `{a}`");
            assert!(!names[..i].contains(a), "duplicate variable `{a}`");
        }
        VarSet(names.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|v| v == name)
    }

    /// `self` followed by the names of `other` not already present.
    pub fn union(&self, other: &VarSet) -> VarSet {
        if self == other {
            return self.clone();
        }
        let mut names: Vec<String> = self.0.to_vec();
        for v in other.0.iter() {
            if !names.contains(v) {
                names.push(v.clone());
            }
        }
        VarSet(names.into())
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Exponent vector over the owning polynomial's variable set.
///
/// Zero exponents are implicit in the named view returned by
/// [`Monomial::factors`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `(variable index, exponent)` for every variable with a positive exponent.
    pub fn factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e))
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// Graded lexicographic order, greatest first.
    pub fn grlex_cmp(&self, other: &Monomial) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

#[derive(Clone, Debug)]
pub struct Polynomial {
    vars: VarSet,
    terms: FxHashMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero(vars: &VarSet) -> Self {
        Polynomial { vars: vars.clone(), terms: FxHashMap::default() }
    }

    pub fn constant(vars: &VarSet, c: impl Into<BigInt>) -> Self {
        let mut p = Polynomial::zero(vars);
        p.add_term(Monomial::one(vars.len()), c.into());
        p
    }

    /// The polynomial consisting of the single variable `name`.
    pub fn var(vars: &VarSet, name: &str) -> Self {
        let i = vars
            .index_of(name)
            .unwrap_or_else(|| panic!("`{name}` is not declared"));
        let mut exps = vec![0; vars.len()];
        exps[i] = 1;
        let mut p = Polynomial::zero(vars);
        p.add_term(Monomial::from_exponents(exps), BigInt::one());
        p
    }

    pub fn from_terms<I>(vars: &VarSet, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut p = Polynomial::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), vars.len(), "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// Terms in canonical (graded lexicographic, descending) order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.grlex_cmp(b.0));
        v
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    /// Coefficient of the monomial given as `(name, exponent)` pairs.
    /// Unknown names yield zero.
    pub fn coefficient(&self, factors: &[(&str, u32)]) -> BigInt {
        let mut exps = vec![0; self.vars.len()];
        for &(name, e) in factors {
            match self.vars.index_of(name) {
                Some(i) => exps[i] += e,
                None if e == 0 => {}
                None => return BigInt::zero(),
            }
        }
        self.terms
            .get(&Monomial::from_exponents(exps))
            .cloned()
            .unwrap_or_default()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// `Some(deg)` when every term has total degree `deg`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(Monomial::degree);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        match self.vars.index_of(name) {
            Some(i) => self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    /// Smallest exponent of `name` over all terms (the power of `name` that
    /// divides the polynomial).
    pub fn min_degree_in(&self, name: &str) -> u32 {
        match self.vars.index_of(name) {
            Some(i) => self.terms.keys().map(|m| m.0[i]).min().unwrap_or(0),
            None => 0,
        }
    }

    /// The polynomial multiplying `name^e`, i.e. the terms with exactly that
    /// power of `name`, divided by it.
    pub fn coefficient_of_power(&self, name: &str, e: u32) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        let Some(i) = self.vars.index_of(name) else {
            return if e == 0 { self.clone() } else { out };
        };
        for (m, c) in &self.terms {
            if m.0[i] == e {
                let mut exps = m.0.to_vec();
                exps[i] = 0;
                out.terms.insert(Monomial::from_exponents(exps), c.clone());
            }
        }
        out
    }

    pub fn all_coefficients_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Names of variables that occur with a positive exponent somewhere.
    pub fn used_vars(&self) -> Vec<&str> {
        let n = self.vars.len();
        let mut used = vec![false; n];
        for m in self.terms.keys() {
            for (i, _) in m.factors() {
                used[i] = true;
            }
        }
        (0..n).filter(|&i| used[i]).map(|i| self.vars.0[i].as_str()).collect()
    }

    /// Re-express over `target`, which must declare every used variable.
    pub fn with_vars(&self, target: &VarSet) -> Result<Polynomial> {
        if *target == self.vars {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.vars.len());
        for name in self.vars.0.iter() {
            map.push(target.index_of(name));
        }
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; target.len()];
            for (i, e) in m.factors() {
                match map[i] {
                    Some(j) => exps[j] = e,
                    None => return Err(Error::UnboundVariable(self.vars.0[i].clone())),
                }
            }
            out.terms.insert(Monomial::from_exponents(exps), c.clone());
        }
        Ok(out)
    }

    /// Rename variables; names absent from `renames` keep their name.
    pub fn rename(&self, renames: &[(&str, &str)]) -> Polynomial {
        let names = self.vars.0.iter().map(|v| {
            renames
                .iter()
                .find(|(from, _)| from == v)
                .map(|(_, to)| to.to_string())
                .unwrap_or_else(|| v.clone())
        });
        Polynomial { vars: VarSet::new(names), terms: self.terms.clone() }
    }

    pub fn scale(&self, k: &BigInt) -> Polynomial {
        if k.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::constant(&self.vars, 1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Simultaneous substitution. Unbound variables are carried through.
    ///
    /// The result is declared over the carried variables (in `self` order)
    /// followed by the variables of the bindings.
    pub fn substitute(&self, bindings: &HashMap<String, Polynomial>) -> Polynomial {
        let mut target = VarSet::new(
            self.vars.0.iter().filter(|v| !bindings.contains_key(*v)).cloned(),
        );
        for name in self.vars.0.iter() {
            if let Some(b) = bindings.get(name) {
                target = target.union(&b.vars);
            }
        }

        // position of each source variable: carried (target index) or bound
        enum Slot {
            Carried(usize),
            Bound(usize),
        }
        let mut bound: Vec<Polynomial> = Vec::new();
        let slots: Vec<Slot> = self
            .vars
            .0
            .iter()
            .map(|name| match bindings.get(name) {
                Some(b) => {
                    bound.push(b.with_vars(&target).expect("target covers binding vars"));
                    Slot::Bound(bound.len() - 1)
                }
                None => Slot::Carried(target.index_of(name).expect("carried var in target")),
            })
            .collect();

        // group terms by their exponents on bound variables
        let mut groups: FxHashMap<Vec<u32>, Polynomial> = FxHashMap::default();
        for (m, c) in &self.terms {
            let mut key = vec![0u32; bound.len()];
            let mut rest = vec![0u32; target.len()];
            for (i, e) in m.factors() {
                match slots[i] {
                    Slot::Carried(j) => rest[j] = e,
                    Slot::Bound(b) => key[b] = e,
                }
            }
            groups
                .entry(key)
                .or_insert_with(|| Polynomial::zero(&target))
                .add_term(Monomial::from_exponents(rest), c.clone());
        }

        let mut powers: Vec<Vec<Polynomial>> =
            bound.iter().map(|b| vec![Polynomial::constant(&target, 1), b.clone()]).collect();
        let mut keys: Vec<_> = groups.keys().cloned().collect();
        keys.sort();
        let mut out = Polynomial::zero(&target);
        for key in keys {
            let rest = &groups[&key];
            let mut factor: Option<Polynomial> = None;
            for (b, &e) in key.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[b].len() <= e as usize {
                    let next = powers[b].last().unwrap() * &bound[b];
                    powers[b].push(next);
                }
                let pw = &powers[b][e as usize];
                factor = Some(match factor {
                    None => pw.clone(),
                    Some(f) => &f * pw,
                });
            }
            let contribution = match factor {
                None => rest.clone(),
                Some(f) => &f * rest,
            };
            out.add_assign_poly(&contribution);
        }
        out
    }

    fn add_assign_poly(&mut self, other: &Polynomial) {
        debug_assert_eq!(self.vars, other.vars);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// Exact value at an integer point.
    pub fn evaluate_int(&self, point: &HashMap<String, BigInt>) -> Result<BigInt> {
        self.evaluate(point)
    }

    /// Value at a point in any commutative ring that embeds the integers.
    pub fn evaluate<T>(&self, point: &HashMap<String, T>) -> Result<T>
    where
        T: Clone + Zero + One + From<BigInt>,
        for<'a> &'a T: Mul<&'a T, Output = T>,
    {
        let mut values: Vec<Option<&T>> = Vec::with_capacity(self.vars.len());
        for name in self.vars.0.iter() {
            values.push(point.get(name));
        }
        let max_exp = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let mut power_cache: Vec<Vec<T>> = vec![Vec::new(); self.vars.len()];
        for m in self.terms.keys() {
            for (i, _) in m.factors() {
                if values[i].is_none() {
                    return Err(Error::UnboundVariable(self.vars.0[i].clone()));
                }
            }
        }
        let mut total = T::zero();
        for (m, c) in self.sorted_terms() {
            let mut acc = T::from(c.clone());
            for (i, e) in m.factors() {
                let cache = &mut power_cache[i];
                if cache.is_empty() {
                    let x = values[i].unwrap();
                    cache.push(T::one());
                    cache.push(x.clone());
                    cache.reserve(max_exp);
                }
                while cache.len() <= e as usize {
                    let next = &cache[cache.len() - 1] * &cache[1];
                    cache.push(next);
                }
                acc = &acc * &cache[e as usize];
            }
            total = total + acc;
        }
        Ok(total)
    }

    /// Canonical text form.
    pub fn serialize(&self) -> String {
        self.to_string()
    }

    /// Parse text whose variables are all declared in `vars`.
    pub fn parse(text: &str, vars: &VarSet) -> std::result::Result<Polynomial, ParseError> {
        Parser { src: text.as_bytes(), pos: 0, vars }.polynomial()
    }
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            return self.terms == other.terms;
        }
        self.serialize() == other.serialize()
    }
}

impl Eq for Polynomial {}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let magnitude = c.abs();
            match (k, c.is_negative()) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                (_, false) => f.write_str(" + ")?,
                (_, true) => f.write_str(" - ")?,
            }
            write!(f, "{magnitude}")?;
            for (i, e) in m.factors() {
                if e == 1 {
                    write!(f, "*{}", self.vars.0[i])?;
                } else {
                    write!(f, "*{}^{}", self.vars.0[i], e)?;
                }
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        let vars = self.vars.union(&rhs.vars);
        let mut out = self.with_vars(&vars).expect("union covers lhs");
        out.add_assign_poly(&rhs.with_vars(&vars).expect("union covers rhs"));
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        if self.vars != rhs.vars {
            let vars = self.vars.union(&rhs.vars);
            let a = self.with_vars(&vars).expect("union covers lhs");
            let b = rhs.with_vars(&vars).expect("union covers rhs");
            return &a * &b;
        }
        let mut out = Polynomial::zero(&self.vars);
        out.terms.reserve(self.terms.len().saturating_mul(rhs.terms.len()).min(1 << 20));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Malformed polynomial text, tagged with the byte offset of the problem.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a VarSet,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> std::result::Result<T, ParseError> {
        Err(ParseError { pos: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn polynomial(&mut self) -> std::result::Result<Polynomial, ParseError> {
        let mut p = Polynomial::zero(self.vars);
        if self.peek().is_none() {
            return self.err("empty input");
        }
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let (m, c) = self.term()?;
            p.add_term(m, if sign < 0 { -c } else { c });
            match self.peek() {
                None => break,
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                Some(ch) => return self.err(format!("expected `+` or `-`, found `{}`", ch as char)),
            }
            self.pos += 1;
        }
        Ok(p)
    }

    fn term(&mut self) -> std::result::Result<(Monomial, BigInt), ParseError> {
        let mut coeff = BigInt::one();
        let mut exps = vec![0u32; self.vars.len()];
        loop {
            match self.peek() {
                Some(ch) if ch.is_ascii_digit() => coeff *= self.integer()?,
                Some(ch) if ch.is_ascii_alphabetic() || ch == b'_' => {
                    let start = self.pos;
                    while self.pos < self.src.len()
                        && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                    {
                        self.pos += 1;
                    }
                    let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    let Some(i) = self.vars.index_of(name) else {
                        self.pos = start;
                        return self.err(format!("undeclared variable `{name}`"));
                    };
                    let mut e = 1u32;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        if !matches!(self.peek(), Some(ch) if ch.is_ascii_digit()) {
                            return self.err("expected exponent after `^`");
                        }
                        e = self
                            .integer()?
                            .try_into()
                            .or_else(|_| self.err("exponent out of range"))?;
                    }
                    exps[i] += e;
                }
                Some(ch) => return self.err(format!("expected a coefficient or variable, found `{}`", ch as char)),
                None => return self.err("unexpected end of input"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((Monomial::from_exponents(exps), coeff))
    }

    fn integer(&mut self) -> std::result::Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(digits.parse().expect("ascii digits"))
    }
}
