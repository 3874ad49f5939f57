//! Rigorous bounds on the entropy per site of TH_d.
//!
//! Reals are carried as enclosures `[lo, hi] / 10^w` over a fixed number of
//! working digits `w`, every operation rounding `lo` down and `hi` up. The
//! reported bounds use `w = p + 20` and are then rounded outward to `p`
//! digits.
//!
//! With `lambda = c_{d+1}(k)`, `omega = r_d(k)` and `alpha = r_0(k)`:
//!
//! ```text
//! lower = ln(lambda) / (d+1)^(k+1) + ln(1 + 2 omega + 2 omega^2) / (2 (d+1)^k)
//! upper = ln(lambda) / (d+1)^(k+1) + ln(1 + 2 alpha + 2 alpha^2) / (2 (d+1)^k)
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::decimal::{ceil_digits, common_prefix, floor_digits, fraction_digits, integer_digits};
use crate::error::{Error, Result};
use crate::evolve::BoundaryClassVector;

pub const DEFAULT_PRECISION: usize = 160;
pub const GUARD_DIGITS: usize = 20;

fn pow10(k: usize) -> BigInt {
    num_traits::pow(BigInt::from(10), k)
}

fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// A real number known to lie in `[lo, hi] / 10^digits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: BigInt,
    hi: BigInt,
    digits: usize,
}

impl Enclosure {
    pub fn exact_integer(n: &BigInt, digits: usize) -> Self {
        let v = n * pow10(digits);
        Enclosure { lo: v.clone(), hi: v, digits }
    }

    pub fn from_rational(x: &BigRational, digits: usize) -> Self {
        let num = x.numer() * pow10(digits);
        Enclosure { lo: div_floor(&num, x.denom()), hi: div_ceil(&num, x.denom()), digits }
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(self.lo.clone(), pow10(self.digits))
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(self.hi.clone(), pow10(self.digits))
    }

    /// Width in units of `10^-digits`.
    pub fn width_ulps(&self) -> BigInt {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower() <= x && x <= &self.upper()
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        assert_eq!(self.digits, other.digits);
        Enclosure { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi, digits: self.digits }
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        assert_eq!(self.digits, other.digits);
        Enclosure { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo, digits: self.digits }
    }

    pub fn mul_int(&self, k: &BigInt) -> Enclosure {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if k.is_negative() {
            Enclosure { lo: b, hi: a, digits: self.digits }
        } else {
            Enclosure { lo: a, hi: b, digits: self.digits }
        }
    }

    /// Division by a positive integer.
    pub fn div_int(&self, k: &BigInt) -> Enclosure {
        assert!(k.is_positive());
        Enclosure { lo: div_floor(&self.lo, k), hi: div_ceil(&self.hi, k), digits: self.digits }
    }
}

/// `atanh(num/den)` for `|num/den| <= 4/5`. The fraction need not be in
/// lowest terms.
fn atanh_enclosure(num: &BigInt, den: &BigInt, digits: usize) -> Enclosure {
    assert!(den.is_positive());
    if num.is_negative() {
        let pos = atanh_enclosure(&-num, den, digits);
        return Enclosure { lo: -pos.hi, hi: -pos.lo, digits };
    }
    assert!(num * 5 <= den * 4, "atanh argument out of range");
    if num.is_zero() {
        return Enclosure { lo: BigInt::zero(), hi: BigInt::zero(), digits };
    }
    let scale = pow10(digits);
    let scaled = num * &scale;
    let (z_lo, z_hi) = (div_floor(&scaled, den), div_ceil(&scaled, den));
    let z2_lo = div_floor(&(&z_lo * &z_lo), &scale);
    let z2_hi = div_ceil(&(&z_hi * &z_hi), &scale);
    let (mut pw_lo, mut pw_hi) = (z_lo, z_hi);
    let (mut sum_lo, mut sum_hi) = (BigInt::zero(), BigInt::zero());
    let small = BigInt::from(8);
    let mut k: u64 = 0;
    while pw_hi > small {
        let den = BigInt::from(2 * k + 1);
        sum_lo += div_floor(&pw_lo, &den);
        sum_hi += div_ceil(&pw_hi, &den);
        pw_lo = div_floor(&(&pw_lo * &z2_lo), &scale);
        pw_hi = div_ceil(&(&pw_hi * &z2_hi), &scale);
        k += 1;
    }
    // remaining terms: sum_j z^(2K+1+2j)/(2K+1+2j) <= pw / (1 - z^2) <= 3 pw
    sum_hi += &pw_hi * 3 + 2;
    Enclosure { lo: sum_lo, hi: sum_hi, digits }
}

/// `ln 10 = 6 atanh(1/3) + 2 atanh(1/9)`.
pub fn ln10_enclosure(digits: usize) -> Enclosure {
    let third = atanh_enclosure(&1.into(), &3.into(), digits);
    let ninth = atanh_enclosure(&1.into(), &9.into(), digits);
    third.mul_int(&6.into()).add(&ninth.mul_int(&2.into()))
}

/// `ln n` for a positive integer: `n = m 10^e` with `m` in `[10^-1/2, 10^1/2)`,
/// `ln m = 2 atanh((m - 1)/(m + 1))`.
fn ln_integer_enclosure(n: &BigInt, digits: usize, ln10: &Enclosure) -> Enclosure {
    debug_assert!(n.is_positive());
    let len = integer_digits(n);
    // choose e with n / 10^e as close to 1 as the leading digits allow
    let lead: f64 = n.to_string()[..len.min(15)].parse::<f64>().expect("decimal digits");
    let log10 = lead.log10() + (len.saturating_sub(15)) as f64;
    let e = log10.round() as usize;
    let base = pow10(e);
    let lnm = atanh_enclosure(&(n - &base), &(n + &base), digits).mul_int(&2.into());
    lnm.add(&ln10.mul_int(&BigInt::from(e)))
}

/// `ln x` for a positive rational as `ln(numerator) - ln(denominator)`.
pub fn ln_enclosure(x: &BigRational, digits: usize) -> Result<Enclosure> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("logarithm of nonpositive value {x}")));
    }
    let ln10 = ln10_enclosure(digits);
    Ok(ln_with(x, digits, &ln10))
}

fn ln_with(x: &BigRational, digits: usize, ln10: &Enclosure) -> Enclosure {
    let num = ln_integer_enclosure(x.numer(), digits, ln10);
    if x.denom().is_one() {
        num
    } else {
        num.sub(&ln_integer_enclosure(x.denom(), digits, ln10))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
}

/// A decimal number with `digits` places, rounded in a recorded direction
/// from an exact or enclosed value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HighPrecisionReal {
    text: String,
    digits: usize,
    rounding: Rounding,
}

impl HighPrecisionReal {
    fn from_enclosure(e: &Enclosure, digits: usize, rounding: Rounding) -> Self {
        let text = match rounding {
            Rounding::Down => floor_digits(&e.lower(), digits),
            Rounding::Up => ceil_digits(&e.upper(), digits),
        };
        HighPrecisionReal { text, digits, rounding }
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn rounding(&self) -> Rounding {
        self.rounding
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn to_rational(&self) -> BigRational {
        let (int, frac) = self.text.split_once('.').unwrap_or((&self.text, ""));
        let neg = int.starts_with('-');
        let digits: BigInt = format!("{}{}", int.trim_start_matches('-'), frac).parse().expect("decimal text");
        let v = BigRational::new(digits, pow10(frac.len()));
        if neg {
            -v
        } else {
            v
        }
    }
}

impl fmt::Display for HighPrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Natural logarithm of a positive rational to `digits` places, rounded in
/// the given direction.
pub fn hp_ln(x: &BigRational, digits: usize, rounding: Rounding) -> Result<HighPrecisionReal> {
    let e = ln_enclosure(x, digits + GUARD_DIGITS)?;
    Ok(HighPrecisionReal::from_enclosure(&e, digits, rounding))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsResult {
    pub d: usize,
    pub k: usize,
    pub precision: usize,
    pub lower: HighPrecisionReal,
    pub upper: HighPrecisionReal,
    /// Digits after the decimal point on which both bounds agree.
    pub certified_digits: usize,
    pub certified_prefix: String,
    /// Decimal digits of `lambda = c_{d+1}(k)`.
    pub lambda_digits: usize,
    pub warning: Option<String>,
}

/// Enclosures of the lower and upper bound expressions at stage `v.stage()`.
pub fn bound_enclosures(v: &BoundaryClassVector, digits: usize) -> Result<(Enclosure, Enclosure)> {
    let (d, k) = (v.d(), v.stage());
    if k == 0 {
        return Err(Error::InvalidArgument("entropy bounds need a stage k >= 1".into()));
    }
    let c = v.counts();
    if c[1].is_zero() || c[d + 1].is_zero() {
        return Err(Error::Domain(format!("stage {k} has a zero class; ratios are undefined")));
    }
    let ln10 = ln10_enclosure(digits);
    let base = BigInt::from(d + 1);
    let sites = num_traits::pow(base.clone(), k + 1);
    let connect = num_traits::pow(base, k) * 2;
    let anchor = ln_integer_enclosure(v.all_dimer(), digits, &ln10).div_int(&sites);
    // for r = p/q: ln(1 + 2r + 2r^2) = 2 atanh(p(p+q) / (q^2 + pq + p^2))
    let edge_factor = |p: &BigInt, q: &BigInt| {
        let num = p * (p + q);
        let den = q * q + p * q + p * p;
        let ln = if &num * 5 <= &den * 4 {
            atanh_enclosure(&num, &den, digits).mul_int(&2.into())
        } else {
            let top = &den + &num;
            ln_integer_enclosure(&top, digits, &ln10).sub(&ln_integer_enclosure(q, digits, &ln10).mul_int(&2.into()))
        };
        ln.div_int(&connect)
    };
    let omega = edge_factor(&c[d], &c[d + 1]);
    let alpha = edge_factor(&c[0], &c[1]);
    Ok((anchor.add(&omega), anchor.add(&alpha)))
}

/// Bounds at stage `k` with `p` reported digits.
pub fn bounds(vectors: &[BoundaryClassVector], k: usize, p: usize) -> Result<BoundsResult> {
    let v = vectors
        .iter()
        .find(|v| v.stage() == k)
        .ok_or_else(|| Error::InvalidArgument(format!("stage {k} is not among the given vectors")))?;
    if p == 0 {
        return Err(Error::InvalidArgument("precision must be positive".into()));
    }
    let (lo, hi) = bound_enclosures(v, p + GUARD_DIGITS)?;
    let lower = HighPrecisionReal::from_enclosure(&lo, p, Rounding::Down);
    let upper = HighPrecisionReal::from_enclosure(&hi, p, Rounding::Up);
    let prefix = common_prefix(lower.as_str(), upper.as_str()).to_string();
    let certified_digits = fraction_digits(&prefix);
    let warning = (certified_digits + 1 >= p).then(|| {
        format!("precision {p} is too small to separate the bounds; {certified_digits} digits certified")
    });
    Ok(BoundsResult {
        d: v.d(),
        k,
        precision: p,
        lower,
        upper,
        certified_digits,
        certified_prefix: prefix,
        lambda_digits: integer_digits(v.all_dimer()),
        warning,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SandwichReport {
    pub d: usize,
    pub k: usize,
    pub n: usize,
    pub lower: BigRational,
    pub total: BigInt,
    pub upper: BigRational,
}

/// Exact check of
/// `lambda^q (1+2w+2w^2)^m (1+w_n)^(d+1) < M(n) < lambda^q (1+2a+2a^2)^m (1+a_n)^(d+1)`
/// with `q = (d+1)^(n-k)`, `m = (d+1)((d+1)^(n-k) - 1)/2`, where `lambda`,
/// `w = r_d` and `a = r_0` are taken at stage `k`.
pub fn finite_sandwich_check(vectors: &[BoundaryClassVector], k: usize, n: usize) -> Result<SandwichReport> {
    if k < 1 || n < k {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let at = |s: usize| {
        vectors
            .iter()
            .find(|v| v.stage() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("stage {s} is not among the given vectors")))
    };
    let (vk, vn) = (at(k)?, at(n)?);
    let d = vk.d();
    let ratio = |v: &BoundaryClassVector, j: usize| BigRational::new(v.count(j).clone(), v.count(j + 1).clone());
    let copies = (d + 1).pow((n - k) as u32);
    let joins = (d + 1) * (copies - 1) / 2;
    let lambda = BigRational::from_integer(vk.all_dimer().clone());
    let two = BigRational::from_integer(2.into());
    let side = |rk: BigRational, rn: BigRational| {
        let edge = BigRational::one() + &two * &rk + &two * &rk * &rk;
        num_traits::pow(lambda.clone(), copies)
            * num_traits::pow(edge, joins)
            * num_traits::pow(BigRational::one() + rn, d + 1)
    };
    let lower = side(ratio(vk, d), ratio(vn, d));
    let upper = side(ratio(vk, 0), ratio(vn, 0));
    let total = BigRational::from_integer(vn.total().clone());
    if !(lower < total && total < upper) {
        return Err(Error::Integrity(format!("finite sandwich fails for d={d}, k={k}, n={n}")));
    }
    Ok(SandwichReport { d, k, n, lower, total: vn.total().clone(), upper })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ln_one_is_zero() {
        assert_eq!(hp_ln(&q(1, 1), 30, Rounding::Down).unwrap().as_str(), format!("0.{}", "0".repeat(30)));
        assert_eq!(hp_ln(&q(1, 1), 30, Rounding::Up).unwrap().as_str(), format!("0.{}", "0".repeat(30)));
    }

    #[test]
    fn ln_rejects_nonpositive() {
        assert!(matches!(hp_ln(&q(0, 1), 10, Rounding::Down), Err(Error::Domain(_))));
        assert!(matches!(hp_ln(&q(-3, 2), 10, Rounding::Up), Err(Error::Domain(_))));
    }

    #[test]
    fn ln10_against_independent_series() {
        // ln 10 = 2 atanh(9/11), a single slowly converging series
        let w = 80;
        let scale = pow10(w);
        let z = q(9, 11);
        let mut pw = Enclosure::from_rational(&z, w).lo;
        let z2 = Enclosure::from_rational(&(&z * &z), w).lo;
        let mut sum = BigInt::zero();
        let mut k = 0u64;
        while pw > BigInt::zero() {
            sum += &pw / BigInt::from(2 * k + 1);
            pw = &pw * &z2 / &scale;
            k += 1;
        }
        let approx = BigRational::new(sum * 2, scale);
        let e = ln10_enclosure(w);
        let slack = BigRational::new(1.into(), pow10(w - 5));
        assert!(e.lower() - &slack < approx && approx < e.upper() + &slack);
        assert!(e.width_ulps() < BigInt::from(10_000));
        assert!(floor_digits(&e.lower(), 20).starts_with("2.30258509299404568401"));
    }

    #[test]
    fn ln_of_e_approximation() {
        // e to 60 digits
        let e_text = "2718281828459045235360287471352662497757247093699959574966967";
        let e_rat = BigRational::new(e_text.parse().unwrap(), pow10(60));
        let lo = hp_ln(&e_rat, 50, Rounding::Down).unwrap().to_rational();
        let hi = hp_ln(&e_rat, 50, Rounding::Up).unwrap().to_rational();
        let tol = BigRational::new(1.into(), pow10(49));
        assert!((lo - BigRational::one()).abs() < tol);
        assert!((hi - BigRational::one()).abs() < tol);
    }

    #[test]
    fn directed_rounding_brackets() {
        for x in [q(2, 1), q(3, 7), q(123456789, 1000), q(99, 100)] {
            let lo = hp_ln(&x, 40, Rounding::Down).unwrap().to_rational();
            let hi = hp_ln(&x, 40, Rounding::Up).unwrap().to_rational();
            assert!(lo < hi);
            assert!(&hi - &lo <= BigRational::new(2.into(), pow10(40)));
            let wide = ln_enclosure(&x, 80).unwrap();
            assert!(lo <= wide.lower() && wide.upper() <= hi);
        }
    }

    #[test]
    fn large_integer_logarithm() {
        // ln(10^500 * 3) = 500 ln 10 + ln 3
        let n: BigInt = pow10(500) * 3;
        let big = ln_enclosure(&BigRational::from_integer(n), 60).unwrap();
        let parts = ln10_enclosure(60).mul_int(&500.into()).add(&ln_enclosure(&q(3, 1), 60).unwrap());
        assert!(big.lower() <= parts.upper() && parts.lower() <= big.upper());
        assert!(big.width_ulps() < BigInt::from(10_000_000));
    }

    fn naive_bounds(v: &BoundaryClassVector, w: usize) -> (Enclosure, Enclosure) {
        let (d, k) = (v.d(), v.stage() as u32);
        let c = v.counts();
        let sites = BigInt::from(d + 1).pow(k + 1);
        let connect = BigInt::from(d + 1).pow(k) * 2;
        let anchor = ln_enclosure(&BigRational::from_integer(c[d + 1].clone()), w).unwrap().div_int(&sites);
        let edge = |r: BigRational| {
            let two = BigRational::from_integer(2.into());
            let x = BigRational::one() + &two * &r + &two * &r * &r;
            anchor.add(&ln_enclosure(&x, w).unwrap().div_int(&connect))
        };
        (
            edge(BigRational::new(c[d].clone(), c[d + 1].clone())),
            edge(BigRational::new(c[0].clone(), c[1].clone())),
        )
    }

    #[test]
    fn bound_expressions_agree_with_direct_logarithms() {
        let ints = |xs: &[i64]| xs.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        // the TH_2 stage-1 ratios exceed 1 and take the integer-logarithm path
        for v in [
            BoundaryClassVector::new(3, 1, ints(&[1010, 1242, 1556, 1983, 2571])),
            BoundaryClassVector::new(2, 1, ints(&[18, 16, 15, 14])),
        ] {
            let (lo, hi) = bound_enclosures(&v, 60).unwrap();
            let (nlo, nhi) = naive_bounds(&v, 60);
            assert!(lo.lower() <= nlo.upper() && nlo.lower() <= lo.upper());
            assert!(hi.lower() <= nhi.upper() && nhi.lower() <= hi.upper());
        }
    }

    #[test]
    fn stage_zero_is_rejected() {
        let v = BoundaryClassVector::initial(3);
        assert!(bounds(&[v], 0, 40).is_err());
    }

    #[test]
    fn small_precision_warns() {
        let v = BoundaryClassVector::new(3, 1, [1010, 1242, 1556, 1983, 2571].iter().map(|&x| x.into()).collect());
        let r = bounds(std::slice::from_ref(&v), 1, 1).unwrap();
        assert!(r.warning.is_some());
        let r = bounds(&[v], 1, 40).unwrap();
        assert!(r.warning.is_none());
        assert!(r.lower.to_rational() < r.upper.to_rational());
    }
}
