//! Exact comparison of sums of rational powers, plus rational parsing
//! and deterministic decimal rendering.
//!
//! A term is `coeff * base^(num/den)`. Comparisons canonicalize every
//! term into `rational * r^(1/den)` with `r` free of den-th powers;
//! distinct canonical radicals are linearly independent over the
//! rationals, so after cancellation a nonzero combination is bounded
//! away from zero and directed integer-root enclosures decide the sign
//! in finitely many refinement rounds.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::factor;
use crate::{Error, Result};

/// `coeff * base^(exp_num/exp_den)` with a positive integer base.
#[derive(Debug, Clone, PartialEq)]
pub struct PowTerm {
    pub coeff: BigRational,
    pub base: u64,
    pub exp_num: u32,
    pub exp_den: u32,
}

impl PowTerm {
    pub fn new(coeff: BigRational, base: u64, exp_num: u32, exp_den: u32) -> Result<Self> {
        if base == 0 {
            return Err(Error::Domain("power term base must be positive".into()));
        }
        if exp_den == 0 {
            return Err(Error::Domain("power term exponent denominator must be positive".into()));
        }
        Ok(PowTerm { coeff, base, exp_num, exp_den })
    }
}

/// Root orders beyond this make exact certification impractically slow.
const MAX_ROOT_ORDER: u32 = 64;

const REFINEMENT_BITS: [u32; 8] = [64, 128, 256, 512, 1024, 2048, 4096, 8192];

/// base^(num/den) as `c * r^(1/den)` with c integral and r den-th-power
/// free; den is reduced as far as the residual exponents allow.
fn decompose(base: u64, exp_num: u32, exp_den: u32) -> Result<(BigUint, BigUint, u32)> {
    let g = exp_num.gcd(&exp_den);
    let num = (exp_num / g) as u64;
    let mut den = exp_den / g;
    if base == 1 || exp_num == 0 {
        return Ok((BigUint::one(), BigUint::one(), 1));
    }
    if den == 1 {
        return Ok((BigUint::from(base).pow(num as u32), BigUint::one(), 1));
    }
    let factors = factor(base)?.factors;
    let residuals: Vec<(u64, u64, u64)> = factors
        .iter()
        .map(|&(p, e)| {
            let total = e as u64 * num;
            (p, total / den as u64, total % den as u64)
        })
        .collect();
    // gcd of den with all residual exponents; shrinking it keeps the
    // radical canonical so equal values share a key.
    let shrink = residuals
        .iter()
        .fold(den as u64, |acc, &(_, _, rem)| acc.gcd(&rem)) as u32;
    den /= shrink;
    let mut c = BigUint::one();
    let mut r = BigUint::one();
    for &(p, whole, rem) in &residuals {
        let pb = BigUint::from(p);
        c *= pb.pow(u32::try_from(whole).map_err(|_| {
            Error::Overflow(format!("integral exponent {whole} too large"))
        })?);
        r *= pb.pow((rem / shrink as u64) as u32);
    }
    if r.is_one() {
        den = 1;
    }
    if den > MAX_ROOT_ORDER {
        return Err(Error::Domain(format!(
            "root order {den} exceeds supported maximum {MAX_ROOT_ORDER}"
        )));
    }
    Ok((c, r, den))
}

/// Sign of `rational + Σ coeff * r^(1/den)` over canonicalized,
/// cancelled radicals; `None` radicals means the rational part decides.
fn radical_sum_sign(
    rational: &BigRational,
    radicals: &BTreeMap<(BigUint, u32), BigRational>,
) -> Result<Ordering> {
    if radicals.is_empty() {
        return Ok(rational.cmp(&BigRational::zero()));
    }
    for bits in REFINEMENT_BITS {
        let scale = BigUint::one() << bits;
        let mut lo = rational.clone();
        let mut hi = rational.clone();
        for ((r, den), coeff) in radicals {
            let shifted = r.clone() << (bits as usize * *den as usize);
            let root = shifted.nth_root(*den);
            let root_lo = BigRational::new(root.clone().into(), BigInt::from(scale.clone()));
            let root_hi = BigRational::new((root + 1u32).into(), BigInt::from(scale.clone()));
            if coeff.is_positive() {
                lo += coeff * &root_lo;
                hi += coeff * &root_hi;
            } else {
                lo += coeff * &root_hi;
                hi += coeff * &root_lo;
            }
        }
        if hi.is_negative() {
            return Ok(Ordering::Less);
        }
        if lo.is_positive() {
            return Ok(Ordering::Greater);
        }
    }
    Err(Error::Domain(
        "power sum comparison undecided at maximum refinement depth".into(),
    ))
}

/// Exact comparison of Σ lhs against Σ rhs.
pub fn compare_power_sums(lhs: &[PowTerm], rhs: &[PowTerm]) -> Result<Ordering> {
    let mut rational = BigRational::zero();
    let mut radicals: BTreeMap<(BigUint, u32), BigRational> = BTreeMap::new();
    for (terms, sign) in [(lhs, 1i32), (rhs, -1i32)] {
        for t in terms {
            let (c, r, den) = decompose(t.base, t.exp_num, t.exp_den)?;
            let contribution = &t.coeff * BigRational::from(BigInt::from(c)) * BigInt::from(sign);
            if den == 1 {
                rational += contribution;
            } else {
                *radicals.entry((r, den)).or_insert_with(BigRational::zero) += contribution;
            }
        }
    }
    radicals.retain(|_, c| !c.is_zero());
    radical_sum_sign(&rational, &radicals)
}

/// Parses "p/q", an integer, or a plain decimal into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Domain(format!("cannot parse rational from {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let (neg, whole) = match whole.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, whole.strip_prefix('+').unwrap_or(whole)),
        };
        if frac.is_empty()
            || !frac.bytes().all(|b| b.is_ascii_digit())
            || !whole.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{whole}{frac}");
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let v = BigRational::new(num, den);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(BigRational::from(n))
}

fn pow10(exp: i64) -> BigRational {
    let p = BigInt::from(10u32).pow(exp.unsigned_abs() as u32);
    if exp >= 0 {
        BigRational::from(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Renders an exact rational with `sig` significant digits, rounding
/// half away from zero; plain positional notation, no exponent form.
/// Deterministic across platforms since no floating point is involved.
pub fn decimal_sig(v: &BigRational, sig: u32) -> String {
    assert!(sig >= 1, "need at least one significant digit");
    if v.is_zero() {
        return "0".into();
    }
    if v.is_negative() {
        return format!("-{}", decimal_sig(&-v, sig));
    }
    let one = BigRational::one();
    let ten = pow10(1);
    let mut e: i64;
    let int_part = v.to_integer();
    if !int_part.is_zero() {
        e = int_part.to_string().len() as i64 - 1;
    } else {
        e = -1;
        let mut scaled = v * &ten;
        while scaled < one {
            scaled *= &ten;
            e -= 1;
        }
    }
    let scaled = v * pow10(sig as i64 - 1 - e);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut rounded = (scaled + half).to_integer();
    let mut digits = rounded.to_string();
    if digits.len() as u32 > sig {
        // 9.99... rounded up to the next magnitude.
        rounded /= 10;
        digits = rounded.to_string();
        e += 1;
    }
    if e >= 0 {
        let point = (e + 1) as usize;
        if point >= digits.len() {
            digits.push_str(&"0".repeat(point - digits.len()));
            digits
        } else {
            format!("{}.{}", &digits[..point], &digits[point..])
        }
    } else {
        format!("0.{}{}", "0".repeat((-e - 1) as usize), digits)
    }
}
