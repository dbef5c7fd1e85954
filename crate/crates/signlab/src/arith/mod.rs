//! Factorization and exact multiplicative functions: σ_s, φ, Ω,
//! abundancy, divisor enumeration, plus the bulk-range sieves.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

pub mod factor;
pub mod primality;
pub mod sieve;

pub use factor::{factor, Factorization};
pub use primality::is_prime;
pub use sieve::{build_spf_table, primes_up_to, PrimeStream, SigmaStream, SpfTable};

use crate::{Error, Result};

/// Exponent policy for σ_s: exact arbitrary-precision arithmetic for
/// integer s, double precision for arbitrary real s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaMode {
    ExactInteger(i64),
    Real(f64),
}

/// Result of a σ_s evaluation; the variant mirrors the requested mode.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaValue {
    /// Exact value; an integer (denominator 1) whenever s >= 0.
    Exact(BigRational),
    /// Double-precision value; relative error stays below 1e-12 for
    /// arguments with at most 64 divisors (each divisor power costs
    /// one `powf` round-off and the product accumulates at most one
    /// ulp per factor).
    Real(f64),
}

impl std::fmt::Display for SigmaValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SigmaValue::Exact(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            SigmaValue::Real(x) => write!(f, "{x}"),
        }
    }
}

/// Caps s·(e+1) exponents so σ_s cannot be asked for astronomically
/// large powers by accident.
const MAX_SIGMA_EXPONENT: u64 = 1 << 20;

/// Factors `n`, consulting the table when `n` is within its range.
pub fn factorize(n: u64, hint: Option<&SpfTable>) -> Result<Factorization> {
    match hint {
        Some(table) if (1..=table.limit()).contains(&n) => Ok(table.factorize(n)),
        _ => factor(n),
    }
}

/// σ_s(n) = Σ_{d|n} d^s for integer s, exact.
fn sigma_exact(f: &Factorization, s: i64) -> Result<BigRational> {
    if s >= 0 {
        Ok(BigRational::from(num_bigint::BigInt::from(sigma_power_int(
            f,
            s.unsigned_abs(),
        )?)))
    } else {
        // Σ d^{-t} over d|n equals σ_t(n)/n^t: pair each divisor d with n/d.
        let t = s.unsigned_abs();
        let num = sigma_power_int(f, t)?;
        let den = BigUint::from(f.value).pow(exponent_u32(t)?);
        Ok(BigRational::new(num.into(), den.into()))
    }
}

fn exponent_u32(e: u64) -> Result<u32> {
    if e > MAX_SIGMA_EXPONENT {
        return Err(Error::Overflow(format!(
            "sigma exponent {e} beyond supported magnitude {MAX_SIGMA_EXPONENT}"
        )));
    }
    Ok(e as u32)
}

/// σ_s for integer s >= 0 via the geometric closed form per prime power:
/// σ_s(p^e) = (p^{s(e+1)} - 1)/(p^s - 1), and e + 1 when s = 0.
fn sigma_power_int(f: &Factorization, s: u64) -> Result<BigUint> {
    let mut acc = BigUint::one();
    for &(p, e) in &f.factors {
        let term = if s == 0 {
            BigUint::from(e + 1)
        } else {
            let pe = BigUint::from(p);
            let num = pe.pow(exponent_u32(s * (e as u64 + 1))?) - 1u32;
            let den = pe.pow(exponent_u32(s)?) - 1u32;
            num / den
        };
        acc *= term;
    }
    Ok(acc)
}

fn sigma_real(f: &Factorization, s: f64) -> f64 {
    let mut acc = 1.0f64;
    for &(p, e) in &f.factors {
        let mut term = 1.0f64;
        for j in 1..=e {
            term += (p as f64).powf(j as f64 * s);
        }
        acc *= term;
    }
    acc
}

/// Generalized sum of divisors σ_s(n) = Σ_{d|n} d^s.
pub fn sigma_s(f: &Factorization, mode: SigmaMode) -> Result<SigmaValue> {
    match mode {
        SigmaMode::ExactInteger(s) => Ok(SigmaValue::Exact(sigma_exact(f, s)?)),
        SigmaMode::Real(s) => Ok(SigmaValue::Real(sigma_real(f, s))),
    }
}

/// σ_1(n) as a machine integer; exact for every u64 input since
/// σ(n) < 2^70 when n < 2^64.
pub fn sigma1_u128(f: &Factorization) -> u128 {
    let mut acc = 1u128;
    for &(p, e) in &f.factors {
        let mut term = 1u128;
        let mut power = 1u128;
        for _ in 0..e {
            power *= p as u128;
            term += power;
        }
        acc *= term;
    }
    acc
}

/// σ_1(n) by direct trial division, independent of the factorization
/// machinery; used to re-verify reported witnesses.
pub fn sigma1_direct(n: u64) -> u128 {
    debug_assert!(n >= 1);
    let mut acc = 0u128;
    let mut d = 1u64;
    while d * d < n {
        if n % d == 0 {
            acc += d as u128 + (n / d) as u128;
        }
        d += 1;
    }
    if d * d == n {
        acc += d as u128;
    }
    acc
}

/// Euler totient φ(n) = n · ∏_{p|n} (1 - 1/p).
pub fn euler_phi(f: &Factorization) -> u64 {
    let mut acc = 1u64;
    for &(p, e) in &f.factors {
        acc *= p.pow(e - 1) * (p - 1);
    }
    acc
}

/// Ω(n): prime factors counted with multiplicity.
pub fn big_omega(f: &Factorization) -> u32 {
    f.factors.iter().map(|&(_, e)| e).sum()
}

/// σ(n)/n in lowest terms.
pub fn abundancy(f: &Factorization) -> BigRational {
    BigRational::new(
        BigUint::from(sigma1_u128(f)).into(),
        BigUint::from(f.value).into(),
    )
}

/// All divisors of `n`, ascending.
pub fn divisors(f: &Factorization) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(p, e) in &f.factors {
        let prev_len = out.len();
        let mut power = 1u64;
        for _ in 0..e {
            power *= p;
            for i in 0..prev_len {
                out.push(out[i] * power);
            }
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn fac(n: u64) -> Factorization {
        factor(n).unwrap()
    }

    fn sigma_int(n: u64, s: i64) -> BigRational {
        match sigma_s(&fac(n), SigmaMode::ExactInteger(s)).unwrap() {
            SigmaValue::Exact(r) => r,
            SigmaValue::Real(_) => unreachable!(),
        }
    }

    #[test]
    fn sigma_known_values() {
        assert_eq!(sigma_int(1, 5), BigRational::from_integer(1.into()));
        assert_eq!(sigma_int(30, 1), BigRational::from_integer(72.into()));
        assert_eq!(sigma_int(134, 2), BigRational::from_integer(22450.into()));
        assert_eq!(sigma_int(31, 1), BigRational::from_integer(32.into()));
        assert_eq!(sigma_int(60, 1), BigRational::from_integer(168.into()));
        assert_eq!(sigma_int(12, 0), BigRational::from_integer(6.into()));
    }

    #[test]
    fn sigma_negative_s_is_sigma_over_power() {
        // σ_{-1}(30) = σ(30)/30 = 72/30 = 12/5.
        assert_eq!(sigma_int(30, -1), BigRational::new(12.into(), 5.into()));
        // σ_{-2}(134) = σ_2(134)/134² = 22450/17956.
        assert_eq!(
            sigma_int(134, -2),
            BigRational::new(22450.into(), 17956.into())
        );
    }

    #[test]
    fn sigma_real_tracks_direct_sum() {
        for n in [1u64, 30, 134, 945, 5040] {
            for s in [0.5f64, 1.0, 2.5] {
                let direct: f64 = divisors(&fac(n)).iter().map(|&d| (d as f64).powf(s)).sum();
                let got = match sigma_s(&fac(n), SigmaMode::Real(s)).unwrap() {
                    SigmaValue::Real(x) => x,
                    _ => unreachable!(),
                };
                assert!(
                    (got - direct).abs() <= 1e-9 * direct,
                    "n={n} s={s}: {got} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn sigma_display_forms() {
        let exact = sigma_s(&fac(134), SigmaMode::ExactInteger(2)).unwrap();
        assert_eq!(exact.to_string(), "22450");
        let rational = sigma_s(&fac(30), SigmaMode::ExactInteger(-1)).unwrap();
        assert_eq!(rational.to_string(), "12/5");
    }

    #[test]
    fn phi_known_values() {
        assert_eq!(euler_phi(&fac(1)), 1);
        assert_eq!(euler_phi(&fac(31)), 30);
        assert_eq!(euler_phi(&fac(30)), 8);
        assert_eq!(euler_phi(&fac(1024)), 512);
    }

    #[test]
    fn omega_known_values() {
        assert_eq!(big_omega(&fac(1)), 0);
        assert_eq!(big_omega(&fac(12)), 3);
        assert_eq!(big_omega(&fac(30)), 3);
        assert_eq!(big_omega(&fac(1024)), 10);
    }

    #[test]
    fn abundancy_known_values() {
        assert_eq!(abundancy(&fac(31)), BigRational::new(32.into(), 31.into()));
        assert_eq!(abundancy(&fac(30)), BigRational::new(12.into(), 5.into()));
        assert_eq!(abundancy(&fac(945)), BigRational::new(128.into(), 63.into()));
    }

    #[test]
    fn divisors_of_30() {
        assert_eq!(divisors(&fac(30)), vec![1, 2, 3, 5, 6, 10, 15, 30]);
        assert_eq!(divisors(&fac(1)), vec![1]);
        assert_eq!(divisors(&fac(31)), vec![1, 31]);
    }

    #[test]
    fn sigma1_direct_matches_closed_form() {
        for n in 1..=3000u64 {
            assert_eq!(sigma1_direct(n), sigma1_u128(&fac(n)), "n={n}");
        }
    }

    #[test]
    fn sigma_exponent_guard() {
        assert!(sigma_s(&fac(30), SigmaMode::ExactInteger(i64::MAX)).is_err());
    }

    #[test]
    fn sigma_exact_converts_cleanly_to_f64() {
        let r = sigma_int(945, 1).to_f64().unwrap();
        assert_eq!(r, 1920.0);
    }
}
