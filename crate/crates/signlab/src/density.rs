//! Root-count densities N(d) of linear forms, the Euler products that
//! collapse them to exact rational multiples of ζ(2), leading
//! coefficients of Σ_{n≤K} σ(f(n)), and exact partial-sum comparisons.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebraic::decimal_sig;
use crate::arith::sieve::progression_sigma_sum;
use crate::arith::{factor, is_prime};
use crate::forms::LinearForm;
use crate::{Error, Result};

/// An exact rational coefficient q standing for the real number
/// q·ζ(2). Products over primes p ∤ a contribute exactly ζ(2)·Π_{p|a}
/// (1 − p^-2), so the density β of a linear form lives here exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaMultiple {
    pub coeff: BigRational,
}

impl std::fmt::Display for ZetaMultiple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})*zeta(2)", self.coeff)
    }
}

/// A floating interval certified to contain an exact real value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

/// ζ(2) = 1.6449340668482264... bracketed by two rationals 1e-16 apart.
fn zeta2_bounds() -> (BigRational, BigRational) {
    let den = BigInt::from(10u64).pow(16);
    (
        BigRational::new(BigInt::from(16449340668482264u64), den.clone()),
        BigRational::new(BigInt::from(16449340668482265u64), den),
    )
}

fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n > 0 && p >= 2);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// 1 / p^alpha as an exact rational.
fn prime_power_recip(p: u64, alpha: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p).pow(alpha))
}

/// N(p^α): the number of n mod p^α with form(n) ≡ 0 (mod p^α).
///
/// With v = min(v_p(a), α) the count is p^v when p^v | b and 0
/// otherwise: the congruence an ≡ -b reduces by p^v to an invertible
/// one, each solution lifting to p^v residues.
pub fn root_count(form: &LinearForm, p: u64, alpha: u32) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("p = {p} is not prime")));
    }
    if alpha == 0 {
        return Err(Error::Domain("alpha must be at least 1".into()));
    }
    let v = valuation(form.slope(), p).min(alpha);
    let pv = p.pow(v);
    let divides = match form.offset() {
        0 => true,
        b => b.unsigned_abs() % pv == 0,
    };
    Ok(if divides { pv } else { 0 })
}

/// N(d) for arbitrary d ≥ 1, multiplicative across the prime powers
/// of d by the Chinese remainder theorem; N(1) = 1.
pub fn root_count_general(form: &LinearForm, d: u64) -> Result<u64> {
    let mut n = 1u64;
    for &(p, alpha) in &factor(d)?.factors {
        n *= root_count(form, p, alpha)?;
        if n == 0 {
            return Ok(0);
        }
    }
    Ok(n)
}

/// The local Euler factor S_p = 1 + Σ_{α≥1} N(p^α)/p^{2α}, summed
/// exactly: the series is finite up to min(v_p(a), v_p(b)) plus an
/// eventually-geometric tail p^-e/(p²-1) when v_p(a) ≤ v_p(b).
pub fn local_factor(form: &LinearForm, p: u64) -> Result<BigRational> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("p = {p} is not prime")));
    }
    let e = valuation(form.slope(), p);
    if e == 0 {
        let p2 = BigInt::from(p) * BigInt::from(p);
        return Ok(BigRational::new(p2.clone(), p2 - BigInt::one()));
    }
    let t = match form.offset() {
        0 => None,
        b => Some(valuation(b.unsigned_abs(), p)),
    };
    let mut s = BigRational::one();
    let cap = t.map_or(e, |t| e.min(t));
    for alpha in 1..=cap {
        s += prime_power_recip(p, alpha);
    }
    if t.is_none_or(|t| e <= t) {
        let p2m1 = BigInt::from(p) * BigInt::from(p) - BigInt::one();
        s += prime_power_recip(p, e) / BigRational::from_integer(p2m1);
    }
    Ok(s)
}

/// β = Σ_{d≥1} N(d)/d² as an exact multiple of ζ(2): every p ∤ a has
/// S_p = (1 − p^-2)^-1, so the product collapses to
/// ζ(2) · Π_{p|a} (1 − p^-2)·S_p with a finite exact coefficient.
pub fn beta(form: &LinearForm) -> ZetaMultiple {
    let slope = factor(form.slope()).expect("slope is positive");
    let mut coeff = BigRational::one();
    for &(p, _) in &slope.factors {
        let s = local_factor(form, p).expect("sieve primes are prime");
        let p2 = BigRational::from_integer(BigInt::from(p) * BigInt::from(p));
        coeff *= (BigRational::one() - p2.recip()) * s;
    }
    ZetaMultiple { coeff }
}

/// Leading coefficient of Σ_{n≤x} σ(form(n)) ~ c·x²: c = β·a/2.
pub fn leading_coefficient(form: &LinearForm) -> ZetaMultiple {
    let b = beta(form);
    let half_a = BigRational::new(BigInt::from(form.slope()), BigInt::from(2));
    ZetaMultiple {
        coeff: b.coeff * half_a,
    }
}

/// lim_K Σσ(f(n))/Σσ(g(n)) as an exact rational: the ζ(2) factors of
/// both leading coefficients cancel.
pub fn predicted_ratio(f: &LinearForm, g: &LinearForm) -> Result<BigRational> {
    let num = leading_coefficient(f).coeff;
    let den = leading_coefficient(g).coeff;
    if den.is_zero() {
        return Err(Error::Domain(format!(
            "leading coefficient of {g} is zero; the ratio is undefined"
        )));
    }
    Ok(num / den)
}

fn f64_at_most(x: &BigRational) -> f64 {
    let mut c = x.to_f64().expect("enclosure coefficients fit in f64");
    while BigRational::from_float(c).expect("finite") > *x {
        c = c.next_down();
    }
    c
}

fn f64_at_least(x: &BigRational) -> f64 {
    let mut c = x.to_f64().expect("enclosure coefficients fit in f64");
    while BigRational::from_float(c).expect("finite") < *x {
        c = c.next_up();
    }
    c
}

/// Floating enclosure of coeff·ζ(2) with directed rounding: the exact
/// rational endpoints are pushed outward until the f64 pair provably
/// brackets them.
pub fn numeric(z: &ZetaMultiple) -> Enclosure {
    if z.coeff.is_zero() {
        return Enclosure { lo: 0.0, hi: 0.0 };
    }
    let (zlo, zhi) = zeta2_bounds();
    let a = &z.coeff * zlo;
    let b = &z.coeff * zhi;
    let (exact_lo, exact_hi) = if a <= b { (a, b) } else { (b, a) };
    Enclosure {
        lo: f64_at_most(&exact_lo),
        hi: f64_at_least(&exact_hi),
    }
}

/// Σ_{n=1}^{K} σ(form(n)) exactly; the empty sum at K = 0 is 0.
pub fn partial_sum(form: &LinearForm, k: u64) -> Result<BigUint> {
    if k == 0 {
        return Ok(BigUint::zero());
    }
    progression_sigma_sum(form, 1, k)
}

/// Header for the CSV rendering of [`compare_partial_sums`] rows.
pub const CSV_HEADER: &str = "K,sum_f,sum_g,ratio,limit,abs_deviation";

fn ser_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// One checkpoint of the partial-sum comparison. `ratio`, `limit`, and
/// `abs_deviation` are decimal renderings of exact rationals to 10
/// significant digits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckpointRow {
    pub k: u64,
    #[serde(serialize_with = "ser_biguint")]
    pub sum_f: BigUint,
    #[serde(serialize_with = "ser_biguint")]
    pub sum_g: BigUint,
    pub ratio: String,
    pub limit: String,
    pub abs_deviation: String,
}

impl CheckpointRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.k, self.sum_f, self.sum_g, self.ratio, self.limit, self.abs_deviation
        )
    }
}

/// Exact partial sums of σ(f(n)) and σ(g(n)) at each checkpoint, with
/// the running ratio and its deviation from the predicted limit.
/// Reports only; asserts nothing about signs or convergence.
pub fn compare_partial_sums(
    f: &LinearForm,
    g: &LinearForm,
    checkpoints: &[u64],
) -> Result<Vec<CheckpointRow>> {
    for pair in checkpoints.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::Domain(format!(
                "checkpoints must be strictly ascending; saw {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    if checkpoints.first() == Some(&0) {
        return Err(Error::Domain("checkpoints must be at least 1".into()));
    }
    let limit = predicted_ratio(f, g)?;
    let limit_text = decimal_sig(&limit, 10);
    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut sum_f = BigUint::zero();
    let mut sum_g = BigUint::zero();
    let mut prev = 0u64;
    for &k in checkpoints {
        sum_f += progression_sigma_sum(f, prev + 1, k)?;
        sum_g += progression_sigma_sum(g, prev + 1, k)?;
        prev = k;
        let ratio = BigRational::new(BigInt::from(sum_f.clone()), BigInt::from(sum_g.clone()));
        let deviation = (&ratio - &limit).abs();
        rows.push(CheckpointRow {
            k,
            sum_f: sum_f.clone(),
            sum_g: sum_g.clone(),
            ratio: decimal_sig(&ratio, 10),
            limit: limit_text.clone(),
            abs_deviation: decimal_sig(&deviation, 10),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::parse_rational;

    fn form(text: &str) -> LinearForm {
        text.parse().unwrap()
    }

    fn rat(text: &str) -> BigRational {
        parse_rational(text).unwrap()
    }

    #[test]
    fn prime_power_root_counts() {
        assert_eq!(root_count(&form("30x"), 5, 3).unwrap(), 5);
        assert_eq!(root_count(&form("30x"), 7, 2).unwrap(), 1);
        assert_eq!(root_count(&form("30x+1"), 2, 1).unwrap(), 0);
        assert_eq!(root_count(&form("4x+2"), 2, 1).unwrap(), 2);
        assert_eq!(root_count(&form("4x+2"), 2, 2).unwrap(), 0);
        // v = min(v_2(12), alpha) = 2 and 4 | 8, so N stays 4 for alpha >= 2.
        assert_eq!(root_count(&form("12x+8"), 2, 3).unwrap(), 4);
        assert_eq!(root_count(&form("12x+8"), 2, 2).unwrap(), 4);
        assert_eq!(root_count(&form("12x+8"), 3, 1).unwrap(), 0);
        assert!(matches!(
            root_count(&form("30x"), 6, 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            root_count(&form("30x"), 5, 0),
            Err(Error::Domain(_))
        ));
    }

    fn brute_roots(form: &LinearForm, d: u64) -> u64 {
        (0..d)
            .filter(|&n| form.eval_i128(n).rem_euclid(d as i128) == 0)
            .count() as u64
    }

    #[test]
    fn general_root_counts_match_brute_force() {
        let forms = ["30x", "30x+1", "7x+3", "12x+8", "4x+2"];
        for text in forms {
            let f = form(text);
            for d in 1..=300 {
                assert_eq!(
                    root_count_general(&f, d).unwrap(),
                    brute_roots(&f, d),
                    "{text} at d={d}"
                );
            }
        }
        assert_eq!(root_count_general(&form("30x"), 1).unwrap(), 1);
        assert_eq!(root_count_general(&form("30x"), 4).unwrap(), 2);
        assert_eq!(root_count_general(&form("30x"), 60).unwrap(), 30);
    }

    #[test]
    fn local_factors_for_thirty() {
        assert_eq!(local_factor(&form("30x"), 2).unwrap(), rat("5/3"));
        assert_eq!(local_factor(&form("30x"), 3).unwrap(), rat("11/8"));
        assert_eq!(local_factor(&form("30x"), 5).unwrap(), rat("29/24"));
        assert_eq!(local_factor(&form("30x+1"), 2).unwrap(), rat("1"));
        assert_eq!(local_factor(&form("30x+1"), 7).unwrap(), rat("49/48"));
        assert_eq!(local_factor(&form("12x+8"), 2).unwrap(), rat("11/6"));
        assert!(local_factor(&form("30x"), 9).is_err());
    }

    #[test]
    fn local_factor_matches_truncated_series() {
        // The α ≤ 30 truncation is within p^-58 of the closed form.
        for text in ["30x", "30x+1", "12x+8", "4x+2", "7x+3"] {
            let f = form(text);
            for p in [2u64, 3, 5, 7, 11, 97] {
                let mut truncated = BigRational::one();
                for alpha in 1..=30u32 {
                    let n = root_count(&f, p, alpha).unwrap();
                    truncated += BigRational::new(
                        BigInt::from(n),
                        BigInt::from(p).pow(2 * alpha),
                    );
                }
                let gap = (local_factor(&f, p).unwrap() - truncated).abs();
                let tail = BigRational::new(BigInt::one(), BigInt::from(p).pow(58));
                assert!(gap < tail, "{text} at p={p}");
            }
        }
    }

    #[test]
    fn beta_coefficients() {
        assert_eq!(beta(&form("30x")).coeff, rat("319/180"));
        assert_eq!(beta(&form("30x+1")).coeff, rat("16/25"));
        assert_eq!(beta(&form("x")).coeff, rat("1"));
    }

    #[test]
    fn leading_coefficients() {
        assert_eq!(leading_coefficient(&form("30x")).coeff, rat("319/12"));
        assert_eq!(leading_coefficient(&form("30x+1")).coeff, rat("48/5"));
        assert_eq!(leading_coefficient(&form("x")).coeff, rat("1/2"));
    }

    #[test]
    fn predicted_ratios() {
        assert_eq!(
            predicted_ratio(&form("30x"), &form("30x+1")).unwrap(),
            rat("1595/576")
        );
        assert_eq!(
            predicted_ratio(&form("30x+1"), &form("30x")).unwrap(),
            rat("576/1595")
        );
        assert_eq!(predicted_ratio(&form("7x+3"), &form("7x+3")).unwrap(), rat("1"));
    }

    #[test]
    fn numeric_enclosures() {
        let e = numeric(&ZetaMultiple { coeff: rat("16/25") });
        assert!(e.lo <= e.hi);
        assert!(e.lo >= 1.05275 && e.hi <= 1.05276, "{e:?}");

        let z = numeric(&ZetaMultiple { coeff: rat("1") });
        assert!(z.lo <= 1.6449340668482264 && 1.6449340668482265 <= z.hi);
        assert!(z.hi - z.lo < 1e-12);

        let zero = numeric(&ZetaMultiple { coeff: rat("0") });
        assert_eq!((zero.lo, zero.hi), (0.0, 0.0));

        let neg = numeric(&ZetaMultiple { coeff: rat("-1") });
        assert!(neg.lo <= -1.6449340668482265 && neg.hi >= -1.6449340668482264);
    }

    #[test]
    fn partial_sums_small() {
        assert_eq!(partial_sum(&form("30x"), 2).unwrap(), BigUint::from(240u32));
        assert_eq!(partial_sum(&form("30x+1"), 2).unwrap(), BigUint::from(94u32));
        assert_eq!(partial_sum(&form("30x"), 0).unwrap(), BigUint::zero());
        assert!(partial_sum(&form("x-5"), 3).is_err());
    }

    #[test]
    fn comparison_rows_at_desk_scale() {
        let rows =
            compare_partial_sums(&form("30x"), &form("30x+1"), &[1, 2]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].k, 2);
        assert_eq!(rows[1].sum_f, BigUint::from(240u32));
        assert_eq!(rows[1].sum_g, BigUint::from(94u32));
        assert_eq!(rows[1].ratio, "2.553191489");
        assert_eq!(rows[1].limit, "2.769097222");
        let expected_dev = (rat("240/94") - rat("1595/576")).abs();
        assert_eq!(rows[1].abs_deviation, decimal_sig(&expected_dev, 10));
        assert_eq!(
            rows[1].csv_row(),
            format!("2,240,94,2.553191489,2.769097222,{}", rows[1].abs_deviation)
        );
    }

    #[test]
    fn comparison_of_form_with_itself_is_one() {
        let rows = compare_partial_sums(&form("30x"), &form("30x"), &[5]).unwrap();
        assert_eq!(rows[0].ratio, "1.000000000");
        assert_eq!(rows[0].abs_deviation, "0");
    }

    #[test]
    fn comparison_validates_checkpoints() {
        let f = form("30x");
        let g = form("30x+1");
        assert!(compare_partial_sums(&f, &g, &[5, 5]).is_err());
        assert!(compare_partial_sums(&f, &g, &[5, 2]).is_err());
        assert!(compare_partial_sums(&f, &g, &[0, 2]).is_err());
        assert!(compare_partial_sums(&f, &g, &[]).unwrap().is_empty());
    }

    #[test]
    fn euler_product_partial_sum_stays_below_enclosure() {
        for text in ["30x", "30x+1"] {
            let f = form(text);
            let mut acc = 0.0f64;
            for d in 1..=10_000u64 {
                acc += root_count_general(&f, d).unwrap() as f64 / (d as f64 * d as f64);
            }
            let enc = numeric(&beta(&f));
            assert!(acc <= enc.hi + 1e-9, "{text}: {acc} vs {enc:?}");
            assert!(enc.hi - acc < 0.01, "{text}: tail too large");
        }
    }
}
