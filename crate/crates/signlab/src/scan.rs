//! Sign analytics for D(n) = σ_s(an+b) − σ_s(cn+d) along arithmetic
//! progressions, totient-dominance scans, primes in progressions, and
//! the two-sided witness machinery built on the slope-gap inequality
//! (a+2)^s < (1 + 2^(-(s+1))) a^s.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::algebraic::{compare_power_sums, PowTerm};
use crate::arith::{
    build_spf_table, divisors, euler_phi, factorize, is_prime, sigma_s, SigmaMode, SigmaValue,
    SpfTable,
};
use crate::forms::LinearForm;
use crate::{Error, Result};

/// Largest value worth a smallest-prime-factor table; above this the
/// scans factor elements individually.
const TABLE_CUTOFF: u64 = 1 << 26;

/// Relative half-width of the tie band in Real mode.
const REAL_TIE_EPS: f64 = 1e-9;

/// The two progressions under comparison and the σ exponent policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProgressionPair {
    pub left: LinearForm,
    pub right: LinearForm,
    pub mode: SigmaMode,
}

/// Tallies for one scan of sign(σ_s(left(n)) − σ_s(right(n))).
///
/// `sign_changes` counts adjacent opposite nonzero signs after zeros
/// are deleted from the sequence; zeros are tallied separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignScanReport {
    pub n_max: u64,
    pub count_pos: u64,
    pub count_neg: u64,
    pub count_zero: u64,
    pub sign_changes: u64,
    pub first_pos: Option<u64>,
    pub first_neg: Option<u64>,
    pub first_zero: Option<u64>,
    /// Real-mode comparisons that fell inside the tie band without
    /// being exactly zero; classified as zeros above. Always 0 in
    /// exact mode.
    pub near_ties: u64,
}

fn spf_hint(max_value: u64) -> Option<SpfTable> {
    if (2..=TABLE_CUTOFF).contains(&max_value) {
        build_spf_table(max_value).ok()
    } else {
        None
    }
}

fn signum(pair: &ProgressionPair, n: u64, hint: Option<&SpfTable>) -> Result<(i8, bool)> {
    let lv = pair.left.eval_u64(n)?;
    let rv = pair.right.eval_u64(n)?;
    let lf = factorize(lv, hint)?;
    let rf = factorize(rv, hint)?;
    match pair.mode {
        SigmaMode::ExactInteger(_) => {
            let ls = match sigma_s(&lf, pair.mode)? {
                SigmaValue::Exact(r) => r,
                SigmaValue::Real(_) => unreachable!("exact mode yields exact values"),
            };
            let rs = match sigma_s(&rf, pair.mode)? {
                SigmaValue::Exact(r) => r,
                SigmaValue::Real(_) => unreachable!("exact mode yields exact values"),
            };
            Ok((
                match ls.cmp(&rs) {
                    Ordering::Greater => 1,
                    Ordering::Less => -1,
                    Ordering::Equal => 0,
                },
                false,
            ))
        }
        SigmaMode::Real(_) => {
            let ls = match sigma_s(&lf, pair.mode)? {
                SigmaValue::Real(x) => x,
                SigmaValue::Exact(_) => unreachable!("real mode yields real values"),
            };
            let rs = match sigma_s(&rf, pair.mode)? {
                SigmaValue::Real(x) => x,
                SigmaValue::Exact(_) => unreachable!("real mode yields real values"),
            };
            let diff = ls - rs;
            let band = REAL_TIE_EPS * ls.abs().max(rs.abs());
            if diff.abs() <= band {
                Ok((0, diff != 0.0))
            } else if diff > 0.0 {
                Ok((1, false))
            } else {
                Ok((-1, false))
            }
        }
    }
}

/// Scans n = 1..=n_max and tallies the sign of σ_s(left) − σ_s(right).
pub fn scan_signs(pair: &ProgressionPair, n_max: u64) -> Result<SignScanReport> {
    if n_max == 0 {
        return Err(Error::Domain("scan length must be positive".into()));
    }
    let max_value = pair.left.eval_u64(n_max)?.max(pair.right.eval_u64(n_max)?);
    pair.left.eval_u64(1)?;
    pair.right.eval_u64(1)?;
    let hint = spf_hint(max_value);
    let mut report = SignScanReport {
        n_max,
        count_pos: 0,
        count_neg: 0,
        count_zero: 0,
        sign_changes: 0,
        first_pos: None,
        first_neg: None,
        first_zero: None,
        near_ties: 0,
    };
    let mut last_nonzero = 0i8;
    for n in 1..=n_max {
        let (sign, tied) = signum(pair, n, hint.as_ref())?;
        if tied {
            report.near_ties += 1;
        }
        match sign {
            1 => {
                report.count_pos += 1;
                report.first_pos.get_or_insert(n);
            }
            -1 => {
                report.count_neg += 1;
                report.first_neg.get_or_insert(n);
            }
            _ => {
                report.count_zero += 1;
                report.first_zero.get_or_insert(n);
            }
        }
        if sign != 0 {
            if last_nonzero != 0 && sign != last_nonzero {
                report.sign_changes += 1;
            }
            last_nonzero = sign;
        }
    }
    Ok(report)
}

/// Least n <= n_max with φ(qn+1) <= φ(qn), or None when the strict
/// dominance φ(qn+1) > φ(qn) holds throughout.
pub fn phi_dominance_scan(q: u64, n_max: u64) -> Result<Option<u64>> {
    if q == 0 {
        return Err(Error::Domain("modulus q must be positive".into()));
    }
    if n_max == 0 {
        return Err(Error::Domain("scan length must be positive".into()));
    }
    let top = q
        .checked_mul(n_max)
        .and_then(|v| v.checked_add(1))
        .ok_or_else(|| Error::Overflow(format!("q*n+1 exceeds u64 at q={q}, n={n_max}")))?;
    let hint = spf_hint(top);
    for n in 1..=n_max {
        let qn = q * n;
        let phi_qn = euler_phi(&factorize(qn, hint.as_ref())?);
        let phi_next = euler_phi(&factorize(qn + 1, hint.as_ref())?);
        if phi_next <= phi_qn {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// The `count` smallest primes p ≡ m (mod q) with p >= start, ascending.
pub fn prime_in_ap(q: u64, m: i64, count: u64, start: u64) -> Result<Vec<u64>> {
    if q == 0 {
        return Err(Error::Domain("modulus q must be positive".into()));
    }
    if count == 0 {
        return Err(Error::Domain("requested prime count must be positive".into()));
    }
    let residue = (((m as i128) % (q as i128) + q as i128) % q as i128) as u64;
    let g = num_integer::gcd(residue, q);
    if g != 1 {
        return Err(Error::Hypothesis(format!(
            "gcd({m}, {q}) = {g}; the residue class must be coprime to the modulus for primes to recur"
        )));
    }
    let mut c = if residue >= start {
        residue
    } else {
        let k = (start - residue).div_ceil(q);
        residue
            .checked_add(k.checked_mul(q).ok_or_else(|| {
                Error::Overflow(format!("progression start beyond u64 for q={q}, start={start}"))
            })?)
            .ok_or_else(|| Error::Overflow(format!("progression start beyond u64 for q={q}")))?
    };
    let mut out = Vec::with_capacity(count as usize);
    while (out.len() as u64) < count {
        if c >= 2 && is_prime(c) {
            out.push(c);
        }
        c = c.checked_add(q).ok_or_else(|| {
            Error::Overflow(format!(
                "exhausted u64 range after {} of {count} primes in {m} mod {q}",
                out.len()
            ))
        })?;
    }
    Ok(out)
}

fn exponent_parts(s: &BigRational) -> Result<(u32, u32)> {
    let reduced = s.reduced();
    let num = reduced
        .numer()
        .to_u32()
        .ok_or_else(|| Error::Overflow(format!("exponent numerator of {s} too large")))?;
    let den = reduced
        .denom()
        .to_u32()
        .ok_or_else(|| Error::Overflow(format!("exponent denominator of {s} too large")))?;
    Ok((num, den))
}

/// Exact test of (a+2)^s < (1 + 2^(-(s+1))) a^s for rational s.
///
/// Multiplying through by 2^(s+1) turns both sides into sums of
/// integer-base powers: 2(2a+4)^s < 2(2a)^s + a^s, which the radical
/// comparator decides exactly.
pub fn slope_gap_holds(s: &BigRational, a: u64) -> Result<bool> {
    if *s <= BigRational::one() {
        return Err(Error::Domain(format!("exponent s = {s} must exceed 1")));
    }
    if a == 0 {
        return Err(Error::Domain("slope a must be positive".into()));
    }
    let (num, den) = exponent_parts(s)?;
    let twice_a = a
        .checked_mul(2)
        .and_then(|v| v.checked_add(4))
        .ok_or_else(|| Error::Overflow(format!("2a+4 exceeds u64 at a={a}")))?;
    let two = BigRational::from_integer(2.into());
    let lhs = vec![PowTerm::new(two.clone(), twice_a, num, den)?];
    let rhs = vec![
        PowTerm::new(two, twice_a - 4, num, den)?,
        PowTerm::new(BigRational::one(), a, num, den)?,
    ];
    Ok(compare_power_sums(&lhs, &rhs)? == Ordering::Less)
}

/// Smallest odd a satisfying the slope-gap inequality for rational
/// s > 1. A double-precision evaluation of the closed-form threshold
/// 2/((1 + 2^(-(s+1)))^(1/s) - 1) seeds the search; the boundary is
/// then certified by exact comparisons on a and a-2.
pub fn min_odd_a(s: &BigRational) -> Result<u64> {
    if *s <= BigRational::one() {
        return Err(Error::Domain(format!("exponent s = {s} must exceed 1")));
    }
    exponent_parts(s)?;
    let sf = s
        .to_f64()
        .ok_or_else(|| Error::Overflow(format!("exponent {s} out of range")))?;
    let ratio = (1.0 + 2f64.powf(-(sf + 1.0))).powf(1.0 / sf) - 1.0;
    let threshold = 2.0 / ratio;
    if !threshold.is_finite() || threshold > (1u64 << 62) as f64 {
        return Err(Error::Overflow(format!(
            "minimal odd slope for s = {s} exceeds the supported range"
        )));
    }
    let mut a = (threshold as u64).max(3) | 1;
    if slope_gap_holds(s, a)? {
        while a > 3 && slope_gap_holds(s, a - 2)? {
            a -= 2;
        }
    } else {
        loop {
            a += 2;
            if slope_gap_holds(s, a)? {
                break;
            }
        }
    }
    Ok(a)
}

/// Which branch of the witness search a failure came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessFailure {
    pub n: u64,
    /// "negative" when an+2 is prime but σ_s(an+2) < σ_s((a+1)n+1)
    /// failed; "positive" for the even-n reverse branch.
    pub branch: &'static str,
    pub detail: String,
}

/// Verified sign witnesses for D(n) = σ_s(an+2) − σ_s((a+1)n+1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub a: u64,
    pub n_max: u64,
    /// n with an+2 prime and σ_s(an+2) < σ_s((a+1)n+1), exactly checked.
    pub negatives: Vec<u64>,
    /// Even n with (a+1)n+1 prime and the reverse strict inequality.
    pub positives: Vec<u64>,
    /// Candidates whose primality pattern matched but whose inequality
    /// did not; reported rather than dropped.
    pub failures: Vec<WitnessFailure>,
}

fn compare_sigma_exact(x: u64, y: u64, num: u32, den: u32) -> Result<Ordering> {
    let fx = factorize(x, None)?;
    let fy = factorize(y, None)?;
    if den == 1 {
        let sx = match sigma_s(&fx, SigmaMode::ExactInteger(num as i64))? {
            SigmaValue::Exact(r) => r,
            SigmaValue::Real(_) => unreachable!(),
        };
        let sy = match sigma_s(&fy, SigmaMode::ExactInteger(num as i64))? {
            SigmaValue::Exact(r) => r,
            SigmaValue::Real(_) => unreachable!(),
        };
        return Ok(sx.cmp(&sy));
    }
    let terms = |f: &crate::arith::Factorization| -> Result<Vec<PowTerm>> {
        divisors(f)
            .into_iter()
            .map(|d| PowTerm::new(BigRational::one(), d, num, den))
            .collect()
    };
    compare_power_sums(&terms(&fx)?, &terms(&fy)?)
}

/// Enumerates both witness families up to n_max for a slope already
/// satisfying the gap inequality, re-verifying every candidate by an
/// exact σ_s comparison.
pub fn two_sided_witnesses(s: &BigRational, a: u64, n_max: u64) -> Result<WitnessReport> {
    if a % 2 == 0 {
        return Err(Error::Domain(format!("slope a = {a} must be odd")));
    }
    if !slope_gap_holds(s, a)? {
        return Err(Error::Hypothesis(format!(
            "slope a = {a} does not satisfy (a+2)^s < (1 + 2^-(s+1)) a^s for s = {s}"
        )));
    }
    let (num, den) = exponent_parts(s)?;
    let mut report = WitnessReport {
        a,
        n_max,
        negatives: Vec::new(),
        positives: Vec::new(),
        failures: Vec::new(),
    };
    for n in 1..=n_max {
        let low = a
            .checked_mul(n)
            .and_then(|v| v.checked_add(2))
            .ok_or_else(|| Error::Overflow(format!("an+2 exceeds u64 at n={n}")))?;
        let high = (a + 1)
            .checked_mul(n)
            .and_then(|v| v.checked_add(1))
            .ok_or_else(|| Error::Overflow(format!("(a+1)n+1 exceeds u64 at n={n}")))?;
        if is_prime(low) {
            match compare_sigma_exact(low, high, num, den)? {
                Ordering::Less => report.negatives.push(n),
                other => report.failures.push(WitnessFailure {
                    n,
                    branch: "negative",
                    detail: format!("σ_s({low}) vs σ_s({high}) compared {other:?}, expected Less"),
                }),
            }
        }
        if n % 2 == 0 && is_prime(high) {
            match compare_sigma_exact(low, high, num, den)? {
                Ordering::Greater => report.positives.push(n),
                other => report.failures.push(WitnessFailure {
                    n,
                    branch: "positive",
                    detail: format!(
                        "σ_s({low}) vs σ_s({high}) compared {other:?}, expected Greater"
                    ),
                }),
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::parse_rational;

    fn pair(left: &str, right: &str, mode: SigmaMode) -> ProgressionPair {
        ProgressionPair {
            left: left.parse().unwrap(),
            right: right.parse().unwrap(),
            mode,
        }
    }

    fn rat(text: &str) -> BigRational {
        parse_rational(text).unwrap()
    }

    #[test]
    fn thirty_progressions_stay_positive() {
        let report = scan_signs(&pair("30x", "30x+1", SigmaMode::ExactInteger(1)), 100).unwrap();
        assert_eq!(report.count_pos, 100);
        assert_eq!(report.sign_changes, 0);
        assert_eq!(report.first_pos, Some(1));
        assert_eq!(report.first_neg, None);
        assert_eq!(report.near_ties, 0);
    }

    #[test]
    fn identical_forms_are_all_zero() {
        for mode in [SigmaMode::ExactInteger(3), SigmaMode::Real(1.5)] {
            let report = scan_signs(&pair("7x+3", "7x+3", mode), 50).unwrap();
            assert_eq!(report.count_zero, 50);
            assert_eq!(report.sign_changes, 0);
            assert_eq!(report.first_zero, Some(1));
            assert_eq!(report.near_ties, 0);
        }
    }

    #[test]
    fn alternating_pair_report() {
        let report = scan_signs(&pair("33x+2", "34x+1", SigmaMode::ExactInteger(2)), 10).unwrap();
        assert_eq!(report.first_zero, Some(1));
        assert_eq!(report.first_pos, Some(2));
        assert_eq!(report.first_neg, Some(3));
        assert_eq!(report.count_pos, 5);
        assert_eq!(report.count_neg, 4);
        assert_eq!(report.count_zero, 1);
        assert_eq!(report.sign_changes, 8);
    }

    #[test]
    fn zero_between_positives_adds_no_change() {
        // σ(n+9) > σ(n) throughout 1..=15 except n = 14, where
        // σ(23) = σ(14) = 24; the interior zero must not break the streak.
        let report = scan_signs(&pair("x+9", "x", SigmaMode::ExactInteger(1)), 15).unwrap();
        assert_eq!(report.first_zero, Some(14));
        assert_eq!(report.count_zero, 1);
        assert_eq!(report.sign_changes, 0);
        assert_eq!(report.count_neg, 0);
        assert_eq!(report.count_pos, 14);
    }

    #[test]
    fn counts_partition_the_range() {
        let report = scan_signs(&pair("5x+3", "4x+9", SigmaMode::ExactInteger(1)), 200).unwrap();
        assert_eq!(
            report.count_pos + report.count_neg + report.count_zero,
            report.n_max
        );
    }

    #[test]
    fn antisymmetry_under_swap() {
        let fwd = scan_signs(&pair("33x+2", "34x+1", SigmaMode::ExactInteger(2)), 60).unwrap();
        let rev = scan_signs(&pair("34x+1", "33x+2", SigmaMode::ExactInteger(2)), 60).unwrap();
        assert_eq!(fwd.count_pos, rev.count_neg);
        assert_eq!(fwd.count_neg, rev.count_pos);
        assert_eq!(fwd.count_zero, rev.count_zero);
        assert_eq!(fwd.sign_changes, rev.sign_changes);
        assert_eq!(fwd.first_pos, rev.first_neg);
    }

    #[test]
    fn real_mode_matches_exact_mode_on_clear_signs() {
        let exact = scan_signs(&pair("33x+2", "34x+1", SigmaMode::ExactInteger(2)), 40).unwrap();
        let real = scan_signs(&pair("33x+2", "34x+1", SigmaMode::Real(2.0)), 40).unwrap();
        assert_eq!(exact.count_pos, real.count_pos);
        assert_eq!(exact.count_neg, real.count_neg);
        assert_eq!(exact.sign_changes, real.sign_changes);
    }

    #[test]
    fn nonpositive_form_rejected() {
        let p = pair("x-5", "x", SigmaMode::ExactInteger(1));
        assert!(scan_signs(&p, 10).is_err());
        assert!(scan_signs(&pair("x", "x", SigmaMode::ExactInteger(1)), 0).is_err());
    }

    #[test]
    fn phi_dominance_examples() {
        assert_eq!(phi_dominance_scan(1, 10).unwrap(), Some(1));
        assert_eq!(phi_dominance_scan(3, 10).unwrap(), Some(1));
        assert_eq!(phi_dominance_scan(30, 1000).unwrap(), None);
        assert!(phi_dominance_scan(0, 5).is_err());
    }

    #[test]
    fn primes_in_progressions() {
        assert_eq!(prime_in_ap(2, 1, 3, 0).unwrap(), vec![3, 5, 7]);
        assert_eq!(prime_in_ap(30, 1, 3, 0).unwrap(), vec![31, 61, 151]);
        assert_eq!(prime_in_ap(30, 1, 2, 32).unwrap(), vec![61, 151]);
        assert_eq!(prime_in_ap(1, 0, 4, 0).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(prime_in_ap(4, -1, 2, 0).unwrap(), vec![3, 7]);
        assert!(matches!(prime_in_ap(4, 2, 1, 0), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn slope_gap_known_boundaries() {
        let two = rat("2");
        assert!(slope_gap_holds(&two, 33).unwrap());
        assert!(!slope_gap_holds(&two, 31).unwrap());
        let three = rat("3");
        assert!(slope_gap_holds(&three, 99).unwrap());
        assert!(!slope_gap_holds(&three, 97).unwrap());
        assert!(slope_gap_holds(&rat("3/2"), 19).unwrap());
        assert!(!slope_gap_holds(&rat("3/2"), 17).unwrap());
    }

    #[test]
    fn min_odd_a_known_values() {
        assert_eq!(min_odd_a(&rat("3/2")).unwrap(), 19);
        assert_eq!(min_odd_a(&rat("2")).unwrap(), 33);
        assert_eq!(min_odd_a(&rat("5/2")).unwrap(), 59);
        assert_eq!(min_odd_a(&rat("3")).unwrap(), 99);
        assert_eq!(min_odd_a(&rat("4")).unwrap(), 259);
    }

    #[test]
    fn min_odd_a_monotone_on_grid() {
        let grid = ["3/2", "2", "5/2", "3", "4"];
        let values: Vec<u64> = grid.iter().map(|s| min_odd_a(&rat(s)).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]), "{values:?}");
    }

    #[test]
    fn min_odd_a_rejects_s_at_most_one() {
        assert!(matches!(min_odd_a(&rat("1")), Err(Error::Domain(_))));
        assert!(matches!(min_odd_a(&rat("1/2")), Err(Error::Domain(_))));
    }

    #[test]
    fn witnesses_for_s2_a33() {
        let report = two_sided_witnesses(&rat("2"), 33, 20).unwrap();
        assert_eq!(report.negatives, vec![3, 5, 7, 13, 17]);
        assert_eq!(report.positives, vec![4, 12, 18]);
        assert!(report.failures.is_empty());

        let tiny = two_sided_witnesses(&rat("2"), 33, 2).unwrap();
        assert!(tiny.negatives.is_empty());
        assert!(tiny.positives.is_empty());
    }

    #[test]
    fn witnesses_reject_failing_slope() {
        assert!(matches!(
            two_sided_witnesses(&rat("2"), 31, 10),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            two_sided_witnesses(&rat("2"), 34, 10),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn witness_tie_at_n1_is_reported_not_dropped() {
        // a = 99, n = 1: both forms evaluate near 101 with an+2 = 101
        // prime and (a+1)n+1 = 101; σ values tie exactly.
        let report = two_sided_witnesses(&rat("2"), 99, 1).unwrap();
        assert!(report.negatives.is_empty());
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].n, 1);
        assert_eq!(report.failures[0].branch, "negative");
    }

    #[test]
    fn rational_exponent_witnesses_verify() {
        // s = 3/2 exercises the radical comparison path end to end.
        let report = two_sided_witnesses(&rat("3/2"), 19, 12).unwrap();
        assert!(report.failures.is_empty());
        for &n in &report.negatives {
            assert!(is_prime(19 * n + 2));
        }
        for &n in &report.positives {
            assert_eq!(n % 2, 0);
            assert!(is_prime(20 * n + 1));
        }
        assert!(!report.negatives.is_empty() || !report.positives.is_empty());
    }
}
