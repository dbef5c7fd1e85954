//! Constructive machinery for simultaneous divisor-sum domination:
//! instance constants for paired families of linear forms, fixed-prime
//! admissibility, prime strings with certified reciprocal sums, the
//! CRT congruence system (P, n0), Ω-bounded scans along n ≡ n0 (mod P),
//! and the direct simultaneous σ comparison.

pub mod hunt;

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::sieve::next_prime_above;
use crate::arith::{big_omega, factor, is_prime, primes_up_to, sigma1_u128, PrimeStream};
use crate::error::BudgetProgress;
use crate::forms::LinearForm;
use crate::{Error, Result};

/// Fixed-point scale for certified reciprocal-sum scanning.
const RECIP_SHIFT: u32 = 80;

/// A paired system of lower forms L_i = a_i x + b_i and upper forms
/// H_j = c_j x + d_j with the derived constants that drive the
/// construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormSystem {
    pub lower: Vec<LinearForm>,
    pub upper: Vec<LinearForm>,
    pub k: usize,
    /// max a_i over the lower forms.
    pub max_lower_slope: u64,
    /// max c_j over the upper forms.
    pub max_upper_slope: u64,
    /// max |a_i d_j - b_i c_j| over all pairs.
    pub max_cross_det: u64,
    /// Ω ceiling floor(log2(floor((3k²+4k+4)/2))) for k forms.
    pub omega_bound: u32,
    /// Smallest prime strictly greater than A + B + C + k.
    pub p_start: u64,
}

/// floor(log2(floor((3k² + 4k + 4) / 2))): the Ω ceiling achievable
/// for k admissible linear forms infinitely often.
pub fn heath_brown_bound(k: u64) -> Result<u32> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let k = k as u128;
    let inner = k
        .checked_mul(k)
        .and_then(|k2| k2.checked_mul(3))
        .and_then(|v| v.checked_add(4 * k + 4))
        .ok_or_else(|| Error::Overflow(format!("3k²+4k+4 exceeds u128 at k={k}")))?
        / 2;
    Ok(inner.ilog2())
}

/// Validates the pairing hypotheses and derives A, B, C, the Ω bound,
/// and the starting prime.
pub fn build_instance(lower: Vec<LinearForm>, upper: Vec<LinearForm>) -> Result<FormSystem> {
    if lower.is_empty() || lower.len() != upper.len() {
        return Err(Error::Domain(format!(
            "need equal nonempty form families; got {} lower and {} upper",
            lower.len(),
            upper.len()
        )));
    }
    let k = lower.len();
    let mut max_det = 0u128;
    for (i, l) in lower.iter().enumerate() {
        for (j, h) in upper.iter().enumerate() {
            let det = l.slope() as i128 * h.offset() as i128
                - l.offset() as i128 * h.slope() as i128;
            if det == 0 {
                return Err(Error::Hypothesis(format!(
                    "cross determinant a_i*d_j - b_i*c_j vanishes at (i, j) = ({}, {}): \
                     {l} and {h} are proportional",
                    i + 1,
                    j + 1
                )));
            }
            max_det = max_det.max(det.unsigned_abs());
        }
    }
    let a = lower.iter().map(|f| f.slope()).max().expect("nonempty");
    let b = upper.iter().map(|f| f.slope()).max().expect("nonempty");
    let c = u64::try_from(max_det)
        .map_err(|_| Error::Overflow("cross determinant exceeds u64".into()))?;
    let sum = a
        .checked_add(b)
        .and_then(|v| v.checked_add(c))
        .and_then(|v| v.checked_add(k as u64))
        .ok_or_else(|| Error::Overflow("A + B + C + k exceeds u64".into()))?;
    Ok(FormSystem {
        omega_bound: heath_brown_bound(k as u64)?,
        p_start: next_prime_above(sum)?,
        lower,
        upper,
        k,
        max_lower_slope: a,
        max_upper_slope: b,
        max_cross_det: c,
    })
}

/// The literal reciprocal-sum threshold A·2^(G_k+3). Far beyond any
/// finite run (it demands primes past exp(exp(threshold))); reported
/// so demos can state which regime they operate in.
pub fn literal_threshold(instance: &FormSystem) -> BigUint {
    BigUint::from(instance.max_lower_slope) << (instance.omega_bound + 3)
}

/// Outcome of the fixed-prime-divisor check: either the smallest
/// residue n_p avoiding every form at each prime, or the prime where
/// all residues are covered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Admissibility {
    Admissible(Vec<(u64, u64)>),
    Obstructed { p: u64 },
}

/// For each prime p ≤ p_max, the smallest residue n_p in [0, p) with
/// p ∤ Π forms(n_p); stops at the first prime covered by the forms.
pub fn admissibility_check(forms: &[LinearForm], p_max: u64) -> Result<Admissibility> {
    if forms.is_empty() {
        return Err(Error::Domain("form list must be nonempty".into()));
    }
    let mut residues = Vec::new();
    for p in primes_up_to(p_max) {
        let found = (0..p).find(|&r| {
            forms
                .iter()
                .all(|f| f.eval_i128(r).rem_euclid(p as i128) != 0)
        });
        match found {
            Some(r) => residues.push((p, r)),
            None => return Ok(Admissibility::Obstructed { p }),
        }
    }
    Ok(Admissibility::Admissible(residues))
}

/// A maximal-value-minimal run of consecutive primes whose exact
/// reciprocal sum strictly exceeds the threshold it was built for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeString {
    pub primes: Vec<u64>,
    pub reciprocal_sum: BigRational,
}

fn recip_sum(primes: &[u64]) -> BigRational {
    primes
        .iter()
        .map(|&p| BigRational::new(BigInt::one(), BigInt::from(p)))
        .sum()
}

/// Threshold as saturating fixed-point bounds (floor and ceiling of
/// tau·2^80). Saturation only loses precision for tau ≥ 2^48, far
/// beyond any reachable reciprocal sum.
fn tau_fixed_bounds(tau: &BigRational) -> (u128, u128) {
    let num = tau.numer().to_biguint().expect("tau positive");
    let den = tau.denom().to_biguint().expect("tau positive");
    let scaled = num << RECIP_SHIFT;
    let lo = &scaled / &den;
    let exact = (&lo * &den) == scaled;
    let lo = lo.to_u128().unwrap_or(u128::MAX);
    (lo, if exact { lo } else { lo.saturating_add(1) })
}

/// Builds k contiguous strings of consecutive primes, each minimal
/// with reciprocal sum strictly above tau, starting from the first
/// prime greater than `start`.
///
/// The scan accumulates certified fixed-point bounds on each running
/// sum; only when the bounds straddle tau does it fall back to one
/// exact rational comparison. Every finished string is re-verified
/// exactly: its sum exceeds tau and dropping the last prime does not.
pub fn prime_strings(
    start: u64,
    k: u64,
    tau: &BigRational,
    prime_budget: u64,
) -> Result<Vec<PrimeString>> {
    if !is_prime(start) {
        return Err(Error::Domain(format!("start = {start} is not prime")));
    }
    if k == 0 {
        return Err(Error::Domain("string count k must be positive".into()));
    }
    if !tau.is_positive() {
        return Err(Error::Domain("threshold tau must be positive".into()));
    }
    if prime_budget == 0 {
        return Err(Error::Domain("prime budget must be positive".into()));
    }
    let (tau_lo, tau_hi) = tau_fixed_bounds(tau);
    let mut stream = PrimeStream::above(start);
    let mut strings: Vec<PrimeString> = Vec::with_capacity(k as usize);
    let mut current: Vec<u64> = Vec::new();
    let mut sum_lo = 0u128;
    let mut sum_hi = 0u128;
    let mut examined = 0u64;
    let mut last_prime = start;
    while (strings.len() as u64) < k {
        if examined == prime_budget {
            return Err(Error::Budget(BudgetProgress {
                examined,
                reached: format!(
                    "completed {} of {k} strings; scanned primes through {last_prime}",
                    strings.len()
                ),
            }));
        }
        let p = stream.next().expect("prime stream is unbounded");
        examined += 1;
        last_prime = p;
        current.push(p);
        let unit = (1u128 << RECIP_SHIFT) / p as u128;
        let exact = (1u128 << RECIP_SHIFT) % p as u128 == 0;
        sum_lo += unit;
        sum_hi += if exact { unit } else { unit + 1 };
        let exceeded = if sum_lo > tau_hi {
            true
        } else if sum_hi <= tau_lo {
            false
        } else {
            recip_sum(&current) > *tau
        };
        if exceeded {
            let reciprocal_sum = recip_sum(&current);
            let without_last = &reciprocal_sum
                - BigRational::new(BigInt::one(), BigInt::from(*current.last().expect("nonempty")));
            if reciprocal_sum <= *tau || without_last > *tau {
                return Err(Error::Construction(format!(
                    "string ending at {p} failed exact re-verification against tau = {tau}"
                )));
            }
            strings.push(PrimeString {
                primes: std::mem::take(&mut current),
                reciprocal_sum,
            });
            sum_lo = 0;
            sum_hi = 0;
        }
    }
    Ok(strings)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrefixEntry {
    pub p: u64,
    pub residue: u64,
}

fn ser_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// The solved congruence system: n0 is the unique residue mod P that
/// matches every prefix residue and makes each upper form divisible
/// by every prime of its assigned string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrtConstruction {
    #[serde(rename = "P", serialize_with = "ser_biguint")]
    pub modulus: BigUint,
    #[serde(serialize_with = "ser_biguint")]
    pub n0: BigUint,
    pub prefix: Vec<PrefixEntry>,
    pub strings: Vec<Vec<u64>>,
    pub verified: bool,
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "modulus must be prime and a nonzero mod p");
    ((t % p as i128 + p as i128) % p as i128) as u64
}

fn big_mod_u64(n: &BigUint, p: u64) -> u64 {
    (n % p).to_u64().expect("residue fits")
}

/// Folds one congruence n ≡ r (mod p) into (n0, modulus); p must be
/// coprime to the accumulated modulus.
fn crt_fold(n0: &mut BigUint, modulus: &mut BigUint, r: u64, p: u64) {
    let cur = big_mod_u64(n0, p);
    let step = big_mod_u64(modulus, p);
    let delta = (r + p - cur) % p;
    let t = (delta as u128 * inv_mod(step, p) as u128 % p as u128) as u64;
    *n0 += &*modulus * t;
    *modulus *= p;
}

fn form_residue(form: &LinearForm, n: &BigUint, p: u64) -> u64 {
    let an = form.slope() as i128 % p as i128 * big_mod_u64(n, p) as i128;
    ((an + form.offset() as i128) % p as i128).rem_euclid(p as i128) as u64
}

/// Solves n ≡ r (mod p) over a system of distinct primes; returns
/// (n0, P) with n0 the unique solution in [0, P).
pub fn solve_congruences(system: &[(u64, u64)]) -> Result<(BigUint, BigUint)> {
    let mut seen = BTreeSet::new();
    for &(p, r) in system {
        if !is_prime(p) {
            return Err(Error::Domain(format!("modulus {p} is not prime")));
        }
        if !seen.insert(p) {
            return Err(Error::Domain(format!("modulus {p} appears twice")));
        }
        if r >= p {
            return Err(Error::Domain(format!("residue {r} is not reduced mod {p}")));
        }
    }
    let mut n0 = BigUint::zero();
    let mut modulus = BigUint::one();
    for &(p, r) in system {
        crt_fold(&mut n0, &mut modulus, r, p);
    }
    Ok((n0, modulus))
}

/// Solves the full congruence system for an instance: prefix residues
/// at every prime up to p_start, then for each string s the residues
/// forcing p | H_s(n) for all its primes. The returned construction
/// has been verified by direct substitution.
pub fn build_crt_system(
    instance: &FormSystem,
    strings: &[Vec<u64>],
    prefix: &[(u64, u64)],
) -> Result<CrtConstruction> {
    if strings.len() != instance.k {
        return Err(Error::Domain(format!(
            "expected {} strings, got {}",
            instance.k,
            strings.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for &p in prefix
        .iter()
        .map(|(p, _)| p)
        .chain(strings.iter().flatten())
    {
        if !is_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        if !seen.insert(p) {
            return Err(Error::Domain(format!("duplicate prime {p}")));
        }
    }
    let required = primes_up_to(instance.p_start);
    let given: Vec<u64> = prefix.iter().map(|&(p, _)| p).collect();
    if given != required {
        return Err(Error::Domain(format!(
            "prefix must cover exactly the primes up to p_start = {}",
            instance.p_start
        )));
    }
    for &(p, r) in prefix {
        if r >= p {
            return Err(Error::Domain(format!("residue {r} not reduced mod {p}")));
        }
        for f in &instance.lower {
            if f.eval_i128(r).rem_euclid(p as i128) == 0 {
                return Err(Error::Hypothesis(format!(
                    "residue {r} mod {p} does not avoid the lower form {f}"
                )));
            }
        }
    }
    for (s, string) in strings.iter().enumerate() {
        let h = &instance.upper[s];
        for &p in string {
            if p <= instance.p_start {
                return Err(Error::Domain(format!(
                    "string prime {p} is not above p_start = {}",
                    instance.p_start
                )));
            }
            if h.slope() % p == 0 {
                return Err(Error::Construction(format!(
                    "{p} divides the slope of {h}; the congruence {h} ≡ 0 (mod {p}) \
                     has no unique solution"
                )));
            }
        }
    }

    let mut n0 = BigUint::zero();
    let mut modulus = BigUint::one();
    for &(p, r) in prefix {
        crt_fold(&mut n0, &mut modulus, r, p);
    }
    for (s, string) in strings.iter().enumerate() {
        let h = &instance.upper[s];
        for &p in string {
            let neg_d =
                ((-(h.offset() as i128)).rem_euclid(p as i128)) as u64;
            let r = (neg_d as u128 * inv_mod(h.slope() % p, p) as u128 % p as u128) as u64;
            crt_fold(&mut n0, &mut modulus, r, p);
        }
    }

    for &(p, r) in prefix {
        if big_mod_u64(&n0, p) != r {
            return Err(Error::Construction(format!(
                "substitution check failed: n0 is not {r} mod {p}"
            )));
        }
        for f in &instance.lower {
            if form_residue(f, &n0, p) == 0 {
                return Err(Error::Construction(format!(
                    "substitution check failed: {p} divides {f} at n0"
                )));
            }
        }
    }
    for (s, string) in strings.iter().enumerate() {
        for &p in string {
            if form_residue(&instance.upper[s], &n0, p) != 0 {
                return Err(Error::Construction(format!(
                    "substitution check failed: {p} does not divide {} at n0",
                    instance.upper[s]
                )));
            }
        }
    }
    Ok(CrtConstruction {
        modulus,
        n0,
        prefix: prefix
            .iter()
            .map(|&(p, residue)| PrefixEntry { p, residue })
            .collect(),
        strings: strings.to_vec(),
        verified: true,
    })
}

/// One examined index of an Ω-bounded scan along n = mP + n0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaScanRow {
    pub m: u64,
    #[serde(serialize_with = "ser_biguint")]
    pub n: BigUint,
    pub omega_max: u32,
    pub qualified: bool,
}

impl OmegaScanRow {
    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.m, self.n, self.omega_max, self.qualified)
    }
}

/// Header for the CSV rendering of [`OmegaScanRow`]s.
pub const SCAN_CSV_HEADER: &str = "m,n,omega_max,qualified";

/// Scan result: all rows, the qualifying m in ascending order, and the
/// qualitative reference density M/(log(M·P))^k.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaScanReport {
    pub rows: Vec<OmegaScanRow>,
    pub hits: Vec<u64>,
    pub density_reference: f64,
}

fn big_ln(n: &BigUint) -> f64 {
    match n.to_f64() {
        Some(x) if x.is_finite() && x > 0.0 => x.ln(),
        _ => n.bits() as f64 * std::f64::consts::LN_2,
    }
}

/// For m = 1..=M computes max_i Ω(L_i(mP + n0)) and marks the m where
/// it stays within `bound`. Values must fit the 64-bit factorization
/// range; the first overflowing m is reported as an error.
pub fn omega_bounded_scan(
    construction: &CrtConstruction,
    instance: &FormSystem,
    m_max: u64,
    bound: u32,
) -> Result<OmegaScanReport> {
    if m_max == 0 {
        return Err(Error::Domain("scan length M must be positive".into()));
    }
    let rows: Vec<OmegaScanRow> = (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let n = &construction.modulus * m + &construction.n0;
            let mut omega_max = 0u32;
            for f in &instance.lower {
                let value = BigInt::from(n.clone()) * f.slope() + BigInt::from(f.offset());
                let value = value.to_u64().ok_or_else(|| {
                    Error::Overflow(format!(
                        "{f} at m = {m} leaves the supported factorization range"
                    ))
                })?;
                omega_max = omega_max.max(big_omega(&factor(value)?));
            }
            Ok(OmegaScanRow {
                m,
                n,
                omega_max,
                qualified: omega_max <= bound,
            })
        })
        .collect::<Result<_>>()?;
    let hits = rows
        .iter()
        .filter(|r| r.qualified)
        .map(|r| r.m)
        .collect();
    let ln_mp = big_ln(&(&construction.modulus * m_max));
    let density_reference = m_max as f64 / ln_mp.powi(instance.k as i32);
    Ok(OmegaScanReport {
        rows,
        hits,
        density_reference,
    })
}

/// σ evidence for one form at one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormSigma {
    pub form: String,
    pub value: u64,
    pub sigma: String,
}

/// Full evidence for the simultaneous comparison at one n: every
/// σ(H_j(n)) must strictly exceed every σ(L_i(n)).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimultaneousEvidence {
    pub n: u64,
    pub holds: bool,
    pub lower: Vec<FormSigma>,
    pub upper: Vec<FormSigma>,
}

fn sigma_of(form: &LinearForm, n: u64) -> Result<(u64, u128)> {
    let value = form.eval_u64(n)?;
    Ok((value, sigma1_u128(&factor(value)?)))
}

/// Evaluates all 2k divisor sums at n and reports whether
/// min_j σ(H_j(n)) > max_i σ(L_i(n)).
pub fn simultaneous_check(instance: &FormSystem, n: u64) -> Result<SimultaneousEvidence> {
    let mut lower = Vec::with_capacity(instance.k);
    let mut max_lower = 0u128;
    for f in &instance.lower {
        let (value, sigma) = sigma_of(f, n)?;
        max_lower = max_lower.max(sigma);
        lower.push(FormSigma {
            form: f.to_string(),
            value,
            sigma: sigma.to_string(),
        });
    }
    let mut upper = Vec::with_capacity(instance.k);
    let mut holds = true;
    for h in &instance.upper {
        let (value, sigma) = sigma_of(h, n)?;
        holds &= sigma > max_lower;
        upper.push(FormSigma {
            form: h.to_string(),
            value,
            sigma: sigma.to_string(),
        });
    }
    Ok(SimultaneousEvidence {
        n,
        holds,
        lower,
        upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::parse_rational;

    fn form(text: &str) -> LinearForm {
        text.parse().unwrap()
    }

    fn forms(texts: &[&str]) -> Vec<LinearForm> {
        texts.iter().map(|t| form(t)).collect()
    }

    fn demo_instance() -> FormSystem {
        build_instance(forms(&["6x+17", "6x+7"]), forms(&["2x+5", "5x+4"])).unwrap()
    }

    fn single_instance() -> FormSystem {
        build_instance(forms(&["2x+3"]), forms(&["3x+2"])).unwrap()
    }

    #[test]
    fn omega_ceiling_small_values() {
        let expected = [2, 3, 4, 5, 5];
        for (k, want) in (1..=5).zip(expected) {
            assert_eq!(heath_brown_bound(k).unwrap(), want, "k={k}");
        }
        assert!(heath_brown_bound(0).is_err());
    }

    #[test]
    fn omega_ceiling_nondecreasing() {
        let values: Vec<u32> = (1..=50).map(|k| heath_brown_bound(k).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn instance_constants_for_demo_pairing() {
        let inst = demo_instance();
        assert_eq!(inst.k, 2);
        assert_eq!(inst.max_lower_slope, 6);
        assert_eq!(inst.max_upper_slope, 5);
        assert_eq!(inst.max_cross_det, 61);
        assert_eq!(inst.omega_bound, 3);
        assert_eq!(inst.p_start, 79);
        assert_eq!(literal_threshold(&inst), BigUint::from(384u32));
    }

    #[test]
    fn instance_constants_for_single_pair() {
        let inst = single_instance();
        assert_eq!(
            (inst.max_lower_slope, inst.max_upper_slope, inst.max_cross_det),
            (2, 3, 5)
        );
        assert_eq!(inst.omega_bound, 2);
        assert_eq!(inst.p_start, 13);
        assert_eq!(literal_threshold(&inst), BigUint::from(64u32));
    }

    #[test]
    fn threshold_formula_degenerate() {
        let mut inst = single_instance();
        inst.max_lower_slope = 1;
        inst.omega_bound = 0;
        assert_eq!(literal_threshold(&inst), BigUint::from(8u32));
    }

    #[test]
    fn instance_rejects_proportional_pair() {
        let err = build_instance(forms(&["x+1"]), forms(&["2x+2"])).unwrap_err();
        match err {
            Error::Hypothesis(msg) => assert!(msg.contains("(1, 1)"), "{msg}"),
            other => panic!("expected hypothesis error, got {other:?}"),
        }
        assert!(build_instance(forms(&["x+1"]), forms(&[])).is_err());
        assert!(build_instance(forms(&[]), forms(&[])).is_err());
        assert!(build_instance(forms(&["x+1", "x+2"]), forms(&["3x+1"])).is_err());
    }

    #[test]
    fn instance_cross_determinants() {
        // dets for the demo pairing: |6*5-17*2|=4, |6*4-17*5|=61,
        // |6*5-7*2|=16, |6*4-7*5|=11.
        let inst = demo_instance();
        assert_eq!(inst.max_cross_det, 61);
        let mut dets = Vec::new();
        for l in &inst.lower {
            for h in &inst.upper {
                dets.push(
                    (l.slope() as i128 * h.offset() as i128
                        - l.offset() as i128 * h.slope() as i128)
                        .unsigned_abs(),
                );
            }
        }
        dets.sort_unstable();
        assert_eq!(dets, vec![4, 11, 16, 61]);
    }

    #[test]
    fn admissibility_examples() {
        match admissibility_check(&forms(&["6x+17", "6x+7"]), 5).unwrap() {
            Admissibility::Admissible(map) => {
                assert_eq!(map.len(), 3);
                assert_eq!(map[0], (2, 0));
                for &(p, r) in &map {
                    for f in forms(&["6x+17", "6x+7"]) {
                        assert_ne!(f.eval_i128(r).rem_euclid(p as i128), 0);
                    }
                }
            }
            other => panic!("expected admissible, got {other:?}"),
        }
        assert_eq!(
            admissibility_check(&forms(&["x", "x+1"]), 2).unwrap(),
            Admissibility::Obstructed { p: 2 }
        );
        assert_eq!(
            admissibility_check(&forms(&["4x+2"]), 7).unwrap(),
            Admissibility::Obstructed { p: 2 }
        );
        assert!(admissibility_check(&[], 5).is_err());
    }

    #[test]
    fn admissibility_succeeds_beyond_form_count() {
        // Coprime-coefficient forms cover at most one residue each mod
        // p, so every prime beyond the form count admits a residue.
        // Even slopes with odd constants keep p = 2 clean, and mod 3
        // these four cover only {0, 2}, so the small primes pass too.
        let fs = forms(&["2x+3", "4x+1", "6x+5", "10x+7"]);
        match admissibility_check(&fs, 97).unwrap() {
            Admissibility::Admissible(map) => {
                assert_eq!(map.len(), primes_up_to(97).len());
            }
            other => panic!("unexpected obstruction: {other:?}"),
        }
    }

    #[test]
    fn prime_string_examples() {
        let tau = parse_rational("1/10").unwrap();
        let strings = prime_strings(79, 1, &tau, 10_000).unwrap();
        assert_eq!(strings.len(), 1);
        assert_eq!(
            strings[0].primes,
            vec![83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137]
        );
        assert!(strings[0].reciprocal_sum > tau);
        assert_eq!(strings[0].reciprocal_sum, recip_sum(&strings[0].primes));

        let narrow = parse_rational("1/20").unwrap();
        let single = prime_strings(13, 1, &narrow, 100).unwrap();
        assert_eq!(single[0].primes, vec![17]);
    }

    #[test]
    fn prime_strings_are_contiguous_and_minimal() {
        let tau = parse_rational("1/10").unwrap();
        let strings = prime_strings(79, 3, &tau, 10_000).unwrap();
        assert_eq!(strings.len(), 3);
        let mut all: Vec<u64> = Vec::new();
        for s in &strings {
            assert!(s.reciprocal_sum > tau);
            let last = *s.primes.last().unwrap();
            let trimmed = &s.reciprocal_sum
                - BigRational::new(BigInt::one(), BigInt::from(last));
            assert!(trimmed <= tau, "string not minimal");
            all.extend(&s.primes);
        }
        let expected: Vec<u64> = PrimeStream::above(79).take(all.len()).collect();
        assert_eq!(all, expected, "strings must partition consecutive primes");
    }

    #[test]
    fn prime_strings_budget_error() {
        let tau = parse_rational("384").unwrap();
        match prime_strings(79, 1, &tau, 1000) {
            Err(Error::Budget(progress)) => {
                assert_eq!(progress.examined, 1000);
                assert!(progress.reached.contains("0 of 1"));
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn prime_strings_validate_inputs() {
        let tau = parse_rational("1/10").unwrap();
        assert!(prime_strings(80, 1, &tau, 100).is_err());
        assert!(prime_strings(79, 0, &tau, 100).is_err());
        assert!(prime_strings(79, 1, &parse_rational("0").unwrap(), 100).is_err());
        assert!(prime_strings(79, 1, &tau, 0).is_err());
    }

    #[test]
    fn crt_demo_construction() {
        let inst = single_instance();
        let prefix = match admissibility_check(&inst.lower, inst.p_start).unwrap() {
            Admissibility::Admissible(map) => map,
            other => panic!("demo must be admissible: {other:?}"),
        };
        let built = build_crt_system(&inst, &[vec![17]], &prefix).unwrap();
        assert_eq!(built.modulus, BigUint::from(510510u64));
        assert_eq!(built.n0, BigUint::from(380380u64));
        assert!(built.verified);
        // 3·380380 + 2 = 1141142 = 17·67126.
        assert_eq!(1141142 % 17, 0);
        // 2·380380 + 3 avoids every prefix prime.
        for &(p, _) in &prefix {
            assert_ne!(760763 % p, 0, "p={p}");
        }
    }

    #[test]
    fn crt_rejects_bad_inputs() {
        let inst = single_instance();
        let prefix = match admissibility_check(&inst.lower, inst.p_start).unwrap() {
            Admissibility::Admissible(map) => map,
            other => panic!("{other:?}"),
        };
        assert!(matches!(
            build_crt_system(&inst, &[vec![13]], &prefix),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            build_crt_system(&inst, &[vec![17], vec![19]], &prefix),
            Err(Error::Domain(_))
        ));
        let mut short = prefix.clone();
        short.pop();
        assert!(matches!(
            build_crt_system(&inst, &[vec![17]], &short),
            Err(Error::Domain(_))
        ));
        let mut bad = prefix.clone();
        bad[1] = (3, 0);
        assert!(matches!(
            build_crt_system(&inst, &[vec![17]], &bad),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn crt_string_slope_collision_is_construction_error() {
        let inst = build_instance(forms(&["2x+3"]), forms(&["3x+2"])).unwrap();
        let mut relaxed = inst.clone();
        relaxed.p_start = 2;
        let err = build_crt_system(&relaxed, &[vec![3]], &[(2, 0)]).unwrap_err();
        assert!(matches!(err, Error::Construction(_)), "{err:?}");
    }

    #[test]
    fn omega_scan_demo() {
        let inst = single_instance();
        let prefix = match admissibility_check(&inst.lower, inst.p_start).unwrap() {
            Admissibility::Admissible(map) => map,
            other => panic!("{other:?}"),
        };
        let built = build_crt_system(&inst, &[vec![17]], &prefix).unwrap();
        let report = omega_bounded_scan(&built, &inst, 100, inst.omega_bound).unwrap();
        assert_eq!(report.rows.len(), 100);
        assert!(!report.hits.is_empty());
        for row in &report.rows {
            assert_eq!(row.qualified, row.omega_max <= inst.omega_bound);
            assert_eq!(row.n, &built.modulus * row.m + &built.n0);
        }
        assert!(report.density_reference > 0.0);

        let all = omega_bounded_scan(&built, &inst, 50, 64).unwrap();
        assert_eq!(all.hits.len(), 50);
        let none = omega_bounded_scan(&built, &inst, 50, 0).unwrap();
        assert!(none.hits.is_empty());
    }

    #[test]
    fn omega_scan_row_csv() {
        let row = OmegaScanRow {
            m: 3,
            n: BigUint::from(1911910u64),
            omega_max: 2,
            qualified: true,
        };
        assert_eq!(row.csv_row(), "3,1911910,2,true");
        assert_eq!(SCAN_CSV_HEADER, "m,n,omega_max,qualified");
    }

    #[test]
    fn simultaneous_check_examples() {
        let evidence = simultaneous_check(&demo_instance(), 1).unwrap();
        assert!(!evidence.holds);
        let sigmas: Vec<&str> = evidence
            .lower
            .iter()
            .chain(&evidence.upper)
            .map(|e| e.sigma.as_str())
            .collect();
        assert_eq!(sigmas, vec!["24", "14", "8", "13"]);

        let easy = build_instance(forms(&["2x+3"]), forms(&["6x+6"])).unwrap();
        let ev = simultaneous_check(&easy, 1).unwrap();
        assert!(ev.holds);
        assert_eq!(ev.upper[0].sigma, "28");
        assert_eq!(ev.lower[0].sigma, "6");
    }

    #[test]
    fn simultaneous_check_rejects_nonpositive_values() {
        let inst = build_instance(forms(&["x-10"]), forms(&["2x+1"])).unwrap();
        assert!(simultaneous_check(&inst, 1).is_err());
    }

    #[test]
    fn congruence_solver_known_system() {
        // n ≡ 2 (3), n ≡ 3 (5), n ≡ 2 (7) has n0 = 23 mod 105.
        let (n0, modulus) = solve_congruences(&[(3, 2), (5, 3), (7, 2)]).unwrap();
        assert_eq!(n0, BigUint::from(23u64));
        assert_eq!(modulus, BigUint::from(105u64));

        let (n0, modulus) = solve_congruences(&[]).unwrap();
        assert_eq!(n0, BigUint::zero());
        assert_eq!(modulus, BigUint::one());

        assert!(solve_congruences(&[(4, 1)]).is_err());
        assert!(solve_congruences(&[(3, 1), (3, 2)]).is_err());
        assert!(solve_congruences(&[(3, 3)]).is_err());
    }

    #[test]
    fn crt_uniqueness_on_small_system() {
        let inst = single_instance();
        let prefix = match admissibility_check(&inst.lower, inst.p_start).unwrap() {
            Admissibility::Admissible(map) => map,
            other => panic!("{other:?}"),
        };
        let built = build_crt_system(&inst, &[vec![17]], &prefix).unwrap();
        let p = built.modulus.to_u64().unwrap();
        let n0 = built.n0.to_u64().unwrap();
        let mut matches = 0;
        for n in 0..p {
            let ok = prefix.iter().all(|&(q, r)| n % q == r) && (3 * n + 2) % 17 == 0;
            if ok {
                assert_eq!(n, n0);
                matches += 1;
            }
        }
        assert_eq!(matches, 1);
    }
}
