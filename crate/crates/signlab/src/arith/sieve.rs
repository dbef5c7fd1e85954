//! Sieves: smallest-prime-factor tables, a segmented prime stream, and
//! the divisor-pair sieve behind bulk σ evaluation along progressions.

use num_bigint::BigUint;
use rayon::prelude::*;

use super::factor::Factorization;
use super::{factorize, sigma1_u128};
use crate::forms::LinearForm;
use crate::{Error, Result};

/// Entries per sieve segment; sized so a segment's working set stays
/// cache-resident.
pub const SEGMENT_SIZE: u64 = 1 << 20;

/// Largest argument the divisor-pair σ sieve accepts; beyond this the
/// d-loop up to √hi stops paying for itself and callers fall back to
/// per-element factorization.
const SIGMA_SIEVE_MAX: u64 = 1 << 40;

/// Smallest-prime-factor table for 2..=limit.
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
}

/// Builds the table; `limit` must be at least 2 and fit u32 (larger
/// tables would need tens of gigabytes and a wider entry type).
pub fn build_spf_table(limit: u64) -> Result<SpfTable> {
    if limit < 2 {
        return Err(Error::Domain(format!("spf table limit {limit} < 2")));
    }
    if limit > u32::MAX as u64 {
        return Err(Error::Overflow(format!("spf table limit {limit} exceeds u32 range")));
    }
    let mut spf = vec![0u32; (limit + 1) as usize];
    for i in 2..=limit {
        if spf[i as usize] == 0 {
            spf[i as usize] = i as u32;
            let mut j = i * i;
            while j <= limit {
                if spf[j as usize] == 0 {
                    spf[j as usize] = i as u32;
                }
                j += i;
            }
        }
    }
    Ok(SpfTable { limit, spf })
}

impl SpfTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `n`; requires 2 <= n <= limit.
    pub fn spf(&self, n: u64) -> u64 {
        debug_assert!((2..=self.limit).contains(&n));
        self.spf[n as usize] as u64
    }

    /// Factorization by repeated smallest-prime division; n <= limit.
    pub fn factorize(&self, n: u64) -> Factorization {
        debug_assert!((1..=self.limit).contains(&n));
        let mut factors = Vec::new();
        let mut rest = n;
        while rest > 1 {
            let p = self.spf[rest as usize] as u64;
            let mut e = 0u32;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        Factorization { value: n, factors }
    }
}

/// All primes <= n, ascending.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; (n + 1) as usize];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i as usize] {
            out.push(i);
            let mut j = i * i;
            while j <= n {
                composite[j as usize] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest prime strictly greater than `x`.
pub fn next_prime_above(x: u64) -> Result<u64> {
    let mut c = x
        .checked_add(1)
        .ok_or_else(|| Error::Overflow("no prime above u64::MAX representable".into()))?;
    loop {
        if super::is_prime(c) {
            return Ok(c);
        }
        c = c
            .checked_add(1)
            .ok_or_else(|| Error::Overflow(format!("no prime above {x} within u64")))?;
    }
}

/// Unbounded ascending stream of primes strictly greater than a start
/// value, produced by a segmented Eratosthenes sieve.
pub struct PrimeStream {
    seg_lo: u64,
    base: Vec<u64>,
    buf: Vec<u64>,
    pos: usize,
}

impl PrimeStream {
    pub fn above(start: u64) -> Self {
        PrimeStream {
            seg_lo: start.saturating_add(1),
            base: primes_up_to(1 << 10),
            buf: Vec::new(),
            pos: 0,
        }
    }

    fn refill(&mut self) {
        self.buf.clear();
        self.pos = 0;
        while self.buf.is_empty() {
            let lo = self.seg_lo.max(2);
            let hi = lo.saturating_add(SEGMENT_SIZE - 1);
            let root = hi.isqrt();
            if self.base.last().copied().unwrap_or(0) < root {
                self.base = primes_up_to(root + 1);
            }
            let len = (hi - lo + 1) as usize;
            let mut composite = vec![false; len];
            for &p in &self.base {
                if p * p > hi {
                    break;
                }
                let start = (p * p).max(lo.div_ceil(p) * p);
                let mut m = start;
                while m <= hi {
                    composite[(m - lo) as usize] = true;
                    m += p;
                }
            }
            for (i, &c) in composite.iter().enumerate() {
                let n = lo + i as u64;
                if n >= 2 && !c {
                    self.buf.push(n);
                }
            }
            self.seg_lo = hi + 1;
        }
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pos >= self.buf.len() {
            self.refill();
        }
        let p = self.buf[self.pos];
        self.pos += 1;
        Some(p)
    }
}

/// σ_1 for every integer in [lo, hi] via divisor pairs: each d <= √m
/// contributes d + m/d, and exact squares drop one copy of √m.
fn sigma_interval(lo: u64, hi: u64) -> Vec<u64> {
    debug_assert!(1 <= lo && lo <= hi && hi <= SIGMA_SIEVE_MAX);
    let len = (hi - lo + 1) as usize;
    let mut acc = vec![0u64; len];
    let mut d = 1u64;
    while d * d <= hi {
        let start = (d * d).max(lo.div_ceil(d) * d);
        let mut m = start;
        let mut q = start / d;
        while m <= hi {
            acc[(m - lo) as usize] += d + q;
            q += 1;
            m += d;
        }
        d += 1;
    }
    // Squares were counted as the pair (√m, √m); remove the duplicate.
    let mut r = lo.isqrt();
    if r * r < lo {
        r += 1;
    }
    while r * r <= hi {
        acc[(r * r - lo) as usize] -= r;
        r += 1;
    }
    acc
}

fn check_form_range(form: &LinearForm, n_lo: u64, n_hi: u64) -> Result<(u64, u64)> {
    let lo = form.eval_u64(n_lo)?;
    let hi = form.eval_u64(n_hi)?;
    Ok((lo, hi))
}

/// Exact Σ_{n_lo <= n <= n_hi} σ(form(n)); sieved in parallel segments
/// when the values are in sieve range, per-element factorization
/// otherwise. Integer addition is associative, so the parallel split
/// cannot perturb the result.
pub fn progression_sigma_sum(form: &LinearForm, n_lo: u64, n_hi: u64) -> Result<BigUint> {
    if n_lo > n_hi {
        return Ok(BigUint::ZERO);
    }
    let (_, hi) = check_form_range(form, n_lo, n_hi)?;
    let a = form.slope();
    let total: u128 = if hi <= SIGMA_SIEVE_MAX {
        let chunk_len = (SEGMENT_SIZE / a).max(1);
        let chunks: Vec<(u64, u64)> = {
            let mut v = Vec::new();
            let mut c = n_lo;
            loop {
                let end = n_hi.min(c.saturating_add(chunk_len - 1));
                v.push((c, end));
                if end == n_hi {
                    break;
                }
                c = end + 1;
            }
            v
        };
        chunks
            .par_iter()
            .map(|&(c_lo, c_hi)| {
                let lo_v = form.eval_u64(c_lo).expect("range checked above");
                let hi_v = form.eval_u64(c_hi).expect("range checked above");
                let sigma = sigma_interval(lo_v, hi_v);
                let mut sum = 0u128;
                let mut m = lo_v;
                while m <= hi_v {
                    sum += sigma[(m - lo_v) as usize] as u128;
                    m += a;
                }
                sum
            })
            .sum()
    } else {
        (n_lo..=n_hi)
            .into_par_iter()
            .map(|n| {
                let v = form.eval_u64(n).expect("range checked above");
                let f = factorize(v, None).expect("v >= 1 by range check");
                sigma1_u128(&f)
            })
            .sum()
    };
    Ok(BigUint::from(total))
}

/// Streaming σ(form(n)) for n = 1..=k, ascending, computed block by
/// block with the interval sieve (or per-element beyond sieve range).
pub struct SigmaStream {
    form: LinearForm,
    k: u64,
    next_n: u64,
    sieved: bool,
    buf: Vec<u64>,
    buf_start_n: u64,
}

/// σ(form(n)) for n = 1..=k as a stream of exact integers.
pub fn sigma_batch(form: &LinearForm, k: u64) -> Result<SigmaStream> {
    if k == 0 {
        return Ok(SigmaStream {
            form: *form,
            k,
            next_n: 1,
            sieved: false,
            buf: Vec::new(),
            buf_start_n: 1,
        });
    }
    let (_, hi) = check_form_range(form, 1, k)?;
    Ok(SigmaStream {
        form: *form,
        k,
        next_n: 1,
        sieved: hi <= SIGMA_SIEVE_MAX,
        buf: Vec::new(),
        buf_start_n: 1,
    })
}

impl Iterator for SigmaStream {
    type Item = BigUint;

    fn next(&mut self) -> Option<BigUint> {
        if self.next_n > self.k {
            return None;
        }
        let n = self.next_n;
        self.next_n += 1;
        if !self.sieved {
            let v = self.form.eval_u64(n).expect("range checked at construction");
            let f = super::factor(v).expect("v >= 1");
            return Some(BigUint::from(sigma1_u128(&f)));
        }
        let idx = n - self.buf_start_n;
        if self.buf.is_empty() || idx >= self.buf.len() as u64 {
            let block = (SEGMENT_SIZE / self.form.slope()).max(1);
            let b_lo = n;
            let b_hi = self.k.min(n + block - 1);
            let lo_v = self.form.eval_u64(b_lo).expect("range checked");
            let hi_v = self.form.eval_u64(b_hi).expect("range checked");
            let sigma = sigma_interval(lo_v, hi_v);
            self.buf = (b_lo..=b_hi)
                .map(|m| sigma[(self.form.eval_u64(m).unwrap() - lo_v) as usize])
                .collect();
            self.buf_start_n = b_lo;
        }
        Some(BigUint::from(self.buf[(n - self.buf_start_n) as usize]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sigma1_direct;

    #[test]
    fn spf_table_known_entries() {
        let t = build_spf_table(100).unwrap();
        assert_eq!(t.spf(9), 3);
        assert_eq!(t.spf(7), 7);
        assert_eq!(t.spf(91), 7);
        assert_eq!(t.spf(2), 2);
        assert_eq!(t.spf(100), 2);
    }

    #[test]
    fn spf_table_boundary_and_errors() {
        let t = build_spf_table(2).unwrap();
        assert_eq!(t.spf(2), 2);
        assert!(build_spf_table(1).is_err());
        assert!(build_spf_table(0).is_err());
    }

    #[test]
    fn spf_invariants_hold_everywhere() {
        let t = build_spf_table(5000).unwrap();
        for n in 2..=5000u64 {
            let p = t.spf(n);
            assert!(super::super::is_prime(p), "spf({n}) = {p} not prime");
            assert_eq!(n % p, 0, "spf({n}) = {p} does not divide");
            assert_eq!(p == n, super::super::is_prime(n));
        }
    }

    #[test]
    fn spf_factorize_round_trips() {
        let t = build_spf_table(4000).unwrap();
        for n in 1..=4000u64 {
            let f = t.factorize(n);
            assert_eq!(f.reassemble(), n);
            assert_eq!(f, super::super::factor(n).unwrap());
        }
    }

    #[test]
    fn primes_up_to_matches_stream() {
        let listed = primes_up_to(10_000);
        let streamed: Vec<u64> = PrimeStream::above(0).take(listed.len()).collect();
        assert_eq!(listed, streamed);
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
    }

    #[test]
    fn prime_stream_starts_strictly_above() {
        let mut s = PrimeStream::above(13);
        assert_eq!(s.next(), Some(17));
        let mut s = PrimeStream::above(12);
        assert_eq!(s.next(), Some(13));
        let mut s = PrimeStream::above(79);
        assert_eq!(s.next(), Some(83));
    }

    #[test]
    fn prime_stream_crosses_segment_boundaries() {
        let start = SEGMENT_SIZE - 1000;
        let got: Vec<u64> = PrimeStream::above(start).take(50).collect();
        let check = primes_up_to(start + 10_000);
        let expected: Vec<u64> = check.into_iter().filter(|&p| p > start).take(50).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn next_prime_above_known() {
        assert_eq!(next_prime_above(74).unwrap(), 79);
        assert_eq!(next_prime_above(11).unwrap(), 13);
        assert_eq!(next_prime_above(0).unwrap(), 2);
    }

    #[test]
    fn sigma_interval_matches_direct() {
        let lo = 1u64;
        let hi = 2000u64;
        let sieved = sigma_interval(lo, hi);
        for m in lo..=hi {
            assert_eq!(
                sieved[(m - lo) as usize] as u128,
                sigma1_direct(m),
                "σ({m})"
            );
        }
        // An offset window, exercising the lo > d² branch.
        let lo = 999_000u64;
        let hi = 1_001_000u64;
        let sieved = sigma_interval(lo, hi);
        for m in (lo..=hi).step_by(97) {
            assert_eq!(sieved[(m - lo) as usize] as u128, sigma1_direct(m));
        }
    }

    #[test]
    fn sigma_batch_examples() {
        let f: LinearForm = "30x".parse().unwrap();
        let vals: Vec<BigUint> = sigma_batch(&f, 2).unwrap().collect();
        assert_eq!(vals, vec![BigUint::from(72u32), BigUint::from(168u32)]);

        let f: LinearForm = "30x+1".parse().unwrap();
        let vals: Vec<BigUint> = sigma_batch(&f, 2).unwrap().collect();
        assert_eq!(vals, vec![BigUint::from(32u32), BigUint::from(62u32)]);

        let f: LinearForm = "x".parse().unwrap();
        let vals: Vec<BigUint> = sigma_batch(&f, 1).unwrap().collect();
        assert_eq!(vals, vec![BigUint::from(1u32)]);
    }

    #[test]
    fn sigma_batch_rejects_nonpositive_values() {
        let f = LinearForm::new(2, -9).unwrap();
        assert!(sigma_batch(&f, 4).is_err()); // form(4) = -1
        assert!(sigma_batch(&f, 5).is_err()); // form(1) = -7 < 0 even though form(5) = 1
    }

    #[test]
    fn sigma_batch_crosses_blocks() {
        // Slope 1 forces multiple interval blocks once k exceeds the
        // segment size; spot-check against direct evaluation.
        let f: LinearForm = "x+1".parse().unwrap();
        let k = SEGMENT_SIZE + 50;
        let got: Vec<BigUint> = sigma_batch(&f, k).unwrap().skip((k - 3) as usize).collect();
        let expect: Vec<BigUint> = ((k - 2)..=k)
            .map(|n| BigUint::from(sigma1_direct(n + 1)))
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn progression_sum_small_checks() {
        let f30: LinearForm = "30x".parse().unwrap();
        assert_eq!(
            progression_sigma_sum(&f30, 1, 2).unwrap(),
            BigUint::from(240u32)
        );
        let f31: LinearForm = "30x+1".parse().unwrap();
        assert_eq!(
            progression_sigma_sum(&f31, 1, 2).unwrap(),
            BigUint::from(94u32)
        );
        assert_eq!(
            progression_sigma_sum(&f30, 3, 2).unwrap(),
            BigUint::ZERO
        );
    }

    #[test]
    fn progression_sum_matches_stream_sum() {
        let f: LinearForm = "7x+3".parse().unwrap();
        let k = 5000u64;
        let streamed: BigUint = sigma_batch(&f, k).unwrap().sum();
        assert_eq!(progression_sigma_sum(&f, 1, k).unwrap(), streamed);
    }
}
