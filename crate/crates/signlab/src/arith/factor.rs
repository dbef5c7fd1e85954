//! Full factorization over `u64` via trial division plus Brent's
//! variant of Pollard rho. Fully deterministic: fixed starting point
//! and an increasing polynomial shift, so a given input always walks
//! the same sequence.

use std::collections::BTreeMap;

use num_integer::Integer;

use super::primality::{is_prime, mulmod};
use crate::{Error, Result};

/// A `u64` together with its sorted prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: u64,
    /// `(prime, exponent)` pairs, primes strictly increasing, exponents >= 1.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Multiplies the factorization back together; used by callers as a
    /// self-check and by tests as the round-trip invariant.
    pub fn reassemble(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }
}

const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97,
];

/// One Brent cycle with polynomial `x^2 + c`; returns a nontrivial
/// divisor of composite odd `n`, or `None` when this `c` degenerates.
fn brent_cycle(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
    let m = 128u64;
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = 0u64;
    let mut ys = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0u64;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mulmod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += m;
        }
        r <<= 1;
    }
    if g == n {
        // The batched gcd overshot; replay the last batch one step at a
        // time. `q` accumulates across batches, so the factor event may
        // predate the batch starting at `ys`; the replay then reaches `y`
        // empty-handed and this shift is abandoned.
        g = 1;
        while g == 1 && ys != y {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
        }
    }
    (g != 1 && g != n).then_some(g)
}

/// Nontrivial divisor of an odd composite `n` with no factor <= 97.
fn split(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime(n));
    // n = m^2 defeats rho's difference trick, so peel squares first.
    let r = n.isqrt();
    if r * r == n {
        return r;
    }
    (1u64..)
        .find_map(|c| brent_cycle(n, c))
        .expect("composite u64 always splits for some shift")
}

fn factor_into(n: u64, out: &mut BTreeMap<u64, u32>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let d = split(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Factors any positive `n`; `factor(1)` has an empty factor list.
pub fn factor(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    let mut rest = n;
    let mut map = BTreeMap::new();
    for p in SMALL_PRIMES {
        if p * p > rest {
            break;
        }
        while rest % p == 0 {
            rest /= p;
            *map.entry(p).or_insert(0) += 1;
        }
    }
    factor_into(rest, &mut map);
    Ok(Factorization {
        value: n,
        factors: map.into_iter().collect(),
    })
}
