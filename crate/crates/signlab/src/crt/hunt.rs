//! Priority-queue search for odd integers of large abundancy and the
//! derived hunt for m with σ(2m+5) > σ(6m+17) and σ(5m+4) > σ(6m+7)
//! simultaneously. Any such m forces σ(t)/t > 3 + 3/t at t = 2m+5, so
//! the frontier enumerates high-abundancy odd candidates first.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::arith::{factor, sigma1_direct, sigma1_u128};
use crate::{Error, Result};

/// Search alphabet: all odd primes up to 199. Their reciprocal-growth
/// product Π p/(p-1) ≈ 4.86 comfortably exceeds abundancy 3, so
/// targets up to that bound are reachable within the alphabet.
const ODD_PRIMES: [u64; 45] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199,
];

/// Tolerance absorbed by the floating pruning bound; emission itself
/// is always certified exactly.
const PRUNE_MARGIN: f64 = 1e-9;

/// One frontier node: value = (product over smaller primes)·last_pe
/// with σ carried incrementally so no node is ever refactored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    value: u64,
    last_idx: usize,
    /// Power of ODD_PRIMES[last_idx] contained in value.
    last_pe: u64,
    /// σ(last_pe).
    sigma_last: u128,
    /// σ(value / last_pe); coprime to last_pe, so σ multiplies.
    sigma_rest: u128,
}

/// Ascending-value stream of odd integers t with σ(t)/t strictly above
/// a rational target, optionally restricted to t ≡ r (mod q), explored
/// over products of the odd primes up to 199.
///
/// Subtrees whose best possible abundancy (current value times every
/// remaining prime pushed to infinite exponent) cannot reach the
/// target are pruned with a safety margin; every emitted value is
/// certified by an exact rational comparison.
pub struct AbundancySearch {
    target_num: BigUint,
    target_den: BigUint,
    target_f64: f64,
    modulus: Option<(u64, u64)>,
    budget: u64,
    examined: u64,
    budget_exhausted: bool,
    heap: BinaryHeap<Reverse<Candidate>>,
    /// suffix_gain[i] = Π_{j ≥ i} p_j/(p_j - 1); suffix_gain[len] = 1.
    suffix_gain: [f64; ODD_PRIMES.len() + 1],
}

impl AbundancySearch {
    pub fn new(
        target: BigRational,
        modulus_constraint: Option<(u64, u64)>,
        budget: u64,
    ) -> Result<Self> {
        if target < BigRational::from_integer(1.into()) {
            return Err(Error::Domain(format!(
                "abundancy target {target} must be at least 1"
            )));
        }
        if let Some((r, q)) = modulus_constraint {
            if q == 0 {
                return Err(Error::Domain("constraint modulus must be positive".into()));
            }
            if r >= q {
                return Err(Error::Domain(format!(
                    "constraint residue {r} is not reduced mod {q}"
                )));
            }
        }
        let mut suffix_gain = [1.0f64; ODD_PRIMES.len() + 1];
        for (i, &p) in ODD_PRIMES.iter().enumerate().rev() {
            suffix_gain[i] = suffix_gain[i + 1] * p as f64 / (p - 1) as f64;
        }
        let target_f64 = target.to_f64().expect("target fits f64");
        let mut search = AbundancySearch {
            target_num: target.numer().to_biguint().expect("target positive"),
            target_den: target.denom().to_biguint().expect("target positive"),
            target_f64,
            modulus: modulus_constraint,
            budget,
            examined: 0,
            budget_exhausted: budget == 0,
            heap: BinaryHeap::new(),
            suffix_gain,
        };
        for (i, &p) in ODD_PRIMES.iter().enumerate() {
            search.push(Candidate {
                value: p,
                last_idx: i,
                last_pe: p,
                sigma_last: (p + 1) as u128,
                sigma_rest: 1,
            });
        }
        Ok(search)
    }

    /// Candidates popped from the frontier so far.
    pub fn examined(&self) -> u64 {
        self.examined
    }

    /// True once iteration stopped because the pop budget ran out
    /// rather than because the frontier emptied.
    pub fn budget_exhausted(&self) -> bool {
        self.budget_exhausted
    }

    /// Upper bound on the abundancy reachable anywhere in the subtree
    /// rooted at c: push the last prime to exponent ∞ and multiply in
    /// every larger prime at exponent ∞.
    fn potential(&self, c: &Candidate) -> f64 {
        let p = ODD_PRIMES[c.last_idx] as f64;
        let abundancy = c.sigma_last as f64 * c.sigma_rest as f64 / c.value as f64;
        let last_gain = (p / (p - 1.0)) * (c.last_pe as f64 / c.sigma_last as f64);
        abundancy * last_gain * self.suffix_gain[c.last_idx + 1]
    }

    fn push(&mut self, c: Candidate) {
        if self.potential(&c) > self.target_f64 - PRUNE_MARGIN {
            self.heap.push(Reverse(c));
        }
    }

    fn expand(&mut self, c: &Candidate) {
        let p = ODD_PRIMES[c.last_idx];
        if let Some(value) = c.value.checked_mul(p) {
            self.push(Candidate {
                value,
                last_idx: c.last_idx,
                last_pe: c.last_pe * p,
                sigma_last: c.sigma_last * p as u128 + 1,
                sigma_rest: c.sigma_rest,
            });
        }
        for (j, &q) in ODD_PRIMES.iter().enumerate().skip(c.last_idx + 1) {
            let Some(value) = c.value.checked_mul(q) else {
                break;
            };
            self.push(Candidate {
                value,
                last_idx: j,
                last_pe: q,
                sigma_last: (q + 1) as u128,
                sigma_rest: c.sigma_rest * c.sigma_last,
            });
        }
    }

    fn accept(&self, c: &Candidate) -> bool {
        if let Some((r, q)) = self.modulus {
            if c.value % q != r {
                return false;
            }
        }
        let sigma = c.sigma_last * c.sigma_rest;
        BigUint::from(sigma) * &self.target_den > &self.target_num * BigUint::from(c.value)
    }
}

impl Iterator for AbundancySearch {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.examined == self.budget {
                self.budget_exhausted = true;
                return None;
            }
            let Reverse(c) = self.heap.pop()?;
            self.examined += 1;
            self.expand(&c);
            if self.accept(&c) {
                return Some(c.value);
            }
        }
    }
}

/// One abundancy candidate examined by the hunt, in emission order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HuntCandidate {
    pub t: u64,
    pub m: u64,
    /// σ(2m+5) > σ(6m+17)?
    pub first_holds: bool,
    /// σ(5m+4) > σ(6m+7)?
    pub second_holds: bool,
}

/// A fully verified m: both strict inequalities hold, re-checked by
/// independent trial-division divisor sums.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HuntWitness {
    pub m: u64,
    pub t: u64,
    pub sigma_2m5: String,
    pub sigma_6m17: String,
    pub sigma_5m4: String,
    pub sigma_6m7: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HuntReport {
    pub witnesses: Vec<HuntWitness>,
    /// Search log: every abundancy candidate that reached the
    /// inequality checks, in deterministic emission order.
    pub candidates: Vec<HuntCandidate>,
    pub examined: u64,
    pub budget_exhausted: bool,
}

fn sigma_u64(v: u64) -> Result<u128> {
    Ok(sigma1_u128(&factor(v)?))
}

/// Hunts for m with σ(2m+5) > σ(6m+17) and σ(5m+4) > σ(6m+7) at once.
///
/// Since σ(6m+17) ≥ 6m+18, the first inequality forces the odd number
/// t = 2m+5 to satisfy σ(t)/t > 3 + 3/t, so candidates come from an
/// abundancy search above 3 plus a configurable slack (default
/// 1/1000). An empty result within budget is a legitimate outcome.
pub fn witness_hunt(budget: u64, slack: Option<BigRational>) -> Result<HuntReport> {
    let slack = slack.unwrap_or_else(|| BigRational::new(1.into(), 1000.into()));
    if slack.is_negative() {
        return Err(Error::Domain("slack must be nonnegative".into()));
    }
    let target = BigRational::from_integer(3.into()) + slack;
    let mut search = AbundancySearch::new(target, None, budget)?;
    let mut witnesses = Vec::new();
    let mut candidates = Vec::new();
    for t in search.by_ref() {
        if t < 7 {
            continue;
        }
        let m = (t - 5) / 2;
        let v_6m17 = t
            .checked_mul(3)
            .and_then(|v| v.checked_add(2))
            .ok_or_else(|| Error::Overflow(format!("3t+2 exceeds u64 at t={t}")))?;
        let v_5m4 = 5 * m + 4;
        let v_6m7 = v_6m17 - 10;
        let s_t = sigma_u64(t)?;
        let s_6m17 = sigma_u64(v_6m17)?;
        let first_holds = s_t > s_6m17;
        let (second_holds, s_5m4, s_6m7) = if first_holds {
            let s_5m4 = sigma_u64(v_5m4)?;
            let s_6m7 = sigma_u64(v_6m7)?;
            (s_5m4 > s_6m7, s_5m4, s_6m7)
        } else {
            (false, 0, 0)
        };
        candidates.push(HuntCandidate {
            t,
            m,
            first_holds,
            second_holds,
        });
        if first_holds && second_holds {
            let all = [(t, s_t), (v_6m17, s_6m17), (v_5m4, s_5m4), (v_6m7, s_6m7)];
            for (v, s) in all {
                if sigma1_direct(v) != s {
                    return Err(Error::Construction(format!(
                        "divisor-sum cross-check failed at {v}"
                    )));
                }
            }
            // σ(t) > σ(3t+2) ≥ 3t+3 forces σ(t)/t > 3 + 3/t.
            debug_assert!(s_t > 3 * t as u128 + 3);
            witnesses.push(HuntWitness {
                m,
                t,
                sigma_2m5: s_t.to_string(),
                sigma_6m17: s_6m17.to_string(),
                sigma_5m4: s_5m4.to_string(),
                sigma_6m7: s_6m7.to_string(),
            });
        }
    }
    Ok(HuntReport {
        witnesses,
        candidates,
        examined: search.examined(),
        budget_exhausted: search.budget_exhausted(),
    })
}
