//! Exact arithmetic for divisor-sum sign-change experiments.
//!
//! The crate is organized around four pillars:
//!
//! * [`arith`]: factorization and multiplicative functions (σ_s, φ, Ω,
//!   abundancy) with a segmented sieve for bulk ranges,
//! * [`scan`]: sign-change scans of σ_s(an+b) − σ_s(cn+d) along
//!   arithmetic progressions, totient-dominance scans, and the
//!   two-sided prime-driven witness search,
//! * [`density`]: exact root-count densities N(d) for linear forms and
//!   the Euler products that govern Σ_{n≤K} σ(an+b),
//! * [`crt`]: admissible form systems, prime strings, the CRT
//!   construction forcing σ(H_j(n)) above every σ(L_i(n)), and the
//!   abundancy-driven witness hunt.
//!
//! Everything that feeds a comparison is exact: big integers for σ
//! values and partial sums, rationals for densities and thresholds, and
//! integer-root enclosures when fractional exponents make a closed form
//! impossible.

pub mod algebraic;
pub mod arith;
pub mod crt;
pub mod density;
mod error;
pub mod forms;
pub mod scan;

pub use error::{BudgetProgress, Error, Result};
pub use forms::LinearForm;
