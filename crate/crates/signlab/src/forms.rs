use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::{Error, Result};

/// Linear form `a*x + b` with positive slope.
///
/// The slope is capped at `u64`; the offset may be negative so forms
/// like `5x - 17` are representable. Evaluation is exact in `i128` and
/// never wraps for in-range inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    a: u64,
    b: i64,
}

impl LinearForm {
    /// Requires `a >= 1`; a zero slope is not a progression.
    pub fn new(a: u64, b: i64) -> Result<Self> {
        if a == 0 {
            return Err(Error::Domain("form slope must be positive".into()));
        }
        Ok(LinearForm { a, b })
    }

    pub fn slope(&self) -> u64 {
        self.a
    }

    pub fn offset(&self) -> i64 {
        self.b
    }

    /// Exact value at `n`, wide enough for any `u64` argument.
    pub fn eval_i128(&self, n: u64) -> i128 {
        self.a as i128 * n as i128 + self.b as i128
    }

    /// Value at `n` when it is positive and fits `u64`.
    pub fn eval_u64(&self, n: u64) -> Result<u64> {
        let v = self.eval_i128(n);
        if v <= 0 {
            return Err(Error::Domain(format!("{self} is {v} at n = {n}, not positive")));
        }
        u64::try_from(v)
            .map_err(|_| Error::Overflow(format!("{self} at n = {n} exceeds u64")))
    }

    /// Exact value at an arbitrary big integer argument.
    pub fn eval_big(&self, n: &BigInt) -> BigInt {
        BigInt::from(self.a) * n + BigInt::from(self.b)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a == 1 {
            write!(f, "x")?;
        } else {
            write!(f, "{}x", self.a)?;
        }
        match self.b.cmp(&0) {
            std::cmp::Ordering::Greater => write!(f, "+{}", self.b),
            std::cmp::Ordering::Less => write!(f, "{}", self.b),
            std::cmp::Ordering::Equal => Ok(()),
        }
    }
}

impl FromStr for LinearForm {
    type Err = Error;

    /// Accepts `ax+b`, `ax-b`, `ax`, `x+b`, `x-b`, `x`, with optional
    /// spaces around the sign.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("cannot parse linear form from {s:?}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let x_at = compact.find(['x', 'X']).ok_or_else(bad)?;
        let (coef, rest) = compact.split_at(x_at);
        let a: u64 = if coef.is_empty() {
            1
        } else {
            coef.parse().map_err(|_| bad())?
        };
        let rest = &rest[1..];
        let b: i64 = if rest.is_empty() {
            0
        } else if rest.starts_with('+') || rest.starts_with('-') {
            rest.parse().map_err(|_| bad())?
        } else {
            return Err(bad());
        };
        LinearForm::new(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trips() {
        for text in ["33x+2", "34x+1", "30x", "x+1", "x", "5x-17", "2x+3"] {
            let form: LinearForm = text.parse().unwrap();
            assert_eq!(form.to_string(), text);
            let again: LinearForm = form.to_string().parse().unwrap();
            assert_eq!(form, again);
        }
    }

    #[test]
    fn parse_accepts_spaces_and_capital_x() {
        let form: LinearForm = "3 X - 8".parse().unwrap();
        assert_eq!(form, LinearForm::new(3, -8).unwrap());
    }

    #[test]
    fn parse_rejects_garbage() {
        for text in ["", "5", "x+", "0x+1", "x2", "ax+b", "3x+2y"] {
            assert!(text.parse::<LinearForm>().is_err(), "{text:?} parsed");
        }
    }

    #[test]
    fn zero_slope_rejected() {
        assert!(LinearForm::new(0, 5).is_err());
    }

    #[test]
    fn eval_matches_by_hand() {
        let form = LinearForm::new(33, 2).unwrap();
        assert_eq!(form.eval_u64(4).unwrap(), 134);
        assert_eq!(form.eval_i128(0), 2);

        let neg = LinearForm::new(5, -17).unwrap();
        assert_eq!(neg.eval_i128(1), -12);
        assert!(neg.eval_u64(1).is_err());
        assert_eq!(neg.eval_u64(7).unwrap(), 18);
    }

    #[test]
    fn eval_big_agrees_with_i128() {
        let form = LinearForm::new(33, 2).unwrap();
        let n = BigInt::from(123_456u32);
        assert_eq!(form.eval_big(&n), BigInt::from(form.eval_i128(123_456)));
    }
}
