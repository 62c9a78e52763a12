//! Coefficient rings and exact scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

/// Exact scalar used for every matrix entry in the engine. Integer values
/// are rationals with denominator one; there is no floating point path.
pub type Coeff = BigRational;

/// The two coefficient rings the engine computes over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Ring {
    Z,
    Q,
}

impl Ring {
    /// Whether `c` is a legal entry over this ring.
    pub fn admits(&self, c: &Coeff) -> bool {
        match self {
            Ring::Z => c.is_integer(),
            Ring::Q => true,
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Z => write!(f, "Z"),
            Ring::Q => write!(f, "Q"),
        }
    }
}

impl FromStr for Ring {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Z" | "z" => Ok(Ring::Z),
            "Q" | "q" => Ok(Ring::Q),
            other => Err(format!("unknown ring {other:?}, expected Z or Q")),
        }
    }
}

pub fn coeff_from_i64(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

pub fn coeff_from_pair(num: i64, den: i64) -> Coeff {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"3"`, `"-12"` or `"p/q"` into an exact scalar.
pub fn parse_coeff(s: &str) -> Result<Coeff, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|e| format!("bad numerator {num:?}: {e}"))?;
        let d = BigInt::from_str(den.trim()).map_err(|e| format!("bad denominator {den:?}: {e}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n = BigInt::from_str(s).map_err(|e| format!("bad integer {s:?}: {e}"))?;
        Ok(BigRational::from_integer(n))
    }
}

/// Formats a scalar as a decimal integer string, or `"p/q"` when the
/// denominator is nontrivial.
pub fn format_coeff(c: &Coeff) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Nearest-integer quotient, used to shrink remainders during row
/// reduction: returns q with |a - q*b| <= |b| / 2.
pub fn rounded_div(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(!b.is_zero());
    let (mut q, r) = num_integer::Integer::div_rem(a, b);
    let two_r = r.abs() * BigInt::from(2);
    if two_r > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q += BigInt::one();
        } else {
            q -= BigInt::one();
        }
    }
    q
}
