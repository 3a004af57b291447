//! Exact rational arithmetic helpers.
//!
//! Memory sizes and link loads are `Ratio<BigInt>` end to end; conversion to
//! `f64` happens only when rendering output. Serialized form is a
//! `{"num": "...", "den": "..."}` pair of decimal strings so that values
//! beyond `i64` survive a JSON round trip.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{BigUint, One, ToPrimitive, Zero};
use serde::Serialize;

/// Exact rational with arbitrary-precision numerator and denominator.
pub type Rat = Ratio<BigInt>;

/// `n / d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

/// An integer as an exact rational.
pub fn int(n: i64) -> Rat {
    Ratio::from_integer(BigInt::from(n))
}

/// A `BigUint` as an exact rational.
pub fn from_biguint(n: &BigUint) -> Rat {
    Ratio::from_integer(BigInt::from(n.clone()))
}

/// Ratio of two `BigUint`s. The denominator must be nonzero.
pub fn biguint_ratio(n: &BigUint, d: &BigUint) -> Rat {
    Ratio::new(BigInt::from(n.clone()), BigInt::from(d.clone()))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Lossy conversion for display purposes only.
pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `"p/q"`, or just `"p"` when the denominator is one.
pub fn display(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serializable numerator/denominator pair (decimal strings).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatJson {
    pub num: String,
    pub den: String,
}

impl From<&Rat> for RatJson {
    fn from(r: &Rat) -> Self {
        RatJson {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}
