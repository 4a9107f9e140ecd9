//! Exact rational scalars and their `"p/q"` wire format.
//!
//! Feasibility verdicts and polytope bounds are theorems, not tolerances,
//! so every coefficient that enters them is carried as an arbitrary
//! precision rational. JSON reports serialize rationals as `"p/q"` strings
//! (or `"p"` when the denominator is 1) to keep round trips lossless.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Shorthand for a small rational constant.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

pub fn rat_zero() -> BigRational {
    BigRational::zero()
}

pub fn rat_one() -> BigRational {
    BigRational::one()
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("rational representable as f64")
}

/// Format as `"p/q"`, omitting the denominator when it is 1.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse the `"p/q"` (or plain integer) wire form.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = |msg: &str| Error::Parse {
        field: text.to_string(),
        message: msg.to_string(),
    };
    let mut parts = text.splitn(2, '/');
    let numer: BigInt = parts
        .next()
        .unwrap()
        .trim()
        .parse()
        .map_err(|_| bad("invalid numerator"))?;
    let denom: BigInt = match parts.next() {
        Some(d) => d.trim().parse().map_err(|_| bad("invalid denominator"))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(BigRational::new(numer, denom))
}

/// True when every coefficient is nonnegative and they sum to one.
pub fn is_convex_combination(coeffs: &[BigRational]) -> bool {
    coeffs.iter().all(|c| !c.is_negative())
        && coeffs.iter().sum::<BigRational>() == BigRational::one()
}
