//! Exact rational scalars and their lossless text form.

use alloc::format;
use alloc::string::String;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// The exact scalar used throughout the algebraic modules.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Renders a rational as `"p/q"`, always with an explicit denominator.
pub fn to_pq(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_pq(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => BigInt::from_str(s).ok().map(Rational::from_integer),
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Farey mediant `(a+c)/(b+d)` of two reduced fractions.
pub fn mediant(lo: &Rational, hi: &Rational) -> Rational {
    Rational::new(lo.numer() + hi.numer(), lo.denom() + hi.denom())
}

pub(crate) fn abs_numer_cmp(a: &Rational, b: &Rational) -> core::cmp::Ordering {
    a.numer().abs().cmp(&b.numer().abs())
}
