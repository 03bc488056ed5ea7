//! Rational helpers on top of `num_rational::BigRational`.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^-bits` as an exact rational.
pub fn pow2_neg(bits: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << bits)
}

/// Canonical text `num/den`, denominator always present.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    let s = s.trim();
    let bad = || ParseError::Scalar(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Round to the nearest multiple of `2^-bits`.
pub fn round_dyadic(r: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = r * Rational::from_integer(scale.clone());
    Rational::new(scaled.round().to_integer(), scale)
}

pub fn floor_dyadic(r: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = r * Rational::from_integer(scale.clone());
    Rational::new(scaled.floor().to_integer(), scale)
}

pub fn ceil_dyadic(r: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = r * Rational::from_integer(scale.clone());
    Rational::new(scaled.ceil().to_integer(), scale)
}

fn is_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    if &s * &s == *n {
        Some(s)
    } else {
        None
    }
}

/// Exact square root when `r` is the square of a rational.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    let n = is_square(r.numer())?;
    let d = is_square(r.denom())?;
    Some(Rational::new(n, d))
}

/// Lower and upper rational bounds on `sqrt(r)` for `r >= 0`, at most `2^-bits` apart.
/// Degenerates to a point when `r` is a perfect square.
pub fn sqrt_bounds(r: &Rational, bits: u32) -> (Rational, Rational) {
    assert!(!r.is_negative(), "sqrt of negative rational");
    if let Some(s) = exact_sqrt(r) {
        return (s.clone(), s);
    }
    // sqrt(n/d) = sqrt(n*d)/d
    let nd = r.numer() * r.denom();
    let scaled = nd << (2 * bits as usize);
    let root = scaled.sqrt();
    let den = r.denom() << bits as usize;
    let lo = Rational::new(root.clone(), den.clone());
    let hi = Rational::new(root + BigInt::one(), den);
    (lo, hi)
}

/// Smallest `bits` with `2^-bits <= width`.
pub fn bits_for_width(width: &Rational) -> u32 {
    assert!(width.is_positive(), "width must be positive");
    let mut bits = 0u32;
    let mut w = Rational::one();
    while &w > width {
        w /= int(2);
        bits += 1;
    }
    bits
}

/// Append a sign-tagged, length-prefixed encoding of `r` to `out`.
pub fn write_key(r: &Rational, out: &mut Vec<u8>) {
    let (sign, mag) = r.numer().to_bytes_be();
    out.push(match sign {
        Sign::Minus => 0,
        Sign::NoSign => 1,
        Sign::Plus => 2,
    });
    write_bytes(&mag, out);
    let den: BigUint = r.denom().magnitude().clone();
    write_bytes(&den.to_bytes_be(), out);
}

fn write_bytes(bytes: &[u8], out: &mut Vec<u8>) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}
