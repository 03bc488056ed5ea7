use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use super::rational::{fmt_rational, int, parse_rational, write_key, Rational};
use crate::error::{Error, ParseError};

/// Quaternion `w + xi + yj + zk` with rational coordinates.
///
/// The derived ordering is lexicographic on `(w, x, y, z)`; nearest-neighbour
/// tie-breaking relies on that.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RQuaternion {
    pub w: Rational,
    pub x: Rational,
    pub y: Rational,
    pub z: Rational,
}

impl RQuaternion {
    pub fn new(w: Rational, x: Rational, y: Rational, z: Rational) -> Self {
        RQuaternion { w, x, y, z }
    }

    pub fn from_ints(w: i64, x: i64, y: i64, z: i64) -> Self {
        RQuaternion::new(int(w), int(x), int(y), int(z))
    }

    pub fn real(w: Rational) -> Self {
        RQuaternion::new(w, Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn zero() -> Self {
        RQuaternion::from_ints(0, 0, 0, 0)
    }

    pub fn one() -> Self {
        RQuaternion::from_ints(1, 0, 0, 0)
    }

    pub fn i() -> Self {
        RQuaternion::from_ints(0, 1, 0, 0)
    }

    pub fn j() -> Self {
        RQuaternion::from_ints(0, 0, 1, 0)
    }

    pub fn k() -> Self {
        RQuaternion::from_ints(0, 0, 0, 1)
    }

    pub fn coords(&self) -> [&Rational; 4] {
        [&self.w, &self.x, &self.y, &self.z]
    }

    pub fn is_zero(&self) -> bool {
        self.coords().iter().all(|c| c.is_zero())
    }

    pub fn conj(&self) -> Self {
        RQuaternion::new(self.w.clone(), -&self.x, -&self.y, -&self.z)
    }

    pub fn normsq(&self) -> Rational {
        &self.w * &self.w + &self.x * &self.x + &self.y * &self.y + &self.z * &self.z
    }

    /// Euclidean inner product in R⁴.
    pub fn dot(&self, o: &Self) -> Rational {
        &self.w * &o.w + &self.x * &o.x + &self.y * &o.y + &self.z * &o.z
    }

    pub fn scale(&self, s: &Rational) -> Self {
        RQuaternion::new(&self.w * s, &self.x * s, &self.y * s, &self.z * s)
    }

    pub fn inverse(&self) -> Result<Self, Error> {
        quat_inverse(self)
    }

    /// Sign pattern with zero counted as nonnegative; bit i set when coordinate i is negative.
    pub fn hexadecant(&self) -> u8 {
        self.coords().iter().enumerate().fold(0u8, |acc, (i, c)| if c.is_negative() { acc | (1 << i) } else { acc })
    }

    /// Every coordinate pair is jointly nonnegative or jointly nonpositive.
    pub fn same_hexadecant(&self, o: &Self) -> bool {
        self.coords()
            .iter()
            .zip(o.coords())
            .all(|(a, b)| !(a.is_positive() && b.is_negative() || a.is_negative() && b.is_positive()))
    }

    pub fn parse(s: &str) -> Result<Self, ParseError> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| ParseError::Quaternion(s.to_string()))?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 4 {
            return Err(ParseError::Quaternion(s.to_string()));
        }
        Ok(RQuaternion::new(
            parse_rational(parts[0])?,
            parse_rational(parts[1])?,
            parse_rational(parts[2])?,
            parse_rational(parts[3])?,
        ))
    }

    pub fn write_key(&self, out: &mut Vec<u8>) {
        out.push(b'Q');
        for c in self.coords() {
            write_key(c, out);
        }
    }
}

pub fn hexadecant_label(pattern: u8) -> String {
    (0..4).map(|i| if pattern & (1 << i) != 0 { '-' } else { '+' }).collect()
}

/// `conj(q) / normsq(q)`.
pub fn quat_inverse(q: &RQuaternion) -> Result<RQuaternion, Error> {
    if q.is_zero() {
        return Err(Error::ZeroInverse);
    }
    let n = q.normsq();
    Ok(RQuaternion::new(&q.w / &n, -&q.x / &n, -&q.y / &n, -&q.z / &n))
}

impl fmt::Display for RQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{})",
            fmt_rational(&self.w),
            fmt_rational(&self.x),
            fmt_rational(&self.y),
            fmt_rational(&self.z)
        )
    }
}

impl<'a> Add<&'a RQuaternion> for &'a RQuaternion {
    type Output = RQuaternion;
    fn add(self, o: &RQuaternion) -> RQuaternion {
        RQuaternion::new(&self.w + &o.w, &self.x + &o.x, &self.y + &o.y, &self.z + &o.z)
    }
}

impl<'a> Sub<&'a RQuaternion> for &'a RQuaternion {
    type Output = RQuaternion;
    fn sub(self, o: &RQuaternion) -> RQuaternion {
        RQuaternion::new(&self.w - &o.w, &self.x - &o.x, &self.y - &o.y, &self.z - &o.z)
    }
}

// Hamilton product.
impl<'a> Mul<&'a RQuaternion> for &'a RQuaternion {
    type Output = RQuaternion;
    fn mul(self, o: &RQuaternion) -> RQuaternion {
        let (a1, b1, c1, d1) = (&self.w, &self.x, &self.y, &self.z);
        let (a2, b2, c2, d2) = (&o.w, &o.x, &o.y, &o.z);
        RQuaternion::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl Neg for &RQuaternion {
    type Output = RQuaternion;
    fn neg(self) -> RQuaternion {
        RQuaternion::new(-&self.w, -&self.x, -&self.y, -&self.z)
    }
}
