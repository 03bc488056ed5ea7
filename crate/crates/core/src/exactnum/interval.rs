//! Rational interval enclosures for the irrational quantities (complex moduli,
//! operator 1-norms, determinant roots).

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::gaussian::GaussianRational;
use super::matrix::RMatrix;
use super::rational::{
    bits_for_width, ceil_dyadic, floor_dyadic, fmt_rational, parse_rational, pow2_neg, sqrt_bounds, Rational,
};
use crate::error::Error;

/// Closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

/// Enclosure of a nonnegative norm.
pub type NormEnclosure = Interval;

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(v: Rational) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        Interval::point(Rational::zero())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    pub fn add(&self, o: &Self) -> Self {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Self {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_negative() {
            Interval { lo: &self.hi * s, hi: &self.lo * s }
        } else {
            Interval { lo: &self.lo * s, hi: &self.hi * s }
        }
    }

    pub fn sqr(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = std::cmp::max(&self.lo * &self.lo, &self.hi * &self.hi);
            Interval { lo: Rational::zero(), hi: m }
        } else {
            let a = &self.lo * &self.lo;
            let b = &self.hi * &self.hi;
            if a <= b {
                Interval { lo: a, hi: b }
            } else {
                Interval { lo: b, hi: a }
            }
        }
    }

    /// `1/x` for an interval excluding zero.
    pub fn recip(&self) -> Result<Self, Error> {
        if self.contains(&Rational::zero()) {
            return Err(Error::Unresolved("reciprocal of an interval containing zero".into()));
        }
        Ok(Interval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    /// Square root of a nonnegative interval, outer bounds `2^-bits` tight.
    pub fn sqrt(&self, bits: u32) -> Self {
        let lo = if self.lo.is_positive() { sqrt_bounds(&self.lo, bits).0 } else { Rational::zero() };
        let hi = sqrt_bounds(&self.hi, bits).1;
        Interval { lo, hi }
    }

    pub fn max(&self, o: &Self) -> Self {
        Interval { lo: std::cmp::max(&self.lo, &o.lo).clone(), hi: std::cmp::max(&self.hi, &o.hi).clone() }
    }

    /// Widen outward to the dyadic grid `2^-bits` to cap denominator growth.
    pub fn round_out(&self, bits: u32) -> Self {
        if self.is_point() && self.lo.denom() <= &(num_bigint::BigInt::from(1) << bits as usize) {
            return self.clone();
        }
        Interval { lo: floor_dyadic(&self.lo, bits), hi: ceil_dyadic(&self.hi, bits) }
    }

    /// Decide `self < o` / `self > o` when the intervals are disjoint.
    pub fn certain_cmp(&self, o: &Self) -> Option<Ordering> {
        if self.hi < o.lo {
            Some(Ordering::Less)
        } else if self.lo > o.hi {
            Some(Ordering::Greater)
        } else if self.is_point() && o.is_point() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn to_record(&self) -> IntervalRecord {
        IntervalRecord { lo: fmt_rational(&self.lo), hi: fmt_rational(&self.hi) }
    }
}

/// Serialized form of an interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub lo: String,
    pub hi: String,
}

impl IntervalRecord {
    pub fn parse(&self) -> Result<Interval, Error> {
        Ok(Interval::new(parse_rational(&self.lo)?, parse_rational(&self.hi)?))
    }
}

/// Rectangular complex enclosure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn point(z: &GaussianRational) -> Self {
        ComplexInterval { re: Interval::point(z.re.clone()), im: Interval::point(z.im.clone()) }
    }

    /// Disc of radius `r` around `z`, boxed.
    pub fn around(z: &GaussianRational, r: &Rational) -> Self {
        ComplexInterval { re: Interval::new(&z.re - r, &z.re + r), im: Interval::new(&z.im - r, &z.im + r) }
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexInterval { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexInterval { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        ComplexInterval {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn mul_exact(&self, z: &GaussianRational) -> Self {
        ComplexInterval {
            re: self.re.scale(&z.re).sub(&self.im.scale(&z.im)),
            im: self.re.scale(&z.im).add(&self.im.scale(&z.re)),
        }
    }

    pub fn norm_sq(&self) -> Interval {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn modulus(&self, bits: u32) -> Interval {
        if self.im.is_point() && self.im.lo.is_zero() {
            return abs_interval(&self.re);
        }
        if self.re.is_point() && self.re.lo.is_zero() {
            return abs_interval(&self.im);
        }
        self.norm_sq().sqrt(bits)
    }

    pub fn recip(&self) -> Result<Self, Error> {
        let n = self.norm_sq().recip()?;
        Ok(ComplexInterval { re: self.re.mul(&n), im: self.im.neg().mul(&n) })
    }

    pub fn contains(&self, z: &GaussianRational) -> bool {
        self.re.contains(&z.re) && self.im.contains(&z.im)
    }

    pub fn round_out(&self, bits: u32) -> Self {
        ComplexInterval { re: self.re.round_out(bits), im: self.im.round_out(bits) }
    }

    pub fn max_width(&self) -> Rational {
        std::cmp::max(self.re.width(), self.im.width())
    }
}

fn abs_interval(x: &Interval) -> Interval {
    if x.lo.is_negative() && x.hi.is_positive() {
        Interval::new(Rational::zero(), std::cmp::max(-&x.lo, x.hi.clone()))
    } else if x.hi.is_negative() || x.hi.is_zero() {
        Interval::new(-&x.hi, -&x.lo)
    } else {
        x.clone()
    }
}

/// Enclosure of `|z|`, exact when `z` is real or purely imaginary or a rational modulus.
pub fn modulus_enclosure(z: &GaussianRational, bits: u32) -> Interval {
    if z.im.is_zero() {
        return Interval::point(z.re.abs());
    }
    if z.re.is_zero() {
        return Interval::point(z.im.abs());
    }
    let (lo, hi) = sqrt_bounds(&z.norm_sq(), bits);
    Interval::new(lo, hi)
}

/// Enclosure of `max_j Σ_i |A_ij|` with `hi - lo <= width`.
pub fn op1_norm(a: &RMatrix, width: &Rational) -> NormEnclosure {
    let k = a.dim();
    let bits = bits_for_width(width) + bits_for_k(k);
    op1_norm_bits(a, bits)
}

fn bits_for_k(k: usize) -> u32 {
    (usize::BITS - k.leading_zeros()) + 1
}

pub fn op1_norm_bits(a: &RMatrix, bits: u32) -> NormEnclosure {
    let k = a.dim();
    let mut best: Option<Interval> = None;
    for j in 0..k {
        let mut col = Interval::zero();
        for i in 0..k {
            col = col.add(&modulus_enclosure(a.get(i, j), bits));
        }
        best = Some(match best {
            None => col,
            Some(b) => b.max(&col),
        });
    }
    best.expect("dimension at least one")
}

/// Operator 1-norm of a matrix of complex enclosures (row-major, `k×k`).
pub fn interval_op1_norm(entries: &[ComplexInterval], k: usize, bits: u32) -> NormEnclosure {
    assert_eq!(entries.len(), k * k);
    let mut best: Option<Interval> = None;
    for j in 0..k {
        let mut col = Interval::zero();
        for i in 0..k {
            col = col.add(&entries[i * k + j].modulus(bits));
        }
        best = Some(match best {
            None => col,
            Some(b) => b.max(&col),
        });
    }
    best.expect("dimension at least one")
}

/// Refinement policy for enclosure comparisons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Precision {
    /// Smallest enclosure width tried before giving up.
    pub floor: Rational,
    /// Tolerance for certified non-strict inequalities between irrational norms.
    pub slack: Rational,
}

pub const FLOOR_ENV: &str = "SUMPROD_ENCLOSURE_FLOOR";

impl Default for Precision {
    fn default() -> Self {
        Precision { floor: pow2_neg(64), slack: pow2_neg(40) }
    }
}

impl Precision {
    /// Default precision with the floor overridden by `SUMPROD_ENCLOSURE_FLOOR` when set.
    pub fn from_env() -> Result<Self, Error> {
        let mut p = Precision::default();
        if let Ok(v) = std::env::var(FLOOR_ENV) {
            let floor = parse_rational(&v)?;
            if !floor.is_positive() {
                return Err(Error::Precondition(format!("{FLOOR_ENV} must be positive")));
            }
            p.floor = floor;
        }
        Ok(p)
    }

    pub fn floor_bits(&self) -> u32 {
        bits_for_width(&self.floor)
    }

    /// Bit schedule from coarse to the floor.
    pub fn schedule(&self) -> Vec<u32> {
        let top = self.floor_bits().max(8);
        let mut out = Vec::new();
        let mut b = 16.min(top);
        loop {
            out.push(b);
            if b >= top {
                break;
            }
            b = (b * 2).min(top);
        }
        out
    }

    /// Bits sufficient for enclosures narrower than a quarter of the slack.
    pub fn slack_bits(&self) -> u32 {
        bits_for_width(&self.slack) + 2
    }
}

/// Compare two refinable quantities. Each closure maps a bit budget to an enclosure.
pub fn compare_refined(
    a: impl Fn(u32) -> Interval,
    b: impl Fn(u32) -> Interval,
    prec: &Precision,
) -> Result<Ordering, Error> {
    for bits in prec.schedule() {
        if let Some(o) = a(bits).certain_cmp(&b(bits)) {
            return Ok(o);
        }
    }
    Err(Error::Unresolved("comparison".into()))
}

/// `a <= b` up to the precision slack. Never unresolved: near-equal values pass.
pub fn le_with_slack(a: &Interval, b: &Interval, slack: &Rational) -> bool {
    a.hi <= &b.lo + slack
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};

    #[test]
    fn op1_norm_examples() {
        let w = pow2_neg(20);
        let id = op1_norm(&RMatrix::identity(2), &w);
        assert!(id.contains(&int(1)) && id.width() <= w);

        let m = RMatrix::from_real(2, vec![int(1), rat(1, 3), int(0), int(1)]).unwrap();
        let n = op1_norm(&m, &w);
        assert!(n.is_point());
        assert_eq!(n.lo, rat(4, 3));

        let m = RMatrix::from_rows(vec![
            vec![GaussianRational::i(), GaussianRational::zero()],
            vec![GaussianRational::zero(), GaussianRational::one()],
        ])
        .unwrap();
        let n = op1_norm(&m, &w);
        assert!(n.contains(&int(1)));
    }

    #[test]
    fn irrational_norm_is_bracketed() {
        // |1 + i| = sqrt 2 in the single column
        let m = RMatrix::new(1, vec![GaussianRational::from_ints(1, 1)]).unwrap();
        let w = pow2_neg(30);
        let n = op1_norm(&m, &w);
        assert!(n.width() <= w);
        assert!(&n.lo * &n.lo <= int(2) && &n.hi * &n.hi >= int(2));
    }

    #[test]
    fn complex_interval_recip_contains_exact() {
        let z = GaussianRational::new(rat(3, 4), rat(-5, 7));
        let zi = ComplexInterval::around(&z, &pow2_neg(30));
        let r = zi.recip().unwrap();
        assert!(r.contains(&z.inv().unwrap()));
    }

    #[test]
    fn refined_comparison() {
        let p = Precision::default();
        let sqrt2 = |bits| Interval::new(sqrt_bounds(&int(2), bits).0, sqrt_bounds(&int(2), bits).1);
        let sqrt3 = |bits| Interval::new(sqrt_bounds(&int(3), bits).0, sqrt_bounds(&int(3), bits).1);
        assert_eq!(compare_refined(sqrt2, sqrt3, &p).unwrap(), Ordering::Less);
        assert!(compare_refined(sqrt2, sqrt2, &p).is_err());
    }

    #[test]
    fn schedule_reaches_floor() {
        let p = Precision::default();
        assert_eq!(p.schedule(), vec![16, 32, 64]);
        let p = Precision { floor: pow2_neg(10), slack: pow2_neg(8) };
        assert_eq!(*p.schedule().last().unwrap(), 10);
    }
}
