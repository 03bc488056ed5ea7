//! Kissing-number geometry: closed balls centred at ratioset elements, the
//! ball-overlap multiplicity audit, and the touching-sphere construction that
//! reduces a multiplicity bound to a kissing number.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::interval::{compare_refined, interval_op1_norm, le_with_slack, op1_norm_bits, IntervalRecord};
use crate::exactnum::rational::{fmt_rational, int, sqrt_bounds};
use crate::exactnum::{ComplexInterval, Interval, Precision, RMatrix, RQuaternion, Rational, RingElement, SetKind};

/// Kissing number of R⁴.
pub const C4: u64 = 24;

/// Multiplicity cap for closed balls around a common point.
///
/// Quaternions: `c₄ + 1 = 25`. Matrices: `3^(2k²)`, the translative kissing bound `3^d − 1` in real
/// dimension `d = 2k²` plus the central ball.
pub fn kissing_bound(space: SetKind) -> BigUint {
    match space {
        SetKind::Quaternion => BigUint::from(C4 + 1),
        SetKind::Matrix { k } => BigUint::from(3u32).pow((2 * k * k) as u32),
    }
}

/// The displayed matrix-space constant `3^(k²−1)`, kept for comparison only.
pub fn displayed_matrix_bound(k: usize) -> BigUint {
    BigUint::from(3u32).pow((k * k - 1) as u32)
}

/// Serialized radius: exact square when available, plus an enclosure of the radius.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadiusRecord {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub squared: Option<String>,
    pub enclosure: IntervalRecord,
}

/// Metric on ring elements with certified comparisons.
pub trait MetricElement: RingElement {
    /// Ordering of `dist(a,b)` against `dist(c,d)`; `Unresolved` when enclosures
    /// cannot separate them at the floor width.
    fn compare_dist(a: &Self, b: &Self, c: &Self, d: &Self, prec: &Precision) -> Result<Ordering>;

    /// `dist(a,b) <= dist(c,d)`: exact for quaternions, up to `prec.slack` otherwise.
    fn dist_le(a: &Self, b: &Self, c: &Self, d: &Self, prec: &Precision) -> bool;

    /// Deterministic order used to break distance ties.
    fn tie_cmp(a: &Self, b: &Self) -> Ordering;

    fn radius_record(center: &Self, rim: &Self, prec: &Precision) -> RadiusRecord;

    /// Ball radius precomputed for repeated membership tests.
    type Radius: Clone + std::fmt::Debug;

    fn radius(center: &Self, rim: &Self, prec: &Precision) -> Self::Radius;

    /// `dist(p, center) <= radius`, with the same exactness as [`dist_le`](Self::dist_le).
    fn within(p: &Self, center: &Self, radius: &Self::Radius, prec: &Precision) -> bool;

    /// `dist(q, center) < radius`, beyond the slack for inexact metrics.
    fn strictly_within(q: &Self, center: &Self, radius: &Self::Radius, prec: &Precision) -> bool;

    /// Touching-sphere configuration for the balls containing `p`.
    fn construct_kissing(p: &Self, balls: &[Ball<Self>], prec: &Precision) -> Result<KissingConfig>;
}

fn approx4(q: &RQuaternion) -> [f64; 4] {
    q.coords().map(|c| c.to_f64().unwrap_or(f64::NAN))
}

/// Exact squared radius plus a floating-point shadow for screening clear cases.
#[derive(Clone, Debug)]
pub struct QuaternionRadius {
    pub sq: Rational,
    approx: f64,
    center: [f64; 4],
}

impl QuaternionRadius {
    /// `Some(inside)` when the floating-point distance is decisive; the margin exceeds
    /// the conversion and rounding error by several orders of magnitude.
    fn screen(&self, p: &RQuaternion) -> Option<bool> {
        let pf = approx4(p);
        let d2: f64 = pf.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum();
        let scale: f64 = pf.iter().chain(&self.center).map(|a| a * a).sum::<f64>() + self.approx;
        if !d2.is_finite() || !scale.is_finite() || scale < 1e-200 {
            return None;
        }
        let margin = 1e-9 * scale;
        if d2 > self.approx + margin {
            Some(false)
        } else if d2 < self.approx - margin {
            Some(true)
        } else {
            None
        }
    }
}

impl MetricElement for RQuaternion {
    fn compare_dist(a: &Self, b: &Self, c: &Self, d: &Self, _: &Precision) -> Result<Ordering> {
        Ok((a - b).normsq().cmp(&(c - d).normsq()))
    }

    fn dist_le(a: &Self, b: &Self, c: &Self, d: &Self, _: &Precision) -> bool {
        (a - b).normsq() <= (c - d).normsq()
    }

    fn tie_cmp(a: &Self, b: &Self) -> Ordering {
        a.cmp(b)
    }

    type Radius = QuaternionRadius;

    fn radius(center: &Self, rim: &Self, _: &Precision) -> QuaternionRadius {
        let sq = (center - rim).normsq();
        QuaternionRadius { approx: sq.to_f64().unwrap_or(f64::NAN), sq, center: approx4(center) }
    }

    fn within(p: &Self, center: &Self, radius: &QuaternionRadius, _: &Precision) -> bool {
        match radius.screen(p) {
            Some(inside) => inside,
            None => (p - center).normsq() <= radius.sq,
        }
    }

    fn strictly_within(q: &Self, center: &Self, radius: &QuaternionRadius, _: &Precision) -> bool {
        match radius.screen(q) {
            Some(inside) => inside,
            None => (q - center).normsq() < radius.sq,
        }
    }

    fn radius_record(center: &Self, rim: &Self, prec: &Precision) -> RadiusRecord {
        let sq = (center - rim).normsq();
        let (lo, hi) = sqrt_bounds(&sq, prec.slack_bits());
        RadiusRecord { squared: Some(fmt_rational(&sq)), enclosure: Interval::new(lo, hi).to_record() }
    }

    fn construct_kissing(p: &Self, balls: &[Ball<Self>], prec: &Precision) -> Result<KissingConfig> {
        check_kissing_preconditions(p, balls, prec)?;
        let vs: Vec<(usize, RQuaternion)> =
            balls.iter().enumerate().map(|(i, b)| (i, &b.center - p)).filter(|(_, v)| !v.is_zero()).collect();
        if vs.is_empty() {
            return Err(Error::DegenerateAllCentersEqualP);
        }
        let norms: Vec<Rational> = vs.iter().map(|(_, v)| v.normsq()).collect();
        let r_sq = norms.iter().min().unwrap().clone();
        // |C_i − P|² = (r²/|v_i|²)·|v_i|²
        let touching = norms.iter().all(|n| (&r_sq / n) * n == r_sq);
        // |C_i − C_j| ≥ r  ⇔  v_i·v_j ≤ |v_i||v_j|/2
        let mut overlapping = Vec::new();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                let d = vs[i].1.dot(&vs[j].1);
                if d.is_positive() && int(4) * &d * &d > &norms[i] * &norms[j] {
                    overlapping.push((vs[i].0, vs[j].0));
                }
            }
        }
        let (lo, hi) = sqrt_bounds(&r_sq, prec.slack_bits());
        Ok(KissingConfig {
            base: p.to_string(),
            radius: Interval::new(lo, hi).to_record(),
            radius_sq: Some(fmt_rational(&r_sq)),
            spheres: vs.iter().map(|(i, _)| *i).collect(),
            touching,
            non_overlapping: overlapping.is_empty(),
            overlapping_pairs: overlapping,
        })
    }
}

fn matrix_dist(a: &RMatrix, b: &RMatrix, bits: u32) -> Interval {
    op1_norm_bits(&a.sub(b), bits)
}

impl MetricElement for RMatrix {
    fn compare_dist(a: &Self, b: &Self, c: &Self, d: &Self, prec: &Precision) -> Result<Ordering> {
        let ab = a.sub(b);
        let cd = c.sub(d);
        compare_refined(|bits| op1_norm_bits(&ab, bits), |bits| op1_norm_bits(&cd, bits), prec)
    }

    fn dist_le(a: &Self, b: &Self, c: &Self, d: &Self, prec: &Precision) -> bool {
        let bits = prec.slack_bits();
        le_with_slack(&matrix_dist(a, b, bits), &matrix_dist(c, d, bits), &prec.slack)
    }

    fn tie_cmp(a: &Self, b: &Self) -> Ordering {
        a.canonical_key().cmp(&b.canonical_key())
    }

    type Radius = Interval;

    fn radius(center: &Self, rim: &Self, prec: &Precision) -> Interval {
        matrix_dist(center, rim, prec.slack_bits())
    }

    fn within(p: &Self, center: &Self, radius: &Interval, prec: &Precision) -> bool {
        le_with_slack(&matrix_dist(p, center, prec.slack_bits()), radius, &prec.slack)
    }

    fn strictly_within(q: &Self, center: &Self, radius: &Interval, prec: &Precision) -> bool {
        !le_with_slack(radius, &matrix_dist(center, q, prec.slack_bits()), &prec.slack)
    }

    fn radius_record(center: &Self, rim: &Self, prec: &Precision) -> RadiusRecord {
        RadiusRecord { squared: None, enclosure: matrix_dist(center, rim, prec.slack_bits()).to_record() }
    }

    fn construct_kissing(p: &Self, balls: &[Ball<Self>], prec: &Precision) -> Result<KissingConfig> {
        check_kissing_preconditions(p, balls, prec)?;
        let bits = prec.slack_bits();
        let vs: Vec<(usize, RMatrix)> =
            balls.iter().enumerate().map(|(i, b)| (i, b.center.sub(p))).filter(|(_, v)| !v.is_zero()).collect();
        if vs.is_empty() {
            return Err(Error::DegenerateAllCentersEqualP);
        }
        let norms: Vec<Interval> = vs.iter().map(|(_, v)| op1_norm_bits(v, bits)).collect();
        let r = Interval::new(
            norms.iter().map(|n| n.lo.clone()).min().unwrap(),
            norms.iter().map(|n| n.hi.clone()).min().unwrap(),
        );
        let inv: Vec<Interval> = norms.iter().map(|n| n.recip()).collect::<Result<_>>()?;
        // ||C_i − P|| / r = ||v_i|| / ||v_i||, enclosed
        let touching = norms.iter().zip(&inv).all(|(n, t)| n.mul(t).contains(&Rational::one()));
        let k = p.dim();
        let unit = |idx: usize| -> Vec<ComplexInterval> {
            vs[idx]
                .1
                .entries()
                .iter()
                .map(|z| ComplexInterval::new(inv[idx].scale(&z.re), inv[idx].scale(&z.im)))
                .collect()
        };
        let units: Vec<Vec<ComplexInterval>> = (0..vs.len()).map(unit).collect();
        let threshold = Rational::one() - &prec.slack;
        let mut overlapping = Vec::new();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                let diff: Vec<ComplexInterval> = units[i].iter().zip(&units[j]).map(|(a, b)| a.sub(b)).collect();
                // ||C_i − C_j|| = r·||u_i − u_j||
                let n = interval_op1_norm(&diff, k, bits);
                if n.lo < threshold {
                    overlapping.push((vs[i].0, vs[j].0));
                }
            }
        }
        Ok(KissingConfig {
            base: p.to_string(),
            radius: r.to_record(),
            radius_sq: None,
            spheres: vs.iter().map(|(i, _)| *i).collect(),
            touching,
            non_overlapping: overlapping.is_empty(),
            overlapping_pairs: overlapping,
        })
    }
}

/// Closed ball centred at `center` whose boundary passes through `rim`.
#[derive(Clone, Debug)]
pub struct Ball<T: MetricElement> {
    pub center: T,
    pub rim: T,
    radius: T::Radius,
}

impl<T: MetricElement> Ball<T> {
    pub fn new(center: T, rim: T, prec: &Precision) -> Self {
        let radius = T::radius(&center, &rim, prec);
        Ball { center, rim, radius }
    }

    pub fn contains(&self, p: &T, prec: &Precision) -> bool {
        T::within(p, &self.center, &self.radius, prec)
    }

    /// `q` is strictly inside this ball (beyond the slack for inexact metrics).
    pub fn has_in_interior(&self, q: &T, prec: &Precision) -> bool {
        T::strictly_within(q, &self.center, &self.radius, prec)
    }
}

/// Every center outside the interior of every other ball.
pub fn check_center_separation<T: MetricElement>(balls: &[Ball<T>], prec: &Precision) -> Result<()> {
    for (i, bi) in balls.iter().enumerate() {
        for (j, bj) in balls.iter().enumerate() {
            if i != j && bj.has_in_interior(&bi.center, prec) {
                return Err(Error::CenterSeparationViolated { x: bj.center.to_string(), y: bi.center.to_string() });
            }
        }
    }
    Ok(())
}

fn check_kissing_preconditions<T: MetricElement>(p: &T, balls: &[Ball<T>], prec: &Precision) -> Result<()> {
    if let Some(b) = balls.iter().find(|b| !b.contains(p, prec)) {
        return Err(Error::Precondition(format!("point {p} is outside the ball around {}", b.center)));
    }
    check_center_separation(balls, prec)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityAudit {
    pub max_multiplicity: usize,
    /// Index of the first point attaining the maximum.
    pub argmax: Option<usize>,
    pub per_point: Vec<usize>,
    /// Points whose multiplicity exceeds the cap.
    pub offenders: Vec<usize>,
}

/// Count, for every point, the closed balls containing it.
pub fn audit_multiplicity<T: MetricElement>(
    balls: &[Ball<T>],
    points: &[T],
    cap: &BigUint,
    prec: &Precision,
) -> Result<MultiplicityAudit> {
    check_center_separation(balls, prec)?;
    let per_point: Vec<usize> = points.iter().map(|p| balls.iter().filter(|b| b.contains(p, prec)).count()).collect();
    let mut max_multiplicity = 0;
    let mut argmax = None;
    for (i, &m) in per_point.iter().enumerate() {
        if m > max_multiplicity {
            max_multiplicity = m;
            argmax = Some(i);
        }
    }
    let offenders = per_point.iter().enumerate().filter(|(_, &m)| BigUint::from(m) > *cap).map(|(i, _)| i).collect();
    Ok(MultiplicityAudit { max_multiplicity, argmax, per_point, offenders })
}

/// Spheres of radius `r/2` at `C_i = P + r/|Q_i − P|·(Q_i − P)`, all touching the
/// sphere of radius `r/2` around `P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KissingConfig {
    pub base: String,
    /// Enclosure of `r = min |Q_i − P|`.
    pub radius: IntervalRecord,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub radius_sq: Option<String>,
    /// Indices of the input balls that produced a sphere (centers distinct from `P`).
    pub spheres: Vec<usize>,
    pub touching: bool,
    pub non_overlapping: bool,
    pub overlapping_pairs: Vec<(usize, usize)>,
}

impl KissingConfig {
    pub fn is_valid(&self) -> bool {
        self.touching && self.non_overlapping
    }
}

/// Construct the touching configuration for `p` and the balls containing it.
pub fn construct_kissing<T: MetricElement>(p: &T, balls: &[Ball<T>], prec: &Precision) -> Result<KissingConfig> {
    T::construct_kissing(p, balls, prec)
}
