use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::FamilyParams;
use crate::error::{Error, Result};
use crate::exactnum::interval::{interval_op1_norm, op1_norm_bits};
use crate::exactnum::rational::{fmt_rational, int, round_dyadic, sqrt_bounds};
use crate::exactnum::{ComplexInterval, GaussianRational, Interval, NormEnclosure, Precision, RMatrix, Rational};
use crate::setalgebra::ElementSet;

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(0.0)
}

fn from_f64(x: f64, bits: u32) -> Rational {
    let r = Rational::from_float(x).unwrap_or_else(Rational::zero);
    round_dyadic(&r, bits)
}

/// Enclosure of the principal `k`-th root of `z` (argument in `(−π/k, π/k]`),
/// with box half-width at most `2^-bits`.
pub fn kth_root(z: &GaussianRational, k: u32, bits: u32) -> Result<ComplexInterval> {
    if z.is_zero() {
        return Err(Error::Singular);
    }
    if k == 1 {
        return Ok(ComplexInterval::point(z));
    }
    let (re, im) = (to_f64(&z.re), to_f64(&z.im));
    let modulus = re.hypot(im).powf(1.0 / k as f64);
    let arg = im.atan2(re) / k as f64;
    let mut w = GaussianRational::new(from_f64(modulus * arg.cos(), 60), from_f64(modulus * arg.sin(), 60));
    if w.is_zero() {
        w = GaussianRational::one();
    }
    let target = Rational::one() / Rational::from_integer(num_bigint::BigInt::one() << bits);
    let kk = int(k as i64);
    for _ in 0..64 {
        let wk1 = w.pow(k - 1);
        let wk = &wk1 * &w;
        let f = &wk - z;
        if f.is_zero() {
            return Ok(ComplexInterval::point(&w));
        }
        // Some root lies within |f(w)|/|w|^(k-1) of w.
        let r_sq = f.norm_sq() / wk1.norm_sq();
        let (_, r_hi) = sqrt_bounds(&r_sq, bits + 4);
        let unique = &kk + int(1);
        if r_hi <= target && &unique * &unique * &r_hi * &r_hi < w.norm_sq() {
            return Ok(ComplexInterval::around(&w, &r_hi));
        }
        let next_num = &wk.scale(&(&kk - int(1))) + z;
        let next = next_num.div(&wk1.scale(&kk))?;
        w = GaussianRational::new(round_dyadic(&next.re, bits + 20), round_dyadic(&next.im, bits + 20));
    }
    Err(Error::Unresolved("k-th root did not converge".into()))
}

/// `A/ρ(A)` where `ρ(A)` is the principal `k`-th root of `det A`.
#[derive(Clone, Debug)]
pub struct NormalizedMatrix {
    pub original: RMatrix,
    pub rho: ComplexInterval,
    pub tilde: Vec<ComplexInterval>,
    pub bits: u32,
}

pub fn normalize(a: &RMatrix, bits: u32) -> Result<NormalizedMatrix> {
    let det = a.det();
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let rho = kth_root(&det, a.dim() as u32, bits + 8)?.round_out(bits + 8);
    let sigma = rho.recip()?;
    let tilde = a.entries().iter().map(|e| sigma.mul_exact(e).round_out(bits + 4)).collect();
    Ok(NormalizedMatrix { original: a.clone(), rho, tilde, bits })
}

impl NormalizedMatrix {
    /// Treat `a` as already normalized (`ρ = 1`, `Ã = A`) without checking its determinant.
    pub fn assume_normalized(a: &RMatrix) -> Self {
        NormalizedMatrix {
            original: a.clone(),
            rho: ComplexInterval::point(&GaussianRational::one()),
            tilde: a.entries().iter().map(ComplexInterval::point).collect(),
            bits: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.original.dim()
    }

    /// Recompute at a finer budget; exact normalizations are returned unchanged.
    pub fn at_bits(&self, bits: u32) -> Result<NormalizedMatrix> {
        if self.rho.re.is_point() && self.rho.im.is_point() {
            return Ok(self.clone());
        }
        normalize(&self.original, bits)
    }

    pub fn is_exact(&self) -> bool {
        self.tilde.iter().all(|c| c.re.is_point() && c.im.is_point())
    }

    pub fn det_tilde(&self) -> ComplexInterval {
        let sigma = match self.rho.recip() {
            Ok(s) => s,
            Err(_) => return ComplexInterval::new(Interval::new(int(-1), int(1)), Interval::new(int(-1), int(1))),
        };
        let mut acc = ComplexInterval::point(&self.original.det());
        for _ in 0..self.dim() {
            acc = acc.mul(&sigma);
        }
        acc
    }

    pub fn norm(&self) -> NormEnclosure {
        interval_op1_norm(&self.tilde, self.dim(), self.bits + 4)
    }

    pub fn tilde_point(&self, i: usize, j: usize) -> &ComplexInterval {
        &self.tilde[i * self.dim() + j]
    }
}

pub(crate) fn imat_mul(a: &[ComplexInterval], b: &[ComplexInterval], k: usize) -> Vec<ComplexInterval> {
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let mut acc = ComplexInterval::point(&GaussianRational::zero());
            for t in 0..k {
                acc = acc.add(&a[i * k + t].mul(&b[t * k + j]));
            }
            out.push(acc);
        }
    }
    out
}

/// Enclosure of `||A||₁·||A⁻¹||₁` with width at most `width`.
pub fn condition_number(a: &RMatrix, width: &Rational) -> Result<NormEnclosure> {
    let inv = a.inverse()?;
    let mut bits = crate::exactnum::rational::bits_for_width(width) + 4;
    loop {
        let c = op1_norm_bits(a, bits).mul(&op1_norm_bits(&inv, bits));
        if c.width() <= *width || bits > 4096 {
            return Ok(c);
        }
        bits *= 2;
    }
}

/// Quadrant of `ρ(A)` and the grid cell (1-based) of every entry component of `Ã`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassKey {
    pub quadrant: u8,
    pub cells: Vec<u64>,
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}:", self.quadrant)?;
        let cells: Vec<String> = self.cells.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", cells.join("."))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SignClass {
    Neg,
    NonNeg,
    Unknown,
}

fn sign_class(x: &Interval) -> SignClass {
    if x.lo.is_positive() || (x.lo.is_zero() && x.hi.is_zero()) {
        SignClass::NonNeg
    } else if x.hi.is_negative() {
        SignClass::Neg
    } else if x.lo.is_zero() {
        SignClass::NonNeg
    } else {
        SignClass::Unknown
    }
}

/// Quadrant of an enclosure; zero components count as nonnegative. `None` when ambiguous.
fn quadrant(z: &ComplexInterval, force: bool) -> Option<u8> {
    let resolve = |s: SignClass| match s {
        SignClass::Unknown if force => Some(true),
        SignClass::Unknown => None,
        s => Some(s == SignClass::NonNeg),
    };
    let re = resolve(sign_class(&z.re))?;
    let im = resolve(sign_class(&z.im))?;
    Some(match (re, im) {
        (true, true) => 1,
        (false, true) => 2,
        (false, false) => 3,
        (true, false) => 4,
    })
}

fn cell_of(x: &Rational, bound: &Rational, cells: u64) -> u64 {
    let scaled = (x + bound) * Rational::from_integer(cells.into()) / (int(2) * bound);
    let idx = scaled.floor().to_integer().to_u64().unwrap_or(0);
    idx.min(cells - 1) + 1
}

/// Cell of an enclosure; `Ok(None)` when it straddles a boundary and `force` is off.
fn cell(x: &Interval, params: &FamilyParams, cells: u64, force: bool, what: &str) -> Result<Option<u64>> {
    let bound = params.entry_bound();
    if x.lo > bound || x.hi < -&bound {
        return Err(Error::CondBoundViolated(format!(
            "{what} component in [{}, {}] outside [-{}, {}]",
            fmt_rational(&x.lo),
            fmt_rational(&x.hi),
            fmt_rational(&bound),
            fmt_rational(&bound)
        )));
    }
    let lo = std::cmp::max(x.lo.clone(), -&bound);
    let hi = std::cmp::min(x.hi.clone(), bound.clone());
    let (a, b) = (cell_of(&lo, &bound, cells), cell_of(&hi, &bound, cells));
    let in_range = x.lo >= -&bound && x.hi <= bound;
    if (a == b && in_range) || force {
        Ok(Some(a))
    } else {
        Ok(None)
    }
}

fn try_key(n: &NormalizedMatrix, params: &FamilyParams, cells: u64, force: bool) -> Result<Option<ClassKey>> {
    let Some(q) = quadrant(&n.rho, force) else { return Ok(None) };
    let mut out = Vec::with_capacity(2 * n.tilde.len());
    for (idx, z) in n.tilde.iter().enumerate() {
        let what = format!("entry {idx}");
        for part in [&z.re, &z.im] {
            match cell(part, params, cells, force, &what)? {
                Some(c) => out.push(c),
                None => return Ok(None),
            }
        }
    }
    Ok(Some(ClassKey { quadrant: q, cells: out }))
}

/// Class of one matrix, refining until every component is resolved. At the floor,
/// a straddling component is assigned to the lower cell and a warning is returned.
pub fn class_key(a: &RMatrix, params: &FamilyParams, prec: &Precision) -> Result<(ClassKey, Option<String>)> {
    let cells = params.cells_u64()?;
    let schedule = prec.schedule();
    let mut last = None;
    for &bits in &schedule {
        let n = normalize(a, bits)?;
        if let Some(k) = try_key(&n, params, cells, false)? {
            return Ok((k, None));
        }
        last = Some(n);
    }
    let n = last.expect("non-empty schedule");
    let key = try_key(&n, params, cells, true)?.expect("forced key");
    Ok((key, Some(format!("class of {a} unresolved at floor; assigned lower cell"))))
}

/// Classes sorted by size (largest first), then by key.
#[derive(Clone, Debug)]
pub struct ClassPartition {
    pub classes: Vec<(ClassKey, ElementSet<RMatrix>)>,
    pub warnings: Vec<String>,
}

impl ClassPartition {
    pub fn largest(&self) -> Option<&(ClassKey, ElementSet<RMatrix>)> {
        self.classes.first()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|(_, s)| s.len()).collect()
    }
}

pub fn class_partition(set: &ElementSet<RMatrix>, params: &FamilyParams, prec: &Precision) -> Result<ClassPartition> {
    let mut groups: BTreeMap<ClassKey, Vec<RMatrix>> = BTreeMap::new();
    let mut warnings = Vec::new();
    let tight = crate::exactnum::rational::pow2_neg(20);
    for a in set.iter() {
        if a.dim() != params.k {
            return Err(Error::DimensionMismatch(params.k, a.dim()));
        }
        let cond = condition_number(a, &tight)?;
        if cond.lo > params.m {
            return Err(Error::CondBoundViolated(format!(
                "cond({a}) >= {} > M = {}",
                fmt_rational(&cond.lo),
                fmt_rational(&params.m)
            )));
        }
        if cond.hi > params.m {
            warnings.push(format!("cond({a}) within enclosure width of M"));
        }
        let (key, warn) = class_key(a, params, prec)?;
        warnings.extend(warn);
        groups.entry(key).or_default().push(a.clone());
    }
    let mut classes: Vec<(ClassKey, ElementSet<RMatrix>)> =
        groups.into_iter().map(|(k, v)| (k, ElementSet::new(v))).collect();
    classes.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then_with(|| a.0.cmp(&b.0)));
    Ok(ClassPartition { classes, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{pow2_neg, rat};

    fn g(re: i64, im: i64) -> GaussianRational {
        GaussianRational::from_ints(re, im)
    }

    #[test]
    fn kth_root_encloses_a_root() {
        let cases = [(g(4, 0), 2u32), (g(-1, 0), 2), (g(3, 4), 3), (g(0, -7), 4), (g(2, 0), 2)];
        for (z, k) in cases {
            let r = kth_root(&z, k, 40).unwrap();
            assert!(r.max_width() <= pow2_neg(39));
            // r^k must enclose z
            let mut p = r.clone();
            for _ in 1..k {
                p = p.mul(&r);
            }
            assert!(p.contains(&z), "{z} k={k}");
        }
        let r = kth_root(&g(4, 0), 2, 30).unwrap();
        assert!(r.contains(&g(2, 0)));
        let r = kth_root(&g(-1, 0), 2, 30).unwrap();
        assert!(r.contains(&g(0, 1)), "principal root of -1 is i");
    }

    #[test]
    fn normalize_examples() {
        let a = RMatrix::scalar(2, g(2, 0));
        let n = normalize(&a, 30).unwrap();
        assert!(n.rho.contains(&g(2, 0)));
        assert!(n.is_exact());
        assert_eq!(n.tilde[0], ComplexInterval::point(&g(1, 0)));
        assert_eq!(n.tilde[1], ComplexInterval::point(&g(0, 0)));

        let u = RMatrix::from_real(2, vec![int(1), rat(3, 7), int(0), int(1)]).unwrap();
        let n = normalize(&u, 30).unwrap();
        assert!(n.is_exact());
        assert_eq!(n.tilde[1], ComplexInterval::point(&GaussianRational::real(rat(3, 7))));

        let rot = RMatrix::from_real(2, vec![int(0), int(-1), int(1), int(0)]).unwrap();
        let n = normalize(&rot, 30).unwrap();
        assert!(n.rho.contains(&g(1, 0)));
        let c = condition_number(&rot, &pow2_neg(20)).unwrap();
        assert_eq!(c, Interval::point(int(1)));

        assert!(matches!(normalize(&RMatrix::zero(2), 30), Err(Error::Singular)));
    }

    #[test]
    fn normalized_determinant_contains_one() {
        let a = RMatrix::from_rows(vec![vec![g(1, 2), g(3, 0)], vec![g(0, 1), g(5, -1)]]).unwrap();
        let n = normalize(&a, 40).unwrap();
        assert!(n.det_tilde().contains(&g(1, 0)));
        assert!(n.det_tilde().max_width() < pow2_neg(20));
    }

    #[test]
    fn condition_number_examples() {
        assert_eq!(condition_number(&RMatrix::identity(3), &pow2_neg(10)).unwrap(), Interval::point(int(1)));
        let d = RMatrix::from_real(2, vec![int(2), int(0), int(0), int(1)]).unwrap();
        assert_eq!(condition_number(&d, &pow2_neg(10)).unwrap(), Interval::point(int(2)));
        let a = RMatrix::from_rows(vec![vec![g(1, 1), g(0, 1)], vec![g(2, 0), g(1, -1)]]).unwrap();
        let c = condition_number(&a, &pow2_neg(30)).unwrap();
        assert!(c.width() <= pow2_neg(30));
        // scaling invariance
        let c2 = condition_number(&a.scale(&g(3, 4)), &pow2_neg(30)).unwrap();
        assert!(c.overlaps(&c2));
    }

    #[test]
    fn quadrant_convention() {
        let pt = |re: i64, im: i64| ComplexInterval::point(&g(re, im));
        assert_eq!(quadrant(&pt(1, 1), false), Some(1));
        assert_eq!(quadrant(&pt(0, 0), false), Some(1));
        assert_eq!(quadrant(&pt(-1, 0), false), Some(2));
        assert_eq!(quadrant(&pt(0, -1), false), Some(4));
        assert_eq!(quadrant(&pt(-1, -1), false), Some(3));
        let straddle = ComplexInterval::new(Interval::new(int(-1), int(1)), Interval::point(int(1)));
        assert_eq!(quadrant(&straddle, false), None);
        assert_eq!(quadrant(&straddle, true), Some(1));
    }

    #[test]
    fn different_quadrants_give_different_keys() {
        let params = FamilyParams::new(1, int(1)).unwrap();
        let prec = Precision::default();
        let set = ElementSet::new(vec![RMatrix::scalar(1, g(2, 0)), RMatrix::scalar(1, g(-2, 0))]);
        let p = class_partition(&set, &params, &prec).unwrap();
        assert_eq!(p.classes.len(), 2);
        let quads: Vec<u8> = p.classes.iter().map(|(k, _)| k.quadrant).collect();
        assert!(quads.contains(&1) && quads.contains(&2));
    }

    #[test]
    fn cells_cover_the_range() {
        assert_eq!(cell_of(&int(-2), &int(2), 4), 1);
        assert_eq!(cell_of(&int(2), &int(2), 4), 4);
        assert_eq!(cell_of(&int(0), &int(2), 4), 3);
        assert_eq!(cell_of(&rat(-1, 1000), &int(2), 4), 2);
    }

    #[test]
    fn condition_bound_enforced() {
        let params = FamilyParams::new(2, int(1)).unwrap();
        let d = RMatrix::from_real(2, vec![int(2), int(0), int(0), int(1)]).unwrap();
        let set = ElementSet::new(vec![d]);
        assert!(matches!(class_partition(&set, &params, &Precision::default()), Err(Error::CondBoundViolated(_))));
    }
}
