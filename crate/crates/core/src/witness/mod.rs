//! The witness construction behind the energy bound: side and dyadic-level
//! selection, the nearest-element map, witness sets `S_x`, quadruple recovery,
//! and a certificate builder with an independent brute-force verifier.

mod certificate;
mod pipeline;

pub use certificate::{verify_certificate, Certificate, ChainRecord, NearestRecord, WitnessRecord, CERTIFICATE_FIELDS};
pub use pipeline::{ceil_log2, derive_params, run_pipeline, PipelineElement, PipelineOptions, Restriction, Strategy};

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ballgeom::{MetricElement, RadiusRecord};
use crate::error::{Error, Result};
use crate::exactnum::{Precision, RingElement};
use crate::setalgebra::{ElementSet, RatioProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[default]
    /// Ratios `ab⁻¹`, multiplicity `ℓ`.
    Left,
    /// Ratios `c⁻¹d`, multiplicity `r`.
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SidePolicy {
    #[default]
    Auto,
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelRule {
    /// Largest window mass among non-degenerate windows that meet the pigeonhole bound.
    #[default]
    Certifying,
    /// Largest window mass.
    MaxMass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: u32,
    pub size: usize,
    pub mass: u64,
}

/// Ratios on the chosen side whose multiplicity lies in `[2^I, 2^(I+1))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicSelection<T> {
    pub side: Side,
    pub level: u32,
    /// Sorted by canonical key.
    pub members: Vec<T>,
    pub multiplicities: Vec<usize>,
    pub mass: u64,
    pub left_sum: u64,
    pub right_sum: u64,
    pub levels: Vec<LevelSummary>,
}

impl<T> DyadicSelection<T> {
    pub fn is_degenerate(&self) -> bool {
        self.members.len() < 2
    }
}

fn floor_log2(n: usize) -> u32 {
    usize::BITS - 1 - n.leading_zeros()
}

/// Largest mass, ties to the smallest level (levels arrive in increasing order).
fn heaviest<'a>(levels: impl Iterator<Item = &'a LevelSummary>) -> Option<&'a LevelSummary> {
    levels.fold(None, |acc: Option<&LevelSummary>, l| match acc {
        Some(b) if b.mass >= l.mass => Some(b),
        _ => Some(l),
    })
}

pub fn select_dyadic<T: RingElement>(
    profile: &RatioProfile<T>,
    policy: SidePolicy,
    rule: LevelRule,
) -> Result<DyadicSelection<T>> {
    if profile.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let mut left_sum = 0u64;
    let mut right_sum = 0u64;
    for e in profile.entries.values() {
        let lr = (e.left * e.right) as u64;
        if e.left >= e.right {
            left_sum += lr;
        }
        if e.left <= e.right {
            right_sum += lr;
        }
    }
    let side = match policy {
        SidePolicy::Left => Side::Left,
        SidePolicy::Right => Side::Right,
        SidePolicy::Auto if left_sum >= right_sum => Side::Left,
        SidePolicy::Auto => Side::Right,
    };
    let mut windows: BTreeMap<u32, Vec<(&T, usize)>> = BTreeMap::new();
    for e in profile.entries.values() {
        let (m, other) = match side {
            Side::Left => (e.left, e.right),
            Side::Right => (e.right, e.left),
        };
        if m >= other && m > 0 {
            windows.entry(floor_log2(m)).or_default().push((&e.value, m));
        }
    }
    let levels: Vec<LevelSummary> = windows
        .iter()
        .map(|(&level, xs)| LevelSummary { level, size: xs.len(), mass: xs.iter().map(|(_, m)| (m * m) as u64).sum() })
        .collect();
    let fallback = heaviest(levels.iter()).expect("at least one window");
    let chosen = match rule {
        LevelRule::MaxMass => fallback,
        LevelRule::Certifying => {
            let energy = profile.energy() as u128;
            let log = ceil_log2(profile.size) as u128;
            let ok = levels
                .iter()
                .filter(|l| l.size >= 2 && (l.size as u128) * (1u128 << (2 * l.level)) * 8 * log >= energy);
            heaviest(ok).unwrap_or(fallback)
        }
    }
    .clone();
    let xs = &windows[&chosen.level];
    Ok(DyadicSelection {
        side,
        level: chosen.level,
        members: xs.iter().map(|(x, _)| (*x).clone()).collect(),
        multiplicities: xs.iter().map(|(_, m)| *m).collect(),
        mass: chosen.mass,
        left_sum,
        right_sum,
        levels,
    })
}

/// `φ(x)` for every `x ∈ R`: a closest element of `R \ {x}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearestMap {
    /// `phi[i]` indexes into `R`.
    pub phi: Vec<usize>,
    pub radii: Vec<RadiusRecord>,
}

/// Nearest neighbor within `r`, ties (and unresolved comparisons) broken by [`MetricElement::tie_cmp`].
pub fn nearest_map<T: MetricElement>(r: &[T], prec: &Precision) -> Result<NearestMap> {
    if r.len() < 2 {
        return Err(Error::DegenerateR(r.len()));
    }
    let mut phi = Vec::with_capacity(r.len());
    for (i, x) in r.iter().enumerate() {
        let mut best: Option<usize> = None;
        for (j, y) in r.iter().enumerate() {
            if j == i {
                continue;
            }
            best = Some(match best {
                None => j,
                Some(b) => {
                    let ord = T::compare_dist(x, y, x, &r[b], prec).unwrap_or(Ordering::Equal);
                    match ord.then_with(|| T::tie_cmp(y, &r[b])) {
                        Ordering::Less => j,
                        _ => b,
                    }
                }
            });
        }
        phi.push(best.expect("at least two elements"));
    }
    let radii = r.iter().zip(&phi).map(|(x, &j)| T::radius_record(x, &r[j], prec)).collect();
    Ok(NearestMap { phi, radii })
}

/// One element `(p, q) = (a + c, b + d)` of a witness set with its generating quadruple (indices into `A`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPair<T> {
    pub p: T,
    pub q: T,
    pub quad: [usize; 4],
}

impl<T: RingElement> WitnessPair<T> {
    pub fn key(&self) -> Vec<u8> {
        let mut k = self.p.canonical_key();
        self.q.write_key(&mut k);
        k
    }

    /// `pq⁻¹` on the left side, `q⁻¹p` on the right.
    pub fn quotient(&self, side: Side) -> Result<T> {
        let qi = self.q.inverse()?;
        Ok(match side {
            Side::Left => self.p.times(&qi),
            Side::Right => qi.times(&self.p),
        })
    }
}

/// `(numerator, denominator)` index pairs with ratio `x` on `side`, found by exhaustive scan.
pub fn ratio_pairs<T: RingElement>(a: &ElementSet<T>, x: &T, side: Side) -> Result<Vec<(usize, usize)>> {
    let e = a.elements();
    let inv = a.inverses()?;
    let mut out = Vec::new();
    for (num, en) in e.iter().enumerate() {
        for (den, iv) in inv.iter().enumerate() {
            let v = match side {
                Side::Left => en.times(iv),
                Side::Right => iv.times(en),
            };
            if &v == x {
                out.push((num, den));
            }
        }
    }
    Ok(out)
}

/// Ratio pairs read from a precomputed profile, in the same `(numerator, denominator)` form.
pub fn profile_pairs<T: RingElement>(profile: &RatioProfile<T>, x: &T, side: Side) -> Vec<(usize, usize)> {
    let key = x.canonical_key();
    match side {
        Side::Left => profile.left.get(&key).map(|c| c.pairs.clone()).unwrap_or_default(),
        // right classes store (i, j) for e[i]⁻¹·e[j]
        Side::Right => {
            profile.right.get(&key).map(|c| c.pairs.iter().map(|&(i, j)| (j, i)).collect()).unwrap_or_default()
        }
    }
}

fn witness_from_pairs<T: RingElement>(
    a: &ElementSet<T>,
    xs: &[(usize, usize)],
    ys: &[(usize, usize)],
) -> Vec<WitnessPair<T>> {
    let e = a.elements();
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for &(na, nb) in xs {
        for &(nc, nd) in ys {
            out.push(WitnessPair { p: e[na].plus(&e[nc]), q: e[nb].plus(&e[nd]), quad: [na, nb, nc, nd] });
        }
    }
    out
}

/// `S = {(a+c, b+d) : ab⁻¹ = x, cd⁻¹ = y}` (mirrored with `b⁻¹a`, `d⁻¹c` on the right side),
/// one entry per quadruple, found by exhaustive scan.
pub fn build_witness<T: RingElement>(a: &ElementSet<T>, x: &T, y: &T, side: Side) -> Result<Vec<WitnessPair<T>>> {
    if x == y {
        return Err(Error::Precondition("witness needs distinct ratios".into()));
    }
    Ok(witness_from_pairs(a, &ratio_pairs(a, x, side)?, &ratio_pairs(a, y, side)?))
}

pub fn build_witness_from_profile<T: RingElement>(
    a: &ElementSet<T>,
    profile: &RatioProfile<T>,
    x: &T,
    y: &T,
    side: Side,
) -> Result<Vec<WitnessPair<T>>> {
    if x == y {
        return Err(Error::Precondition("witness needs distinct ratios".into()));
    }
    Ok(witness_from_pairs(a, &profile_pairs(profile, x, side), &profile_pairs(profile, y, side)))
}

/// The unique `(a, b, c, d)` with `a + c = p`, `b + d = q` and ratios `x`, `y` on `side`.
pub fn recover_quadruple<T: RingElement>(p: &T, q: &T, x: &T, y: &T, side: Side) -> Result<(T, T, T, T)> {
    match side {
        Side::Left => {
            // d = (y − x)⁻¹(p − xq), b = q − d, c = yd, a = xb
            let inv = y.minus(x).inverse().map_err(|_| Error::NotInvertibleDifference)?;
            let d = inv.times(&p.minus(&x.times(q)));
            let b = q.minus(&d);
            let c = y.times(&d);
            let a = x.times(&b);
            Ok((a, b, c, d))
        }
        Side::Right => {
            // b = (p − qy)(x − y)⁻¹, d = q − b, a = bx, c = dy
            let inv = x.minus(y).inverse().map_err(|_| Error::NotInvertibleDifference)?;
            let b = p.minus(&q.times(y)).times(&inv);
            let d = q.minus(&b);
            let a = b.times(x);
            let c = d.times(y);
            Ok((a, b, c, d))
        }
    }
}
