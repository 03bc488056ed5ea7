//! Finite-set ring operations: sumset, productset, ratio profile with left and
//! right multiplicities, multiplicative energy, and hexadecant partitioning.

mod io;
mod profile;

pub use io::{profile_csv, AnySet};
pub use profile::{ratio_profile, ratio_profile_brute, RatioEntry, RatioProfile};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::quaternion::hexadecant_label;
use crate::exactnum::{RQuaternion, Rational, RingElement, SetKind};

/// Finite set of distinct ring elements in insertion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementSet<T> {
    elements: Vec<T>,
}

impl<T: RingElement> ElementSet<T> {
    /// Build a set, dropping exact duplicates (first occurrence wins).
    pub fn new(items: impl IntoIterator<Item = T>) -> Self {
        let mut seen = std::collections::HashSet::new();
        let elements = items.into_iter().filter(|x| seen.insert(x.canonical_key())).collect();
        ElementSet { elements }
    }

    /// Build a set ordered by canonical key.
    pub fn sorted(items: impl IntoIterator<Item = T>) -> Self {
        let map: BTreeMap<Vec<u8>, T> = items.into_iter().map(|x| (x.canonical_key(), x)).collect();
        ElementSet { elements: map.into_values().collect() }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.elements.iter()
    }

    pub fn kind(&self) -> Option<SetKind> {
        self.elements.first().map(RingElement::kind)
    }

    pub fn contains(&self, x: &T) -> bool {
        self.elements.contains(x)
    }

    /// The set with zero removed, and whether zero was present.
    pub fn without_zero(&self) -> (Self, bool) {
        let had = self.elements.iter().any(RingElement::is_zero);
        let elements = self.elements.iter().filter(|x| !x.is_zero()).cloned().collect();
        (ElementSet { elements }, had)
    }

    /// Every element has an inverse.
    pub fn check_invertible(&self) -> Result<()> {
        match self.elements.iter().find(|x| x.inverse().is_err()) {
            Some(x) => Err(Error::NonInvertibleElement(x.to_string())),
            None => Ok(()),
        }
    }

    pub fn inverses(&self) -> Result<Vec<T>> {
        self.elements.iter().map(|x| x.inverse().map_err(|_| Error::NonInvertibleElement(x.to_string()))).collect()
    }
}

impl<T> Default for ElementSet<T> {
    fn default() -> Self {
        ElementSet { elements: Vec::new() }
    }
}

impl<T: RingElement> FromIterator<T> for ElementSet<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        ElementSet::new(iter)
    }
}

/// `{a + b}` over unordered pairs including `a + a`, sorted by canonical key.
pub fn sumset<T: RingElement>(a: &ElementSet<T>) -> ElementSet<T> {
    let e = a.elements();
    ElementSet::sorted((0..e.len()).flat_map(|i| (i..e.len()).map(move |j| e[i].plus(&e[j]))))
}

/// `{ab}` over ordered pairs, sorted by canonical key.
pub fn productset<T: RingElement>(a: &ElementSet<T>) -> ElementSet<T> {
    let e = a.elements();
    ElementSet::sorted(e.iter().flat_map(|x| e.iter().map(move |y| x.times(y))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyMethod {
    Fast,
    Brute,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyResult {
    pub value: u64,
    pub method: EnergyMethod,
}

/// Multiplicative energy `#{(a,b,c,d) ∈ A⁴ : ca = db}`.
pub fn energy<T: RingElement>(a: &ElementSet<T>, method: EnergyMethod) -> Result<EnergyResult> {
    a.check_invertible()?;
    let value = match method {
        EnergyMethod::Fast => ratio_profile(a)?.energy(),
        EnergyMethod::Brute => energy_brute(a),
    };
    Ok(EnergyResult { value, method })
}

fn energy_brute<T: RingElement>(a: &ElementSet<T>) -> u64 {
    let e = a.elements();
    // prod[c][a] = c·a
    let prod: Vec<Vec<T>> = e.iter().map(|c| e.iter().map(|x| c.times(x)).collect()).collect();
    let mut count = 0u64;
    for lhs in prod.iter().flatten() {
        for rhs in prod.iter().flatten() {
            if lhs == rhs {
                count += 1;
            }
        }
    }
    count
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CauchySchwarz {
    pub energy: u64,
    pub productset_size: usize,
    /// `|A|⁴ / |AA|`.
    pub bound: Rational,
    pub holds: bool,
}

/// Checks `E(A)·|AA| >= |A|⁴` with the brute-force energy.
pub fn cauchy_schwarz_check<T: RingElement>(a: &ElementSet<T>) -> Result<CauchySchwarz> {
    let (a, _) = a.without_zero();
    let e = energy(&a, EnergyMethod::Brute)?.value;
    let pp = productset(&a).len();
    let n4 = BigInt::from(a.len()).pow(4);
    let holds = BigInt::from(e) * BigInt::from(pp) >= n4;
    let bound = if pp == 0 { Rational::from_integer(0.into()) } else { Rational::new(n4, BigInt::from(pp)) };
    Ok(CauchySchwarz { energy: e, productset_size: pp, bound, holds })
}

/// One sign-pattern class of a quaternion set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HexadecantClass {
    /// Bit `i` set when coordinate `i` is negative (zero counts as nonnegative).
    pub pattern: u8,
    pub set: ElementSet<RQuaternion>,
}

impl HexadecantClass {
    pub fn label(&self) -> String {
        hexadecant_label(self.pattern)
    }
}

/// Partition `A \ {0}` by coordinatewise sign, largest class first.
pub fn hexadecant_partition(a: &ElementSet<RQuaternion>) -> Vec<HexadecantClass> {
    let mut buckets: BTreeMap<u8, Vec<RQuaternion>> = BTreeMap::new();
    for q in a.iter().filter(|q| !q.is_zero()) {
        buckets.entry(q.hexadecant()).or_default().push(q.clone());
    }
    let mut classes: Vec<HexadecantClass> =
        buckets.into_iter().map(|(pattern, v)| HexadecantClass { pattern, set: ElementSet::new(v) }).collect();
    classes.sort_by(|a, b| b.set.len().cmp(&a.set.len()).then(a.pattern.cmp(&b.pattern)));
    classes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};
    use crate::exactnum::{GaussianRational, RMatrix};

    fn reals(v: &[i64]) -> ElementSet<RQuaternion> {
        v.iter().map(|&x| RQuaternion::real(int(x))).collect()
    }

    #[test]
    fn sumset_examples() {
        let s = sumset(&reals(&[1, 2, 3]));
        assert_eq!(s, ElementSet::sorted((2..=6).map(|x| RQuaternion::real(int(x)))));
        let units: ElementSet<RQuaternion> =
            vec![RQuaternion::one(), RQuaternion::i(), RQuaternion::j()].into_iter().collect();
        // 1+1, 1+i, 1+j, i+i, i+j, j+j are pairwise distinct
        let oracle = [(2, 0, 0, 0), (1, 1, 0, 0), (1, 0, 1, 0), (0, 2, 0, 0), (0, 1, 1, 0), (0, 0, 2, 0)];
        let expected = ElementSet::sorted(oracle.iter().map(|&(w, x, y, z)| RQuaternion::from_ints(w, x, y, z)));
        assert_eq!(sumset(&units), expected);
        assert_eq!(expected.len(), 6);
    }

    #[test]
    fn productset_examples() {
        let p = productset(&reals(&[1, 2, 3]));
        assert_eq!(p, ElementSet::sorted([1, 2, 3, 4, 6, 9].map(|x| RQuaternion::real(int(x)))));
        let ij: ElementSet<RQuaternion> = vec![RQuaternion::i(), RQuaternion::j()].into_iter().collect();
        let p = productset(&ij);
        assert_eq!(p.len(), 3);
        assert!(p.contains(&-&RQuaternion::one()));
        assert!(p.contains(&RQuaternion::k()));
        assert!(p.contains(&-&RQuaternion::k()));
    }

    #[test]
    fn energy_examples() {
        let a = reals(&[1, 2, 4]);
        assert_eq!(energy(&a, EnergyMethod::Brute).unwrap().value, 19);
        assert_eq!(energy(&a, EnergyMethod::Fast).unwrap().value, 19);
        let single = reals(&[5]);
        assert_eq!(energy(&single, EnergyMethod::Fast).unwrap().value, 1);
        assert_eq!(
            energy(&reals(&[0, 1]), EnergyMethod::Fast),
            Err(Error::NonInvertibleElement("(0/1,0/1,0/1,0/1)".into()))
        );
    }

    #[test]
    fn energy_of_matrices() {
        let m = |a: i64, b: i64| {
            RMatrix::from_rows(vec![
                vec![GaussianRational::from_ints(a, 0), GaussianRational::from_ints(b, 0)],
                vec![GaussianRational::zero(), GaussianRational::one()],
            ])
            .unwrap()
        };
        let set: ElementSet<RMatrix> = vec![m(1, 0), m(2, 1), m(1, 3), m(4, 0)].into_iter().collect();
        assert_eq!(energy(&set, EnergyMethod::Fast).unwrap().value, energy(&set, EnergyMethod::Brute).unwrap().value);
    }

    #[test]
    fn cauchy_schwarz_examples() {
        let cs = cauchy_schwarz_check(&reals(&[1, 2, 4])).unwrap();
        assert_eq!(cs.energy, 19);
        // AA = {1,2,4,8,16}
        assert_eq!(cs.productset_size, 5);
        assert_eq!(cs.bound, rat(81, 5));
        assert!(cs.holds);
        let cs = cauchy_schwarz_check(&reals(&[3])).unwrap();
        assert_eq!((cs.energy, cs.productset_size, cs.holds), (1, 1, true));
    }

    #[test]
    fn hexadecant_examples() {
        let parts = hexadecant_partition(&reals(&[1, 2, -1]));
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].label(), "++++");
        assert_eq!(parts[0].set.len(), 2);
        assert_eq!(parts[1].label(), "-+++");

        let mut all = Vec::new();
        for bits in 0..16u8 {
            let s = |i: u8| if bits & (1 << i) != 0 { -1 } else { 1 };
            all.push(RQuaternion::from_ints(s(0), s(1), s(2), s(3)));
        }
        let parts = hexadecant_partition(&all.into_iter().collect());
        assert_eq!(parts.len(), 16);
        assert!(parts.iter().all(|c| c.set.len() == 1));

        let parts = hexadecant_partition(&reals(&[0, 1, -2, 3]));
        assert_eq!(parts.iter().map(|c| c.set.len()).sum::<usize>(), 3);
    }
}
