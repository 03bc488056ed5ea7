use std::collections::BTreeMap;

use super::ElementSet;
use crate::error::Result;
use crate::exactnum::RingElement;

/// All index pairs realizing one ratio value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairClass<T> {
    pub value: T,
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioEntry<T> {
    pub value: T,
    /// `#{(a,b) : ab⁻¹ = x}`
    pub left: usize,
    /// `#{(c,d) : c⁻¹d = x}`
    pub right: usize,
}

/// Left ratios `ab⁻¹`, right ratios `c⁻¹d`, and their intersection (the ratioset)
/// keyed by canonical key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioProfile<T> {
    pub size: usize,
    pub left: BTreeMap<Vec<u8>, PairClass<T>>,
    pub right: BTreeMap<Vec<u8>, PairClass<T>>,
    pub entries: BTreeMap<Vec<u8>, RatioEntry<T>>,
}

impl<T: RingElement> RatioProfile<T> {
    fn assemble(size: usize, left: BTreeMap<Vec<u8>, PairClass<T>>, right: BTreeMap<Vec<u8>, PairClass<T>>) -> Self {
        let entries = left
            .iter()
            .filter_map(|(key, l)| {
                right.get(key).map(|r| {
                    (key.clone(), RatioEntry { value: l.value.clone(), left: l.pairs.len(), right: r.pairs.len() })
                })
            })
            .collect();
        RatioProfile { size, left, right, entries }
    }

    pub fn ell(&self, key: &[u8]) -> usize {
        self.left.get(key).map_or(0, |c| c.pairs.len())
    }

    pub fn r(&self, key: &[u8]) -> usize {
        self.right.get(key).map_or(0, |c| c.pairs.len())
    }

    /// `Σ_x ℓ(x)·r(x)`.
    pub fn energy(&self) -> u64 {
        self.entries.values().map(|e| (e.left * e.right) as u64).sum()
    }

    pub fn left_total(&self) -> usize {
        self.left.values().map(|c| c.pairs.len()).sum()
    }

    pub fn right_total(&self) -> usize {
        self.right.values().map(|c| c.pairs.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One keyed pass over `A²` per side.
pub fn ratio_profile<T: RingElement>(a: &ElementSet<T>) -> Result<RatioProfile<T>> {
    let inv = a.inverses()?;
    let e = a.elements();
    let mut left: BTreeMap<Vec<u8>, PairClass<T>> = BTreeMap::new();
    let mut right: BTreeMap<Vec<u8>, PairClass<T>> = BTreeMap::new();
    for i in 0..e.len() {
        for j in 0..e.len() {
            let l = e[i].times(&inv[j]);
            left.entry(l.canonical_key())
                .or_insert_with(|| PairClass { value: l, pairs: Vec::new() })
                .pairs
                .push((i, j));
            let r = inv[i].times(&e[j]);
            right
                .entry(r.canonical_key())
                .or_insert_with(|| PairClass { value: r, pairs: Vec::new() })
                .pairs
                .push((i, j));
        }
    }
    Ok(RatioProfile::assemble(e.len(), left, right))
}

/// Same profile built by exact pairwise comparison, without hashing or keyed maps
/// during the scan.
pub fn ratio_profile_brute<T: RingElement>(a: &ElementSet<T>) -> Result<RatioProfile<T>> {
    let inv = a.inverses()?;
    let e = a.elements();
    let mut left: Vec<PairClass<T>> = Vec::new();
    let mut right: Vec<PairClass<T>> = Vec::new();
    let push =
        |classes: &mut Vec<PairClass<T>>, v: T, pair: (usize, usize)| match classes.iter_mut().find(|c| c.value == v) {
            Some(c) => c.pairs.push(pair),
            None => classes.push(PairClass { value: v, pairs: vec![pair] }),
        };
    for i in 0..e.len() {
        for j in 0..e.len() {
            push(&mut left, e[i].times(&inv[j]), (i, j));
            push(&mut right, inv[i].times(&e[j]), (i, j));
        }
    }
    let keyed = |v: Vec<PairClass<T>>| v.into_iter().map(|c| (c.value.canonical_key(), c)).collect();
    Ok(RatioProfile::assemble(e.len(), keyed(left), keyed(right)))
}
