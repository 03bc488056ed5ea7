//! Exploratory hill-climbing for small sets of integer 2×2 matrices with few sums
//! and products. Results are descriptive only.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::rational::int;
use crate::exactnum::RMatrix;

type M2 = [i64; 4];

fn det(m: &M2) -> i64 {
    m[0] * m[3] - m[1] * m[2]
}

fn sub(a: &M2, b: &M2) -> M2 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

fn add(a: &M2, b: &M2) -> M2 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

fn mul(a: &M2, b: &M2) -> M2 {
    [a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]]
}

/// Every element invertible and every pairwise difference invertible.
pub fn admissible(set: &[M2]) -> bool {
    set.iter().all(|m| det(m) != 0)
        && (0..set.len()).all(|i| (i + 1..set.len()).all(|j| det(&sub(&set[i], &set[j])) != 0))
}

/// `(|A+A|, |AA|)`.
pub fn growth(set: &[M2]) -> (usize, usize) {
    let mut sums = HashSet::new();
    let mut prods = HashSet::new();
    for (i, a) in set.iter().enumerate() {
        for b in &set[i..] {
            sums.insert(add(a, b));
        }
        for b in set {
            prods.insert(mul(a, b));
        }
    }
    (sums.len(), prods.len())
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub n: usize,
    pub seed: u64,
    pub restarts: usize,
    pub steps: usize,
    pub entry_bound: i64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { n: 8, seed: 0, restarts: 4, steps: 400, entry_bound: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub n: usize,
    pub sumset: usize,
    pub productset: usize,
    pub objective: usize,
    /// `log max(|A+A|, |AA|) / log n`, six decimals.
    pub exponent: String,
    pub matrices: Vec<serde_json::Value>,
    pub note: String,
}

fn random_set(cfg: &SearchConfig, rng: &mut ChaCha8Rng) -> Result<Vec<M2>> {
    let b = cfg.entry_bound;
    for _ in 0..10_000 {
        let mut set: Vec<M2> = Vec::with_capacity(cfg.n);
        for _ in 0..cfg.n * 50 {
            if set.len() == cfg.n {
                break;
            }
            let m = [(); 4].map(|_| rng.gen_range(-b..=b));
            set.push(m);
            if !admissible(&set) {
                set.pop();
            }
        }
        if set.len() == cfg.n {
            return Ok(set);
        }
    }
    Err(Error::BadSpec(format!("no admissible {}-element set with entries in [-{b}, {b}]", cfg.n)))
}

pub fn search(cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.n < 2 {
        return Err(Error::BadSpec("search needs n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let objective = |s: &[M2]| {
        let (a, b) = growth(s);
        a.max(b)
    };
    let mut best: Option<(usize, Vec<M2>)> = None;
    for _ in 0..cfg.restarts.max(1) {
        let mut cur = random_set(cfg, &mut rng)?;
        let mut score = objective(&cur);
        for _ in 0..cfg.steps {
            let mut next = cur.clone();
            let (i, e) = (rng.gen_range(0..cfg.n), rng.gen_range(0..4));
            let v = next[i][e] + if rng.gen_bool(0.5) { 1 } else { -1 };
            if v.abs() > cfg.entry_bound {
                continue;
            }
            next[i][e] = v;
            if !admissible(&next) {
                continue;
            }
            let s = objective(&next);
            if s <= score {
                cur = next;
                score = s;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| score < *b) {
            best = Some((score, cur));
        }
    }
    let (score, set) = best.expect("at least one restart");
    let (s, p) = growth(&set);
    let exponent = (score as f64).ln() / (cfg.n as f64).ln();
    Ok(SearchResult {
        n: cfg.n,
        sumset: s,
        productset: p,
        objective: score,
        exponent: format!("{exponent:.6}"),
        matrices: set
            .iter()
            .map(|m| RMatrix::from_real(2, m.iter().map(|&x| int(x)).collect()).expect("2x2").to_json())
            .collect(),
        note: "exploratory local search; not a bound".into(),
    })
}
