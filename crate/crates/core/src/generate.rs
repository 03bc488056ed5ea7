//! Seeded, reproducible set generators.

use std::collections::HashSet;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::rational::{int, rat};
use crate::exactnum::{RQuaternion, Rational};
use crate::matrixlab::{chang_family, cluster_family, ClusterSpec, Perturbation};
use crate::setalgebra::{AnySet, ElementSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Range,
    Geometric,
    RandomQuaternion,
    ClusterMatrix,
    Chang,
    FromFile,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "range" => Family::Range,
            "geometric" => Family::Geometric,
            "random-quaternion" => Family::RandomQuaternion,
            "cluster-matrix" => Family::ClusterMatrix,
            "chang" => Family::Chang,
            "from-file" => Family::FromFile,
            other => return Err(Error::BadSpec(format!("unknown family `{other}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    /// Ratio of the geometric family.
    pub base: Rational,
    /// Numerator/denominator bound `N` for random quaternion coordinates.
    pub bound: i64,
    /// Keep only quaternions in the all-nonnegative sign class.
    pub same_hexadecant: bool,
    /// Scaled Hurwitz units instead of independent random coordinates.
    pub structured: bool,
    pub k: usize,
    pub spread: Rational,
    pub perturbation: Perturbation,
    pub path: Option<PathBuf>,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize) -> Self {
        GeneratorSpec {
            family,
            n,
            seed: 0,
            base: int(2),
            bound: 100,
            same_hexadecant: false,
            structured: false,
            k: 2,
            spread: rat(1, 1 << 20),
            perturbation: Perturbation::Generic,
            path: None,
        }
    }
}

/// The five Hurwitz units with nonnegative coordinates: `1, i, j, k, (1+i+j+k)/2`.
pub fn positive_hurwitz_units() -> Vec<RQuaternion> {
    vec![
        RQuaternion::one(),
        RQuaternion::i(),
        RQuaternion::j(),
        RQuaternion::k(),
        RQuaternion::new(rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)),
    ]
}

fn random_coordinate(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    rat(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

/// `n` distinct nonzero quaternions with coordinates `p/q`, `p ∈ [−N, N]`, `q ∈ [1, N]`.
pub fn random_quaternions(
    n: usize,
    bound: i64,
    same_hexadecant: bool,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<RQuaternion>> {
    if bound < 1 {
        return Err(Error::BadSpec("coordinate bound must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(n);
    let mut seen = HashSet::new();
    let mut attempts = 0usize;
    while out.len() < n {
        attempts += 1;
        if attempts > 1000 * (n + 1) {
            return Err(Error::BadSpec("could not draw enough distinct quaternions".into()));
        }
        let q = RQuaternion::new(
            random_coordinate(rng, bound),
            random_coordinate(rng, bound),
            random_coordinate(rng, bound),
            random_coordinate(rng, bound),
        );
        if q.is_zero() || (same_hexadecant && q.hexadecant() != 0) {
            continue;
        }
        if seen.insert(q.clone()) {
            out.push(q);
        }
    }
    Ok(out)
}

/// `n` distinct elements `s·g` with `g` a nonnegative Hurwitz unit and `s = 2^a·3^b·5^c`,
/// `a ∈ [−2, 2]`, `b ∈ [−1, 1]`, `c ∈ [0, 1]`.
pub fn structured_quaternions(n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<RQuaternion>> {
    let units = positive_hurwitz_units();
    let limit = units.len() * 5 * 3 * 2;
    if n > limit {
        return Err(Error::BadSpec(format!("structured quaternion sets hold at most {limit} elements")));
    }
    let pow = |b: i64, e: i32| -> Rational {
        if e >= 0 {
            int(b.pow(e as u32))
        } else {
            rat(1, b.pow((-e) as u32))
        }
    };
    let mut out = Vec::with_capacity(n);
    let mut seen = HashSet::new();
    while out.len() < n {
        let s = pow(2, rng.gen_range(-2..=2)) * pow(3, rng.gen_range(-1..=1)) * pow(5, rng.gen_range(0..=1));
        let g = &units[rng.gen_range(0..units.len())];
        let q = g.scale(&s);
        if seen.insert(q.clone()) {
            out.push(q);
        }
    }
    Ok(out)
}

pub fn generate(spec: &GeneratorSpec) -> Result<AnySet> {
    let needs_n = !matches!(spec.family, Family::FromFile);
    if needs_n && spec.n == 0 {
        return Err(Error::BadSpec("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(match spec.family {
        Family::Range => AnySet::Quaternion((1..=spec.n as i64).map(|x| RQuaternion::real(int(x))).collect()),
        Family::Geometric => {
            if spec.base == int(0) || spec.base == int(1) || spec.base == int(-1) {
                return Err(Error::BadSpec("geometric base must not be 0 or ±1".into()));
            }
            let mut x = int(1);
            let mut v = Vec::with_capacity(spec.n);
            for _ in 0..spec.n {
                v.push(RQuaternion::real(x.clone()));
                x *= &spec.base;
            }
            AnySet::Quaternion(ElementSet::new(v))
        }
        Family::RandomQuaternion => {
            let v = if spec.structured {
                structured_quaternions(spec.n, &mut rng)?
            } else {
                random_quaternions(spec.n, spec.bound, spec.same_hexadecant, &mut rng)?
            };
            AnySet::Quaternion(ElementSet::new(v))
        }
        Family::ClusterMatrix => AnySet::Matrix(cluster_family(&ClusterSpec {
            k: spec.k,
            n: spec.n,
            seed: spec.seed,
            spread: spec.spread.clone(),
            perturbation: spec.perturbation,
        })?),
        Family::Chang => AnySet::Matrix(chang_family(spec.n, spec.k)?),
        Family::FromFile => {
            let path = spec.path.as_ref().ok_or_else(|| Error::BadSpec("from-file needs a path".into()))?;
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            AnySet::parse(&text)?
        }
    })
}
