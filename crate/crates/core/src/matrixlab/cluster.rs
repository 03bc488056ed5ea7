use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::rational::{int, rat};
use crate::exactnum::{GaussianRational, RMatrix, Rational};
use crate::setalgebra::ElementSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Perturbation {
    /// `s_t·B·(I + E_t)` with independent random `E_t`.
    Generic,
    /// `2^a·B·U^j` with `U = I + spread·N` and `B` a polynomial in `N`; all elements commute.
    Commuting,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterSpec {
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    pub spread: Rational,
    pub perturbation: Perturbation,
}

/// Signed cyclic shift: `N e_j = e_(j+1)`, `N e_(k-1) = −e_0`, so `N^k = −I`.
fn shift(k: usize) -> RMatrix {
    let mut n = RMatrix::zero(k);
    if k == 1 {
        return RMatrix::scalar(1, GaussianRational::from_ints(-1, 0));
    }
    for j in 0..k {
        if j + 1 < k {
            n.set(j + 1, j, GaussianRational::one());
        } else {
            n.set(0, j, GaussianRational::from_ints(-1, 0));
        }
    }
    n
}

fn generic_base(k: usize) -> RMatrix {
    let mut b = RMatrix::zero(k);
    for i in 0..k {
        for j in 0..k {
            let v = if i == j {
                GaussianRational::new(int(1), rat(1, 7 + i as i64))
            } else {
                GaussianRational::real(rat(1, 8 + i as i64 + 2 * j as i64))
            };
            b.set(i, j, v);
        }
    }
    b
}

/// `n` matrices clustered around a fixed base, all within one grid class for small `spread`.
pub fn cluster_family(spec: &ClusterSpec) -> Result<ElementSet<RMatrix>> {
    if spec.k == 0 || spec.n == 0 {
        return Err(Error::BadSpec("cluster family needs k >= 1 and n >= 1".into()));
    }
    let k = spec.k;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.n);
    match spec.perturbation {
        Perturbation::Generic => {
            let base = generic_base(k);
            let mut guard = 0;
            let mut seen = std::collections::HashSet::new();
            while out.len() < spec.n {
                guard += 1;
                if guard > 100 * spec.n {
                    return Err(Error::BadSpec("could not draw distinct cluster elements".into()));
                }
                let mut e = RMatrix::identity(k);
                for i in 0..k {
                    for j in 0..k {
                        let re = rat(rng.gen_range(-1000..=1000), 1000) * &spec.spread;
                        let im = rat(rng.gen_range(-1000..=1000), 1000) * &spec.spread;
                        e.set(i, j, e.get(i, j) + &GaussianRational::new(re, im));
                    }
                }
                let s = rat(rng.gen_range(4..=16), 4);
                let m = base.mul(&e).scale(&GaussianRational::real(s));
                if !m.det().is_zero() && seen.insert(m.clone()) {
                    out.push(m);
                }
            }
        }
        Perturbation::Commuting => {
            let n_mat = shift(k);
            let base = RMatrix::identity(k).add(&n_mat.scale(&GaussianRational::real(rat(1, 5))));
            let u = RMatrix::identity(k).add(&n_mat.scale(&GaussianRational::real(spec.spread.clone())));
            let cols = (spec.n as f64).sqrt().ceil() as usize;
            let mut powers = vec![RMatrix::identity(k)];
            for j in 1..cols {
                powers.push(powers[j - 1].mul(&u));
            }
            for t in 0..spec.n {
                let (a, j) = (t / cols, t % cols);
                let s = GaussianRational::real(Rational::from_integer(num_bigint::BigInt::from(1) << a));
                out.push(base.mul(&powers[j]).scale(&s));
            }
        }
    }
    Ok(ElementSet::new(out))
}
