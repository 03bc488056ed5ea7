//! Matrix-specific machinery: determinant-root normalization, the ε/δ class
//! partition, condition numbers, lemma verifiers, the block-matrix hypothesis,
//! and the unitriangular family with small sumset and productset.

mod cluster;
mod normalize;
mod verifiers;

pub use cluster::{cluster_family, ClusterSpec, Perturbation};
pub use normalize::{
    class_partition, condition_number, kth_root, normalize, ClassKey, ClassPartition, NormalizedMatrix,
};
pub use verifiers::{
    check_block_hypothesis, check_contraction, check_neumann, check_normalized_norm_bounds, check_sum_invertible,
    BlockReport, BlockVerdict, ContractionReport, NeumannReport, NormBoundsReport, SumInvertibleReport,
};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::rational::{fmt_rational, int, parse_rational, rat};
use crate::exactnum::{GaussianRational, RMatrix, Rational};
use crate::setalgebra::ElementSet;

/// `δ = 1/(2k·(2Mk)^(k−1))`.
///
/// On matrices of 1-norm at most `2Mk`,
/// `|det A − det B| <= k·(2Mk)^(k−1)·||A − B||`, so `||A − B|| < δ` forces
/// `|det A − det B| < 1/2`.
pub fn compute_delta(k: usize, m: &Rational) -> Rational {
    assert!(k >= 1, "k must be positive");
    let radius = int(2) * m * int(k as i64);
    let mut denom = int(2 * k as i64);
    for _ in 1..k {
        denom *= &radius;
    }
    denom.recip()
}

/// `k·(2Mk)^(k−1)`, the Lipschitz constant of the determinant on the compact set.
pub fn det_lipschitz(k: usize, m: &Rational) -> Rational {
    let radius = int(2) * m * int(k as i64);
    let mut l = int(k as i64);
    for _ in 1..k {
        l *= &radius;
    }
    l
}

/// Dimension, condition bound, and the derived δ and ε.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyParams {
    pub k: usize,
    pub m: Rational,
    pub delta: Rational,
    pub epsilon: Rational,
}

impl FamilyParams {
    pub fn new(k: usize, m: Rational) -> Result<Self> {
        let delta = compute_delta(k, &m);
        Self::with_delta(k, m, delta)
    }

    pub fn with_delta(k: usize, m: Rational, delta: Rational) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("k must be at least 1".into()));
        }
        if m < Rational::one() {
            return Err(Error::Precondition("condition bound M must be at least 1".into()));
        }
        if !delta.is_positive() {
            return Err(Error::Precondition("delta must be positive".into()));
        }
        let kk = int(k as i64);
        let a = &delta / (int(3) * &m * &kk * &kk);
        let b = (int(6) * &m * &m * &kk * &kk * &kk).recip();
        let epsilon = std::cmp::min(a, b);
        Ok(FamilyParams { k, m, delta, epsilon })
    }

    /// `⌈1/ε⌉`, the number of grid intervals per entry component.
    pub fn cells(&self) -> BigInt {
        self.epsilon.recip().ceil().to_integer()
    }

    pub fn cells_u64(&self) -> Result<u64> {
        self.cells().to_u64().ok_or_else(|| Error::Precondition("grid too fine for 64-bit cell indices".into()))
    }

    /// `4⌈1/ε⌉^(2k²)`.
    pub fn class_count(&self) -> BigUint {
        let c = self.cells().to_biguint().expect("cells positive");
        BigUint::from(4u32) * c.pow((2 * self.k * self.k) as u32)
    }

    /// `Mk`, the bound on every entry component of a normalized matrix.
    pub fn entry_bound(&self) -> Rational {
        &self.m * int(self.k as i64)
    }

    /// `3Mk²ε`.
    pub fn scaled_difference_bound(&self) -> Rational {
        let kk = int(self.k as i64);
        int(3) * &self.m * &kk * &kk * &self.epsilon
    }

    pub fn to_config(&self) -> ParamsConfig {
        ParamsConfig {
            k: self.k,
            m: fmt_rational(&self.m),
            delta: Some(fmt_rational(&self.delta)),
            epsilon: Some(fmt_rational(&self.epsilon)),
        }
    }
}

/// JSON form `{k, M, delta, epsilon}`; `delta` and `epsilon` are derived when absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsConfig {
    pub k: usize,
    #[serde(rename = "M")]
    pub m: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
}

impl ParamsConfig {
    pub fn resolve(&self) -> Result<FamilyParams> {
        let m = parse_rational(&self.m)?;
        let mut p = match &self.delta {
            Some(d) => FamilyParams::with_delta(self.k, m, parse_rational(d)?)?,
            None => FamilyParams::new(self.k, m)?,
        };
        if let Some(e) = &self.epsilon {
            let e = parse_rational(e)?;
            if !e.is_positive() || e > p.epsilon {
                return Err(Error::Precondition(format!(
                    "epsilon {} exceeds min(δ/(3Mk²), 1/(6M²k³)) = {}",
                    fmt_rational(&e),
                    fmt_rational(&p.epsilon)
                )));
            }
            p.epsilon = e;
        }
        Ok(p)
    }
}

/// `{ I + (i/n)·E_(0,k−1) : 1 <= i <= n }`.
pub fn chang_family(n: usize, k: usize) -> Result<ElementSet<RMatrix>> {
    if n == 0 || k < 2 {
        return Err(Error::BadSpec("chang family needs n >= 1 and k >= 2".into()));
    }
    Ok((1..=n)
        .map(|i| {
            let mut m = RMatrix::identity(k);
            m.set(0, k - 1, GaussianRational::real(rat(i as i64, n as i64)));
            m
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::interval::op1_norm;
    use crate::exactnum::rational::pow2_neg;
    use crate::setalgebra::{productset, sumset};

    #[test]
    fn delta_examples() {
        assert_eq!(compute_delta(1, &int(1)), rat(1, 2));
        assert_eq!(compute_delta(2, &int(2)), rat(1, 32));
    }

    #[test]
    fn epsilon_is_the_minimum() {
        let p = FamilyParams::new(2, int(4)).unwrap();
        assert_eq!(p.delta, rat(1, 64));
        // δ/(3Mk²) = 1/3072, 1/(6M²k³) = 1/768
        assert_eq!(p.epsilon, rat(1, 3072));
        assert_eq!(p.cells(), BigInt::from(3072));
        assert_eq!(p.scaled_difference_bound(), rat(48, 3072));
        assert!(p.scaled_difference_bound() <= p.delta);
    }

    #[test]
    fn params_config_round_trip() {
        let p = FamilyParams::new(2, int(4)).unwrap();
        let json = serde_json::to_string(&p.to_config()).unwrap();
        assert!(json.contains("\"M\":\"4/1\""));
        let back: ParamsConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.resolve().unwrap(), p);
        let bare: ParamsConfig = serde_json::from_str(r#"{"k":2,"M":"4"}"#).unwrap();
        assert_eq!(bare.resolve().unwrap(), p);
        let too_big: ParamsConfig = serde_json::from_str(r#"{"k":2,"M":"4","epsilon":"1/2"}"#).unwrap();
        assert!(too_big.resolve().is_err());
    }

    #[test]
    fn unipotent_examples() {
        for (n, expect) in [(1usize, 1usize), (3, 5)] {
            let a = chang_family(n, 2).unwrap();
            assert_eq!(sumset(&a).len(), expect);
            assert_eq!(productset(&a).len(), expect);
        }
        assert!(chang_family(0, 2).is_err());
        assert!(chang_family(3, 1).is_err());
    }

    #[test]
    fn unipotent_condition_numbers() {
        let n = 5;
        for (i, m) in chang_family(n, 2).unwrap().iter().enumerate() {
            let c = condition_number(m, &pow2_neg(30)).unwrap();
            let t = int(1) + rat(i as i64 + 1, n as i64);
            assert!(c.is_point());
            assert_eq!(c.lo, &t * &t);
            assert!(op1_norm(m, &pow2_neg(10)).hi <= int(2));
        }
    }
}
