use num_traits::One;
use serde::{Deserialize, Serialize};

use super::normalize::{imat_mul, normalize, NormalizedMatrix};
use super::FamilyParams;
use crate::error::{Error, Result};
use crate::exactnum::interval::{interval_op1_norm, le_with_slack, op1_norm_bits};
use crate::exactnum::rational::int;
use crate::exactnum::{ComplexInterval, GaussianRational, Interval, NormEnclosure, Precision, RMatrix, Rational};

#[derive(Clone, Debug)]
pub struct NormBoundsReport {
    pub norm: NormEnclosure,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl NormBoundsReport {
    pub fn holds(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Certify `1/k <= ||Ã||₁ <= Mk`. A bound that is certainly violated is reported as
/// failed; one that cannot be decided at the floor is `Unresolved`.
pub fn check_normalized_norm_bounds(n: &NormalizedMatrix, m: &Rational, prec: &Precision) -> Result<NormBoundsReport> {
    let k = int(n.dim() as i64);
    let lower = k.recip();
    let upper = m * &k;
    for bits in prec.schedule() {
        let cur = n.at_bits(bits)?;
        let norm = interval_op1_norm(&cur.tilde, cur.dim(), bits + 4);
        let lower_ok = if norm.lo >= lower {
            Some(true)
        } else if norm.hi < lower {
            Some(false)
        } else {
            None
        };
        let upper_ok = if norm.hi <= upper {
            Some(true)
        } else if norm.lo > upper {
            Some(false)
        } else {
            None
        };
        if let (Some(lower_ok), Some(upper_ok)) = (lower_ok, upper_ok) {
            return Ok(NormBoundsReport { norm, lower_ok, upper_ok });
        }
    }
    Err(Error::Unresolved("normalized norm bounds".into()))
}

#[derive(Clone, Debug)]
pub struct SumInvertibleReport {
    pub det_sum: GaussianRational,
    pub invertible: bool,
    /// Enclosure of `||(b/(b+d))(B̃ − D̃)||₁`, absent when `b + d` could not be bounded away from zero.
    pub scaled_difference: Option<NormEnclosure>,
    pub scaled_difference_bound: Rational,
    pub scaled_difference_ok: bool,
    pub bound_le_delta: bool,
}

/// `det(B + D) != 0` exactly, plus the intermediate bound
/// `||(b/(b+d))(B̃ − D̃)|| < 3Mk²ε <= δ` where `b = ρ(B)`, `d = ρ(D)`.
pub fn check_sum_invertible(
    b: &RMatrix,
    d: &RMatrix,
    params: &FamilyParams,
    prec: &Precision,
) -> Result<SumInvertibleReport> {
    let det_sum = b.add(d).det();
    let bound = params.scaled_difference_bound();
    let mut scaled = None;
    let mut ok = false;
    for bits in prec.schedule() {
        let nb = normalize(b, bits)?;
        let nd = normalize(d, bits)?;
        let Ok(inv) = nb.rho.add(&nd.rho).recip() else { continue };
        let factor = nb.rho.mul(&inv);
        let diff: Vec<ComplexInterval> =
            nb.tilde.iter().zip(&nd.tilde).map(|(x, y)| factor.mul(&x.sub(y)).round_out(bits + 4)).collect();
        let norm = interval_op1_norm(&diff, params.k, bits + 4);
        let decided = if norm.hi < bound {
            Some(true)
        } else if norm.lo >= bound {
            Some(false)
        } else {
            None
        };
        scaled = Some(norm);
        if let Some(v) = decided {
            ok = v;
            break;
        }
    }
    Ok(SumInvertibleReport {
        invertible: !det_sum.is_zero(),
        det_sum,
        scaled_difference: scaled,
        bound_le_delta: bound <= params.delta,
        scaled_difference_bound: bound,
        scaled_difference_ok: ok,
    })
}

#[derive(Clone, Debug)]
pub struct ContractionReport {
    pub dbd_norm: NormEnclosure,
    pub dbd_ok: bool,
    pub lhs: NormEnclosure,
    pub rhs: NormEnclosure,
    pub contraction_ok: bool,
    /// `(A+C)(B+D)⁻¹ − AB⁻¹ = (CD⁻¹ − AB⁻¹)·D(B+D)⁻¹` checked exactly.
    pub identity_holds: bool,
}

impl ContractionReport {
    pub fn holds(&self) -> bool {
        self.dbd_ok && self.contraction_ok
    }
}

fn invert(m: &RMatrix, what: &str) -> Result<RMatrix> {
    m.inverse().map_err(|_| Error::Precondition(format!("{what} is singular")))
}

/// `||D(B+D)⁻¹||₁ <= 1` and `||(A+C)(B+D)⁻¹ − AB⁻¹||₁ <= ||CD⁻¹ − AB⁻¹||₁`, both up to the slack.
pub fn check_contraction(
    a: &RMatrix,
    b: &RMatrix,
    c: &RMatrix,
    d: &RMatrix,
    prec: &Precision,
) -> Result<ContractionReport> {
    let b_inv = invert(b, "B")?;
    let d_inv = invert(d, "D")?;
    let s_inv = invert(&b.add(d), "B + D")?;
    let bits = prec.slack_bits() + 4;
    let dbd = d.mul(&s_inv);
    let ab = a.mul(&b_inv);
    let cd = c.mul(&d_inv);
    let lhs_m = a.add(c).mul(&s_inv).sub(&ab);
    let rhs_m = cd.sub(&ab);
    let identity_holds = lhs_m == rhs_m.mul(&dbd);
    let dbd_norm = op1_norm_bits(&dbd, bits);
    let lhs = op1_norm_bits(&lhs_m, bits);
    let rhs = op1_norm_bits(&rhs_m, bits);
    Ok(ContractionReport {
        dbd_ok: le_with_slack(&dbd_norm, &Interval::point(Rational::one()), &prec.slack),
        contraction_ok: le_with_slack(&lhs, &rhs, &prec.slack),
        dbd_norm,
        lhs,
        rhs,
        identity_holds,
    })
}

#[derive(Clone, Debug)]
pub struct NeumannReport {
    /// Enclosure of `||E||₁` where `I + E = (d/(b+d))·D⁻¹(B+D)`.
    pub e_norm: NormEnclosure,
    /// Enclosure of `||(I+E)⁻¹||₁` computed from `(B+D)⁻¹D` directly.
    pub direct: NormEnclosure,
    /// `1/(1 − ||E||)` when `||E|| < 1`.
    pub neumann_bound: Option<Rational>,
    pub consistent: bool,
}

/// Compare the Neumann-series bound on `||(I+E)⁻¹||` with the directly computed norm.
pub fn check_neumann(b: &RMatrix, d: &RMatrix, prec: &Precision) -> Result<NeumannReport> {
    let k = b.dim();
    let d_inv = invert(d, "D")?;
    let s = b.add(d);
    let s_inv_d = invert(&s, "B + D")?.mul(d);
    let bits = prec.slack_bits() + 8;
    let nb = normalize(b, bits)?;
    let nd = normalize(d, bits)?;
    let sum = nb.rho.add(&nd.rho);
    let factor = nb.rho.mul(&sum.recip()?);
    let dt_inv: Vec<ComplexInterval> = d_inv.entries().iter().map(|e| nd.rho.mul_exact(e)).collect();
    let diff: Vec<ComplexInterval> = nb.tilde.iter().zip(&nd.tilde).map(|(x, y)| x.sub(y)).collect();
    let e: Vec<ComplexInterval> = imat_mul(&dt_inv, &diff, k).iter().map(|z| factor.mul(z).round_out(bits)).collect();
    let e_norm = interval_op1_norm(&e, k, bits);
    let ratio = sum.mul(&nd.rho.recip()?).modulus(bits);
    let direct = op1_norm_bits(&s_inv_d, bits).mul(&ratio);
    let neumann_bound = (e_norm.hi < Rational::one()).then(|| (Rational::one() - &e_norm.hi).recip());
    let consistent = match &neumann_bound {
        Some(nb) => le_with_slack(&direct, &Interval::point(nb.clone()), &prec.slack),
        None => true,
    };
    Ok(NeumannReport { e_norm, direct, neumann_bound, consistent })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockVerdict {
    Satisfied,
    RatioEqual,
    Violated,
}

#[derive(Clone, Debug)]
pub struct BlockReport {
    pub verdict: BlockVerdict,
    pub block_det: GaussianRational,
    /// `det(D)·det(AB⁻¹ − CD⁻¹)·det(B)`.
    pub factored_det: GaussianRational,
    pub identity_holds: bool,
}

/// Classify `(A, B, C, D)`: either `AB⁻¹ = CD⁻¹` or the block matrix `(A C; B D)` is invertible.
pub fn check_block_hypothesis(a: &RMatrix, b: &RMatrix, c: &RMatrix, d: &RMatrix) -> Result<BlockReport> {
    for (m, name) in [(a, "A"), (b, "B"), (c, "C"), (d, "D")] {
        invert(m, name)?;
    }
    let block_det = RMatrix::block(a, c, b, d).det();
    let diff = a.mul(&b.inverse()?).sub(&c.mul(&d.inverse()?));
    let factored_det = &(&d.det() * &diff.det()) * &b.det();
    let verdict = if diff.is_zero() {
        BlockVerdict::RatioEqual
    } else if !block_det.is_zero() {
        BlockVerdict::Satisfied
    } else {
        BlockVerdict::Violated
    };
    Ok(BlockReport { verdict, identity_holds: block_det == factored_det, block_det, factored_det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;

    fn g(re: i64, im: i64) -> GaussianRational {
        GaussianRational::from_ints(re, im)
    }

    fn sample(seed: i64) -> RMatrix {
        RMatrix::from_rows(vec![vec![g(3 + seed % 5, 1), g(1, -(seed % 3))], vec![g(seed % 4, 2), g(4, seed % 2)]])
            .unwrap()
    }

    #[test]
    fn normalized_norm_examples() {
        let prec = Precision::default();
        let r =
            check_normalized_norm_bounds(&NormalizedMatrix::assume_normalized(&RMatrix::identity(2)), &int(1), &prec)
                .unwrap();
        assert!(r.holds());
        let ten = RMatrix::scalar(2, g(10, 0));
        let r = check_normalized_norm_bounds(&NormalizedMatrix::assume_normalized(&ten), &int(1), &prec).unwrap();
        assert!(r.lower_ok && !r.upper_ok);
        let r = check_normalized_norm_bounds(&normalize(&ten, 20).unwrap(), &int(1), &prec).unwrap();
        assert!(r.holds());
        let a = sample(7);
        let cond = super::super::condition_number(&a, &rat(1, 1 << 20)).unwrap();
        let m = cond.hi.ceil();
        assert!(check_normalized_norm_bounds(&normalize(&a, 20).unwrap(), &m, &prec).unwrap().holds());
    }

    #[test]
    fn sum_of_equal_matrices() {
        let params = FamilyParams::new(2, int(4)).unwrap();
        let b = sample(1);
        let r = check_sum_invertible(&b, &b, &params, &Precision::default()).unwrap();
        assert!(r.invertible);
        assert_eq!(r.det_sum, b.det().scale(&int(4)));
        assert!(r.scaled_difference_ok);
        assert!(r.bound_le_delta);
    }

    #[test]
    fn contraction_equal_pairs() {
        let b = sample(2);
        let a = sample(3);
        let r = check_contraction(&a, &b, &a, &b, &Precision::default()).unwrap();
        assert_eq!(r.dbd_norm, Interval::point(rat(1, 2)));
        assert!(r.holds());
        assert!(r.identity_holds);
    }

    #[test]
    fn contraction_scalar_case_is_exact() {
        // k = 1, same quadrant: |d/(b+d)| <= 1 exactly
        let one = |z: GaussianRational| RMatrix::scalar(1, z);
        let r = check_contraction(&one(g(1, 2)), &one(g(2, 1)), &one(g(5, 1)), &one(g(1, 3)), &Precision::default())
            .unwrap();
        assert!(r.dbd_ok);
        assert!(r.identity_holds);
        assert!(r.contraction_ok);
    }

    #[test]
    fn contraction_rejects_singular_sum() {
        let b = sample(1);
        let r = check_contraction(&b, &b, &b, &b.neg(), &Precision::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn neumann_bound_dominates_direct_norm() {
        let b = sample(4);
        let mut d = b.clone();
        d.set(0, 1, &d.get(0, 1).clone() + &GaussianRational::real(rat(1, 1000)));
        let r = check_neumann(&b, &d, &Precision::default()).unwrap();
        assert!(r.e_norm.hi < rat(1, 2));
        assert!(r.neumann_bound.is_some());
        assert!(r.consistent);
    }

    #[test]
    fn block_examples() {
        let i2 = RMatrix::identity(2);
        let r = check_block_hypothesis(&i2, &i2, &i2.scale(&g(2, 0)), &i2).unwrap();
        assert_eq!(r.verdict, BlockVerdict::Satisfied);
        assert_eq!(r.block_det, RMatrix::identity(2).neg().det());
        assert!(r.identity_holds);

        let a = sample(5);
        let b = sample(6);
        let r = check_block_hypothesis(&a, &b, &a, &b).unwrap();
        assert_eq!(r.verdict, BlockVerdict::RatioEqual);
        assert!(r.block_det.is_zero());
        assert!(r.identity_holds);
    }
}
