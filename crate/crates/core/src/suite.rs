//! Randomized lemma checks run by `verify-lemmas`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exactnum::interval::op1_norm_bits;
use crate::exactnum::rational::{fmt_rational, int, rat};
use crate::exactnum::{GaussianRational, Precision, RMatrix, RQuaternion, Rational};
use crate::generate::{random_quaternions, structured_quaternions};
use crate::matrixlab::{
    check_block_hypothesis, check_contraction, check_normalized_norm_bounds, check_sum_invertible, cluster_family,
    compute_delta, normalize, BlockVerdict, ClusterSpec, FamilyParams, Perturbation,
};
use crate::setalgebra::ElementSet;
use crate::witness::{run_pipeline, PipelineOptions};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaVerdict {
    pub lemma: String,
    pub trials: usize,
    pub failures: usize,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl LemmaVerdict {
    fn new(lemma: &str, trials: usize, failures: usize, counterexample: Option<String>) -> Self {
        LemmaVerdict { lemma: lemma.into(), trials, failures, passed: failures == 0, counterexample, note: None }
    }
}

/// One row of the verifier batch CSV.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchRow {
    pub quadruple: usize,
    pub check: String,
    pub verdict: String,
    /// Enclosure width, or `exact`.
    pub width: String,
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub quaternion_quadruples: usize,
    pub pipeline_runs: usize,
    pub pipeline_set_size: usize,
    pub matrix_quadruples: usize,
    pub block_quadruples: usize,
    pub delta_pairs: usize,
    pub precision: Precision,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            quaternion_quadruples: 1000,
            pipeline_runs: 10,
            pipeline_set_size: 20,
            matrix_quadruples: 1000,
            block_quadruples: 1000,
            delta_pairs: 1000,
            precision: Precision::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub verdicts: Vec<LemmaVerdict>,
    pub batch: Vec<BatchRow>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

/// `|(a+c)(b+d)⁻¹ − ab⁻¹|² <= |cd⁻¹ − ab⁻¹|²`, exactly. `None` when `b + d = 0`.
pub fn quaternion_contraction(a: &RQuaternion, b: &RQuaternion, c: &RQuaternion, d: &RQuaternion) -> Option<bool> {
    let s = (b + d).inverse().ok()?;
    let ab = a * &b.inverse().ok()?;
    let cd = c * &d.inverse().ok()?;
    let lhs = (&(&(a + c) * &s) - &ab).normsq();
    let rhs = (&cd - &ab).normsq();
    Some(lhs <= rhs)
}

fn flip(q: &RQuaternion, pattern: u8) -> RQuaternion {
    let c = q.coords();
    let s = |i: usize, v: &Rational| if pattern >> i & 1 == 1 { -v.clone() } else { v.clone() };
    RQuaternion::new(s(0, c[0]), s(1, c[1]), s(2, c[2]), s(3, c[3]))
}

/// Random `(a, b, c, d)` with `b`, `d` in one random sign class and `a`, `c` unrestricted.
pub fn same_hexadecant_quadruple(rng: &mut ChaCha8Rng, bound: i64) -> [RQuaternion; 4] {
    let pattern = rng.gen_range(0..16u8);
    let bd = random_quaternions(2, bound, true, rng).expect("bound >= 1");
    let ac = random_quaternions(2, bound, false, rng).expect("bound >= 1");
    [ac[0].clone(), flip(&bd[0], pattern), ac[1].clone(), flip(&bd[1], pattern)]
}

fn quad_text(q: &[RQuaternion; 4]) -> String {
    q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn check_quaternion_contraction(trials: usize, rng: &mut ChaCha8Rng) -> LemmaVerdict {
    let mut failures = 0;
    let mut example = None;
    for _ in 0..trials {
        let q = same_hexadecant_quadruple(rng, 100);
        if quaternion_contraction(&q[0], &q[1], &q[2], &q[3]) == Some(false) {
            failures += 1;
            example.get_or_insert_with(|| quad_text(&q));
        }
    }
    LemmaVerdict::new("quaternion-contraction", trials, failures, example)
}

/// A quadruple with `b`, `d` in different sign classes that breaks the contraction inequality.
pub fn contraction_counterexample(rng: &mut ChaCha8Rng, attempts: usize) -> Option<[RQuaternion; 4]> {
    for _ in 0..attempts {
        let v = random_quaternions(4, 20, false, rng).ok()?;
        if v[1].same_hexadecant(&v[3]) {
            continue;
        }
        let q = [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()];
        if quaternion_contraction(&q[0], &q[1], &q[2], &q[3]) == Some(false) {
            return Some(q);
        }
    }
    None
}

/// Pipeline runs on structured same-sign-class sets: recovery and witness sizes,
/// ball multiplicity and kissing configurations, and the final inequality.
pub fn check_pipeline_runs(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<LemmaVerdict>> {
    let opts = PipelineOptions { precision: cfg.precision.clone(), ..Default::default() };
    let (mut rec_fail, mut rec_trials, mut kiss_fail, mut chain_fail, mut nondegenerate) = (0, 0, 0, 0, 0);
    let (mut rec_ex, mut kiss_ex, mut chain_ex) = (None, None, None);
    for run in 0..cfg.pipeline_runs {
        let set: ElementSet<RQuaternion> = ElementSet::new(structured_quaternions(cfg.pipeline_set_size, rng)?);
        let cert = run_pipeline(&set, &opts)?;
        if cert.degenerate {
            continue;
        }
        nondegenerate += 1;
        rec_trials += cert.witness_total as usize;
        let sizes_ok = cert.witnesses.iter().all(|w| w.size == w.expected);
        if cert.recovery_failures > 0 || !sizes_ok {
            rec_fail += cert.recovery_failures.max(1);
            rec_ex.get_or_insert_with(|| format!("run {run}"));
        }
        let kiss_ok = cert.center_separation
            && cert.membership_failures == 0
            && cert.multiplicity_cap.parse::<usize>().is_ok_and(|c| cert.ball_multiplicity <= c)
            && cert.kissing.as_ref().is_some_and(|k| k.is_valid());
        if !kiss_ok {
            kiss_fail += 1;
            kiss_ex.get_or_insert_with(|| format!("run {run}: multiplicity {}", cert.ball_multiplicity));
        }
        if !(cert.inequality_holds && cert.product_inequality_holds) {
            chain_fail += 1;
            chain_ex.get_or_insert_with(|| format!("run {run}"));
        }
    }
    let mut v = vec![
        LemmaVerdict::new("quadruple-recovery", rec_trials, rec_fail, rec_ex),
        LemmaVerdict::new("ball-multiplicity", nondegenerate, kiss_fail, kiss_ex),
        LemmaVerdict::new("energy-chain", nondegenerate, chain_fail, chain_ex),
    ];
    if nondegenerate == 0 {
        for x in &mut v {
            x.passed = false;
            x.note = Some("every run was degenerate".into());
        }
    }
    Ok(v)
}

/// Normalized-matrix checks on a generic in-class cluster family (`k = 2`, `M = 4`).
pub fn check_matrix_suite(
    cfg: &SuiteConfig,
    rng: &mut ChaCha8Rng,
    batch: &mut Vec<BatchRow>,
) -> Result<Vec<LemmaVerdict>> {
    let params = FamilyParams::new(2, int(4))?;
    let prec = &cfg.precision;
    let spec =
        ClusterSpec { k: 2, n: 12, seed: cfg.seed, spread: rat(1, 1 << 20), perturbation: Perturbation::Generic };
    let family = cluster_family(&spec)?;
    let e = family.elements();
    let mut norm_fail = 0;
    for a in e {
        if !check_normalized_norm_bounds(&normalize(a, 32)?, &params.m, prec)?.holds() {
            norm_fail += 1;
        }
    }
    let (mut inv_fail, mut scaled_fail, mut dbd_fail, mut contr_fail) = (0, 0, 0, 0);
    let row = |id: usize, check: &str, ok: bool, width: String| BatchRow {
        quadruple: id,
        check: check.into(),
        verdict: if ok { "pass".into() } else { "fail".into() },
        width,
    };
    for id in 0..cfg.matrix_quadruples {
        let pick = |rng: &mut ChaCha8Rng| &e[rng.gen_range(0..e.len())];
        let (a, b, c, d) = (pick(rng), pick(rng), pick(rng), pick(rng));
        let s = check_sum_invertible(b, d, &params, prec)?;
        inv_fail += usize::from(!s.invertible);
        batch.push(row(id, "sum-invertible", s.invertible, "exact".into()));
        let eq_ok = s.scaled_difference_ok && s.bound_le_delta;
        scaled_fail += usize::from(!eq_ok);
        let w = s.scaled_difference.as_ref().map_or("none".into(), |n| fmt_rational(&n.width()));
        batch.push(row(id, "scaled-difference", eq_ok, w));
        let c_rep = check_contraction(a, b, c, d, prec)?;
        dbd_fail += usize::from(!c_rep.dbd_ok);
        batch.push(row(id, "sum-contraction", c_rep.dbd_ok, fmt_rational(&c_rep.dbd_norm.width())));
        let ok = c_rep.contraction_ok && c_rep.identity_holds;
        contr_fail += usize::from(!ok);
        let width = std::cmp::max(c_rep.lhs.width(), c_rep.rhs.width());
        batch.push(row(id, "ratio-contraction", ok, fmt_rational(&width)));
    }
    let q = cfg.matrix_quadruples;
    Ok(vec![
        LemmaVerdict::new("normalized-norm-bounds", e.len(), norm_fail, None),
        LemmaVerdict::new("sum-invertible", q, inv_fail, None),
        LemmaVerdict::new("scaled-difference-bound", q, scaled_fail, None),
        LemmaVerdict::new("sum-contraction", q, dbd_fail, None),
        LemmaVerdict::new("ratio-contraction", q, contr_fail, None),
    ])
}

/// Random invertible `k×k` matrix with small Gaussian-integer entries.
pub fn random_invertible(k: usize, rng: &mut ChaCha8Rng) -> RMatrix {
    loop {
        let entries =
            (0..k * k).map(|_| GaussianRational::from_ints(rng.gen_range(-4..=4), rng.gen_range(-2..=2))).collect();
        let m = RMatrix::new(k, entries).expect("k*k entries");
        if !m.det().is_zero() {
            return m;
        }
    }
}

pub fn check_block_identity(trials: usize, rng: &mut ChaCha8Rng) -> Result<LemmaVerdict> {
    let mut failures = 0;
    let mut example = None;
    let mut violated = 0;
    for t in 0..trials {
        let k = 1 + t % 3;
        let [a, b, c, d] = [(); 4].map(|_| random_invertible(k, rng));
        let r = check_block_hypothesis(&a, &b, &c, &d)?;
        if !r.identity_holds {
            failures += 1;
            example.get_or_insert_with(|| format!("{a} {b} {c} {d}"));
        }
        violated += usize::from(r.verdict == BlockVerdict::Violated);
    }
    let mut v = LemmaVerdict::new("block-determinant-identity", trials, failures, example);
    v.note = Some(format!("{violated} quadruple(s) with AB⁻¹ ≠ CD⁻¹ and singular block"));
    Ok(v)
}

/// Random `(A, B)` with `||A||, ||B|| <= 2Mk` and `||A − B|| < δ`; checks `|det A − det B| < 1/2`.
pub fn check_delta_soundness(pairs: usize, rng: &mut ChaCha8Rng) -> LemmaVerdict {
    let mut failures = 0;
    let mut trials = 0;
    let mut example = None;
    let bits = 40;
    while trials < pairs {
        let k = rng.gen_range(1..=3usize);
        let m = int([1, 2, 4][rng.gen_range(0..3)]);
        let delta = compute_delta(k, &m);
        let radius = int(2) * &m * int(k as i64);
        // entries of modulus <= 2M keep every column sum within 2Mk
        let entry = |rng: &mut ChaCha8Rng, scale: &Rational| {
            let re = scale * rat(rng.gen_range(-1000..=1000), 1000);
            let im = if rng.gen_bool(0.5) { scale * rat(rng.gen_range(-1000..=1000), 1000) } else { int(0) };
            GaussianRational::new(re, im)
        };
        let big = &int(2) * &m / int(2);
        let a = RMatrix::new(k, (0..k * k).map(|_| entry(rng, &big)).collect()).expect("k*k");
        let small = &delta / int(2 * k as i64);
        let p = RMatrix::new(k, (0..k * k).map(|_| entry(rng, &small)).collect()).expect("k*k");
        let b = a.add(&p);
        if op1_norm_bits(&a, bits).hi > radius
            || op1_norm_bits(&b, bits).hi > radius
            || op1_norm_bits(&p, bits).hi >= delta
        {
            continue;
        }
        trials += 1;
        let diff = &a.det() - &b.det();
        if diff.norm_sq() >= rat(1, 4) {
            failures += 1;
            example.get_or_insert_with(|| format!("{a} {b}"));
        }
    }
    LemmaVerdict::new("determinant-perturbation", trials, failures, example)
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = SuiteReport::default();
    report.verdicts.push(check_quaternion_contraction(cfg.quaternion_quadruples, &mut rng));
    let ce = contraction_counterexample(&mut rng, 100_000);
    let mut v =
        LemmaVerdict::new("contraction-needs-sign-class", 1, usize::from(ce.is_none()), ce.as_ref().map(quad_text));
    v.note = Some("b and d in different sign classes can break the inequality".into());
    report.verdicts.push(v);
    report.verdicts.extend(check_pipeline_runs(cfg, &mut rng)?);
    report.verdicts.extend(check_matrix_suite(cfg, &mut rng, &mut report.batch)?);
    report.verdicts.push(check_block_identity(cfg.block_quadruples, &mut rng)?);
    report.verdicts.push(check_delta_soundness(cfg.delta_pairs, &mut rng));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let cfg = SuiteConfig {
            quaternion_quadruples: 200,
            pipeline_runs: 2,
            pipeline_set_size: 12,
            matrix_quadruples: 20,
            block_quadruples: 50,
            delta_pairs: 200,
            ..Default::default()
        };
        let r = run_suite(&cfg).unwrap();
        assert!(r.all_passed(), "{:#?}", r.verdicts);
        assert_eq!(r.batch.len(), 80);
    }

    #[test]
    fn contraction_examples() {
        let q = |w| RQuaternion::real(int(w));
        assert_eq!(quaternion_contraction(&q(1), &q(1), &q(2), &q(1)), Some(true));
        assert_eq!(quaternion_contraction(&q(1), &q(1), &q(1), &q(-1)), None);
        // b = 1, d = −3/4: the sum shrinks and the difference of ratios is amplified
        let d = RQuaternion::real(rat(-3, 4));
        assert_eq!(quaternion_contraction(&q(1), &q(1), &q(0), &d), Some(false));
    }
}
