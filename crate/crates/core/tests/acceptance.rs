//! End-to-end acceptance checks. Each criterion prints one `PASS`/`FAIL` line; the
//! growth-trend criterion prints `INFO` and is not asserted.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sumprod_core::exactnum::rational::{int, rat};
use sumprod_core::exactnum::{Precision, RMatrix, RQuaternion, Rational, RingElement};
use sumprod_core::generate::{random_quaternions, structured_quaternions};
use sumprod_core::matrixlab::{chang_family, cluster_family, condition_number, ClusterSpec, Perturbation};
use sumprod_core::report::growth_row;
use sumprod_core::setalgebra::{
    energy, hexadecant_partition, productset, ratio_profile_brute, sumset, ElementSet, EnergyMethod,
};
use sumprod_core::suite::{
    check_block_identity, check_delta_soundness, check_matrix_suite, contraction_counterexample, random_invertible,
    same_hexadecant_quadruple, SuiteConfig,
};
use sumprod_core::witness::{
    nearest_map, recover_quadruple, run_pipeline, select_dyadic, LevelRule, PipelineOptions, Side, SidePolicy,
};

/// Written straight to the process stdout so the lines survive output capture.
fn line(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{s}");
    let _ = out.flush();
}

struct Outcome {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
    limit: Option<Duration>,
}

impl Outcome {
    fn ok(&self) -> bool {
        self.passed && self.limit.is_none_or(|l| self.elapsed < l)
    }

    fn print(&self) {
        let verdict = if self.ok() { "PASS" } else { "FAIL" };
        let limit = self.limit.map_or(String::new(), |l| format!(" (limit {}s)", l.as_secs()));
        line(&format!(
            "criterion {:>2} {verdict}: {} [{:.2}s{limit}] {}",
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        ));
    }
}

fn timed(id: u32, name: &'static str, limit: Option<u64>, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = f();
    let out = Outcome { id, name, passed, detail, elapsed: start.elapsed(), limit: limit.map(Duration::from_secs) };
    out.print();
    out
}

fn key_count<T: RingElement>(items: impl Iterator<Item = T>) -> usize {
    items.map(|x| x.canonical_key()).collect::<BTreeSet<_>>().len()
}

fn unipotent_exactness() -> (bool, String) {
    let width = rat(1, 1 << 20);
    let mut bad = Vec::new();
    for n in [1usize, 2, 3, 8, 16, 64] {
        let a = chang_family(n, 2).unwrap();
        let (s, p) = (sumset(&a).len(), productset(&a).len());
        if s != 2 * n - 1 || p != 2 * n - 1 {
            bad.push(format!("n={n}: |A+A|={s} |AA|={p}"));
        }
        for m in a.iter() {
            let c = condition_number(m, &width).unwrap();
            if c.lo < int(1) || c.hi > int(4) {
                bad.push(format!("n={n}: condition enclosure [{}, {}]", c.lo, c.hi));
            }
        }
    }
    (bad.is_empty(), if bad.is_empty() { "all six sizes exact".into() } else { bad.join("; ") })
}

/// Sets for the energy checks: independent random coordinates and multiplicatively rich families.
fn energy_sets() -> (Vec<ElementSet<RQuaternion>>, Vec<ElementSet<RMatrix>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut quats = Vec::new();
    for t in 0..200 {
        let n = rng.gen_range(1..=15);
        let v = if t % 2 == 0 {
            random_quaternions(n, 6, t % 4 == 0, &mut rng).unwrap()
        } else {
            structured_quaternions(n, &mut rng).unwrap()
        };
        quats.push(ElementSet::new(v));
    }
    let mut mats = Vec::new();
    for t in 0..50u64 {
        let n = rng.gen_range(1..=10);
        let set = if t % 2 == 0 {
            ElementSet::new((0..n).map(|_| random_invertible(2, &mut rng)))
        } else {
            let spec = ClusterSpec { k: 2, n, seed: t, spread: rat(1, 64), perturbation: Perturbation::Commuting };
            cluster_family(&spec).unwrap()
        };
        mats.push(set);
    }
    (quats, mats)
}

/// `#{(a,b,c,d) : ca = db}` by grouping the products `ca` under exact equality.
fn energy_oracle<T: RingElement>(a: &ElementSet<T>) -> u64 {
    let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    for c in a.iter() {
        for x in a.iter() {
            *counts.entry(c.times(x).canonical_key()).or_default() += 1;
        }
    }
    counts.values().map(|m| m * m).sum()
}

fn energy_equivalence<T: RingElement>(sets: &[ElementSet<T>], rich: &mut usize) -> Vec<String> {
    let mut bad = Vec::new();
    for (i, a) in sets.iter().enumerate() {
        let fast = energy(a, EnergyMethod::Fast).unwrap().value;
        let brute = energy(a, EnergyMethod::Brute).unwrap().value;
        let oracle = energy_oracle(a);
        if fast != brute || brute != oracle {
            bad.push(format!("set {i}: fast {fast} brute {brute} oracle {oracle}"));
        }
        let n = a.len() as u64;
        // a = b forces c = d, so n² quadruples are always present
        if brute > n * n {
            *rich += 1;
        }
    }
    bad
}

fn cauchy_schwarz<T: RingElement>(sets: &[ElementSet<T>]) -> Vec<String> {
    let mut bad = Vec::new();
    for (i, a) in sets.iter().enumerate() {
        let e = energy(a, EnergyMethod::Brute).unwrap().value;
        let pp = key_count(a.iter().flat_map(|x| a.iter().map(move |y| x.times(y))));
        let n4 = BigInt::from(a.len()).pow(4);
        if BigInt::from(e) * BigInt::from(pp) < n4 {
            bad.push(format!("set {i}: E={e} |AA|={pp} n={}", a.len()));
        }
    }
    bad
}

fn hamilton(p: &[Rational; 4], q: &[Rational; 4]) -> [Rational; 4] {
    let [a1, b1, c1, d1] = p;
    let [a2, b2, c2, d2] = q;
    [
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ]
}

fn coords(q: &RQuaternion) -> [Rational; 4] {
    q.coords().map(Clone::clone)
}

fn inv(q: &[Rational; 4]) -> Option<[Rational; 4]> {
    let n: Rational = q.iter().map(|c| c * c).sum();
    if n == int(0) {
        return None;
    }
    Some([&q[0] / &n, -&q[1] / &n, -&q[2] / &n, -&q[3] / &n])
}

fn sub4(p: &[Rational; 4], q: &[Rational; 4]) -> [Rational; 4] {
    [&p[0] - &q[0], &p[1] - &q[1], &p[2] - &q[2], &p[3] - &q[3]]
}

fn normsq4(p: &[Rational; 4]) -> Rational {
    p.iter().map(|c| c * c).sum()
}

/// `|(a+c)(b+d)⁻¹ − ab⁻¹|² <= |cd⁻¹ − ab⁻¹|²` with coordinate-level arithmetic.
fn contraction_oracle(q: &[RQuaternion; 4]) -> Option<bool> {
    let [a, b, c, d] = q.each_ref().map(coords);
    let ab = hamilton(&a, &inv(&b)?);
    let cd = hamilton(&c, &inv(&d)?);
    let s = [&a[0] + &c[0], &a[1] + &c[1], &a[2] + &c[2], &a[3] + &c[3]];
    let t = [&b[0] + &d[0], &b[1] + &d[1], &b[2] + &d[2], &b[3] + &d[3]];
    let mid = hamilton(&s, &inv(&t)?);
    Some(normsq4(&sub4(&mid, &ab)) <= normsq4(&sub4(&cd, &ab)))
}

fn contraction_checks() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = 0;
    for _ in 0..10_000 {
        let q = same_hexadecant_quadruple(&mut rng, 100);
        if !q[1].same_hexadecant(&q[3]) || contraction_oracle(&q) == Some(false) {
            failures += 1;
        }
    }
    let ce = contraction_counterexample(&mut rng, 100_000);
    let ce_ok = ce.as_ref().is_some_and(|q| !q[1].same_hexadecant(&q[3]) && contraction_oracle(q) == Some(false));
    let shown = ce.map_or("none found".into(), |q| q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
    (failures == 0 && ce_ok, format!("10000 quadruples, {failures} failures; counterexample {shown}"))
}

#[derive(Default)]
struct PipelineTally {
    runs: usize,
    nondegenerate: usize,
    witness_pairs: usize,
    recovery_failures: Vec<String>,
    size_failures: Vec<String>,
    max_multiplicity: usize,
    kissing_failures: Vec<String>,
    chain_failures: Vec<String>,
}

/// Reruns each stage from library primitives with exhaustive scans, recovers every
/// witness pair, recounts ball multiplicities with exact squared norms, and checks the
/// final inequality against a brute-force energy.
fn pipeline_runs() -> PipelineTally {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let prec = Precision::default();
    let mut t = PipelineTally::default();
    for run in 0..120 {
        let n = rng.gen_range(10..=30);
        let a: ElementSet<RQuaternion> = ElementSet::new(structured_quaternions(n, &mut rng).unwrap());
        let policy = [SidePolicy::Auto, SidePolicy::Left, SidePolicy::Right][run % 3];
        let cert = run_pipeline(&a, &PipelineOptions { side: policy, ..Default::default() }).unwrap();
        t.runs += 1;
        let sub = hexadecant_partition(&a).remove(0).set;
        assert_eq!(cert.restricted_size, sub.len());
        if cert.degenerate {
            continue;
        }
        t.nondegenerate += 1;

        let profile = ratio_profile_brute(&sub).unwrap();
        let sel = select_dyadic(&profile, policy, LevelRule::Certifying).unwrap();
        let r = &sel.members;
        assert_eq!(cert.window, r.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "run {run}");
        let phi = nearest_map(r, &prec).unwrap().phi;
        let side = sel.side;
        let e = sub.elements();
        // (numerator, denominator) index pairs per ratio: ab⁻¹ on the left, b⁻¹a on the right
        let mut by_ratio: BTreeMap<Vec<u8>, Vec<(usize, usize)>> = BTreeMap::new();
        for (na, a) in e.iter().enumerate() {
            for (nb, b) in e.iter().enumerate() {
                let bi = b.inverse().unwrap();
                let v = if side == Side::Left { a * &bi } else { &bi * a };
                by_ratio.entry(v.canonical_key()).or_default().push((na, nb));
            }
        }
        let mut points: BTreeMap<Vec<u8>, RQuaternion> = BTreeMap::new();
        for (i, x) in r.iter().enumerate() {
            let y = &r[phi[i]];
            let (xs, ys) = (&by_ratio[&x.canonical_key()], &by_ratio[&y.canonical_key()]);
            let mut keys = BTreeSet::new();
            for &(na, nb) in xs {
                for &(nc, nd) in ys {
                    let (p, q) = (&e[na] + &e[nc], &e[nb] + &e[nd]);
                    t.witness_pairs += 1;
                    let got = recover_quadruple(&p, &q, x, y, side).unwrap();
                    if got != (e[na].clone(), e[nb].clone(), e[nc].clone(), e[nd].clone()) {
                        t.recovery_failures.push(format!("run {run} x={x}"));
                    }
                    let qi = q.inverse().unwrap();
                    let z = if side == Side::Left { &p * &qi } else { &qi * &p };
                    let mut key = p.canonical_key();
                    q.write_key(&mut key);
                    keys.insert(key);
                    points.insert(z.canonical_key(), z);
                }
            }
            let expected = xs.len() * ys.len();
            if keys.len() != expected || cert.witnesses[i].size != expected {
                t.size_failures.push(format!("run {run} x={x}: |S_x|={} expected {expected}", keys.len()));
            }
        }
        let radius: Vec<Rational> = r.iter().zip(&phi).map(|(x, &j)| (x - &r[j]).normsq()).collect();
        let separated = (0..r.len()).all(|i| (0..r.len()).all(|j| i == j || (&r[j] - &r[i]).normsq() >= radius[i]));
        let mult = points
            .values()
            .map(|z| r.iter().zip(&radius).filter(|(x, rad)| (z - *x).normsq() <= **rad).count())
            .max()
            .unwrap_or(0);
        t.max_multiplicity = t.max_multiplicity.max(mult);
        let kissing_ok = cert.kissing.as_ref().is_some_and(|k| k.is_valid());
        if !separated || !cert.center_separation || mult != cert.ball_multiplicity || mult > 25 || !kissing_ok {
            t.kissing_failures.push(format!(
                "run {run}: multiplicity {mult} (certificate {}), separated {separated}, kissing {kissing_ok}",
                cert.ball_multiplicity
            ));
        }

        let n = sub.len();
        let log = (usize::BITS - (n - 1).leading_zeros()) as u64;
        let s = key_count(e.iter().flat_map(|x| e.iter().map(move |y| x + y))) as u64;
        let p = key_count(e.iter().flat_map(|x| e.iter().map(move |y| x * y))) as u64;
        let en = energy_oracle(&sub);
        let denom = BigInt::from(200 * log);
        let main = BigInt::from(s * s) * &denom >= BigInt::from(en);
        let product = BigInt::from(s * s) * BigInt::from(p) * &denom >= BigInt::from(n).pow(4);
        if !(main && product && cert.inequality_holds && cert.product_inequality_holds && cert.energy == en) {
            t.chain_failures.push(format!("run {run}: |A+A|={s} E={en} n={n}"));
        }
    }
    t
}

fn summary(bad: &[String]) -> String {
    match bad.first() {
        None => String::new(),
        Some(first) => format!("; {} failure(s), first: {first}", bad.len()),
    }
}

fn matrix_verifiers() -> (bool, String) {
    let cfg = SuiteConfig { seed: 8, matrix_quadruples: 1000, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut batch = Vec::new();
    let mut verdicts = check_matrix_suite(&cfg, &mut rng, &mut batch).unwrap();
    verdicts.push(check_block_identity(1000, &mut rng).unwrap());
    let failed: Vec<String> = verdicts.iter().filter(|v| !v.passed).map(|v| v.lemma.clone()).collect();
    let rows_ok = batch.len() == 4000 && batch.iter().all(|r| r.verdict == "pass");
    let detail =
        verdicts.iter().map(|v| format!("{} {}/{}", v.lemma, v.trials - v.failures, v.trials)).collect::<Vec<_>>();
    (failed.is_empty() && rows_ok, detail.join(", "))
}

fn growth_trend() -> String {
    let mut parts = Vec::new();
    for n in [8, 16, 32, 64] {
        let row = growth_row("chang", &chang_family(n, 2).unwrap()).unwrap();
        parts.push(format!("unipotent n={n} exponent {}", row.exponent));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in [8, 16, 32] {
        let a: ElementSet<RQuaternion> = ElementSet::new(structured_quaternions(n, &mut rng).unwrap());
        let row = growth_row("structured", &a).unwrap();
        parts.push(format!("structured n={n} exponent {}", row.exponent));
    }
    parts.join(", ")
}

#[test]
fn acceptance() {
    let mut outcomes = Vec::new();
    outcomes.push(timed(1, "unipotent family sizes and condition numbers", Some(1), unipotent_exactness));

    let (quats, mats) = energy_sets();
    let mut rich = 0;
    outcomes.push(timed(2, "fast energy equals brute energy", Some(60), || {
        let mut bad = energy_equivalence(&quats, &mut rich);
        bad.extend(energy_equivalence(&mats, &mut rich));
        (bad.is_empty(), format!("200 quaternion and 50 matrix sets, {rich} with nontrivial energy{}", summary(&bad)))
    }));
    outcomes.push(timed(3, "E(A)·|AA| >= |A|⁴", None, || {
        let mut bad = cauchy_schwarz(&quats);
        bad.extend(cauchy_schwarz(&mats));
        (bad.is_empty(), format!("250 sets{}", summary(&bad)))
    }));
    outcomes.push(timed(4, "same-sign-class contraction", Some(30), contraction_checks));

    let start = Instant::now();
    let t = pipeline_runs();
    let elapsed = start.elapsed();
    let enough = t.nondegenerate >= 100;
    let five = Outcome {
        id: 5,
        name: "quadruple recovery and witness sizes",
        passed: enough && t.recovery_failures.is_empty() && t.size_failures.is_empty(),
        detail: format!(
            "{} pairs over {} runs{}{}",
            t.witness_pairs,
            t.nondegenerate,
            summary(&t.recovery_failures),
            summary(&t.size_failures)
        ),
        elapsed,
        limit: None,
    };
    five.print();
    let six = Outcome {
        id: 6,
        name: "ball multiplicity at most 25",
        passed: enough && t.kissing_failures.is_empty(),
        detail: format!(
            "{} of {} runs nondegenerate, max multiplicity {}{}",
            t.nondegenerate,
            t.runs,
            t.max_multiplicity,
            summary(&t.kissing_failures)
        ),
        elapsed,
        limit: Some(Duration::from_secs(300)),
    };
    six.print();
    let seven = Outcome {
        id: 7,
        name: "|A+A|² >= E(Ã)/(200⌈log₂|Ã|⌉)",
        passed: enough && t.chain_failures.is_empty(),
        detail: format!("{} nondegenerate runs{}", t.nondegenerate, summary(&t.chain_failures)),
        elapsed,
        limit: None,
    };
    seven.print();
    outcomes.extend([five, six, seven]);

    outcomes.push(timed(8, "matrix verifier suite and block identity", Some(300), matrix_verifiers));
    outcomes.push(timed(9, "determinant perturbation bound", None, || {
        let v = check_delta_soundness(10_000, &mut ChaCha8Rng::seed_from_u64(9));
        (v.passed && v.trials == 10_000, format!("{} pairs, {} failures", v.trials, v.failures))
    }));
    line(&format!("criterion 10 INFO: growth exponents (not asserted): {}", growth_trend()));

    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.ok()).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
