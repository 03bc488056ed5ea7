use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::certificate::{Certificate, ChainRecord, NearestRecord, WitnessRecord};
use super::{
    build_witness, build_witness_from_profile, nearest_map, recover_quadruple, select_dyadic, LevelRule, SidePolicy,
    WitnessPair,
};
use crate::ballgeom::{
    audit_multiplicity, construct_kissing, displayed_matrix_bound, kissing_bound, Ball, MetricElement,
};
use crate::error::{Error, Result};
use crate::exactnum::quaternion::hexadecant_label;
use crate::exactnum::rational::{fmt_rational, int, pow2_neg};
use crate::exactnum::{Precision, RMatrix, RQuaternion, Rational, SetKind};
use crate::matrixlab::{class_partition, condition_number, FamilyParams};
use crate::setalgebra::{
    energy, hexadecant_partition, productset, ratio_profile, ratio_profile_brute, sumset, ElementSet, EnergyMethod,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Keyed profile maps.
    #[default]
    Fast,
    /// Exhaustive scans everywhere; used by the certificate verifier.
    Brute,
}

#[derive(Clone, Debug, Default)]
pub struct PipelineOptions {
    pub side: SidePolicy,
    pub rule: LevelRule,
    /// Overrides the multiplicity cap from the kissing bound.
    pub cap: Option<BigUint>,
    /// Matrix class parameters; derived from the set when absent.
    pub params: Option<FamilyParams>,
    pub precision: Precision,
    pub strategy: Strategy,
}

/// The largest sign class (quaternions) or ε-grid class (matrices) of a set.
#[derive(Clone, Debug)]
pub struct Restriction<T> {
    pub subset: ElementSet<T>,
    pub label: String,
    pub nonempty_classes: usize,
    pub class_count_bound: String,
    pub params: Option<FamilyParams>,
    pub warnings: Vec<String>,
}

pub trait PipelineElement: MetricElement {
    fn restrict(set: &ElementSet<Self>, opts: &PipelineOptions) -> Result<Restriction<Self>>;
}

impl PipelineElement for RQuaternion {
    fn restrict(set: &ElementSet<Self>, _: &PipelineOptions) -> Result<Restriction<Self>> {
        let classes = hexadecant_partition(set);
        let nonempty = classes.len();
        let first = classes.into_iter().next();
        let (subset, label) = match first {
            Some(c) => {
                let label = hexadecant_label(c.pattern);
                (c.set, label)
            }
            None => (ElementSet::new(Vec::new()), String::from("none")),
        };
        Ok(Restriction {
            subset,
            label,
            nonempty_classes: nonempty,
            class_count_bound: "16".into(),
            params: None,
            warnings: Vec::new(),
        })
    }
}

/// `k` from the set and `M` the smallest integer above every condition-number enclosure.
pub fn derive_params(set: &ElementSet<RMatrix>) -> Result<FamilyParams> {
    let k = set.iter().next().map(RMatrix::dim).ok_or_else(|| Error::Precondition("empty matrix set".into()))?;
    let mut m = int(1);
    for a in set.iter() {
        let c = condition_number(a, &pow2_neg(20))?;
        m = std::cmp::max(m, c.hi.ceil());
    }
    FamilyParams::new(k, m)
}

impl PipelineElement for RMatrix {
    fn restrict(set: &ElementSet<Self>, opts: &PipelineOptions) -> Result<Restriction<Self>> {
        let params = match &opts.params {
            Some(p) => p.clone(),
            None => derive_params(set)?,
        };
        let part = class_partition(set, &params, &opts.precision)?;
        let nonempty = part.classes.len();
        let (label, subset) = part.classes.into_iter().next().map(|(k, s)| (k.to_string(), s)).unwrap_or_default();
        Ok(Restriction {
            subset,
            label,
            nonempty_classes: nonempty,
            class_count_bound: params.class_count().to_string(),
            params: Some(params),
            warnings: part.warnings,
        })
    }
}

/// `⌈log₂ n⌉` for `n >= 1`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

fn cap_for(kind: SetKind, opts: &PipelineOptions) -> BigUint {
    opts.cap.clone().unwrap_or_else(|| kissing_bound(kind))
}

/// Restrict, select a dyadic window, build every witness set, audit the balls, and
/// check the chain `|Ã+Ã|² >= union >= Σ|S_x|/K >= |R|·4^I/K >= E(Ã)/(8K⌈log₂|Ã|⌉)`.
pub fn run_pipeline<T: PipelineElement>(a: &ElementSet<T>, opts: &PipelineOptions) -> Result<Certificate> {
    let prec = &opts.precision;
    let (a, had_zero) = a.without_zero();
    if a.len() < 2 {
        return Err(Error::Precondition(format!("pipeline needs at least two nonzero elements, got {}", a.len())));
    }
    a.check_invertible()?;
    let kind = a.kind().expect("nonempty");
    let mut warnings = Vec::new();
    if had_zero {
        warnings.push("zero element dropped".to_string());
    }
    let cap = cap_for(kind, opts);
    let restriction = T::restrict(&a, opts)?;
    warnings.extend(restriction.warnings.iter().cloned());
    let sub = &restriction.subset;
    let n = sub.len();

    let mut cert = Certificate {
        kind: kind.to_string(),
        params: restriction.params.as_ref().map(FamilyParams::to_config),
        input_size: a.len(),
        input_sumset: sumset(&a).len(),
        input_productset: productset(&a).len(),
        class_label: restriction.label.clone(),
        class_count_bound: restriction.class_count_bound.clone(),
        nonempty_classes: restriction.nonempty_classes,
        restricted_size: n,
        sumset_size: sumset(sub).len(),
        productset_size: productset(sub).len(),
        multiplicity_cap: cap.to_string(),
        displayed_cap: match kind {
            SetKind::Matrix { k } => Some(displayed_matrix_bound(k).to_string()),
            SetKind::Quaternion => None,
        },
        level_rule: opts.rule,
        side_policy: opts.side,
        degenerate: true,
        ..Certificate::default()
    };
    if n < 2 {
        warnings.push(format!("restricted class has {n} element(s)"));
        cert.energy = n as u64;
        cert.warnings = warnings;
        return Ok(cert);
    }

    let profile = match opts.strategy {
        Strategy::Fast => ratio_profile(sub)?,
        Strategy::Brute => ratio_profile_brute(sub)?,
    };
    cert.energy = match opts.strategy {
        Strategy::Fast => profile.energy(),
        Strategy::Brute => energy(sub, EnergyMethod::Brute)?.value,
    };
    cert.ratioset_size = profile.entries.len();
    let sel = select_dyadic(&profile, opts.side, opts.rule)?;
    cert.side = sel.side;
    cert.left_sum = sel.left_sum;
    cert.right_sum = sel.right_sum;
    cert.level = sel.level;
    cert.window = sel.members.iter().map(|x| x.to_string()).collect();
    cert.window_multiplicities = sel.multiplicities.clone();
    cert.mass = sel.mass;
    if sel.is_degenerate() {
        warnings.push(format!("dyadic window has {} element(s)", sel.members.len()));
        cert.warnings = warnings;
        return Ok(cert);
    }
    cert.degenerate = false;

    let r = &sel.members;
    let nearest = nearest_map(r, prec)?;
    cert.nearest = r
        .iter()
        .zip(&nearest.phi)
        .zip(&nearest.radii)
        .map(|((x, &j), radius)| NearestRecord { x: x.to_string(), phi: r[j].to_string(), radius: radius.clone() })
        .collect();

    let balls: Vec<Ball<T>> =
        r.iter().zip(&nearest.phi).map(|(x, &j)| Ball::new(x.clone(), r[j].clone(), prec)).collect();
    let elems = sub.elements();
    // pair key -> (quotient point, owners)
    let mut union: BTreeMap<Vec<u8>, (T, usize)> = BTreeMap::new();
    let mut membership_failures = 0;
    let mut recovery_failures = 0;
    let mut witness_total = 0u64;
    for (i, x) in r.iter().enumerate() {
        let j = nearest.phi[i];
        let y = &r[j];
        let pairs: Vec<WitnessPair<T>> = match opts.strategy {
            Strategy::Fast => build_witness_from_profile(sub, &profile, x, y, sel.side)?,
            Strategy::Brute => build_witness(sub, x, y, sel.side)?,
        };
        let mut keys = std::collections::BTreeSet::new();
        for w in &pairs {
            keys.insert(w.key());
            let quad = [&elems[w.quad[0]], &elems[w.quad[1]], &elems[w.quad[2]], &elems[w.quad[3]]];
            match recover_quadruple(&w.p, &w.q, x, y, sel.side) {
                Ok((ra, rb, rc, rd)) if [&ra, &rb, &rc, &rd] == quad => {}
                _ => recovery_failures += 1,
            }
            let z = w.quotient(sel.side)?;
            if !balls[i].contains(&z, prec) {
                membership_failures += 1;
            }
            union.entry(w.key()).or_insert_with(|| (z, 0)).1 += 1;
        }
        let expected = sel.multiplicities[i] * sel.multiplicities[j];
        witness_total += pairs.len() as u64;
        cert.witnesses.push(WitnessRecord { x: x.to_string(), size: keys.len(), expected });
    }
    cert.witness_total = witness_total;
    cert.union_size = union.len() as u64;
    cert.max_multiplicity = union.values().map(|(_, c)| *c).max().unwrap_or(0);
    cert.membership_failures = membership_failures;
    cert.recovery_failures = recovery_failures;

    let mut points: BTreeMap<Vec<u8>, T> = BTreeMap::new();
    for (z, _) in union.values() {
        points.entry(z.canonical_key()).or_insert_with(|| z.clone());
    }
    let points: Vec<T> = points.into_values().collect();
    match audit_multiplicity(&balls, &points, &cap, prec) {
        Ok(audit) => {
            cert.center_separation = true;
            cert.ball_multiplicity = audit.max_multiplicity;
            if let Some(idx) = audit.argmax {
                let p = &points[idx];
                let containing: Vec<Ball<T>> = balls.iter().filter(|b| b.contains(p, prec)).cloned().collect();
                match construct_kissing(p, &containing, prec) {
                    Ok(cfg) => cert.kissing = Some(cfg),
                    Err(e) => warnings.push(format!("kissing configuration: {e}")),
                }
            }
        }
        Err(Error::CenterSeparationViolated { x, y }) => {
            warnings.push(format!("center {y} inside the ball around {x}"));
        }
        Err(e) => return Err(e),
    }

    let chain = ChainRecord::new(n, &cert, sel.members.len(), sel.level, &cap);
    cert.inequality_holds = chain.inequality_holds();
    cert.product_inequality_holds = chain.product_holds;
    cert.chain = Some(chain);
    cert.warnings = warnings;
    Ok(cert)
}

impl ChainRecord {
    fn new(n: usize, cert: &Certificate, r_len: usize, level: u32, cap: &BigUint) -> Self {
        let log = ceil_log2(n);
        let constant = BigUint::from(8u32) * cap;
        let denom = &constant * BigUint::from(log);
        let s = BigUint::from(cert.sumset_size);
        let sumset_sq = &s * &s;
        let union = BigUint::from(cert.union_size);
        let total = BigUint::from(cert.witness_total);
        let level_mass = BigUint::from(r_len) << (2 * level as usize);
        let energy = BigUint::from(cert.energy);
        let n4 = BigUint::from(n).pow(4);
        let ratio = |num: &BigUint, den: &BigUint| -> String {
            if den.is_zero() {
                return "undefined".into();
            }
            let q = Rational::new(num.clone().into(), den.clone().into());
            fmt_rational(&q)
        };
        ChainRecord {
            log2_size: log,
            constant: constant.to_string(),
            sumset_squared: sumset_sq.to_string(),
            level_mass: level_mass.to_string(),
            union_over_cap: ratio(&total, cap),
            level_over_cap: ratio(&level_mass, cap),
            energy_bound: ratio(&energy, &denom),
            product_bound: ratio(&n4, &denom),
            sumset_covers_union: sumset_sq >= union,
            union_covers_witnesses: &union * cap >= total,
            witnesses_cover_level: total >= level_mass,
            level_covers_energy: &level_mass * BigUint::from(8u32) * BigUint::from(log) >= energy,
            final_holds: !denom.is_zero() && &sumset_sq * &denom >= energy,
            product_holds: !denom.is_zero() && &sumset_sq * BigUint::from(cert.productset_size) * &denom >= n4,
        }
    }

    fn inequality_holds(&self) -> bool {
        self.final_holds
    }
}
