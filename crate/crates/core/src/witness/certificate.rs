use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::pipeline::{run_pipeline, PipelineElement, PipelineOptions, Strategy};
use super::{LevelRule, Side, SidePolicy};
use crate::ballgeom::{KissingConfig, RadiusRecord};
use crate::error::{Error, Result};
use crate::exactnum::Precision;
use crate::matrixlab::ParamsConfig;
use crate::setalgebra::ElementSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearestRecord {
    pub x: String,
    pub phi: String,
    pub radius: RadiusRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub x: String,
    /// Distinct pairs in `S_x`.
    pub size: usize,
    /// `ℓ(x)·ℓ(φ(x))` (or `r·r` on the right side).
    pub expected: usize,
}

/// Each link of the final chain, as exact integers or rationals in text form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRecord {
    /// `⌈log₂|Ã|⌉`.
    pub log2_size: u32,
    /// `8K`.
    pub constant: String,
    pub sumset_squared: String,
    /// `|R|·4^I`.
    pub level_mass: String,
    /// `Σ|S_x|/K`.
    pub union_over_cap: String,
    /// `|R|·4^I/K`.
    pub level_over_cap: String,
    /// `E(Ã)/(8K⌈log₂|Ã|⌉)`.
    pub energy_bound: String,
    /// `|Ã|⁴/(8K⌈log₂|Ã|⌉)`.
    pub product_bound: String,
    pub sumset_covers_union: bool,
    pub union_covers_witnesses: bool,
    pub witnesses_cover_level: bool,
    pub level_covers_energy: bool,
    pub final_holds: bool,
    pub product_holds: bool,
}

/// Every intermediate quantity of one pipeline run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsConfig>,
    pub input_size: usize,
    pub input_sumset: usize,
    pub input_productset: usize,
    pub class_label: String,
    pub class_count_bound: String,
    pub nonempty_classes: usize,
    pub restricted_size: usize,
    pub sumset_size: usize,
    pub productset_size: usize,
    pub energy: u64,
    pub ratioset_size: usize,
    pub side_policy: SidePolicy,
    pub side: Side,
    pub left_sum: u64,
    pub right_sum: u64,
    pub level_rule: LevelRule,
    pub level: u32,
    pub window: Vec<String>,
    pub window_multiplicities: Vec<usize>,
    pub mass: u64,
    pub degenerate: bool,
    pub nearest: Vec<NearestRecord>,
    pub witnesses: Vec<WitnessRecord>,
    pub witness_total: u64,
    pub union_size: u64,
    /// Largest number of `x` whose witness sets share one pair.
    pub max_multiplicity: usize,
    /// Largest number of balls containing one quotient point.
    pub ball_multiplicity: usize,
    pub multiplicity_cap: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub displayed_cap: Option<String>,
    pub center_separation: bool,
    pub membership_failures: usize,
    pub recovery_failures: usize,
    pub kissing: Option<KissingConfig>,
    pub chain: Option<ChainRecord>,
    pub inequality_holds: bool,
    pub product_inequality_holds: bool,
    pub warnings: Vec<String>,
}

/// Field names in declaration order; mismatches are reported against the first one that differs.
pub const CERTIFICATE_FIELDS: &[&str] = &[
    "kind",
    "params",
    "input_size",
    "input_sumset",
    "input_productset",
    "class_label",
    "class_count_bound",
    "nonempty_classes",
    "restricted_size",
    "sumset_size",
    "productset_size",
    "energy",
    "ratioset_size",
    "side_policy",
    "side",
    "left_sum",
    "right_sum",
    "level_rule",
    "level",
    "window",
    "window_multiplicities",
    "mass",
    "degenerate",
    "nearest",
    "witnesses",
    "witness_total",
    "union_size",
    "max_multiplicity",
    "ball_multiplicity",
    "multiplicity_cap",
    "displayed_cap",
    "center_separation",
    "membership_failures",
    "recovery_failures",
    "kissing",
    "chain",
    "inequality_holds",
    "product_inequality_holds",
    "warnings",
];

impl Certificate {
    /// Every per-run check passed: no degenerate window, all witness sets have the
    /// predicted size, recovery and ball membership never failed, multiplicities
    /// within the cap, kissing configuration valid, and the final chain holds.
    pub fn all_checks_pass(&self) -> bool {
        let cap: Option<BigUint> = self.multiplicity_cap.parse().ok();
        !self.degenerate
            && self.witnesses.iter().all(|w| w.size == w.expected)
            && self.recovery_failures == 0
            && self.membership_failures == 0
            && self.center_separation
            && cap.is_some_and(|c| BigUint::from(self.ball_multiplicity) <= c)
            && self.max_multiplicity <= self.ball_multiplicity
            && self.kissing.as_ref().is_some_and(KissingConfig::is_valid)
            && self.inequality_holds
            && self.product_inequality_holds
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::BadSpec(format!("certificate: {e}")))
    }
}

/// Recompute the certificate for `a` with exhaustive scans and compare every field.
pub fn verify_certificate<T: PipelineElement>(
    cert: &Certificate,
    a: &ElementSet<T>,
    precision: &Precision,
) -> Result<()> {
    let params = match &cert.params {
        Some(p) => Some(p.resolve()?),
        None => None,
    };
    let cap = cert.multiplicity_cap.parse().map_err(|_| Error::Mismatch("multiplicity_cap".into()))?;
    let opts = PipelineOptions {
        side: cert.side_policy,
        rule: cert.level_rule,
        cap: Some(cap),
        params,
        precision: precision.clone(),
        strategy: Strategy::Brute,
    };
    let fresh = run_pipeline(a, &opts)?;
    let (claimed, actual) = (to_map(cert), to_map(&fresh));
    for field in CERTIFICATE_FIELDS {
        if claimed.get(*field) != actual.get(*field) {
            return Err(Error::Mismatch((*field).to_string()));
        }
    }
    Ok(())
}

fn to_map(c: &Certificate) -> serde_json::Map<String, Value> {
    match serde_json::to_value(c).expect("certificate serializes") {
        Value::Object(m) => m,
        _ => unreachable!("certificate is a struct"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_list_covers_the_serialized_form() {
        let c = Certificate {
            params: Some(ParamsConfig { k: 2, m: "1/1".into(), delta: None, epsilon: None }),
            displayed_cap: Some("1".into()),
            ..Default::default()
        };
        let m = to_map(&c);
        let mut keys: Vec<&str> = m.keys().map(String::as_str).collect();
        keys.sort();
        let mut listed = CERTIFICATE_FIELDS.to_vec();
        listed.sort();
        assert_eq!(keys, listed);
    }
}
