//! Reports and their JSON, CSV and markdown renderings.

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::ballgeom::kissing_bound;
use crate::error::{Error, Result};
use crate::exactnum::RingElement;
use crate::search::SearchResult;
use crate::setalgebra::{energy, productset, sumset, ElementSet, EnergyMethod};
use crate::suite::SuiteReport;
use crate::witness::{ceil_log2, Certificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(Error::BadSpec(format!("unknown format `{other}`"))),
        }
    }
}

/// `(|A|, |A+A|, |AA|, E(A))` with the lower bound on `max(|A+A|, |AA|)` implied by
/// `|A+A|²|AA| >= |A|⁴/(8K⌈log₂|A|⌉)`, the ratio of the observed maximum to it, and
/// the growth exponent `log max / log |A|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub label: String,
    pub size: usize,
    pub sumset: usize,
    pub productset: usize,
    pub energy: u64,
    pub bound: String,
    pub ratio: String,
    pub exponent: String,
}

pub fn growth_row<T: RingElement>(label: &str, a: &ElementSet<T>) -> Result<GrowthRow> {
    let n = a.len();
    let s = sumset(a).len();
    let p = productset(a).len();
    let e = energy(a, EnergyMethod::Fast)?.value;
    let max = s.max(p) as f64;
    let log = ceil_log2(n);
    let (bound, ratio, exponent) = match a.kind() {
        Some(kind) if n >= 2 => {
            let c = 8.0 * kissing_bound(kind).to_f64().unwrap_or(f64::INFINITY);
            let b = ((n as f64).powi(4) / (c * log as f64)).cbrt();
            (format!("{b:.6}"), format!("{:.6}", max / b), format!("{:.6}", max.ln() / (n as f64).ln()))
        }
        _ => ("0".into(), "undefined".into(), "undefined".into()),
    };
    Ok(GrowthRow { label: label.into(), size: n, sumset: s, productset: p, energy: e, bound, ratio, exponent })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub rows: Vec<GrowthRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<SuiteReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchResult>,
    pub notes: Vec<String>,
}

pub fn emit(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report).expect("report serializes") + "\n"),
        Format::Csv => emit_csv(report),
        Format::Markdown => Ok(emit_markdown(report)),
    }
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Io(format!("csv: {e}"))
}

fn emit_csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(suite) = report.suite.as_ref().filter(|_| report.rows.is_empty()) {
        w.write_record(["quadruple", "check", "verdict", "width"]).map_err(csv_err)?;
        for r in &suite.batch {
            w.write_record([r.quadruple.to_string(), r.check.clone(), r.verdict.clone(), r.width.clone()])
                .map_err(csv_err)?;
        }
    } else {
        w.write_record(["label", "size", "sumset", "productset", "energy", "bound", "ratio", "exponent"])
            .map_err(csv_err)?;
        for r in &report.rows {
            w.write_record([
                r.label.clone(),
                r.size.to_string(),
                r.sumset.to_string(),
                r.productset.to_string(),
                r.energy.to_string(),
                r.bound.clone(),
                r.ratio.clone(),
                r.exponent.clone(),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(csv_err)?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn emit_markdown(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# sumprod {}\n", report.command);
    if !report.rows.is_empty() {
        out.push_str("| set | size | A+A | AA | E(A) | bound | ratio | exponent |\n");
        out.push_str("|---|---|---|---|---|---|---|---|\n");
        for r in &report.rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} | {} |",
                r.label, r.size, r.sumset, r.productset, r.energy, r.bound, r.ratio, r.exponent
            );
        }
        out.push('\n');
    }
    if let Some(c) = &report.certificate {
        certificate_markdown(c, &mut out);
    }
    if let Some(s) = &report.suite {
        out.push_str("## Lemma checks\n\n| check | trials | failures | verdict |\n|---|---|---|---|\n");
        for v in &s.verdicts {
            let verdict = if v.passed { "pass" } else { "FAIL" };
            let _ = writeln!(out, "| {} | {} | {} | {} |", v.lemma, v.trials, v.failures, verdict);
        }
        for v in &s.verdicts {
            if let Some(ce) = &v.counterexample {
                let _ = writeln!(out, "\n{}: `{}`", v.lemma, ce);
            }
        }
        out.push('\n');
    }
    if let Some(s) = &report.search {
        let _ = writeln!(
            out,
            "## Search\n\nn = {}, |A+A| = {}, |AA| = {}, exponent {} ({})\n",
            s.n, s.sumset, s.productset, s.exponent, s.note
        );
    }
    for n in &report.notes {
        let _ = writeln!(out, "- {n}");
    }
    out
}

fn certificate_markdown(c: &Certificate, out: &mut String) {
    let _ = writeln!(out, "## Certificate ({})\n", c.kind);
    let _ = writeln!(
        out,
        "Restricted to class `{}`: {} of {} elements ({} nonempty classes, at most {}).\n",
        c.class_label, c.restricted_size, c.input_size, c.nonempty_classes, c.class_count_bound
    );
    let _ = writeln!(
        out,
        "|Ã+Ã| = {}, |ÃÃ| = {}, E(Ã) = {}, side {:?}, level I = {}, |R| = {}.\n",
        c.sumset_size,
        c.productset_size,
        c.energy,
        c.side,
        c.level,
        c.window.len()
    );
    match &c.chain {
        None => out.push_str("Degenerate window: inequality not asserted.\n\n"),
        Some(ch) => {
            let mark = |b: bool| if b { "holds" } else { "FAILS" };
            let _ = writeln!(out, "Chain with K = {} and ⌈log₂|Ã|⌉ = {}:\n", c.multiplicity_cap, ch.log2_size);
            let _ = writeln!(
                out,
                "1. |Ã+Ã|² = {} >= |⋃ S_x| = {} ({})",
                ch.sumset_squared,
                c.union_size,
                mark(ch.sumset_covers_union)
            );
            let _ =
                writeln!(out, "2. |⋃ S_x| >= Σ|S_x|/K = {} ({})", ch.union_over_cap, mark(ch.union_covers_witnesses));
            let _ = writeln!(
                out,
                "3. Σ|S_x| = {} >= |R|·4^I = {} ({})",
                c.witness_total,
                ch.level_mass,
                mark(ch.witnesses_cover_level)
            );
            let _ = writeln!(
                out,
                "4. |R|·4^I/K = {} >= E(Ã)/(8K⌈log₂|Ã|⌉) = {} ({})",
                ch.level_over_cap,
                ch.energy_bound,
                mark(ch.level_covers_energy)
            );
            let _ = writeln!(out, "5. |Ã+Ã|² >= E(Ã)/(8K⌈log₂|Ã|⌉): {}", mark(ch.final_holds));
            let _ = writeln!(
                out,
                "6. |Ã+Ã|²·|ÃÃ| >= |Ã|⁴/(8K⌈log₂|Ã|⌉) = {}: {}\n",
                ch.product_bound,
                mark(ch.product_holds)
            );
            let _ = writeln!(
                out,
                "Ball multiplicity {} (pair multiplicity {}), center separation {}, kissing configuration {}.\n",
                c.ball_multiplicity,
                c.max_multiplicity,
                mark(c.center_separation),
                mark(c.kissing.as_ref().is_some_and(|k| k.is_valid()))
            );
        }
    }
    for w in &c.warnings {
        let _ = writeln!(out, "- warning: {w}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;
    use crate::exactnum::RQuaternion;
    use crate::matrixlab::chang_family;
    use crate::witness::{run_pipeline, PipelineOptions};

    #[test]
    fn unipotent_row() {
        let r = growth_row("chang", &chang_family(16, 2).unwrap()).unwrap();
        assert_eq!((r.size, r.sumset, r.productset), (16, 31, 31));
    }

    #[test]
    fn renderings() {
        let a: ElementSet<RQuaternion> = (1..=8).map(|x| RQuaternion::real(int(x))).collect();
        let report = Report {
            command: "pipeline".into(),
            rows: vec![growth_row("range", &a).unwrap()],
            certificate: Some(run_pipeline(&a, &PipelineOptions::default()).unwrap()),
            ..Default::default()
        };
        let json = emit(&report, Format::Json).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        let csv = emit(&report, Format::Csv).unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("label,size,sumset,productset,energy"));
        let md = emit(&report, Format::Markdown).unwrap();
        assert!(md.contains("|Ã+Ã|² >= E(Ã)/(8K⌈log₂|Ã|⌉): holds"));
        assert_eq!(emit(&report, Format::Markdown).unwrap(), md);
    }
}
