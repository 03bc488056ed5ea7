//! File formats consumed and produced by the library, exercised end to end.

use sumprod_core::exactnum::rational::int;
use sumprod_core::exactnum::{Precision, RQuaternion};
use sumprod_core::generate::{generate, Family, GeneratorSpec};
use sumprod_core::matrixlab::{compute_delta, ParamsConfig, Perturbation};
use sumprod_core::report::{emit, Format, Report};
use sumprod_core::setalgebra::{profile_csv, ratio_profile, AnySet, ElementSet};
use sumprod_core::suite::{run_suite, SuiteConfig};
use sumprod_core::witness::{run_pipeline, verify_certificate, Certificate, PipelineOptions, CERTIFICATE_FIELDS};
use sumprod_core::Error;

#[test]
fn profile_csv_rows() {
    let a: ElementSet<RQuaternion> = [1, 2, 4].iter().map(|&x| RQuaternion::real(int(x))).collect();
    let text = profile_csv(&ratio_profile(&a).unwrap()).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rows.headers().unwrap(), vec!["key", "value", "left", "right"]);
    let mut counts: Vec<(String, usize, usize)> = rows
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[1].to_string(), r[2].parse().unwrap(), r[3].parse().unwrap())
        })
        .collect();
    counts.sort();
    // ratios of {1, 2, 4}: 1 three ways, 2 and 1/2 two ways, 4 and 1/4 once
    assert_eq!(
        counts,
        vec![
            ("(1/1,0/1,0/1,0/1)".into(), 3, 3),
            ("(1/2,0/1,0/1,0/1)".into(), 2, 2),
            ("(1/4,0/1,0/1,0/1)".into(), 1, 1),
            ("(2/1,0/1,0/1,0/1)".into(), 2, 2),
            ("(4/1,0/1,0/1,0/1)".into(), 1, 1),
        ]
    );
}

#[test]
fn certificate_json_round_trip_and_tamper() {
    let mut spec = GeneratorSpec::new(Family::ClusterMatrix, 9);
    spec.perturbation = Perturbation::Commuting;
    let AnySet::Matrix(a) = generate(&spec).unwrap() else { panic!("matrix family") };
    let cert = run_pipeline(&a, &PipelineOptions::default()).unwrap();
    let text = cert.to_json_string();
    let back = Certificate::from_json_str(&text).unwrap();
    assert_eq!(back, cert);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for f in CERTIFICATE_FIELDS {
        assert!(keys.contains(f), "missing {f}");
    }
    verify_certificate(&back, &a, &Precision::default()).unwrap();

    let mut forged = back.clone();
    forged.energy += 1;
    assert_eq!(verify_certificate(&forged, &a, &Precision::default()), Err(Error::Mismatch("energy".into())));
}

#[test]
fn params_config_json() {
    let cfg: ParamsConfig = serde_json::from_str(r#"{"k": 2, "M": "4"}"#).unwrap();
    let p = cfg.resolve().unwrap();
    assert_eq!(p.delta, compute_delta(2, &int(4)));
    let explicit = serde_json::to_string(&p.to_config()).unwrap();
    let again: ParamsConfig = serde_json::from_str(&explicit).unwrap();
    assert_eq!(again.resolve().unwrap(), p);

    let too_wide: ParamsConfig = serde_json::from_str(r#"{"k": 2, "M": "4", "epsilon": "1"}"#).unwrap();
    assert!(matches!(too_wide.resolve(), Err(Error::Precondition(_))));
}

#[test]
fn verifier_batch_csv() {
    let cfg = SuiteConfig {
        quaternion_quadruples: 20,
        pipeline_runs: 1,
        pipeline_set_size: 10,
        matrix_quadruples: 5,
        block_quadruples: 5,
        delta_pairs: 20,
        ..Default::default()
    };
    let suite = run_suite(&cfg).unwrap();
    assert!(suite.all_passed());
    let report = Report { command: "verify-lemmas".into(), suite: Some(suite), ..Default::default() };
    let text = emit(&report, Format::Csv).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rows.headers().unwrap(), vec!["quadruple", "check", "verdict", "width"]);
    let records: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    // four checks per matrix quadruple
    assert_eq!(records.len(), 20);
    assert!(records.iter().all(|r| &r[2] == "pass"));
    assert!(records.iter().filter(|r| &r[1] == "sum-invertible").all(|r| &r[3] == "exact"));
}
