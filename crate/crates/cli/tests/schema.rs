mod common;

use common::{cli, FIXTURES, WORKED};
use serde_json::Value;

fn validator() -> jsonschema::Validator {
    let text = include_str!("../schema/report.schema.json");
    let schema: Value = serde_json::from_str(text).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn assert_valid(v: &jsonschema::Validator, report: &str, label: &str) {
    let instance: Value = serde_json::from_str(report).unwrap();
    let errors: Vec<String> = v.iter_errors(&instance).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{label}: {errors:#?}");
}

#[test]
fn every_fixture_report_validates() {
    let v = validator();
    for (poly, _) in FIXTURES {
        let out = cli(&["analyze", "--poly", poly]);
        assert!(!out.output.is_empty(), "{poly}: {:?}", out.message);
        assert_valid(&v, &out.output, poly);
    }
}

#[test]
fn reports_with_levels_validate() {
    let v = validator();
    let out = cli(&["analyze", "--poly", WORKED, "--t", "0.5", "--t", "2"]);
    assert_valid(&v, &out.output, "worked example with levels");
    let out = cli(&["analyze", "--poly", "x^2 + y^2", "--t", "0", "--t", "-3"]);
    assert_valid(&v, &out.output, "fast path with an infeasible level");
}

#[test]
fn schema_rejects_a_broken_report() {
    let v = validator();
    let out = cli(&["analyze", "--poly", "x"]);
    let mut r: Value = serde_json::from_str(&out.output).unwrap();
    r["h"]["pieces"][0]["lo"] = Value::String("minus infinity".into());
    assert!(!v.is_valid(&r));
}
