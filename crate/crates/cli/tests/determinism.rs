mod common;

use common::{cli, WORKED};
use serde_json::Value;

fn without_timing(text: &str) -> String {
    let mut v: Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    serde_json::to_string_pretty(&v).unwrap()
}

#[test]
fn equal_seeds_give_identical_reports() {
    for threads in ["1", "3"] {
        let a = cli(&["analyze", "--poly", WORKED, "--seed", "11", "--t", "2", "--threads", threads]);
        let b = cli(&["analyze", "--poly", WORKED, "--seed", "11", "--t", "2", "--threads", "2"]);
        assert_eq!(without_timing(&a.output), without_timing(&b.output));
    }
}
