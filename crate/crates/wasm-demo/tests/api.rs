use qccd_wasm::api;
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn gate_curves_follow_the_time_models() {
    let v = parse(&api::gate_time_curves(10).unwrap());
    assert_eq!(v["d"].as_array().unwrap().len(), 9);
    assert_eq!(v["series"]["AM1"][0], 78.0);
    assert_eq!(v["series"]["AM2"][2], 124.0);
    assert_eq!(v["series"]["PM"][8], 205.0);
    let fm: Vec<f64> = v["series"]["FM"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(fm.iter().all(|&t| t == 100.0));
    assert!(api::gate_time_curves(1).is_err());
}

#[test]
fn sweep_reports_infeasible_points_inline() {
    let rows = parse(
        &api::capacity_sweep(r#"{"bench":"qft","n":16}"#, "L6", "FM", "GS", &[3, 6, 12]).unwrap(),
    );
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0]["error"].as_str().unwrap().contains("qubit slots"));
    assert!(rows[1]["fidelity"].as_f64().unwrap() > 0.0);
    assert!(rows[2]["shuttles"].as_u64().unwrap() < rows[1]["shuttles"].as_u64().unwrap());
}

#[test]
fn simulate_returns_metrics_and_trap_spans() {
    let v = parse(&api::simulate(r#"{"bench":"qaoa_nn","n":12,"p":1}"#, "G2x3", 6, "AM2", "IS").unwrap());
    assert_eq!(v["traps"], 6);
    assert_eq!(v["metrics"]["op_counts"]["gate_ms"], 11);
    let spans = v["spans"].as_array().unwrap();
    assert!(!spans.is_empty());
    let makespan = v["metrics"]["makespan_us"].as_f64().unwrap();
    assert!(spans.iter().all(|s| s[2].as_f64().unwrap() <= makespan));
}

#[test]
fn bad_inputs_are_errors() {
    assert!(api::simulate(r#"{"bench":"ghz","n":3}"#, "L6", 10, "FM", "GS").is_err());
    assert!(api::simulate(r#"{"bench":"qft","n":3}"#, "ring", 10, "FM", "GS").is_err());
    assert!(api::simulate(r#"{"bench":"qft","n":3}"#, "L6", 10, "XM", "GS").is_err());
}
