//! Browser bindings for the demo page in `www/`. Every export takes and
//! returns JSON strings; the plain functions in [`api`] do the work and
//! are what the native tests call.

use wasm_bindgen::prelude::*;

pub mod api {
    use serde_json::{json, Value};

    use qccd::bench::BenchSpec;
    use qccd::device::{DeviceConfig, TopologySpec};
    use qccd::models::{gate_time, GateImpl, ReorderMethod};

    /// MS gate time against positional separation `d = 1..n-1` in an
    /// `n`-ion chain, one series per implementation.
    pub fn gate_time_curves(n: usize) -> Result<String, String> {
        if !(2..=200).contains(&n) {
            return Err(format!("chain length must be 2..=200, got {n}"));
        }
        let d: Vec<usize> = (1..n).collect();
        let mut series = serde_json::Map::new();
        for g in GateImpl::ALL {
            let times = d.iter().map(|&d| gate_time(g, d, n)).collect::<Result<Vec<_>, _>>();
            series.insert(g.to_string(), json!(times.map_err(|e| e.to_string())?));
        }
        Ok(json!({ "n": n, "d": d, "series": series }).to_string())
    }

    fn topology(name: &str) -> Result<TopologySpec, String> {
        match name {
            "L6" => Ok(TopologySpec::Linear { traps: 6 }),
            "G2x3" => Ok(TopologySpec::Grid { rows: 2, cols: 3 }),
            other => serde_json::from_str(other).map_err(|e| format!("topology: {e}")),
        }
    }

    fn device(topo: &str, capacity: usize, gate: &str, reorder: &str) -> Result<DeviceConfig, String> {
        let mut cfg = DeviceConfig::new(topology(topo)?, capacity);
        cfg.gate = gate.parse::<GateImpl>()?;
        cfg.reorder = reorder.parse::<ReorderMethod>()?;
        Ok(cfg)
    }

    fn bench(spec: &str) -> Result<qccd::Circuit, String> {
        let spec: BenchSpec = serde_json::from_str(spec).map_err(|e| format!("benchmark: {e}"))?;
        spec.build().map_err(|e| e.to_string())
    }

    /// Fidelity, runtime and peak motional energy for each capacity.
    /// Infeasible capacities come back with an `error` field.
    pub fn capacity_sweep(spec: &str, topo: &str, gate: &str, reorder: &str, capacities: &[usize]) -> Result<String, String> {
        let circuit = bench(spec)?;
        let mut rows = Vec::with_capacity(capacities.len());
        for &cap in capacities {
            let cfg = device(topo, cap, gate, reorder)?;
            let row = match cfg.hardware().and_then(|hw| qccd::run(&circuit, &hw)) {
                Ok(r) => json!({
                    "capacity": cap,
                    "fidelity": r.metrics.fidelity,
                    "makespan_us": r.metrics.makespan_us,
                    "max_motional_energy": r.metrics.max_motional_energy,
                    "shuttles": r.program.shuttle_count(),
                }),
                Err(e) => json!({ "capacity": cap, "error": e.to_string() }),
            };
            rows.push(row);
        }
        Ok(Value::Array(rows).to_string())
    }

    /// Full metrics for one design point, plus when each trap was busy.
    pub fn simulate(spec: &str, topo: &str, capacity: usize, gate: &str, reorder: &str) -> Result<String, String> {
        let circuit = bench(spec)?;
        let hw = device(topo, capacity, gate, reorder)?.hardware().map_err(|e| e.to_string())?;
        let prog = qccd::compile(&circuit, &hw).map_err(|e| e.to_string())?;
        let tl = qccd::sim::timeline(&prog, &hw).map_err(|e| e.to_string())?;
        let metrics = qccd::sim::metrics(&prog, &tl);
        let spans: Vec<Value> = prog
            .instructions
            .iter()
            .zip(&tl.entries)
            .filter_map(|(ins, e)| {
                e.trap.map(|t| json!([t.0, e.start_us, e.end_us, ins.kind.is_compute()]))
            })
            .collect();
        Ok(json!({
            "metrics": metrics,
            "traps": hw.graph.traps().len(),
            "spans": spans,
        })
        .to_string())
    }
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = gateTimeCurves)]
pub fn gate_time_curves(n: usize) -> Result<String, JsValue> {
    js(api::gate_time_curves(n))
}

#[wasm_bindgen(js_name = capacitySweep)]
pub fn capacity_sweep(
    spec: &str,
    topology: &str,
    gate: &str,
    reorder: &str,
    capacities: Vec<usize>,
) -> Result<String, JsValue> {
    js(api::capacity_sweep(spec, topology, gate, reorder, &capacities))
}

#[wasm_bindgen]
pub fn simulate(spec: &str, topology: &str, capacity: usize, gate: &str, reorder: &str) -> Result<String, JsValue> {
    js(api::simulate(spec, topology, capacity, gate, reorder))
}
