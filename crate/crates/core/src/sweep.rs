//! Design-space sweeps: the cartesian product of circuits and device
//! axes, one CSV row per point.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bench::BenchSpec;
use crate::device::{DeviceConfig, TopologySpec};
use crate::error::{Error, JsonError};
use crate::ir::{parse_json, parse_qasm, Circuit};
use crate::models::{GateImpl, PhysicsParams, ReorderMethod};
use crate::sim::RunMetrics;

/// Reads a circuit from a `.json` file, or from OpenQASM otherwise.
pub fn load_circuit(path: &Path) -> Result<Circuit, Error> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        Ok(parse_json(&text)?)
    } else {
        Ok(parse_qasm(&text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CircuitSource {
    /// QASM or JSON file, relative to the sweep file.
    File { path: PathBuf },
    Bench(BenchSpec),
}

impl CircuitSource {
    pub fn label(&self) -> String {
        match self {
            CircuitSource::File { path } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            CircuitSource::Bench(b) => b.label(),
        }
    }

    pub fn load(&self, base_dir: &Path) -> Result<Circuit, Error> {
        match self {
            CircuitSource::File { path } => load_circuit(&base_dir.join(path)),
            CircuitSource::Bench(b) => b.build(),
        }
    }
}

/// Lists of values to sweep. An empty list keeps the base device's value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepAxes {
    pub capacity: Vec<usize>,
    pub topology: Vec<TopologySpec>,
    pub gate: Vec<GateImpl>,
    pub reorder: Vec<ReorderMethod>,
    /// Partial physics objects merged over the base physics.
    pub physics: Vec<Value>,
}

fn default_device() -> DeviceConfig {
    DeviceConfig::new(TopologySpec::Linear { traps: 6 }, 20)
}

/// Sweep file: `{"circuits": [...], "device": {...}, "axes": {...}, "output": "out.csv"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub circuits: Vec<CircuitSource>,
    #[serde(default = "default_device")]
    pub device: DeviceConfig,
    #[serde(default)]
    pub axes: SweepAxes,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn or_base<T: Clone>(values: &[T], base: T) -> Vec<T> {
    if values.is_empty() {
        vec![base]
    } else {
        values.to_vec()
    }
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self, JsonError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| JsonError {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    /// Number of points, before anything is loaded.
    pub fn size(&self) -> usize {
        let n = |len: usize| len.max(1);
        self.circuits.len()
            * n(self.axes.topology.len())
            * n(self.axes.capacity.len())
            * n(self.axes.gate.len())
            * n(self.axes.reorder.len())
            * n(self.axes.physics.len())
    }

    /// Expands the product in the order circuit, topology, capacity, gate,
    /// reorder, physics (last varies fastest). Circuits that fail to load
    /// are reported on each of their rows.
    pub fn points(&self, base_dir: &Path) -> Result<Vec<SweepPoint>, Error> {
        let base = &self.device;
        let topologies = or_base(&self.axes.topology, base.topology.clone());
        let capacities = or_base(&self.axes.capacity, base.capacity);
        let gates = or_base(&self.axes.gate, base.gate);
        let reorders = or_base(&self.axes.reorder, base.reorder);
        let mut physics = Vec::new();
        if self.axes.physics.is_empty() {
            physics.push((String::new(), base.physics.clone()));
        } else {
            for (i, o) in self.axes.physics.iter().enumerate() {
                let p = merge_physics(&base.physics, o).map_err(|message| JsonError {
                    path: format!("axes.physics[{i}]"),
                    message,
                })?;
                physics.push((serde_json::to_string(o).unwrap_or_default(), p));
            }
        }

        let mut out = Vec::with_capacity(self.size());
        for src in &self.circuits {
            let circuit = src.load(base_dir).map_err(|e| match src {
                CircuitSource::File { path } => format!("{}: {e}", path.display()),
                CircuitSource::Bench(_) => e.to_string(),
            });
            for topo in &topologies {
                for &capacity in &capacities {
                    for &gate in &gates {
                        for &reorder in &reorders {
                            for (plabel, p) in &physics {
                                out.push(SweepPoint {
                                    circuit_label: src.label(),
                                    circuit: circuit.clone(),
                                    device: DeviceConfig {
                                        topology: topo.clone(),
                                        capacity,
                                        gate,
                                        reorder,
                                        physics: p.clone(),
                                    },
                                    physics_label: plabel.clone(),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

fn merge_physics(base: &PhysicsParams, overrides: &Value) -> Result<PhysicsParams, String> {
    fn merge(into: &mut Value, from: &Value) {
        match (into, from) {
            (Value::Object(a), Value::Object(b)) => {
                for (k, v) in b {
                    merge(a.entry(k.clone()).or_insert(Value::Null), v);
                }
            }
            (slot, v) => *slot = v.clone(),
        }
    }
    let mut v = serde_json::to_value(base).map_err(|e| e.to_string())?;
    merge(&mut v, overrides);
    let p: PhysicsParams = serde_json::from_value(v).map_err(|e| e.to_string())?;
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

/// One fully determined design point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub circuit_label: String,
    pub circuit: Result<Circuit, String>,
    pub device: DeviceConfig,
    pub physics_label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub circuit: String,
    pub topology: String,
    pub capacity: usize,
    pub gate: GateImpl,
    pub reorder: ReorderMethod,
    pub physics: String,
    pub result: Result<RunMetrics, String>,
}

impl SweepPoint {
    pub fn run(&self) -> SweepRow {
        let result = self.circuit.clone().and_then(|c| {
            let hw = self.device.hardware().map_err(|e| e.to_string())?;
            crate::run(&c, &hw).map(|r| r.metrics).map_err(|e| e.to_string())
        });
        SweepRow {
            circuit: self.circuit_label.clone(),
            topology: self.device.topology.label(),
            capacity: self.device.capacity,
            gate: self.device.gate,
            reorder: self.device.reorder,
            physics: self.physics_label.clone(),
            result,
        }
    }
}

const COUNTED: [&str; 10] = [
    "gate_1q", "gate_ms", "measure", "split", "move", "cross", "merge", "swap_gs", "swap_is", "wait",
];

fn num(x: f64) -> String {
    let mut s = String::new();
    let _ = write!(s, "{x}");
    s
}

/// Writes rows in the given order.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = [
        "circuit",
        "topology",
        "capacity",
        "gate",
        "reorder",
        "physics",
        "makespan_us",
        "fidelity",
        "log_fidelity_sum",
        "max_motional_energy",
        "background_sum",
        "motional_sum",
        "compute_us",
        "communicate_us",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(COUNTED.iter().map(|k| format!("n_{k}")));
    header.push("error".into());
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.circuit.clone(),
            r.topology.clone(),
            r.capacity.to_string(),
            r.gate.to_string(),
            r.reorder.to_string(),
            r.physics.clone(),
        ];
        match &r.result {
            Ok(m) => {
                rec.extend([
                    num(m.makespan_us),
                    num(m.fidelity),
                    num(m.log_fidelity_sum),
                    num(m.max_motional_energy),
                    num(m.error_breakdown.background_sum),
                    num(m.error_breakdown.motional_sum),
                    num(m.time_split.compute_us),
                    num(m.time_split.communicate_us),
                ]);
                rec.extend(COUNTED.iter().map(|k| m.op_counts.get(*k).copied().unwrap_or(0).to_string()));
                rec.push(String::new());
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), 8 + COUNTED.len()));
                rec.push(e.clone());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
