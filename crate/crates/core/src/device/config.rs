use serde::{Deserialize, Serialize};

use super::{make_grid, make_linear, DeviceGraph, HardwareConfig, NodeId, NodeKind};
use crate::error::{DeviceError, Error, JsonError};
use crate::models::{GateImpl, PhysicsParams, ReorderMethod};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum TopologySpec {
    Linear {
        traps: usize,
    },
    Grid {
        rows: usize,
        cols: usize,
    },
    Custom {
        nodes: Vec<NodeSpec>,
        /// Pairs of node indices.
        segments: Vec<(usize, usize)>,
    },
}

impl TopologySpec {
    /// Short name used in sweep output, e.g. `L6` or `G2x3`.
    pub fn label(&self) -> String {
        match self {
            TopologySpec::Linear { traps } => format!("L{traps}"),
            TopologySpec::Grid { rows, cols } => format!("G{rows}x{cols}"),
            TopologySpec::Custom { nodes, .. } => format!("custom{}", nodes.len()),
        }
    }

    pub fn build(&self, capacity: usize) -> Result<DeviceGraph, DeviceError> {
        match self {
            TopologySpec::Linear { traps } => make_linear(*traps, capacity),
            TopologySpec::Grid { rows, cols } => make_grid(*rows, *cols, capacity),
            TopologySpec::Custom { nodes, segments } => {
                let kinds = nodes
                    .iter()
                    .map(|n| match n {
                        NodeSpec::Trap { capacity: c } => NodeKind::Trap {
                            capacity: c.unwrap_or(capacity),
                        },
                        NodeSpec::Junction => NodeKind::Junction,
                    })
                    .collect();
                let segs = segments
                    .iter()
                    .map(|&(a, b)| (NodeId(a), NodeId(b)))
                    .collect();
                DeviceGraph::new(kinds, segs, None)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NodeSpec {
    Trap {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        capacity: Option<usize>,
    },
    Junction,
}

fn default_capacity() -> usize {
    20
}

/// Device config file:
/// `{"topology": {...}, "capacity": 25, "gate": "FM", "reorder": "GS", "physics": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub topology: TopologySpec,
    #[serde(default = "default_capacity")]
    pub capacity: usize,
    #[serde(default)]
    pub gate: GateImpl,
    #[serde(default)]
    pub reorder: ReorderMethod,
    #[serde(default)]
    pub physics: PhysicsParams,
}

impl DeviceConfig {
    pub fn new(topology: TopologySpec, capacity: usize) -> Self {
        Self {
            topology,
            capacity,
            gate: GateImpl::default(),
            reorder: ReorderMethod::default(),
            physics: PhysicsParams::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, JsonError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| JsonError {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.physics.validate().map_err(|e| JsonError {
            path: "physics".into(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn hardware(&self) -> Result<HardwareConfig, Error> {
        self.physics.validate()?;
        let graph = self.topology.build(self.capacity)?;
        Ok(HardwareConfig::new(graph, self.gate, self.reorder).with_physics(self.physics.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_linear_with_defaults() {
        let cfg = DeviceConfig::from_json(r#"{"topology":{"type":"linear","traps":6},"capacity":25}"#)
            .unwrap();
        assert_eq!(cfg.gate, GateImpl::FM);
        assert_eq!(cfg.reorder, ReorderMethod::GS);
        let hw = cfg.hardware().unwrap();
        assert_eq!(hw.graph.traps().len(), 6);
        assert_eq!(hw.graph.capacity(NodeId(3)), 25);
    }

    #[test]
    fn parses_grid_and_physics_override() {
        let cfg = DeviceConfig::from_json(
            r#"{"topology":{"type":"grid","rows":2,"cols":3},"gate":"AM2","reorder":"IS",
                "physics":{"k1":0.2,"shuttle_times":{"split":50}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.physics.k1, 0.2);
        assert_eq!(cfg.physics.k2, 0.01);
        assert_eq!(cfg.physics.shuttle_times.split, 50.0);
        assert_eq!(cfg.physics.shuttle_times.merge, 80.0);
        assert_eq!(cfg.hardware().unwrap().graph.segments().len(), 10);
    }

    #[test]
    fn parses_custom_topology() {
        let cfg = DeviceConfig::from_json(
            r#"{"topology":{"type":"custom",
                "nodes":[{"kind":"trap"},{"kind":"trap","capacity":8},{"kind":"trap"},{"kind":"junction"}],
                "segments":[[0,3],[1,3],[2,3]]},"capacity":12}"#,
        )
        .unwrap();
        let hw = cfg.hardware().unwrap();
        assert_eq!(hw.graph.capacity(NodeId(1)), 8);
        assert_eq!(hw.graph.capacity(NodeId(2)), 12);
        assert_eq!(hw.graph.degree(NodeId(3)), 3);
    }

    #[test]
    fn bad_fields_report_path() {
        let e = DeviceConfig::from_json(r#"{"topology":{"type":"linear","traps":6},"gate":"XM"}"#)
            .unwrap_err();
        assert_eq!(e.path, "gate");
        let e = DeviceConfig::from_json(
            r#"{"topology":{"type":"linear","traps":6},"physics":{"k1":-1}}"#,
        )
        .unwrap_err();
        assert_eq!(e.path, "physics");
    }
}
