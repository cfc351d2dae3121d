//! Backend compiler: maps program qubits onto traps, schedules gates
//! earliest-ready-first, inserts shuttles and chain reordering, and
//! routes parallel shuttles without deadlock.

mod mapping;
mod route;
mod schedule;
mod validate;

pub use mapping::initial_map;
pub use route::route_parallel;
pub use schedule::schedule;
pub use validate::{validate, Violation};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::device::{DeviceGraph, HardwareConfig, NodeId, SegmentId};
use crate::error::{CompileError, JsonError};
use crate::ir::Circuit;

/// An ion is named by the program qubit whose state it carries.
pub type Ion = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstrKind {
    Gate1q {
        ion: Ion,
        label: String,
    },
    GateMs {
        ion_a: Ion,
        ion_b: Ion,
        trap: NodeId,
    },
    Measure {
        ion: Ion,
    },
    /// Detach `ion` from the end of the chain in `trap` into `segment`.
    Split {
        trap: NodeId,
        ion: Ion,
        segment: SegmentId,
    },
    /// Traverse `segment`: either the one just split into, or one leaving
    /// the junction the ion is in.
    Move {
        ion: Ion,
        segment: SegmentId,
    },
    Cross {
        ion: Ion,
        junction: NodeId,
    },
    /// Attach `ion`, arriving over `segment`, to the adjacent chain end.
    Merge {
        trap: NodeId,
        ion: Ion,
        segment: SegmentId,
    },
    /// Gate-based swap of two ions' states: three MS gates.
    SwapGs {
        trap: NodeId,
        ion_a: Ion,
        ion_b: Ion,
    },
    /// Physical swap of the ions at chain positions `position` and `position + 1`.
    SwapIs {
        trap: NodeId,
        position: usize,
    },
    /// Hold `ion` in place at `at` for `duration_us`.
    Wait {
        ion: Ion,
        at: NodeId,
        duration_us: f64,
    },
}

impl InstrKind {
    pub fn name(&self) -> &'static str {
        match self {
            InstrKind::Gate1q { .. } => "gate_1q",
            InstrKind::GateMs { .. } => "gate_ms",
            InstrKind::Measure { .. } => "measure",
            InstrKind::Split { .. } => "split",
            InstrKind::Move { .. } => "move",
            InstrKind::Cross { .. } => "cross",
            InstrKind::Merge { .. } => "merge",
            InstrKind::SwapGs { .. } => "swap_gs",
            InstrKind::SwapIs { .. } => "swap_is",
            InstrKind::Wait { .. } => "wait",
        }
    }

    pub fn is_shuttle(&self) -> bool {
        matches!(
            self,
            InstrKind::Split { .. }
                | InstrKind::Move { .. }
                | InstrKind::Cross { .. }
                | InstrKind::Merge { .. }
        )
    }

    /// Gate time counts as computation; everything else as communication.
    pub fn is_compute(&self) -> bool {
        matches!(
            self,
            InstrKind::Gate1q { .. }
                | InstrKind::GateMs { .. }
                | InstrKind::Measure { .. }
                | InstrKind::SwapGs { .. }
        )
    }
}

/// Why an instruction was emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// The source op itself.
    Gate,
    /// Split/move/cross/merge bringing an operand to its partner.
    Shuttle,
    /// Positioning an ion at a chain end before it leaves its trap.
    Reorder,
    /// Merge, reorder and split while passing through an intermediate trap.
    Transit,
    /// Moving a bystander ion to free a slot for a pending shuttle.
    Evict,
    /// Congestion delay before a shuttle departs.
    Wait,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    /// Source-circuit op this instruction serves; also its routing priority.
    pub op: usize,
    pub role: Role,
    #[serde(flatten)]
    pub kind: InstrKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub trap: NodeId,
    pub position: usize,
}

/// One trap-to-trap hop of a shuttle: the split, the merge that ends it,
/// and the segments and junctions reserved for its whole duration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub ion: Ion,
    pub split: usize,
    pub merge: usize,
    pub segments: Vec<SegmentId>,
    pub junctions: Vec<NodeId>,
}

/// Extracts every split..merge leg from an instruction stream.
pub fn find_legs(instructions: &[Instruction]) -> Result<Vec<Leg>, (usize, String)> {
    let mut open: BTreeMap<Ion, Leg> = BTreeMap::new();
    let mut done = Vec::new();
    for (i, ins) in instructions.iter().enumerate() {
        match ins.kind {
            InstrKind::Split { ion, .. } => {
                if open.contains_key(&ion) {
                    return Err((i, format!("ion {ion} split while already in transit")));
                }
                open.insert(
                    ion,
                    Leg {
                        ion,
                        split: i,
                        merge: usize::MAX,
                        segments: Vec::new(),
                        junctions: Vec::new(),
                    },
                );
            }
            InstrKind::Move { ion, segment } => match open.get_mut(&ion) {
                Some(leg) => {
                    if !leg.segments.contains(&segment) {
                        leg.segments.push(segment);
                    }
                }
                None => return Err((i, format!("ion {ion} moves without a preceding split"))),
            },
            InstrKind::Cross { ion, junction } => match open.get_mut(&ion) {
                Some(leg) => {
                    if !leg.junctions.contains(&junction) {
                        leg.junctions.push(junction);
                    }
                }
                None => return Err((i, format!("ion {ion} crosses without a preceding split"))),
            },
            InstrKind::Merge { ion, .. } => match open.remove(&ion) {
                Some(mut leg) => {
                    leg.merge = i;
                    done.push(leg);
                }
                None => return Err((i, format!("ion {ion} merges without a preceding split"))),
            },
            _ => {}
        }
    }
    if let Some(leg) = open.values().next() {
        return Err((leg.split, format!("ion {} never merges", leg.ion)));
    }
    done.sort_by_key(|l| l.split);
    Ok(done)
}

/// Executable for a QCCD device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompiledProgram {
    pub circuit: Circuit,
    /// Indexed by program qubit.
    pub initial_layout: Vec<Placement>,
    pub instructions: Vec<Instruction>,
    /// Filled in by [`route_parallel`].
    #[serde(default)]
    pub reservations: Vec<Leg>,
}

impl CompiledProgram {
    /// Initial ion chains, indexed by node id (junctions get empty chains).
    pub fn initial_chains(&self, g: &DeviceGraph) -> Vec<Vec<Ion>> {
        let mut chains = vec![Vec::new(); g.node_count()];
        let mut by_trap: BTreeMap<NodeId, Vec<(usize, Ion)>> = BTreeMap::new();
        for (q, p) in self.initial_layout.iter().enumerate() {
            by_trap.entry(p.trap).or_default().push((p.position, q));
        }
        for (trap, mut slots) in by_trap {
            slots.sort_unstable();
            if let Some(chain) = chains.get_mut(trap.0) {
                *chain = slots.into_iter().map(|(_, q)| q).collect();
            }
        }
        chains
    }

    pub fn count(&self, name: &str) -> usize {
        self.instructions.iter().filter(|i| i.kind.name() == name).count()
    }

    pub fn shuttle_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| i.kind.is_shuttle() || matches!(i.kind, InstrKind::Wait { .. }))
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("program serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, JsonError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| JsonError {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }
}

/// Full compile: mapping, scheduling and parallel routing.
pub fn compile(circuit: &Circuit, hw: &HardwareConfig) -> Result<CompiledProgram, CompileError> {
    let layout = initial_map(circuit, hw)?;
    let scheduled = schedule(circuit, hw, &layout)?;
    route_parallel(&scheduled, hw)
}
