use std::fmt;

use crate::device::HardwareConfig;
use crate::ir::{build_dag, GateKind};
use crate::sim::MachineState;

use super::{CompiledProgram, InstrKind, Role};

/// First assertion a program fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Offending instruction; `None` for whole-program properties.
    pub instr: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.instr {
            Some(i) => write!(f, "instruction {i}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for Violation {}

/// Replays the program symbolically and checks that every instruction is
/// executable (capacity, chain ends, co-location, exclusive use of
/// segments and junctions) and that every source op is served exactly
/// once, after everything it depends on.
pub fn validate(prog: &CompiledProgram, hw: &HardwareConfig) -> Result<(), Violation> {
    let whole = |message: String| Violation { instr: None, message };
    let circuit = &prog.circuit;
    if prog.initial_layout.len() != circuit.num_qubits() {
        return Err(whole(format!(
            "layout places {} qubits but the circuit has {}",
            prog.initial_layout.len(),
            circuit.num_qubits()
        )));
    }
    let mut state = MachineState::new(hw, &prog.initial_layout).map_err(whole)?;
    let dag = build_dag(circuit);
    let mut served = vec![false; circuit.len()];

    for (i, ins) in prog.instructions.iter().enumerate() {
        let at = |message: String| Violation { instr: Some(i), message };
        if ins.op >= circuit.len() {
            return Err(at(format!("refers to op {} of a {}-op circuit", ins.op, circuit.len())));
        }
        let op = &circuit.ops()[ins.op];
        let gate = match (&ins.kind, &op.kind) {
            (InstrKind::Gate1q { ion, .. }, GateKind::OneQubit(_)) => Some(op.qubits == [*ion]),
            (InstrKind::Measure { ion }, GateKind::Measure) => Some(op.qubits == [*ion]),
            (InstrKind::GateMs { ion_a, ion_b, .. }, GateKind::TwoQubit) => {
                let (a, b) = (op.qubits[0], op.qubits[1]);
                Some((a, b) == (*ion_a, *ion_b) || (b, a) == (*ion_a, *ion_b))
            }
            (InstrKind::Gate1q { .. } | InstrKind::Measure { .. } | InstrKind::GateMs { .. }, _) => {
                Some(false)
            }
            _ => None,
        };
        match gate {
            Some(false) => {
                return Err(at(format!("{} does not match op {}", ins.kind.name(), ins.op)));
            }
            Some(true) => {
                if ins.role != Role::Gate {
                    return Err(at(format!("gate for op {} has role {:?}", ins.op, ins.role)));
                }
                if served[ins.op] {
                    return Err(at(format!("op {} is served twice", ins.op)));
                }
                if let Some(&p) = dag.preds(ins.op).iter().find(|&&p| !served[p]) {
                    return Err(at(format!("op {} runs before op {p}, which it depends on", ins.op)));
                }
                served[ins.op] = true;
            }
            None => {
                if ins.role == Role::Gate {
                    return Err(at(format!("{} cannot serve a source op", ins.kind.name())));
                }
            }
        }
        state.apply(&ins.kind).map_err(at)?;
    }

    if let Some(op) = served.iter().position(|s| !s) {
        return Err(whole(format!("op {op} is never served")));
    }
    if let Some(&ion) = state.in_transit().first() {
        return Err(whole(format!("ion {ion} ends the program outside a trap")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{compile, Instruction, Placement};
    use crate::device::{make_linear, NodeId, SegmentId};
    use crate::ir::Circuit;
    use crate::models::{GateImpl, ReorderMethod};

    fn setup() -> (HardwareConfig, CompiledProgram) {
        let hw = HardwareConfig::new(make_linear(2, 4).unwrap(), GateImpl::FM, ReorderMethod::GS);
        let mut c = Circuit::new(4);
        c.two_qubit(0, 1).unwrap();
        c.two_qubit(2, 3).unwrap();
        c.two_qubit(1, 2).unwrap();
        let p = compile(&c, &hw).unwrap();
        (hw, p)
    }

    #[test]
    fn compiled_program_passes() {
        let (hw, p) = setup();
        assert_eq!(validate(&p, &hw), Ok(()));
    }

    #[test]
    fn detects_missing_gate() {
        let (hw, mut p) = setup();
        p.instructions.remove(0);
        let v = validate(&p, &hw).unwrap_err();
        assert!(v.message.contains("op 0"), "{v}");
    }

    #[test]
    fn detects_gate_across_traps() {
        let (hw, mut p) = setup();
        // drop the shuttle so the last gate's operands sit apart
        p.instructions.retain(|i| !i.kind.is_shuttle());
        let v = validate(&p, &hw).unwrap_err();
        assert!(v.message.contains("not in"), "{v}");
    }

    #[test]
    fn detects_split_from_chain_middle() {
        let hw = HardwareConfig::new(make_linear(2, 4).unwrap(), GateImpl::FM, ReorderMethod::GS);
        let mut c = Circuit::new(2);
        c.two_qubit(0, 1).unwrap();
        let p = CompiledProgram {
            circuit: c,
            initial_layout: vec![
                Placement { trap: NodeId(0), position: 0 },
                Placement { trap: NodeId(0), position: 1 },
            ],
            instructions: vec![Instruction {
                op: 0,
                role: Role::Shuttle,
                kind: InstrKind::Split { trap: NodeId(0), ion: 0, segment: SegmentId(0) },
            }],
            reservations: vec![],
        };
        let v = validate(&p, &hw).unwrap_err();
        assert_eq!(v.instr, Some(0));
    }
}
