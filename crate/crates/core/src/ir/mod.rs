//! Circuit intermediate representation.
//!
//! A [`Circuit`] is a fully unrolled, straight-line list of one-qubit gates,
//! two-qubit (MS) gates and measurements over program qubits. Every
//! [`GateKind::TwoQubit`] op is costed downstream as exactly one MS gate.

mod json;
mod qasm;

pub use json::{emit_json, parse_json};
pub use qasm::{emit_qasm, parse_qasm};

use serde::{Deserialize, Serialize};

use crate::error::CircuitError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// Any single-qubit gate. The label is kept for round-tripping only;
    /// all labels share one time/fidelity model.
    OneQubit(String),
    TwoQubit,
    Measure,
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::TwoQubit => 2,
            GateKind::OneQubit(_) | GateKind::Measure => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Op {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Op {
    pub fn is_two_qubit(&self) -> bool {
        self.kind == GateKind::TwoQubit
    }
}

/// Ordered list of operations over `num_qubits` program qubits.
///
/// Construction goes through [`Circuit::push`], which enforces operand
/// arity, range, distinctness, and that a measured qubit is never touched
/// again.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "json::CircuitDoc", into = "json::CircuitDoc")]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<Op>,
    measured: Vec<bool>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            ops: Vec::new(),
            measured: vec![false; num_qubits],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Appends an op after checking every circuit invariant. Returns its index.
    pub fn push(&mut self, kind: GateKind, qubits: Vec<usize>) -> Result<usize, CircuitError> {
        let op = self.ops.len();
        if qubits.len() != kind.arity() {
            return Err(CircuitError::Arity {
                op,
                expected: kind.arity(),
                got: qubits.len(),
            });
        }
        for &q in &qubits {
            if q >= self.num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    op,
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
            if self.measured[q] {
                return Err(CircuitError::AfterMeasure { op, qubit: q });
            }
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(CircuitError::DuplicateOperand { op, qubit: qubits[0] });
        }
        if kind == GateKind::Measure {
            self.measured[qubits[0]] = true;
        }
        self.ops.push(Op { kind, qubits });
        Ok(op)
    }

    pub fn one_qubit(&mut self, label: &str, q: usize) -> Result<usize, CircuitError> {
        self.push(GateKind::OneQubit(label.to_string()), vec![q])
    }

    pub fn two_qubit(&mut self, a: usize, b: usize) -> Result<usize, CircuitError> {
        self.push(GateKind::TwoQubit, vec![a, b])
    }

    pub fn measure(&mut self, q: usize) -> Result<usize, CircuitError> {
        self.push(GateKind::Measure, vec![q])
    }

    pub fn two_qubit_count(&self) -> usize {
        self.ops.iter().filter(|op| op.is_two_qubit()).count()
    }

    /// Index of the first op touching each qubit, `None` for idle qubits.
    pub fn first_use(&self) -> Vec<Option<usize>> {
        let mut first = vec![None; self.num_qubits];
        for (i, op) in self.ops.iter().enumerate() {
            for &q in &op.qubits {
                first[q].get_or_insert(i);
            }
        }
        first
    }
}

/// Data dependencies between ops, chained per qubit (each op depends on the
/// previous op touching any of its qubits).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyDag {
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl DependencyDag {
    pub fn len(&self) -> usize {
        self.preds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preds.is_empty()
    }

    pub fn preds(&self, op: usize) -> &[usize] {
        &self.preds[op]
    }

    pub fn succs(&self, op: usize) -> &[usize] {
        &self.succs[op]
    }

    pub fn edge_count(&self) -> usize {
        self.preds.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.preds
            .iter()
            .enumerate()
            .flat_map(|(to, ps)| ps.iter().map(move |&from| (from, to)))
    }

    /// Ops with no predecessors.
    pub fn roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.preds[i].is_empty()).collect()
    }
}

pub fn build_dag(circuit: &Circuit) -> DependencyDag {
    let n = circuit.len();
    let mut preds = vec![Vec::new(); n];
    let mut succs = vec![Vec::new(); n];
    let mut last: Vec<Option<usize>> = vec![None; circuit.num_qubits()];
    for (i, op) in circuit.ops().iter().enumerate() {
        for &q in &op.qubits {
            if let Some(p) = last[q] {
                if !preds[i].contains(&p) {
                    preds[i].push(p);
                    succs[p].push(i);
                }
            }
            last[q] = Some(i);
        }
    }
    DependencyDag { preds, succs }
}
