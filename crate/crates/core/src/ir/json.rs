use serde::{Deserialize, Serialize};

use super::{Circuit, GateKind};
use crate::error::JsonError;

/// Wire form of a circuit:
/// `{"num_qubits": n, "ops": [{"kind": "1q"|"2q"|"measure", "label"?: "h", "qubits": [...]}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct CircuitDoc {
    num_qubits: usize,
    ops: Vec<OpDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpDoc {
    kind: OpKindDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    qubits: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum OpKindDoc {
    #[serde(rename = "1q")]
    OneQubit,
    #[serde(rename = "2q")]
    TwoQubit,
    #[serde(rename = "measure")]
    Measure,
}

const DEFAULT_1Q_LABEL: &str = "u3";

impl From<Circuit> for CircuitDoc {
    fn from(c: Circuit) -> Self {
        let ops = c
            .ops
            .into_iter()
            .map(|op| {
                let (kind, label) = match op.kind {
                    GateKind::OneQubit(label) => (OpKindDoc::OneQubit, Some(label)),
                    GateKind::TwoQubit => (OpKindDoc::TwoQubit, None),
                    GateKind::Measure => (OpKindDoc::Measure, None),
                };
                OpDoc {
                    kind,
                    label,
                    qubits: op.qubits,
                }
            })
            .collect();
        CircuitDoc {
            num_qubits: c.num_qubits,
            ops,
        }
    }
}

impl CircuitDoc {
    fn into_circuit(self) -> Result<Circuit, JsonError> {
        let mut c = Circuit::new(self.num_qubits);
        for (i, op) in self.ops.into_iter().enumerate() {
            let kind = match op.kind {
                OpKindDoc::OneQubit => {
                    GateKind::OneQubit(op.label.unwrap_or_else(|| DEFAULT_1Q_LABEL.to_string()))
                }
                OpKindDoc::TwoQubit | OpKindDoc::Measure if op.label.is_some() => {
                    return Err(JsonError {
                        path: format!("ops[{i}].label"),
                        message: "label is only allowed on 1q ops".into(),
                    })
                }
                OpKindDoc::TwoQubit => GateKind::TwoQubit,
                OpKindDoc::Measure => GateKind::Measure,
            };
            c.push(kind, op.qubits).map_err(|e| JsonError {
                path: format!("ops[{i}].qubits"),
                message: e.to_string(),
            })?;
        }
        Ok(c)
    }
}

impl TryFrom<CircuitDoc> for Circuit {
    type Error = JsonError;

    fn try_from(doc: CircuitDoc) -> Result<Self, Self::Error> {
        doc.into_circuit()
    }
}

pub fn parse_json(text: &str) -> Result<Circuit, JsonError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: CircuitDoc = serde_path_to_error::deserialize(de).map_err(|e| JsonError {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    doc.into_circuit()
}

pub fn emit_json(circuit: &Circuit) -> String {
    serde_json::to_string(&CircuitDoc::from(circuit.clone())).expect("circuit serializes")
}
