use thiserror::Error;

/// Errors produced while building or checking a [`Circuit`](crate::ir::Circuit).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("op {op}: qubit {qubit} out of range for {num_qubits}-qubit circuit")]
    QubitOutOfRange {
        op: usize,
        qubit: usize,
        num_qubits: usize,
    },
    #[error("op {op}: expected {expected} operand(s), got {got}")]
    Arity {
        op: usize,
        expected: usize,
        got: usize,
    },
    #[error("op {op}: two-qubit operands must be distinct (both are {qubit})")]
    DuplicateOperand { op: usize, qubit: usize },
    #[error("op {op}: qubit {qubit} used after it was measured")]
    AfterMeasure { op: usize, qubit: usize },
}

/// OpenQASM parse failure, located at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// JSON circuit/config decoding failure. `path` is a JSON path like `ops[3].qubits`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("at `{path}`: {message}")]
pub struct JsonError {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeviceError {
    #[error("a device needs at least one trap")]
    NoTraps,
    #[error("grid needs at least 2 rows and 2 columns, got {rows}x{cols}")]
    GridTooSmall { rows: usize, cols: usize },
    #[error("trap {node} has capacity {capacity}; minimum is 2")]
    CapacityTooSmall { node: usize, capacity: usize },
    #[error("segment {segment} references unknown node {node}")]
    UnknownNode { segment: usize, node: usize },
    #[error("segment {segment} connects node {node} to itself")]
    SelfLoop { segment: usize, node: usize },
    #[error("more than one segment between nodes {a} and {b}")]
    ParallelSegment { a: usize, b: usize },
    #[error("junction {node} has degree {degree}; junctions need degree 3 or 4")]
    JunctionDegree { node: usize, degree: usize },
    #[error("trap {node} has degree {degree}; a trap chain has at most two ends")]
    TrapDegree { node: usize, degree: usize },
    #[error("trap {node} is not connected to any segment")]
    IsolatedTrap { node: usize },
    #[error("device graph is not connected")]
    Disconnected,
    #[error("node {node} is not a trap")]
    NotATrap { node: usize },
    #[error("no shuttle path from trap {from} to trap {to}")]
    NoPath { from: usize, to: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("positional separation d={d} invalid for chain of {n} ions (need 1 <= d <= N-1)")]
    Separation { d: usize, n: usize },
    #[error("chain length {n} too short for a two-qubit gate")]
    ChainTooShort { n: usize },
    #[error("split of {n_left} ions from a chain of {n_total} is out of range")]
    SplitRange { n_total: usize, n_left: usize },
    #[error("parameter `{name}` = {value} is out of range")]
    Parameter { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("circuit needs {needed} qubit slots but the device offers {available} (capacity minus 2 buffer slots per trap)")]
    InsufficientCapacity { needed: usize, available: usize },
    #[error("op {op}: {message}")]
    NoLegalBuffer { op: usize, message: String },
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// A replayed instruction that the machine state cannot execute.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("instruction {instr}: {message}")]
pub struct SimError {
    pub instr: usize,
    pub message: String,
}

/// Top-level error for the end-to-end toolflow.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("invalid JSON {0}")]
    Json(#[from] JsonError),
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("invalid benchmark: {0}")]
    Bench(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
