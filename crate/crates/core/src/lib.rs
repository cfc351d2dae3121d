//! Compiler and discrete-event simulator for QCCD (quantum charge-coupled
//! device) trapped-ion machines.
//!
//! A [`Circuit`] is mapped onto the traps of a [`DeviceGraph`], scheduled
//! into a [`CompiledProgram`] of gates, shuttles and chain reorderings, and
//! then simulated to get makespan, fidelity and motional heating.
//!
//! ```
//! use qccd::{bench, device::{make_linear, HardwareConfig}, models::{GateImpl, ReorderMethod}};
//!
//! let hw = HardwareConfig::new(make_linear(6, 17).unwrap(), GateImpl::FM, ReorderMethod::GS);
//! let run = qccd::run(&bench::qft(16), &hw).unwrap();
//! assert!(run.metrics.fidelity > 0.0 && run.metrics.makespan_us > 0.0);
//! ```

pub mod bench;
pub mod compiler;
pub mod device;
pub mod error;
pub mod ir;
pub mod models;
pub mod sim;
pub mod sweep;

pub use compiler::{compile, CompiledProgram};
pub use device::{DeviceConfig, DeviceGraph, HardwareConfig};
pub use error::{Error, Result};
pub use ir::Circuit;
pub use sim::{simulate, RunMetrics};

/// A compiled program together with its simulated metrics.
#[derive(Debug, Clone)]
pub struct Run {
    pub program: CompiledProgram,
    pub metrics: RunMetrics,
}

/// Compiles and simulates in one step.
pub fn run(circuit: &Circuit, hw: &HardwareConfig) -> Result<Run> {
    let program = compile(circuit, hw)?;
    let metrics = simulate(&program, hw)?;
    Ok(Run { program, metrics })
}
