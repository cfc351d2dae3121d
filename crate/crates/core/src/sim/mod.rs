//! Discrete-event simulation of a compiled program: timing under
//! resource contention, motional heating, and fidelity.
//!
//! Instructions are granted their resources in program order. Each
//! instruction holds the ions it names and, for in-trap work, splits and
//! merges, the trap. A split also reserves every segment and junction of
//! its leg until the matching merge ends, so shuttles on crossing routes
//! are serialized rather than deadlocked.

mod state;
mod trace;

pub use state::{Location, MachineState, Step};
pub use trace::{audit, write_trace};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::compiler::{find_legs, CompiledProgram, InstrKind, Ion};
use crate::device::{HardwareConfig, NodeId};
use crate::error::SimError;

/// Timing and quality of one executed instruction.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedInstr {
    pub start_us: f64,
    pub end_us: f64,
    /// Time a split waited for its route after its ion and trap were free.
    pub path_delay_us: f64,
    /// The earlier instruction whose completion fixed this start time.
    pub binding: Option<usize>,
    pub ions: Vec<Ion>,
    /// Trap held for the duration, if any.
    pub trap: Option<NodeId>,
    pub location: String,
    pub step: Step,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Timeline {
    pub entries: Vec<TimedInstr>,
    pub makespan_us: f64,
    pub max_motional_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBreakdown {
    /// Sum of `gamma * tau` over MS gates.
    pub background_sum: f64,
    /// Sum of `A(N) * (2 n̄ + 1)` over MS gates.
    pub motional_sum: f64,
}

/// Critical-path time split between gates and shuttling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSplit {
    pub compute_us: f64,
    pub communicate_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub makespan_us: f64,
    pub fidelity: f64,
    pub log_fidelity_sum: f64,
    pub max_motional_energy: f64,
    pub op_counts: BTreeMap<String, usize>,
    pub error_breakdown: ErrorBreakdown,
    pub time_split: TimeSplit,
}

#[derive(Clone, Copy)]
struct Free {
    at: f64,
    by: Option<usize>,
}

const IDLE: Free = Free { at: 0.0, by: None };

fn later(best: &mut Free, other: Free) {
    if other.at > best.at {
        *best = other;
    }
}

/// Runs the program and returns the per-instruction schedule.
pub fn timeline(prog: &CompiledProgram, hw: &HardwareConfig) -> Result<Timeline, SimError> {
    let g = &hw.graph;
    if prog.initial_layout.len() != prog.circuit.num_qubits() {
        return Err(SimError {
            instr: 0,
            message: format!(
                "layout places {} qubits but the circuit has {}",
                prog.initial_layout.len(),
                prog.circuit.num_qubits()
            ),
        });
    }
    let mut state = MachineState::new(hw, &prog.initial_layout)
        .map_err(|message| SimError { instr: 0, message })?;
    let legs = find_legs(&prog.instructions).map_err(|(instr, message)| SimError { instr, message })?;
    let mut leg_of_split = BTreeMap::new();
    for leg in &legs {
        leg_of_split.insert(leg.split, leg);
    }
    let mut leg_of_ion: BTreeMap<Ion, usize> = BTreeMap::new();

    let mut ion_free = vec![IDLE; state.ion_count()];
    let mut node_free = vec![IDLE; g.node_count()];
    let mut seg_free = vec![IDLE; g.segments().len()];
    // Split index of the leg currently reserving a resource.
    let mut node_held: Vec<Option<usize>> = vec![None; g.node_count()];
    let mut seg_held: Vec<Option<usize>> = vec![None; g.segments().len()];

    let mut entries = Vec::with_capacity(prog.instructions.len());
    let mut max_energy: f64 = 0.0;

    for (i, ins) in prog.instructions.iter().enumerate() {
        let err = |message: String| SimError { instr: i, message };
        let ions = state.ions_of(&ins.kind);
        let trap = match ins.kind {
            InstrKind::Gate1q { ion, .. } | InstrKind::Measure { ion } => state.trap_of(ion),
            InstrKind::GateMs { trap, .. }
            | InstrKind::SwapGs { trap, .. }
            | InstrKind::SwapIs { trap, .. }
            | InstrKind::Split { trap, .. }
            | InstrKind::Merge { trap, .. } => Some(trap),
            _ => None,
        };
        let location = match ins.kind {
            InstrKind::Move { segment, .. } => segment.to_string(),
            InstrKind::Cross { junction, .. } => junction.to_string(),
            InstrKind::Wait { at, .. } => at.to_string(),
            _ => trap.map(|t| t.to_string()).unwrap_or_default(),
        };

        let mut base = IDLE;
        for &ion in &ions {
            if let Some(f) = ion_free.get(ion) {
                later(&mut base, *f);
            }
        }
        if let Some(t) = trap {
            if let Some(f) = node_free.get(t.0) {
                later(&mut base, *f);
            }
        }
        let mut begin = base;
        let mut path_delay = 0.0;

        if let InstrKind::Split { ion, .. } = ins.kind {
            let leg = leg_of_split[&i];
            for &s in &leg.segments {
                if let Some(h) = seg_held[s.0] {
                    return Err(err(format!(
                        "{s} is reserved by the unfinished shuttle starting at instruction {h}"
                    )));
                }
                later(&mut begin, seg_free[s.0]);
            }
            for &j in &leg.junctions {
                if let Some(h) = node_held[j.0] {
                    return Err(err(format!(
                        "{j} is reserved by the unfinished shuttle starting at instruction {h}"
                    )));
                }
                later(&mut begin, node_free[j.0]);
            }
            path_delay = (begin.at - base.at).max(0.0);
            for &s in &leg.segments {
                seg_held[s.0] = Some(i);
            }
            for &j in &leg.junctions {
                node_held[j.0] = Some(i);
            }
            leg_of_ion.insert(ion, i);
        }

        let step = state.apply(&ins.kind).map_err(err)?;
        let start = begin.at;
        let end = start + step.duration_us;
        let done = Free { at: end, by: Some(i) };
        for &ion in &ions {
            ion_free[ion] = done;
        }
        if let Some(t) = trap {
            node_free[t.0] = done;
        }
        if let InstrKind::Merge { ion, .. } = ins.kind {
            if let Some(split) = leg_of_ion.remove(&ion) {
                let leg = leg_of_split[&split];
                for &s in &leg.segments {
                    seg_held[s.0] = None;
                    seg_free[s.0] = done;
                }
                for &j in &leg.junctions {
                    node_held[j.0] = None;
                    node_free[j.0] = done;
                }
            }
        }
        max_energy = max_energy.max(state.max_trap_energy());
        entries.push(TimedInstr {
            start_us: start,
            end_us: end,
            path_delay_us: path_delay,
            binding: begin.by,
            ions,
            trap,
            location,
            step,
        });
    }

    let leftover = state.in_transit();
    if let Some(&ion) = leftover.first() {
        return Err(SimError {
            instr: prog.instructions.len(),
            message: format!("ion {ion} is still in transit at the end of the program"),
        });
    }
    let makespan_us = entries.iter().map(|e| e.end_us).fold(0.0, f64::max);
    Ok(Timeline {
        entries,
        makespan_us,
        max_motional_energy: max_energy,
    })
}

impl Timeline {
    /// Instructions on the critical path, last first.
    pub fn critical_path(&self) -> Vec<usize> {
        let mut last = None;
        for (i, e) in self.entries.iter().enumerate() {
            if last.is_none_or(|l: usize| e.end_us > self.entries[l].end_us) {
                last = Some(i);
            }
        }
        let mut path = Vec::new();
        let mut cur = last;
        while let Some(i) = cur {
            path.push(i);
            cur = self.entries[i].binding;
        }
        path
    }
}

/// Runs the program and summarizes it.
pub fn simulate(prog: &CompiledProgram, hw: &HardwareConfig) -> Result<RunMetrics, SimError> {
    let tl = timeline(prog, hw)?;
    Ok(metrics(prog, &tl))
}

pub fn metrics(prog: &CompiledProgram, tl: &Timeline) -> RunMetrics {
    let mut fidelity = 1.0;
    let mut log_sum = 0.0;
    let mut background_sum = 0.0;
    let mut motional_sum = 0.0;
    let mut op_counts = BTreeMap::new();
    for (ins, e) in prog.instructions.iter().zip(&tl.entries) {
        fidelity *= e.step.fidelity;
        log_sum += e.step.fidelity.ln();
        background_sum += e.step.background;
        motional_sum += e.step.motional;
        *op_counts.entry(ins.kind.name().to_string()).or_insert(0) += 1;
    }
    let mut compute_us = 0.0;
    let mut communicate_us = 0.0;
    for i in tl.critical_path() {
        let d = tl.entries[i].end_us - tl.entries[i].start_us;
        if prog.instructions[i].kind.is_compute() {
            compute_us += d;
        } else {
            communicate_us += d;
        }
    }
    RunMetrics {
        makespan_us: tl.makespan_us,
        fidelity,
        log_fidelity_sum: log_sum,
        max_motional_energy: tl.max_motional_energy,
        op_counts,
        error_breakdown: ErrorBreakdown {
            background_sum,
            motional_sum,
        },
        time_split: TimeSplit {
            compute_us,
            communicate_us,
        },
    }
}
