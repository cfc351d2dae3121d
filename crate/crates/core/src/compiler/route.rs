use crate::device::HardwareConfig;
use crate::error::{CompileError, SimError};
use crate::sim::timeline;

use super::{find_legs, CompiledProgram, InstrKind, Instruction, Role};

/// Makes shuttle congestion explicit.
///
/// Legs acquire their segments and junctions in program order, which is
/// the source op order the scheduler served them in, so an earlier leg
/// always has priority and no cycle of waits can form. Any departure
/// that has to wait for a route is preceded by a `wait` of that length,
/// and every leg's reservation is recorded. Existing waits are dropped
/// and recomputed, so routing twice gives the same program.
pub fn route_parallel(prog: &CompiledProgram, hw: &HardwareConfig) -> Result<CompiledProgram, CompileError> {
    let mut base = prog.clone();
    base.instructions
        .retain(|i| !matches!(i.kind, InstrKind::Wait { .. }));
    base.reservations.clear();
    let tl = timeline(&base, hw)?;

    let mut out = Vec::with_capacity(base.instructions.len());
    for (ins, e) in base.instructions.iter().zip(&tl.entries) {
        if let InstrKind::Split { trap, ion, .. } = ins.kind {
            if e.path_delay_us > 1e-9 {
                out.push(Instruction {
                    op: ins.op,
                    role: Role::Wait,
                    kind: InstrKind::Wait {
                        ion,
                        at: trap,
                        duration_us: e.path_delay_us,
                    },
                });
            }
        }
        out.push(ins.clone());
    }
    let reservations = find_legs(&out)
        .map_err(|(instr, message)| CompileError::Sim(SimError { instr, message }))?;
    Ok(CompiledProgram {
        instructions: out,
        reservations,
        ..base
    })
}
