use crate::device::HardwareConfig;
use crate::error::CompileError;
use crate::ir::Circuit;

use super::Placement;

/// Slots kept free in every trap at mapping time so shuttled ions can
/// always be received.
pub const HEADROOM: usize = 2;

/// Greedy initial placement: qubits in order of first use fill traps in
/// trap order, each up to `capacity - 2` ions. Qubits that are never
/// used come last, by index.
pub fn initial_map(circuit: &Circuit, hw: &HardwareConfig) -> Result<Vec<Placement>, CompileError> {
    let g = &hw.graph;
    let n = circuit.num_qubits();
    let usable: usize = g
        .traps()
        .iter()
        .map(|&t| g.capacity(t).saturating_sub(HEADROOM))
        .sum();
    if n > usable {
        return Err(CompileError::InsufficientCapacity {
            needed: n,
            available: usable,
        });
    }

    let first = circuit.first_use();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&q| match first[q] {
        Some(i) => (i, circuit.ops()[i].qubits.iter().position(|&x| x == q).unwrap_or(0)),
        None => (usize::MAX, q),
    });

    let mut layout = vec![
        Placement {
            trap: g.traps()[0],
            position: 0,
        };
        n
    ];
    let mut qubits = order.into_iter();
    'traps: for &t in g.traps() {
        let room = g.capacity(t).saturating_sub(HEADROOM);
        for position in 0..room {
            match qubits.next() {
                Some(q) => layout[q] = Placement { trap: t, position },
                None => break 'traps,
            }
        }
    }
    Ok(layout)
}
