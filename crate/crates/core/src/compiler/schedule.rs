use std::collections::{BTreeSet, VecDeque};

use crate::device::{
    shortest_path_with, ChainEnd, DeviceGraph, HardwareConfig, NodeId, SegmentId, ShuttlePath, TransitCost,
};
use crate::error::{CompileError, SimError};
use crate::ir::{build_dag, Circuit, GateKind};
use crate::models::{gate_time, reorder_time, shuttle_op_time, ReorderMethod, ShuttleOp};
use crate::sim::MachineState;

use super::{CompiledProgram, InstrKind, Instruction, Ion, Placement, Role};

fn quantize(t: f64) -> i64 {
    (t * 1e6).round() as i64
}

/// Lowers a circuit to a sequential instruction stream.
///
/// Ops are taken earliest-ready-first (ties to the lowest op id), where
/// readiness is estimated from when the operands and their traps free up.
/// A two-qubit gate across traps moves whichever operand is cheaper to
/// move, pricing source reordering, split, route and merge against the
/// current chains; equal prices move the ion out of the higher-numbered
/// trap. When every candidate destination or pass-through trap is full,
/// bystander ions are pushed toward the nearest trap with a free slot.
pub fn schedule(
    circuit: &Circuit,
    hw: &HardwareConfig,
    layout: &[Placement],
) -> Result<CompiledProgram, CompileError> {
    if layout.len() != circuit.num_qubits() {
        return Err(CompileError::Sim(SimError {
            instr: 0,
            message: format!(
                "layout places {} qubits but the circuit has {}",
                layout.len(),
                circuit.num_qubits()
            ),
        }));
    }
    let dag = build_dag(circuit);
    let mut m = Machine::new(hw, layout)?;
    let mut waiting: Vec<usize> = (0..dag.len()).map(|i| dag.preds(i).len()).collect();
    let mut ready: BTreeSet<usize> = dag.roots().into_iter().collect();
    while let Some(op) = ready
        .iter()
        .copied()
        .min_by_key(|&op| (quantize(m.estimate(circuit, op)), op))
    {
        ready.remove(&op);
        m.execute(circuit, op)?;
        for &s in dag.succs(op) {
            waiting[s] -= 1;
            if waiting[s] == 0 {
                ready.insert(s);
            }
        }
    }
    Ok(CompiledProgram {
        circuit: circuit.clone(),
        initial_layout: layout.to_vec(),
        instructions: m.out,
        reservations: Vec::new(),
    })
}

/// Prices trap-to-trap links that pass through no other trap.
struct DirectCost<'a>(&'a HardwareConfig);

impl TransitCost for DirectCost<'_> {
    fn segment(&self, _: &DeviceGraph, _: SegmentId) -> f64 {
        shuttle_op_time(ShuttleOp::Move(1), &self.0.physics)
    }

    fn junction(&self, g: &DeviceGraph, j: NodeId) -> f64 {
        shuttle_op_time(ShuttleOp::cross(g.degree(j)), &self.0.physics)
    }

    fn through_trap(&self, _: &DeviceGraph, _: NodeId, _: SegmentId, _: SegmentId) -> Option<f64> {
        None
    }
}

/// Prices a route for `ion` against the current chains.
struct StateCost<'m, 'a> {
    m: &'m Machine<'a>,
    ion: Ion,
    /// Treat full traps as impassable.
    strict: bool,
}

impl TransitCost for StateCost<'_, '_> {
    fn segment(&self, _: &DeviceGraph, _: SegmentId) -> f64 {
        shuttle_op_time(ShuttleOp::Move(1), &self.m.hw.physics)
    }

    fn junction(&self, g: &DeviceGraph, j: NodeId) -> f64 {
        shuttle_op_time(ShuttleOp::cross(g.degree(j)), &self.m.hw.physics)
    }

    fn through_trap(&self, g: &DeviceGraph, trap: NodeId, entry: SegmentId, exit: SegmentId) -> Option<f64> {
        let n = self.m.state.occupancy(trap);
        if self.strict && n >= g.capacity(trap) {
            return None;
        }
        let distance = if g.chain_end(trap, entry) == g.chain_end(trap, exit) {
            0
        } else {
            n
        };
        let hw = self.m.hw;
        let reorder = reorder_time(hw.gate, hw.reorder, n + 1, distance, &hw.physics).ok()?;
        Some(
            shuttle_op_time(ShuttleOp::Merge, &hw.physics)
                + reorder
                + shuttle_op_time(ShuttleOp::Split, &hw.physics),
        )
    }

    fn depart(&self, g: &DeviceGraph, trap: NodeId, exit: SegmentId) -> f64 {
        let (Some(end), Some(pos)) = (g.chain_end(trap, exit), self.m.state.position(self.ion)) else {
            return 0.0;
        };
        let idx = self.m.state.end_index(trap, end);
        let hw = self.m.hw;
        reorder_time(hw.gate, hw.reorder, self.m.state.occupancy(trap), pos.abs_diff(idx), &hw.physics)
            .unwrap_or(0.0)
    }
}

struct Machine<'a> {
    hw: &'a HardwareConfig,
    state: MachineState<'a>,
    out: Vec<Instruction>,
    ion_ready: Vec<f64>,
    node_free: Vec<f64>,
    /// Per trap: the traps reachable without passing another trap.
    links: Vec<Vec<(NodeId, ShuttlePath)>>,
}

impl<'a> Machine<'a> {
    fn new(hw: &'a HardwareConfig, layout: &[Placement]) -> Result<Self, CompileError> {
        let state = MachineState::new(hw, layout)
            .map_err(|message| CompileError::Sim(SimError { instr: 0, message }))?;
        let g = &hw.graph;
        let mut links = vec![Vec::new(); g.node_count()];
        for &t in g.traps() {
            for &u in g.traps() {
                if t != u {
                    if let Ok(p) = shortest_path_with(g, t, u, &DirectCost(hw)) {
                        links[t.0].push((u, p));
                    }
                }
            }
        }
        Ok(Self {
            hw,
            ion_ready: vec![0.0; layout.len()],
            node_free: vec![0.0; g.node_count()],
            state,
            out: Vec::new(),
            links,
        })
    }

    fn estimate(&self, circuit: &Circuit, op: usize) -> f64 {
        let mut t: f64 = 0.0;
        for &q in &circuit.ops()[op].qubits {
            t = t.max(self.ion_ready[q]);
            if let Some(trap) = self.state.trap_of(q) {
                t = t.max(self.node_free[trap.0]);
            }
        }
        t
    }

    fn emit(&mut self, op: usize, role: Role, kind: InstrKind) -> Result<(), CompileError> {
        let ions = self.state.ions_of(&kind);
        let trap = match kind {
            InstrKind::Gate1q { ion, .. } | InstrKind::Measure { ion } => self.state.trap_of(ion),
            InstrKind::GateMs { trap, .. }
            | InstrKind::SwapGs { trap, .. }
            | InstrKind::SwapIs { trap, .. }
            | InstrKind::Split { trap, .. }
            | InstrKind::Merge { trap, .. } => Some(trap),
            _ => None,
        };
        let step = self.state.apply(&kind).map_err(|message| {
            CompileError::Sim(SimError {
                instr: self.out.len(),
                message,
            })
        })?;
        let mut start: f64 = 0.0;
        for &i in &ions {
            start = start.max(self.ion_ready[i]);
        }
        if let Some(t) = trap {
            start = start.max(self.node_free[t.0]);
        }
        let end = start + step.duration_us;
        for &i in &ions {
            self.ion_ready[i] = end;
        }
        if let Some(t) = trap {
            self.node_free[t.0] = end;
        }
        self.out.push(Instruction { op, role, kind });
        Ok(())
    }

    fn execute(&mut self, circuit: &Circuit, op: usize) -> Result<(), CompileError> {
        let o = &circuit.ops()[op];
        match &o.kind {
            GateKind::OneQubit(label) => self.emit(
                op,
                Role::Gate,
                InstrKind::Gate1q {
                    ion: o.qubits[0],
                    label: label.clone(),
                },
            ),
            GateKind::Measure => self.emit(op, Role::Gate, InstrKind::Measure { ion: o.qubits[0] }),
            GateKind::TwoQubit => {
                let (a, b) = (o.qubits[0], o.qubits[1]);
                self.gather(op, a, b)?;
                let trap = self.trap(a);
                self.emit(op, Role::Gate, InstrKind::GateMs { ion_a: a, ion_b: b, trap })
            }
        }
    }

    fn trap(&self, ion: Ion) -> NodeId {
        self.state
            .trap_of(ion)
            .expect("ions rest in traps between shuttles")
    }

    fn plan(&self, ion: Ion, dest: NodeId, strict: bool) -> Option<(f64, ShuttlePath)> {
        if strict && self.state.is_full(dest) {
            return None;
        }
        let cost = StateCost {
            m: self,
            ion,
            strict,
        };
        let path = shortest_path_with(&self.hw.graph, self.trap(ion), dest, &cost).ok()?;
        let p = &self.hw.physics;
        let total = path.cost_us
            + shuttle_op_time(ShuttleOp::Split, p)
            + shuttle_op_time(ShuttleOp::Merge, p);
        Some((total, path))
    }

    /// Adds the time of the MS gate that follows the shuttle, in the
    /// destination chain as it will be after the merge.
    fn with_gate(&self, plan: Option<(f64, ShuttlePath)>, partner: Ion) -> Option<(f64, ShuttlePath)> {
        let (cost, path) = plan?;
        let hw = self.hw;
        let dest = path.destination();
        let n = self.state.occupancy(dest);
        let pos = self.state.position(partner)?;
        let d = match path.hops.last().and_then(|h| hw.graph.chain_end(dest, h.segment)) {
            Some(ChainEnd::Left) => pos + 1,
            _ => n - pos,
        };
        let gate = gate_time(hw.gate, d, n + 1).ok()?;
        Some((cost + gate, path))
    }

    fn choose(
        move_a: Option<(f64, ShuttlePath)>,
        move_b: Option<(f64, ShuttlePath)>,
        (a, ta): (Ion, NodeId),
        (b, tb): (Ion, NodeId),
    ) -> Option<(Ion, ShuttlePath)> {
        match (move_a, move_b) {
            (Some(x), Some(y)) => {
                let (qa, qb) = (quantize(x.0), quantize(y.0));
                if qa < qb || (qa == qb && ta > tb) {
                    Some((a, x.1))
                } else {
                    Some((b, y.1))
                }
            }
            (Some(x), None) => Some((a, x.1)),
            (None, Some(y)) => Some((b, y.1)),
            (None, None) => None,
        }
    }

    /// Brings `a` and `b` into one trap.
    fn gather(&mut self, op: usize, a: Ion, b: Ion) -> Result<(), CompileError> {
        let hw = self.hw;
        let g = &hw.graph;
        let rounds = 4 * g.traps().len() + 8;
        for _ in 0..rounds {
            let (ta, tb) = (self.trap(a), self.trap(b));
            if ta == tb {
                return Ok(());
            }
            let strict = Self::choose(
                self.with_gate(self.plan(a, tb, true), b),
                self.with_gate(self.plan(b, ta, true), a),
                (a, ta),
                (b, tb),
            );
            if let Some((ion, path)) = strict {
                return self.shuttle(op, ion, &path, Role::Shuttle);
            }
            let (_, path) = Self::choose(self.plan(a, tb, false), self.plan(b, ta, false), (a, ta), (b, tb))
                .ok_or_else(|| CompileError::NoLegalBuffer {
                    op,
                    message: format!("no route joins qubits {a} and {b}"),
                })?;
            let mut blocked = path.intermediate_traps(g);
            blocked.push(path.destination());
            let full = blocked
                .into_iter()
                .find(|&t| self.state.is_full(t))
                .ok_or_else(|| CompileError::NoLegalBuffer {
                    op,
                    message: format!("route for qubits {a} and {b} is blocked but no trap on it is full"),
                })?;
            let route: Vec<NodeId> = path.nodes().into_iter().filter(|&v| g.is_trap(v)).collect();
            self.make_room(op, full, &[a, b], &route)?;
        }
        Err(CompileError::NoLegalBuffer {
            op,
            message: format!("could not free a route for qubits {a} and {b}"),
        })
    }

    /// Frees one slot in the full trap `x` by shifting bystanders one trap
    /// at a time toward the nearest trap with room. Traps on `route`
    /// (other than its source) only take an ion if they keep a free slot
    /// for the pending shuttle.
    fn make_room(&mut self, op: usize, x: NodeId, protect: &[Ion], route: &[NodeId]) -> Result<(), CompileError> {
        let hw = self.hw;
        let g = &hw.graph;
        let movable = |s: &MachineState<'_>, t: NodeId| s.chain(t).iter().any(|i| !protect.contains(i));
        let has_room = |s: &MachineState<'_>, t: NodeId| {
            let need = if route.iter().skip(1).any(|&r| r == t) { 2 } else { 1 };
            g.capacity(t) >= s.occupancy(t) + need
        };
        if !movable(&self.state, x) {
            return Err(CompileError::NoLegalBuffer {
                op,
                message: format!("{x} is full and holds only gate operands"),
            });
        }
        let mut parent: Vec<Option<NodeId>> = vec![None; g.node_count()];
        let mut seen = vec![false; g.node_count()];
        seen[x.0] = true;
        let mut queue = VecDeque::from([x]);
        let mut goal = None;
        'search: while let Some(u) = queue.pop_front() {
            for (v, _) in &self.links[u.0] {
                let v = *v;
                if seen[v.0] {
                    continue;
                }
                seen[v.0] = true;
                parent[v.0] = Some(u);
                if has_room(&self.state, v) {
                    goal = Some(v);
                    break 'search;
                }
                if movable(&self.state, v) {
                    queue.push_back(v);
                }
            }
        }
        let goal = goal.ok_or_else(|| CompileError::NoLegalBuffer {
            op,
            message: format!("no trap with a free slot is reachable from {x}"),
        })?;
        let mut chain = vec![goal];
        while let Some(p) = parent[chain.last().expect("non-empty").0] {
            chain.push(p);
        }
        chain.reverse();
        for k in (0..chain.len() - 1).rev() {
            let (from, to) = (chain[k], chain[k + 1]);
            let path = self.links[from.0]
                .iter()
                .find(|(v, _)| *v == to)
                .map(|(_, p)| p.clone())
                .expect("link exists");
            let exit = path.hops[0].segment;
            let end = g.chain_end(from, exit).expect("link leaves through a chain end");
            let idx = self.state.end_index(from, end);
            let ion = self
                .state
                .chain(from)
                .iter()
                .enumerate()
                .filter(|(_, i)| !protect.contains(i))
                .min_by_key(|(p, _)| (p.abs_diff(idx), *p))
                .map(|(_, &i)| i)
                .expect("trap on the push chain has a movable ion");
            self.shuttle(op, ion, &path, Role::Evict)?;
        }
        Ok(())
    }

    fn reorder_to_end(
        &mut self,
        op: usize,
        ion: Ion,
        trap: NodeId,
        end: crate::device::ChainEnd,
        role: Role,
    ) -> Result<(), CompileError> {
        let e = self.state.end_index(trap, end);
        let mut p = self.state.position(ion).expect("ion is in its trap");
        match self.hw.reorder {
            ReorderMethod::GS => {
                if p != e {
                    let other = self.state.chain(trap)[e];
                    self.emit(op, role, InstrKind::SwapGs { trap, ion_a: ion, ion_b: other })?;
                }
            }
            ReorderMethod::IS => {
                while p < e {
                    self.emit(op, role, InstrKind::SwapIs { trap, position: p })?;
                    p += 1;
                }
                while p > e {
                    self.emit(op, role, InstrKind::SwapIs { trap, position: p - 1 })?;
                    p -= 1;
                }
            }
        }
        Ok(())
    }

    /// Emits the reorders, splits, moves, crossings and merges that carry
    /// `ion` along `path`, one trap-to-trap leg at a time.
    fn shuttle(&mut self, op: usize, ion: Ion, path: &ShuttlePath, base: Role) -> Result<(), CompileError> {
        let hw = self.hw;
        let g = &hw.graph;
        let evict = base == Role::Evict;
        let pick = |own: Role| if evict { Role::Evict } else { own };
        let mut cur = path.from;
        let mut hops = path.hops.as_slice();
        let mut first = true;
        while !hops.is_empty() {
            let k = hops
                .iter()
                .position(|h| g.is_trap(h.to))
                .expect("routes end at a trap");
            let (leg, rest) = hops.split_at(k + 1);
            let exit = leg[0].segment;
            let end = g.chain_end(cur, exit).expect("route leaves through a chain end");
            let (reorder_role, split_role) = if first {
                (pick(Role::Reorder), pick(Role::Shuttle))
            } else {
                (pick(Role::Transit), pick(Role::Transit))
            };
            self.reorder_to_end(op, ion, cur, end, reorder_role)?;
            self.emit(op, split_role, InstrKind::Split { trap: cur, ion, segment: exit })?;
            for h in leg {
                self.emit(op, pick(Role::Shuttle), InstrKind::Move { ion, segment: h.segment })?;
                if g.is_junction(h.to) {
                    self.emit(op, pick(Role::Shuttle), InstrKind::Cross { ion, junction: h.to })?;
                }
            }
            let dest = leg[k].to;
            let merge_role = if rest.is_empty() {
                pick(Role::Shuttle)
            } else {
                pick(Role::Transit)
            };
            self.emit(
                op,
                merge_role,
                InstrKind::Merge {
                    trap: dest,
                    ion,
                    segment: leg[k].segment,
                },
            )?;
            cur = dest;
            hops = rest;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::initial_map;
    use crate::device::{make_grid, make_linear};
    use crate::models::GateImpl;

    fn hw_linear(traps: usize, cap: usize, reorder: ReorderMethod) -> HardwareConfig {
        HardwareConfig::new(make_linear(traps, cap).unwrap(), GateImpl::FM, reorder)
    }

    fn kinds(p: &CompiledProgram) -> Vec<&'static str> {
        p.instructions.iter().map(|i| i.kind.name()).collect()
    }

    #[test]
    fn golden_three_gate_program() {
        let hw = hw_linear(2, 4, ReorderMethod::GS);
        let mut c = Circuit::new(4);
        c.two_qubit(0, 1).unwrap();
        c.two_qubit(2, 3).unwrap();
        c.two_qubit(1, 2).unwrap();
        let layout = initial_map(&c, &hw).unwrap();
        let p = schedule(&c, &hw, &layout).unwrap();
        assert_eq!(
            kinds(&p),
            vec!["gate_ms", "gate_ms", "split", "move", "merge", "gate_ms"]
        );
        assert_eq!(
            p.instructions[2].kind,
            InstrKind::Split { trap: NodeId(1), ion: 2, segment: SegmentId(0) }
        );
    }

    #[test]
    fn is_reorder_walks_the_chain() {
        let hw = hw_linear(2, 6, ReorderMethod::IS);
        let mut c = Circuit::new(6);
        c.two_qubit(0, 3).unwrap();
        // both operands sit two hops from the facing chain ends
        let pl = |t, position| Placement { trap: NodeId(t), position };
        let layout = vec![pl(0, 0), pl(0, 1), pl(0, 2), pl(1, 2), pl(1, 0), pl(1, 1)];
        let p = schedule(&c, &hw, &layout).unwrap();
        assert_eq!(p.count("swap_is"), 2);
        assert!(p.count("swap_is") > 0);
        assert_eq!(p.count("swap_gs"), 0);
        assert_eq!(p.count("gate_ms"), 1);
    }

    #[test]
    fn evicts_when_destinations_are_full() {
        // Two traps of capacity 3, both filled to capacity by hand.
        let hw = hw_linear(3, 3, ReorderMethod::GS);
        let mut c = Circuit::new(6);
        c.two_qubit(0, 5).unwrap();
        let pl = |t, position| Placement { trap: NodeId(t), position };
        let layout = vec![pl(0, 0), pl(0, 1), pl(0, 2), pl(1, 0), pl(1, 1), pl(1, 2)];
        let p = schedule(&c, &hw, &layout).unwrap();
        assert!(p.instructions.iter().any(|i| i.role == Role::Evict));
        assert_eq!(p.count("gate_ms"), 1);
    }

    #[test]
    fn grid_routes_through_junctions() {
        let hw = HardwareConfig::new(make_grid(2, 2, 5).unwrap(), GateImpl::FM, ReorderMethod::GS);
        let mut c = Circuit::new(2);
        c.two_qubit(0, 1).unwrap();
        let layout = vec![
            Placement { trap: NodeId(0), position: 0 },
            Placement { trap: NodeId(3), position: 0 },
        ];
        let p = schedule(&c, &hw, &layout).unwrap();
        assert_eq!(p.count("cross"), 2);
    }
}
