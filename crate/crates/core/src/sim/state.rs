use serde::{Deserialize, Serialize};

use crate::compiler::{InstrKind, Ion, Placement};
use crate::device::{ChainEnd, HardwareConfig, NodeId, SegmentId};
use crate::models::{
    gate_time, heat_merge, heat_move, heat_split, is_hop_time, measure_fidelity, one_qubit_fidelity,
    shuttle_op_time, two_qubit_fidelity, ChainEnergy, ShuttleOp,
};

/// Where an ion currently is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Location {
    Trap { trap: NodeId },
    /// Inside `segment`, next to node `at`.
    Segment { segment: SegmentId, at: NodeId },
    Junction { junction: NodeId },
}

/// Cost and quality of executing one instruction against the machine.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Step {
    pub duration_us: f64,
    /// Ions in the chain the instruction acts on, before it acts.
    pub chain_n: usize,
    /// Motional energy of that chain, before the instruction.
    pub n_bar: f64,
    pub fidelity: f64,
    pub background: f64,
    pub motional: f64,
}

impl Step {
    fn plain(duration_us: f64, chain_n: usize, n_bar: f64) -> Self {
        Self {
            duration_us,
            chain_n,
            n_bar,
            fidelity: 1.0,
            background: 0.0,
            motional: 0.0,
        }
    }
}

/// Symbolic machine: chains, ion locations, occupancy and motional energy.
/// Applying an instruction checks it is executable and updates the state.
#[derive(Debug, Clone)]
pub struct MachineState<'a> {
    hw: &'a HardwareConfig,
    chains: Vec<Vec<Ion>>,
    energy: Vec<f64>,
    loc: Vec<Location>,
    ion_energy: Vec<f64>,
    segment_occupant: Vec<Option<Ion>>,
    junction_occupant: Vec<Option<Ion>>,
}

impl<'a> MachineState<'a> {
    pub fn new(hw: &'a HardwareConfig, layout: &[Placement]) -> Result<Self, String> {
        let g = &hw.graph;
        let mut slots: Vec<Vec<(usize, Ion)>> = vec![Vec::new(); g.node_count()];
        for (q, p) in layout.iter().enumerate() {
            if p.trap.0 >= g.node_count() || !g.is_trap(p.trap) {
                return Err(format!("qubit {q} is placed on {}, which is not a trap", p.trap));
            }
            slots[p.trap.0].push((p.position, q));
        }
        let mut chains = Vec::with_capacity(g.node_count());
        for (node, mut s) in slots.into_iter().enumerate() {
            s.sort_unstable();
            for (k, &(pos, q)) in s.iter().enumerate() {
                if pos != k {
                    return Err(format!(
                        "layout of N{node} is not contiguous: qubit {q} at position {pos}"
                    ));
                }
            }
            if s.len() > g.capacity(NodeId(node)) && !s.is_empty() {
                return Err(format!(
                    "N{node} holds {} ions, over its capacity {}",
                    s.len(),
                    g.capacity(NodeId(node))
                ));
            }
            chains.push(s.into_iter().map(|(_, q)| q).collect());
        }
        let loc = layout.iter().map(|p| Location::Trap { trap: p.trap }).collect();
        Ok(Self {
            hw,
            chains,
            energy: vec![0.0; g.node_count()],
            loc,
            ion_energy: vec![0.0; layout.len()],
            segment_occupant: vec![None; g.segments().len()],
            junction_occupant: vec![None; g.node_count()],
        })
    }

    pub fn hardware(&self) -> &'a HardwareConfig {
        self.hw
    }

    pub fn ion_count(&self) -> usize {
        self.loc.len()
    }

    pub fn chain(&self, trap: NodeId) -> &[Ion] {
        &self.chains[trap.0]
    }

    pub fn chains(&self) -> &[Vec<Ion>] {
        &self.chains
    }

    pub fn location(&self, ion: Ion) -> Location {
        self.loc[ion]
    }

    pub fn trap_of(&self, ion: Ion) -> Option<NodeId> {
        match self.loc.get(ion)? {
            Location::Trap { trap } => Some(*trap),
            _ => None,
        }
    }

    pub fn position(&self, ion: Ion) -> Option<usize> {
        let t = self.trap_of(ion)?;
        self.chains[t.0].iter().position(|&x| x == ion)
    }

    pub fn occupancy(&self, trap: NodeId) -> usize {
        self.chains[trap.0].len()
    }

    pub fn is_full(&self, trap: NodeId) -> bool {
        self.occupancy(trap) >= self.hw.graph.capacity(trap)
    }

    /// Motional energy of the chain in `trap`.
    pub fn energy(&self, trap: NodeId) -> f64 {
        self.energy[trap.0]
    }

    /// Motional energy carried by an ion outside any trap; 0 inside one.
    pub fn transit_energy(&self, ion: Ion) -> f64 {
        self.ion_energy[ion]
    }

    /// Hottest occupied trap.
    pub fn max_trap_energy(&self) -> f64 {
        self.hw
            .graph
            .traps()
            .iter()
            .filter(|t| !self.chains[t.0].is_empty())
            .map(|t| self.energy[t.0])
            .fold(0.0, f64::max)
    }

    pub fn in_transit(&self) -> Vec<Ion> {
        (0..self.loc.len())
            .filter(|&i| !matches!(self.loc[i], Location::Trap { .. }))
            .collect()
    }

    /// Index of the given chain end in the current chain of `trap`.
    pub fn end_index(&self, trap: NodeId, end: ChainEnd) -> usize {
        match end {
            ChainEnd::Left => 0,
            ChainEnd::Right => self.chains[trap.0].len().saturating_sub(1),
        }
    }

    /// Ions an instruction acts on, resolved against the current state.
    pub fn ions_of(&self, kind: &InstrKind) -> Vec<Ion> {
        match *kind {
            InstrKind::Gate1q { ion, .. }
            | InstrKind::Measure { ion }
            | InstrKind::Split { ion, .. }
            | InstrKind::Move { ion, .. }
            | InstrKind::Cross { ion, .. }
            | InstrKind::Merge { ion, .. }
            | InstrKind::Wait { ion, .. } => vec![ion],
            InstrKind::GateMs { ion_a, ion_b, .. } | InstrKind::SwapGs { ion_a, ion_b, .. } => {
                vec![ion_a, ion_b]
            }
            InstrKind::SwapIs { trap, position } => self
                .chains
                .get(trap.0)
                .map(|c| c.iter().skip(position).take(2).copied().collect())
                .unwrap_or_default(),
        }
    }

    fn check_ion(&self, ion: Ion) -> Result<(), String> {
        if ion >= self.loc.len() {
            return Err(format!("unknown ion {ion}"));
        }
        Ok(())
    }

    fn check_trap(&self, trap: NodeId) -> Result<(), String> {
        if trap.0 >= self.hw.graph.node_count() || !self.hw.graph.is_trap(trap) {
            return Err(format!("{trap} is not a trap"));
        }
        Ok(())
    }

    fn check_segment(&self, segment: SegmentId) -> Result<(), String> {
        if segment.0 >= self.hw.graph.segments().len() {
            return Err(format!("unknown segment {segment}"));
        }
        Ok(())
    }

    fn in_trap(&self, ion: Ion) -> Result<NodeId, String> {
        self.check_ion(ion)?;
        self.trap_of(ion)
            .ok_or_else(|| format!("ion {ion} is in transit, not in a trap"))
    }

    fn ms_step(&self, trap: NodeId, a: Ion, b: Ion, count: u32) -> Result<Step, String> {
        if a == b {
            return Err(format!("ion {a} cannot interact with itself"));
        }
        for ion in [a, b] {
            if self.in_trap(ion)? != trap {
                return Err(format!("ion {ion} is not in {trap}"));
            }
        }
        let chain = &self.chains[trap.0];
        let pa = chain.iter().position(|&x| x == a).unwrap_or(0);
        let pb = chain.iter().position(|&x| x == b).unwrap_or(0);
        let n = chain.len();
        let p = &self.hw.physics;
        let tau = gate_time(self.hw.gate, pa.abs_diff(pb), n).map_err(|e| e.to_string())?;
        let f = two_qubit_fidelity(tau, self.energy[trap.0], n, p);
        let k = f64::from(count);
        Ok(Step {
            duration_us: tau * k,
            chain_n: n,
            n_bar: self.energy[trap.0],
            fidelity: f.fidelity.powi(count as i32),
            background: f.background * k,
            motional: f.motional * k,
        })
    }

    /// Checks and executes one instruction.
    pub fn apply(&mut self, kind: &InstrKind) -> Result<Step, String> {
        let hw = self.hw;
        let g = &hw.graph;
        let p = &hw.physics;
        match *kind {
            InstrKind::Gate1q { ion, .. } => {
                let t = self.in_trap(ion)?;
                let mut s = Step::plain(p.t_1q, self.chains[t.0].len(), self.energy[t.0]);
                s.fidelity = one_qubit_fidelity(p);
                Ok(s)
            }
            InstrKind::Measure { ion } => {
                let t = self.in_trap(ion)?;
                let mut s = Step::plain(p.t_meas, self.chains[t.0].len(), self.energy[t.0]);
                s.fidelity = measure_fidelity(p);
                Ok(s)
            }
            InstrKind::GateMs { ion_a, ion_b, trap } => {
                self.check_trap(trap)?;
                self.ms_step(trap, ion_a, ion_b, 1)
            }
            InstrKind::SwapGs { trap, ion_a, ion_b } => {
                self.check_trap(trap)?;
                let s = self.ms_step(trap, ion_a, ion_b, 3)?;
                let chain = &mut self.chains[trap.0];
                let pa = chain.iter().position(|&x| x == ion_a).unwrap_or(0);
                let pb = chain.iter().position(|&x| x == ion_b).unwrap_or(0);
                chain.swap(pa, pb);
                Ok(s)
            }
            InstrKind::SwapIs { trap, position } => {
                self.check_trap(trap)?;
                let n = self.chains[trap.0].len();
                if position + 1 >= n {
                    return Err(format!("no adjacent pair at position {position} in {trap} ({n} ions)"));
                }
                let e = self.energy[trap.0];
                let s = Step::plain(is_hop_time(n, p), n, e);
                if n > 2 {
                    let (pair, rest) =
                        heat_split(ChainEnergy::new(e), n, 2, p).map_err(|e| e.to_string())?;
                    self.energy[trap.0] = heat_merge(pair, rest, p).quanta();
                }
                self.chains[trap.0].swap(position, position + 1);
                Ok(s)
            }
            InstrKind::Split { trap, ion, segment } => {
                self.check_trap(trap)?;
                self.check_segment(segment)?;
                if self.in_trap(ion)? != trap {
                    return Err(format!("ion {ion} is not in {trap}"));
                }
                let end = g
                    .chain_end(trap, segment)
                    .ok_or_else(|| format!("{segment} does not attach to {trap}"))?;
                let idx = self.end_index(trap, end);
                if self.chains[trap.0][idx] != ion {
                    return Err(format!("ion {ion} is not at the {end:?} end of {trap}"));
                }
                if let Some(o) = self.segment_occupant[segment.0] {
                    return Err(format!("{segment} is occupied by ion {o}"));
                }
                let n = self.chains[trap.0].len();
                let e = self.energy[trap.0];
                let (ion_e, rest_e) = if n >= 2 {
                    let (a, b) = heat_split(ChainEnergy::new(e), n, 1, p).map_err(|e| e.to_string())?;
                    (a.quanta(), b.quanta())
                } else {
                    (e + p.k1, 0.0)
                };
                self.chains[trap.0].remove(idx);
                self.energy[trap.0] = rest_e;
                self.ion_energy[ion] = ion_e;
                self.segment_occupant[segment.0] = Some(ion);
                self.loc[ion] = Location::Segment { segment, at: trap };
                Ok(Step::plain(shuttle_op_time(ShuttleOp::Split, p), n, e))
            }
            InstrKind::Move { ion, segment } => {
                self.check_ion(ion)?;
                self.check_segment(segment)?;
                let seg = *g.segment(segment);
                let at = match self.loc[ion] {
                    Location::Segment { segment: s, at } if s == segment => seg.other(at),
                    Location::Junction { junction } if seg.touches(junction) => {
                        if let Some(o) = self.segment_occupant[segment.0] {
                            return Err(format!("{segment} is occupied by ion {o}"));
                        }
                        self.junction_occupant[junction.0] = None;
                        self.segment_occupant[segment.0] = Some(ion);
                        seg.other(junction)
                    }
                    other => return Err(format!("ion {ion} cannot move along {segment} from {other:?}")),
                };
                self.loc[ion] = Location::Segment { segment, at };
                let e = self.ion_energy[ion];
                self.ion_energy[ion] = heat_move(ChainEnergy::new(e), 1, p).quanta();
                Ok(Step::plain(shuttle_op_time(ShuttleOp::Move(1), p), 1, e))
            }
            InstrKind::Cross { ion, junction } => {
                self.check_ion(ion)?;
                if junction.0 >= g.node_count() || !g.is_junction(junction) {
                    return Err(format!("{junction} is not a junction"));
                }
                let segment = match self.loc[ion] {
                    Location::Segment { segment, at } if at == junction => segment,
                    other => return Err(format!("ion {ion} is not next to {junction}: {other:?}")),
                };
                if let Some(o) = self.junction_occupant[junction.0] {
                    return Err(format!("{junction} is occupied by ion {o}"));
                }
                self.segment_occupant[segment.0] = None;
                self.junction_occupant[junction.0] = Some(ion);
                self.loc[ion] = Location::Junction { junction };
                let e = self.ion_energy[ion];
                self.ion_energy[ion] = heat_move(ChainEnergy::new(e), 1, p).quanta();
                let t = shuttle_op_time(ShuttleOp::cross(g.degree(junction)), p);
                Ok(Step::plain(t, 1, e))
            }
            InstrKind::Merge { trap, ion, segment } => {
                self.check_ion(ion)?;
                self.check_trap(trap)?;
                match self.loc[ion] {
                    Location::Segment { segment: s, at } if s == segment && at == trap => {}
                    other => return Err(format!("ion {ion} is not in {segment} next to {trap}: {other:?}")),
                }
                let end = g
                    .chain_end(trap, segment)
                    .ok_or_else(|| format!("{segment} does not attach to {trap}"))?;
                let n = self.chains[trap.0].len();
                if n >= g.capacity(trap) {
                    return Err(format!("{trap} is full ({n} ions)"));
                }
                let e = self.energy[trap.0];
                let merged = heat_merge(ChainEnergy::new(e), ChainEnergy::new(self.ion_energy[ion]), p);
                match end {
                    ChainEnd::Left => self.chains[trap.0].insert(0, ion),
                    ChainEnd::Right => self.chains[trap.0].push(ion),
                }
                self.energy[trap.0] = merged.quanta();
                self.ion_energy[ion] = 0.0;
                self.segment_occupant[segment.0] = None;
                self.loc[ion] = Location::Trap { trap };
                Ok(Step::plain(shuttle_op_time(ShuttleOp::Merge, p), n, e))
            }
            InstrKind::Wait { ion, at, duration_us } => {
                let t = self.in_trap(ion)?;
                if t != at {
                    return Err(format!("ion {ion} waits at {at} but is in {t}"));
                }
                if !(duration_us >= 0.0 && duration_us.is_finite()) {
                    return Err(format!("invalid wait duration {duration_us}"));
                }
                Ok(Step::plain(duration_us, self.chains[t.0].len(), self.energy[t.0]))
            }
        }
    }
}
