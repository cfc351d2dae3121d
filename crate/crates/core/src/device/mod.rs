//! QCCD device description: traps and junctions joined by shuttling
//! segments, plus the hardware configuration a program is compiled for.

mod config;
mod path;

pub use config::{DeviceConfig, NodeSpec, TopologySpec};
pub use path::{shortest_path_with, shortest_shuttle_path, Hop, ShuttlePath, TransitCost};

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DeviceError;
use crate::models::{GateImpl, PhysicsParams, ReorderMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SegmentId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}", self.0)
    }
}

impl fmt::Display for SegmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Trap { capacity: usize },
    Junction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub id: SegmentId,
    pub ends: (NodeId, NodeId),
}

impl Segment {
    pub fn other(&self, node: NodeId) -> NodeId {
        if self.ends.0 == node {
            self.ends.1
        } else {
            self.ends.0
        }
    }

    pub fn touches(&self, node: NodeId) -> bool {
        self.ends.0 == node || self.ends.1 == node
    }
}

/// Which end of a trap's ion chain a segment attaches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainEnd {
    /// Position 0 of the chain.
    Left,
    /// Position `len - 1` of the chain.
    Right,
}

/// Immutable device topology.
///
/// Trap node ids come first and are numbered in topology order
/// (left-to-right for linear devices, row-major for grids).
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceGraph {
    kinds: Vec<NodeKind>,
    segments: Vec<Segment>,
    adjacency: Vec<Vec<(SegmentId, NodeId)>>,
    traps: Vec<NodeId>,
    trap_ends: Vec<[Option<SegmentId>; 2]>,
}

impl DeviceGraph {
    /// Builds and validates a graph. `ends` optionally fixes the
    /// (left, right) segments of each trap; when absent, a trap's first
    /// incident segment (in segment order) is its left end.
    pub fn new(
        kinds: Vec<NodeKind>,
        segment_ends: Vec<(NodeId, NodeId)>,
        ends: Option<Vec<[Option<SegmentId>; 2]>>,
    ) -> Result<Self, DeviceError> {
        let n = kinds.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut segments = Vec::with_capacity(segment_ends.len());
        for (i, &(a, b)) in segment_ends.iter().enumerate() {
            for node in [a, b] {
                if node.0 >= n {
                    return Err(DeviceError::UnknownNode { segment: i, node: node.0 });
                }
            }
            if a == b {
                return Err(DeviceError::SelfLoop { segment: i, node: a.0 });
            }
            if adjacency[a.0].iter().any(|&(_, o)| o == b) {
                return Err(DeviceError::ParallelSegment { a: a.0, b: b.0 });
            }
            let id = SegmentId(i);
            adjacency[a.0].push((id, b));
            adjacency[b.0].push((id, a));
            segments.push(Segment { id, ends: (a, b) });
        }

        let traps: Vec<NodeId> = (0..n)
            .filter(|&i| matches!(kinds[i], NodeKind::Trap { .. }))
            .map(NodeId)
            .collect();
        if traps.is_empty() {
            return Err(DeviceError::NoTraps);
        }
        for (i, kind) in kinds.iter().enumerate() {
            let degree = adjacency[i].len();
            match *kind {
                NodeKind::Trap { capacity } => {
                    if capacity < 2 {
                        return Err(DeviceError::CapacityTooSmall { node: i, capacity });
                    }
                    if degree > 2 {
                        return Err(DeviceError::TrapDegree { node: i, degree });
                    }
                    if degree == 0 && n > 1 {
                        return Err(DeviceError::IsolatedTrap { node: i });
                    }
                }
                NodeKind::Junction => {
                    if degree != 3 && degree != 4 {
                        return Err(DeviceError::JunctionDegree { node: i, degree });
                    }
                }
            }
        }

        let trap_ends = match ends {
            Some(e) => e,
            None => (0..n)
                .map(|i| {
                    let mut e = [None, None];
                    for (slot, &(seg, _)) in adjacency[i].iter().enumerate().take(2) {
                        e[slot] = Some(seg);
                    }
                    e
                })
                .collect(),
        };

        let g = Self {
            kinds,
            segments,
            adjacency,
            traps,
            trap_ends,
        };
        if !g.is_connected() {
            return Err(DeviceError::Disconnected);
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let n = self.kinds.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &(_, v) in &self.adjacency[u] {
                if !seen[v.0] {
                    seen[v.0] = true;
                    queue.push_back(v.0);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn kind(&self, node: NodeId) -> NodeKind {
        self.kinds[node.0]
    }

    pub fn is_trap(&self, node: NodeId) -> bool {
        matches!(self.kinds[node.0], NodeKind::Trap { .. })
    }

    pub fn is_junction(&self, node: NodeId) -> bool {
        self.kinds[node.0] == NodeKind::Junction
    }

    /// Zero for junctions.
    pub fn capacity(&self, node: NodeId) -> usize {
        match self.kinds[node.0] {
            NodeKind::Trap { capacity } => capacity,
            NodeKind::Junction => 0,
        }
    }

    pub fn traps(&self) -> &[NodeId] {
        &self.traps
    }

    pub fn junctions(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.kinds.len())
            .map(NodeId)
            .filter(|&n| self.is_junction(n))
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, id: SegmentId) -> &Segment {
        &self.segments[id.0]
    }

    pub fn neighbors(&self, node: NodeId) -> &[(SegmentId, NodeId)] {
        &self.adjacency[node.0]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node.0].len()
    }

    /// The chain end of `trap` that `segment` attaches to.
    pub fn chain_end(&self, trap: NodeId, segment: SegmentId) -> Option<ChainEnd> {
        let [l, r] = self.trap_ends.get(trap.0)?;
        if *l == Some(segment) {
            Some(ChainEnd::Left)
        } else if *r == Some(segment) {
            Some(ChainEnd::Right)
        } else {
            None
        }
    }

    pub fn total_capacity(&self) -> usize {
        self.traps.iter().map(|&t| self.capacity(t)).sum()
    }

    /// Same topology with every trap's capacity replaced.
    pub fn with_capacity(&self, capacity: usize) -> Result<Self, DeviceError> {
        let mut g = self.clone();
        for (i, k) in g.kinds.iter_mut().enumerate() {
            if let NodeKind::Trap { capacity: c } = k {
                if capacity < 2 {
                    return Err(DeviceError::CapacityTooSmall { node: i, capacity });
                }
                *c = capacity;
            }
        }
        Ok(g)
    }
}

/// `n_traps` traps in a path with one segment between neighbours.
pub fn make_linear(n_traps: usize, capacity: usize) -> Result<DeviceGraph, DeviceError> {
    if n_traps == 0 {
        return Err(DeviceError::NoTraps);
    }
    let kinds = vec![NodeKind::Trap { capacity }; n_traps];
    let segs = (1..n_traps).map(|k| (NodeId(k - 1), NodeId(k))).collect();
    let ends = (0..n_traps)
        .map(|k| {
            [
                (k > 0).then(|| SegmentId(k - 1)),
                (k + 1 < n_traps).then_some(SegmentId(k)),
            ]
        })
        .collect();
    DeviceGraph::new(kinds, segs, Some(ends))
}

/// Grid of `rows x cols` traps.
///
/// Within row `i`, junction `J(i,k)` sits between traps `T(i,k)` and
/// `T(i,k+1)`; junctions in the same column are linked vertically. Trap
/// `T(i,k)` has node id `i*cols + k`; junction `J(i,k)` has id
/// `rows*cols + i*(cols-1) + k`.
pub fn make_grid(rows: usize, cols: usize, capacity: usize) -> Result<DeviceGraph, DeviceError> {
    if rows < 2 || cols < 2 {
        return Err(DeviceError::GridTooSmall { rows, cols });
    }
    let trap = |i: usize, k: usize| NodeId(i * cols + k);
    let junction = |i: usize, k: usize| NodeId(rows * cols + i * (cols - 1) + k);
    let mut kinds = vec![NodeKind::Trap { capacity }; rows * cols];
    kinds.extend(std::iter::repeat_n(NodeKind::Junction, rows * (cols - 1)));

    let mut segs = Vec::new();
    let mut ends = vec![[None, None]; kinds.len()];
    for i in 0..rows {
        for k in 0..cols - 1 {
            ends[trap(i, k).0][1] = Some(SegmentId(segs.len()));
            segs.push((trap(i, k), junction(i, k)));
            ends[trap(i, k + 1).0][0] = Some(SegmentId(segs.len()));
            segs.push((junction(i, k), trap(i, k + 1)));
        }
    }
    for i in 0..rows - 1 {
        for k in 0..cols - 1 {
            segs.push((junction(i, k), junction(i + 1, k)));
        }
    }
    DeviceGraph::new(kinds, segs, Some(ends))
}

/// Everything the compiler and simulator need to know about the target.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareConfig {
    pub graph: DeviceGraph,
    pub gate: GateImpl,
    pub reorder: ReorderMethod,
    pub physics: PhysicsParams,
}

impl HardwareConfig {
    pub fn new(graph: DeviceGraph, gate: GateImpl, reorder: ReorderMethod) -> Self {
        Self {
            graph,
            gate,
            reorder,
            physics: PhysicsParams::default(),
        }
    }

    pub fn with_physics(mut self, physics: PhysicsParams) -> Self {
        self.physics = physics;
        self
    }
}
