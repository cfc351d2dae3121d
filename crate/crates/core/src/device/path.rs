use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{DeviceGraph, NodeId, SegmentId};
use crate::error::DeviceError;
use crate::models::{shuttle_op_time, PhysicsParams, ShuttleOp};

/// One step of a shuttle: traverse `segment` and arrive at `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hop {
    pub segment: SegmentId,
    pub to: NodeId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShuttlePath {
    pub from: NodeId,
    pub hops: Vec<Hop>,
    /// Modeled cost in μs, excluding the source split and final merge.
    pub cost_us: f64,
}

impl ShuttlePath {
    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    pub fn destination(&self) -> NodeId {
        self.hops.last().map_or(self.from, |h| h.to)
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        std::iter::once(self.from)
            .chain(self.hops.iter().map(|h| h.to))
            .collect()
    }

    /// Traps visited strictly between source and destination.
    pub fn intermediate_traps(&self, g: &DeviceGraph) -> Vec<NodeId> {
        let n = self.hops.len();
        self.hops
            .iter()
            .take(n.saturating_sub(1))
            .map(|h| h.to)
            .filter(|&v| g.is_trap(v))
            .collect()
    }
}

/// Pricing of the pieces of a shuttle route.
pub trait TransitCost {
    fn segment(&self, g: &DeviceGraph, segment: SegmentId) -> f64;
    fn junction(&self, g: &DeviceGraph, junction: NodeId) -> f64;
    /// Cost of merging into, reordering across, and splitting out of an
    /// intermediate trap; `None` if the trap cannot be passed through.
    fn through_trap(&self, g: &DeviceGraph, trap: NodeId, entry: SegmentId, exit: SegmentId)
        -> Option<f64>;
    /// Extra cost of leaving the source trap over `exit`.
    fn depart(&self, _g: &DeviceGraph, _trap: NodeId, _exit: SegmentId) -> f64 {
        0.0
    }
}

/// Chain-state-free pricing from shuttle operation times. Pass-through
/// traps cost a merge plus a split; reordering is not priced because it
/// depends on the chain occupying the trap.
struct NominalCost<'a>(&'a PhysicsParams);

impl TransitCost for NominalCost<'_> {
    fn segment(&self, _: &DeviceGraph, _: SegmentId) -> f64 {
        shuttle_op_time(ShuttleOp::Move(1), self.0)
    }

    fn junction(&self, g: &DeviceGraph, j: NodeId) -> f64 {
        shuttle_op_time(ShuttleOp::cross(g.degree(j)), self.0)
    }

    fn through_trap(&self, _: &DeviceGraph, _: NodeId, _: SegmentId, _: SegmentId) -> Option<f64> {
        Some(shuttle_op_time(ShuttleOp::Merge, self.0) + shuttle_op_time(ShuttleOp::Split, self.0))
    }
}

pub fn shortest_shuttle_path(
    g: &DeviceGraph,
    from: NodeId,
    to: NodeId,
    physics: &PhysicsParams,
) -> Result<ShuttlePath, DeviceError> {
    shortest_path_with(g, from, to, &NominalCost(physics))
}

/// Costs are compared after quantizing to 1e-6 μs so that equal-cost
/// routes summed in different orders tie exactly.
fn quantize(cost: f64) -> i64 {
    (cost * 1e6).round() as i64
}

struct Entry {
    key: i64,
    cost: f64,
    nodes: Vec<usize>,
    hops: Vec<Hop>,
    state: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    // Reversed: BinaryHeap pops the cheapest, then lexicographically
    // smallest node sequence.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .cmp(&self.key)
            .then_with(|| other.nodes.cmp(&self.nodes))
    }
}

/// Minimum-cost trap-to-trap route under `cost`. Ties go to the route
/// whose node sequence is lexicographically smallest, i.e. the smallest
/// next-node id at the first point of divergence.
pub fn shortest_path_with<C: TransitCost + ?Sized>(
    g: &DeviceGraph,
    from: NodeId,
    to: NodeId,
    cost: &C,
) -> Result<ShuttlePath, DeviceError> {
    for node in [from, to] {
        if node.0 >= g.node_count() || !g.is_trap(node) {
            return Err(DeviceError::NotATrap { node: node.0 });
        }
    }
    if from == to {
        return Ok(ShuttlePath {
            from,
            hops: Vec::new(),
            cost_us: 0.0,
        });
    }
    // State = arrival at a node via a directed segment; the start state
    // has no incoming segment.
    let n_seg = g.segments().len();
    let start = 2 * n_seg;
    let state_of = |seg: SegmentId, at: NodeId| 2 * seg.0 + usize::from(g.segment(seg).ends.1 == at);
    let mut settled = vec![false; start + 1];
    let mut heap = BinaryHeap::new();
    heap.push(Entry {
        key: 0,
        cost: 0.0,
        nodes: vec![from.0],
        hops: Vec::new(),
        state: start,
    });

    while let Some(e) = heap.pop() {
        if settled[e.state] {
            continue;
        }
        settled[e.state] = true;
        let (at, incoming) = match e.hops.last() {
            Some(h) => (h.to, Some(h.segment)),
            None => (from, None),
        };
        if at == to {
            return Ok(ShuttlePath {
                from,
                hops: e.hops,
                cost_us: e.cost,
            });
        }
        for &(seg, next) in g.neighbors(at) {
            if Some(seg) == incoming {
                continue;
            }
            let mut step = cost.segment(g, seg);
            match incoming {
                Some(entry) if g.is_trap(at) => match cost.through_trap(g, at, entry, seg) {
                    Some(c) => step += c,
                    None => continue,
                },
                Some(_) => {}
                None => step += cost.depart(g, at, seg),
            }
            if g.is_junction(next) {
                step += cost.junction(g, next);
            }
            let state = state_of(seg, next);
            if settled[state] {
                continue;
            }
            let total = e.cost + step;
            let mut nodes = e.nodes.clone();
            nodes.push(next.0);
            let mut hops = e.hops.clone();
            hops.push(Hop { segment: seg, to: next });
            heap.push(Entry {
                key: quantize(total),
                cost: total,
                nodes,
                hops,
                state,
            });
        }
    }
    Err(DeviceError::NoPath {
        from: from.0,
        to: to.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{make_grid, make_linear, NodeKind};

    fn p() -> PhysicsParams {
        PhysicsParams::default()
    }

    #[test]
    fn linear_passes_intermediate_trap() {
        let g = make_linear(6, 10).unwrap();
        let path = shortest_shuttle_path(&g, NodeId(0), NodeId(2), &p()).unwrap();
        assert_eq!(path.nodes(), vec![NodeId(0), NodeId(1), NodeId(2)]);
        assert_eq!(path.intermediate_traps(&g), vec![NodeId(1)]);
        assert_eq!(path.cost_us, 5.0 + 80.0 + 80.0 + 5.0);
    }

    #[test]
    fn grid_column_move_uses_junctions_only() {
        let g = make_grid(2, 2, 10).unwrap();
        // T(0,0)=0, T(1,0)=2, J(0,0)=4, J(1,0)=5
        let path = shortest_shuttle_path(&g, NodeId(0), NodeId(2), &p()).unwrap();
        assert_eq!(path.nodes(), vec![NodeId(0), NodeId(4), NodeId(5), NodeId(2)]);
        assert!(path.intermediate_traps(&g).is_empty());
        assert_eq!(path.cost_us, 3.0 * 5.0 + 2.0 * 100.0);
    }

    #[test]
    fn same_trap_is_empty() {
        let g = make_linear(3, 10).unwrap();
        let path = shortest_shuttle_path(&g, NodeId(0), NodeId(0), &p()).unwrap();
        assert!(path.is_empty());
        assert_eq!(path.cost_us, 0.0);
    }

    #[test]
    fn endpoints_must_be_traps() {
        let g = make_grid(2, 2, 10).unwrap();
        assert_eq!(
            shortest_shuttle_path(&g, NodeId(0), NodeId(4), &p()),
            Err(DeviceError::NotATrap { node: 4 })
        );
    }

    #[test]
    fn tie_break_prefers_smaller_next_node() {
        // Two equal-cost routes T0 -> T3, via T1 or via T2.
        let t = NodeKind::Trap { capacity: 4 };
        let g = DeviceGraph::new(
            vec![t, t, t, t],
            vec![
                (NodeId(0), NodeId(2)),
                (NodeId(0), NodeId(1)),
                (NodeId(2), NodeId(3)),
                (NodeId(1), NodeId(3)),
            ],
            None,
        )
        .unwrap();
        let path = shortest_shuttle_path(&g, NodeId(0), NodeId(3), &p()).unwrap();
        assert_eq!(path.nodes(), vec![NodeId(0), NodeId(1), NodeId(3)]);
    }

    struct Blocked(NodeId);
    impl TransitCost for Blocked {
        fn segment(&self, _: &DeviceGraph, _: SegmentId) -> f64 {
            1.0
        }
        fn junction(&self, _: &DeviceGraph, _: NodeId) -> f64 {
            1.0
        }
        fn through_trap(&self, _: &DeviceGraph, t: NodeId, _: SegmentId, _: SegmentId) -> Option<f64> {
            (t != self.0).then_some(1.0)
        }
    }

    #[test]
    fn impassable_trap_disconnects_linear() {
        let g = make_linear(3, 10).unwrap();
        assert_eq!(
            shortest_path_with(&g, NodeId(0), NodeId(2), &Blocked(NodeId(1))),
            Err(DeviceError::NoPath { from: 0, to: 2 })
        );
        assert!(shortest_path_with(&g, NodeId(0), NodeId(1), &Blocked(NodeId(1))).is_ok());
    }
}
