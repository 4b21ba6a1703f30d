//! Hop-distance BFS and weighted Dijkstra.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId};

/// Marker for nodes a BFS did not reach.
pub const UNREACHED: u32 = u32::MAX;
const NO_PARENT: NodeId = NodeId::MAX;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error(transparent)]
    InvalidNode(#[from] GraphError),
    #[error("node {to} is not reachable from node {from}")]
    Disconnected { from: NodeId, to: NodeId },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("empty path")]
    Empty,
    #[error("path runs {found:?}, expected {expected:?}")]
    WrongTerminals {
        expected: (NodeId, NodeId),
        found: (NodeId, NodeId),
    },
    #[error("step {index}: {u}-{v} is not an edge")]
    MissingEdge { index: usize, u: NodeId, v: NodeId },
    #[error("stated cost {stated} differs from edge sum {actual}")]
    CostMismatch { stated: f64, actual: f64 },
}

/// Relative tolerance for comparing a path's stated cost with its edge sum.
pub const COST_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub cost: f64,
}

impl Path {
    pub fn trivial(v: NodeId) -> Path {
        Path {
            nodes: vec![v],
            cost: 0.0,
        }
    }

    pub fn source(&self) -> Option<NodeId> {
        self.nodes.first().copied()
    }

    pub fn target(&self) -> Option<NodeId> {
        self.nodes.last().copied()
    }

    /// Sum of edge weights along the node sequence, or the first missing edge.
    pub fn edge_sum(g: &Graph, nodes: &[NodeId]) -> Result<f64, PathError> {
        let mut total = 0.0;
        for (index, pair) in nodes.windows(2).enumerate() {
            let (u, v) = (pair[0], pair[1]);
            total += g
                .edge_weight(u, v)
                .ok_or(PathError::MissingEdge { index, u, v })?;
        }
        Ok(total)
    }

    /// Checks terminals, that every step is an edge of `g`, and that the
    /// stated cost matches the edge sum.
    pub fn validate(&self, g: &Graph, from: NodeId, to: NodeId) -> Result<(), PathError> {
        let (Some(first), Some(last)) = (self.source(), self.target()) else {
            return Err(PathError::Empty);
        };
        if (first, last) != (from, to) {
            return Err(PathError::WrongTerminals {
                expected: (from, to),
                found: (first, last),
            });
        }
        let actual = Path::edge_sum(g, &self.nodes)?;
        if !costs_match(self.cost, actual) {
            return Err(PathError::CostMismatch {
                stated: self.cost,
                actual,
            });
        }
        Ok(())
    }
}

pub(crate) fn costs_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= COST_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Result of a (possibly capped) breadth-first search.
#[derive(Debug, Clone)]
pub struct HopDistances {
    source: NodeId,
    cap: Option<u32>,
    dist: Vec<u32>,
    parent: Vec<NodeId>,
    order: Vec<NodeId>,
}

impl HopDistances {
    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn cap(&self) -> Option<u32> {
        self.cap
    }

    pub fn dist(&self, v: NodeId) -> Option<u32> {
        match self.dist[v as usize] {
            UNREACHED => None,
            d => Some(d),
        }
    }

    /// Raw distance array indexed by node id; unreached entries are [`UNREACHED`].
    pub fn dist_slice(&self) -> &[u32] {
        &self.dist
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        match self.parent[v as usize] {
            NO_PARENT => None,
            p => Some(p),
        }
    }

    /// Reached nodes in BFS discovery order (nondecreasing distance).
    pub fn reached(&self) -> &[NodeId] {
        &self.order
    }

    pub fn is_reached(&self, v: NodeId) -> bool {
        self.dist[v as usize] != UNREACHED
    }
}

/// Breadth-first hop distances from `v`, optionally stopping at radius `cap`.
///
/// Parents are the first discoverer in queue order, scanning neighbors in
/// ascending id order, so the BFS tree is deterministic.
pub fn bfs_hops(g: &Graph, v: NodeId, cap: Option<u32>) -> Result<HopDistances, SearchError> {
    g.check_node(v)?;
    let n = g.node_count();
    let mut dist = vec![UNREACHED; n];
    let mut parent = vec![NO_PARENT; n];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    dist[v as usize] = 0;
    order.push(v);
    queue.push_back(v);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        if cap.is_some_and(|c| du >= c) {
            continue;
        }
        for &x in g.neighbor_ids(u) {
            if dist[x as usize] == UNREACHED {
                dist[x as usize] = du + 1;
                parent[x as usize] = u;
                order.push(x);
                queue.push_back(x);
            }
        }
    }
    Ok(HopDistances {
        source: v,
        cap,
        dist,
        parent,
        order,
    })
}

/// Exact hop distance by alternating bidirectional BFS, always expanding the
/// smaller frontier by one full level.
pub fn hop_distance(g: &Graph, s: NodeId, t: NodeId) -> Result<u32, SearchError> {
    g.check_node(s)?;
    g.check_node(t)?;
    if s == t {
        return Ok(0);
    }
    let n = g.node_count();
    let mut dist_s = vec![UNREACHED; n];
    let mut dist_t = vec![UNREACHED; n];
    dist_s[s as usize] = 0;
    dist_t[t as usize] = 0;
    let mut front_s = vec![s];
    let mut front_t = vec![t];
    let mut next = Vec::new();
    loop {
        if front_s.is_empty() || front_t.is_empty() {
            return Err(SearchError::Disconnected { from: s, to: t });
        }
        let (front, this, other) = if front_s.len() <= front_t.len() {
            (&mut front_s, &mut dist_s, &dist_t)
        } else {
            (&mut front_t, &mut dist_t, &dist_s)
        };
        let mut best = u32::MAX;
        next.clear();
        for &u in front.iter() {
            let du = this[u as usize];
            for &x in g.neighbor_ids(u) {
                let dx = other[x as usize];
                if dx != UNREACHED {
                    best = best.min(du + 1 + dx);
                }
                if this[x as usize] == UNREACHED {
                    this[x as usize] = du + 1;
                    next.push(x);
                }
            }
        }
        if best != u32::MAX {
            return Ok(best);
        }
        std::mem::swap(front, &mut next);
    }
}

#[derive(Debug, Clone, Copy)]
struct HeapEntry {
    cost: f64,
    node: NodeId,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    // BinaryHeap is a max-heap: smaller cost, then smaller id, pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Minimum-cost `u -> w` path. Binary heap with lazy deletion; priority ties
/// pop the smaller node id first and relaxations require strict improvement,
/// so the returned path is deterministic.
pub fn dijkstra(g: &Graph, u: NodeId, w: NodeId) -> Result<Path, SearchError> {
    g.check_node(u)?;
    g.check_node(w)?;
    if u == w {
        return Ok(Path::trivial(u));
    }
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![NO_PARENT; n];
    let mut heap = BinaryHeap::new();
    dist[u as usize] = 0.0;
    heap.push(HeapEntry { cost: 0.0, node: u });
    while let Some(HeapEntry { cost, node }) = heap.pop() {
        if cost > dist[node as usize] {
            continue;
        }
        if node == w {
            break;
        }
        for (x, wt) in g.neighbors(node) {
            let nd = cost + wt;
            if nd < dist[x as usize] {
                dist[x as usize] = nd;
                parent[x as usize] = node;
                heap.push(HeapEntry { cost: nd, node: x });
            }
        }
    }
    if dist[w as usize].is_infinite() {
        return Err(SearchError::Disconnected { from: u, to: w });
    }
    let mut nodes = vec![w];
    let mut cur = w;
    while cur != u {
        cur = parent[cur as usize];
        nodes.push(cur);
    }
    nodes.reverse();
    Ok(Path {
        nodes,
        cost: dist[w as usize],
    })
}
