//! Immutable undirected weighted graphs in compressed adjacency form.
//!
//! Node ids are dense and 0-based. Every undirected edge is stored twice
//! (once per endpoint) and each neighbor list is sorted by neighbor id, so
//! edge lookups are a binary search.

mod cache;
mod dimacs;
mod subgraph;

pub use cache::{content_hash, load_cached, read_cache, write_cache, CACHE_MAGIC, CACHE_VERSION};
pub use dimacs::{parse_dimacs_gr, read_dimacs_file, write_dimacs_gr, DimacsGraph};
pub use subgraph::{induced_subgraph, SubgraphView};

use std::collections::VecDeque;

use thiserror::Error;

/// Dense 0-based node identifier.
pub type NodeId = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("node id {id} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { id: u64, node_count: usize },
    #[error("edge {u}-{v} has non-positive or non-finite weight {weight}")]
    BadWeight { u: NodeId, v: NodeId, weight: f64 },
    #[error("empty node set")]
    EmptyNodeSet,
    #[error("too many nodes for 32-bit ids: {0}")]
    TooLarge(usize),
}

/// Counters collected while collapsing raw edges into a [`Graph`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    /// Pairs listed more than once with different weights (minimum kept).
    pub conflicting_duplicates: usize,
    /// Pairs listed more than once with identical weights.
    pub duplicates: usize,
    /// Self-loops dropped.
    pub self_loops: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<f64>,
}

impl Graph {
    /// Builds a graph from undirected edges.
    ///
    /// Repeated pairs keep the minimum weight; self-loops are dropped. Both
    /// are counted in the returned report.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<(Graph, BuildReport), GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        if node_count == 0 {
            return Err(GraphError::Empty);
        }
        if node_count > NodeId::MAX as usize {
            return Err(GraphError::TooLarge(node_count));
        }
        let mut report = BuildReport::default();
        let mut arcs: Vec<(NodeId, NodeId, f64)> = Vec::new();
        for (u, v, w) in edges {
            for id in [u, v] {
                if id as usize >= node_count {
                    return Err(GraphError::NodeOutOfRange {
                        id: id as u64,
                        node_count,
                    });
                }
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(GraphError::BadWeight { u, v, weight: w });
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            arcs.push((u, v, w));
            arcs.push((v, u, w));
        }
        arcs.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));

        let mut offsets = vec![0usize; node_count + 1];
        let mut targets = Vec::with_capacity(arcs.len());
        let mut weights = Vec::with_capacity(arcs.len());
        let mut i = 0;
        while i < arcs.len() {
            let (u, v, w) = arcs[i];
            let mut j = i + 1;
            while j < arcs.len() && arcs[j].0 == u && arcs[j].1 == v {
                // each duplicate appears once per direction; count on the u < v side
                if u < v {
                    if arcs[j].2 == w {
                        report.duplicates += 1;
                    } else {
                        report.conflicting_duplicates += 1;
                    }
                }
                j += 1;
            }
            targets.push(v);
            weights.push(w);
            offsets[u as usize + 1] += 1;
            i = j;
        }
        for k in 0..node_count {
            offsets[k + 1] += offsets[k];
        }
        Ok((
            Graph {
                offsets,
                targets,
                weights,
            },
            report,
        ))
    }

    /// Convenience constructor for tests and generators; panics on invalid input.
    pub fn from_edge_list(node_count: usize, edges: &[(NodeId, NodeId, f64)]) -> Graph {
        Graph::from_edges(node_count, edges.iter().copied())
            .expect("valid edge list")
            .0
    }

    /// Assembles a graph from raw CSR arrays, checking every invariant.
    pub(crate) fn from_csr(
        offsets: Vec<usize>,
        targets: Vec<NodeId>,
        weights: Vec<f64>,
    ) -> Result<Graph, String> {
        if offsets.len() < 2 || offsets[0] != 0 {
            return Err("bad offsets".into());
        }
        if *offsets.last().unwrap() != targets.len() || targets.len() != weights.len() {
            return Err("array lengths disagree".into());
        }
        let g = Graph {
            offsets,
            targets,
            weights,
        };
        let n = g.node_count();
        for u in 0..n {
            if g.offsets[u] > g.offsets[u + 1] {
                return Err("offsets not monotone".into());
            }
            let mut prev: Option<NodeId> = None;
            for (v, w) in g.neighbors(u as NodeId) {
                if v as usize >= n || v as usize == u || prev.is_some_and(|p| p >= v) {
                    return Err(format!("bad adjacency at node {u}"));
                }
                if !(w > 0.0 && w.is_finite()) || g.edge_weight(v, u as NodeId) != Some(w) {
                    return Err(format!("asymmetric or bad weight on {u}-{v}"));
                }
                prev = Some(v);
            }
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn contains(&self, v: NodeId) -> bool {
        (v as usize) < self.node_count()
    }

    pub fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange {
                id: v as u64,
                node_count: self.node_count(),
            })
        }
    }

    /// Neighbors of `v` with edge weights, in ascending neighbor order.
    pub fn neighbors(&self, v: NodeId) -> impl ExactSizeIterator<Item = (NodeId, f64)> + '_ {
        let range = self.offsets[v as usize]..self.offsets[v as usize + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn neighbor_ids(&self, v: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        if !self.contains(u) {
            return None;
        }
        let lo = self.offsets[u as usize];
        let hi = self.offsets[u as usize + 1];
        self.targets[lo..hi]
            .binary_search(&v)
            .ok()
            .map(|i| self.weights[lo + i])
    }

    /// Undirected edges as `(u, v, w)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    pub(crate) fn raw_parts(&self) -> (&[usize], &[NodeId], &[f64]) {
        (&self.offsets, &self.targets, &self.weights)
    }
}

/// Component label per node; labels are assigned in order of the smallest
/// node id in each component.
pub fn connected_components(g: &Graph) -> Vec<u32> {
    const UNSET: u32 = u32::MAX;
    let n = g.node_count();
    let mut label = vec![UNSET; n];
    let mut queue = VecDeque::new();
    let mut next = 0u32;
    for start in 0..n {
        if label[start] != UNSET {
            continue;
        }
        label[start] = next;
        queue.push_back(start as NodeId);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbor_ids(u) {
                if label[v as usize] == UNSET {
                    label[v as usize] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    label
}

pub fn is_connected(g: &Graph) -> bool {
    connected_components(g).iter().all(|&c| c == 0)
}

/// Induced subgraph on the largest connected component (lowest label wins ties).
pub fn largest_component(g: &Graph) -> SubgraphView {
    let labels = connected_components(g);
    let count = labels.iter().max().map_or(0, |&m| m as usize + 1);
    let mut sizes = vec![0usize; count];
    for &c in &labels {
        sizes[c as usize] += 1;
    }
    let best = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map_or(0, |(i, _)| i as u32);
    let nodes: Vec<NodeId> = (0..g.node_count() as NodeId)
        .filter(|&v| labels[v as usize] == best)
        .collect();
    induced_subgraph(g, &nodes).expect("component is nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::path_graph;

    #[test]
    fn duplicate_pairs_keep_minimum() {
        let (g, report) =
            Graph::from_edges(3, [(0, 1, 5.0), (1, 0, 3.0), (1, 2, 2.0), (2, 1, 2.0)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge_weight(0, 1), Some(3.0));
        assert_eq!(g.edge_weight(1, 0), Some(3.0));
        assert_eq!(report.conflicting_duplicates, 1);
        assert_eq!(report.duplicates, 1);
    }

    #[test]
    fn self_loops_are_dropped() {
        let (g, report) = Graph::from_edges(2, [(0, 0, 1.0), (0, 1, 1.0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(report.self_loops, 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Graph::from_edges(0, []).unwrap_err(), GraphError::Empty);
        assert!(matches!(
            Graph::from_edges(2, [(0, 2, 1.0)]),
            Err(GraphError::NodeOutOfRange { id: 2, .. })
        ));
        assert!(matches!(
            Graph::from_edges(2, [(0, 1, 0.0)]),
            Err(GraphError::BadWeight { .. })
        ));
        assert!(matches!(
            Graph::from_edges(2, [(0, 1, f64::NAN)]),
            Err(GraphError::BadWeight { .. })
        ));
    }

    #[test]
    fn connectivity() {
        assert!(is_connected(&path_graph(3)));
        let (two, _) = Graph::from_edges(2, []).unwrap();
        assert!(!is_connected(&two));
        let g = Graph::from_edge_list(5, &[(0, 1, 1.0), (2, 3, 1.0), (3, 4, 1.0)]);
        assert_eq!(connected_components(&g), vec![0, 0, 1, 1, 1]);
        let big = largest_component(&g);
        assert_eq!(big.to_parent(), &[2, 3, 4]);
        assert_eq!(big.graph().edge_count(), 2);
    }

    #[test]
    fn csr_validation_catches_asymmetry() {
        let g = path_graph(3);
        let (o, t, w) = g.raw_parts();
        assert!(Graph::from_csr(o.to_vec(), t.to_vec(), w.to_vec()).is_ok());
        let mut w2 = w.to_vec();
        w2[0] = 9.0;
        assert!(Graph::from_csr(o.to_vec(), t.to_vec(), w2).is_err());
    }
}
