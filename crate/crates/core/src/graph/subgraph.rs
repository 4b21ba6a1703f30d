use super::{Graph, GraphError, NodeId};

/// An induced (or otherwise derived) subgraph together with its mapping back
/// to the parent graph.
///
/// `to_parent` is strictly increasing, so the reverse lookup is a binary
/// search and needs no extra storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgraphView {
    graph: Graph,
    to_parent: Vec<NodeId>,
}

impl SubgraphView {
    pub(crate) fn from_parts(graph: Graph, to_parent: Vec<NodeId>) -> SubgraphView {
        debug_assert_eq!(graph.node_count(), to_parent.len());
        debug_assert!(to_parent.windows(2).all(|w| w[0] < w[1]));
        SubgraphView { graph, to_parent }
    }

    /// The whole graph seen as a subgraph of itself.
    pub fn identity(g: &Graph) -> SubgraphView {
        SubgraphView {
            graph: g.clone(),
            to_parent: (0..g.node_count() as NodeId).collect(),
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn to_parent(&self) -> &[NodeId] {
        &self.to_parent
    }

    pub fn parent_of(&self, local: NodeId) -> NodeId {
        self.to_parent[local as usize]
    }

    pub fn local_of(&self, parent: NodeId) -> Option<NodeId> {
        self.to_parent
            .binary_search(&parent)
            .ok()
            .map(|i| i as NodeId)
    }

    pub fn contains_parent(&self, parent: NodeId) -> bool {
        self.local_of(parent).is_some()
    }

    /// Induces a subgraph of this view from local ids; the result maps
    /// straight to this view's parent.
    pub fn induced(&self, local_nodes: &[NodeId]) -> Result<SubgraphView, GraphError> {
        let inner = induced_subgraph(&self.graph, local_nodes)?;
        let to_parent = inner
            .to_parent
            .iter()
            .map(|&l| self.to_parent[l as usize])
            .collect();
        Ok(SubgraphView {
            graph: inner.graph,
            to_parent,
        })
    }

    /// Edges in parent ids, `(u, v, w)` with `u < v`.
    pub fn parent_edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.graph.edges().map(|(u, v, w)| {
            let (a, b) = (self.parent_of(u), self.parent_of(v));
            (a.min(b), a.max(b), w)
        })
    }
}

/// Subgraph of `g` on `nodes` containing every edge of `g` with both
/// endpoints in the set. Duplicates in `nodes` are ignored.
pub fn induced_subgraph(g: &Graph, nodes: &[NodeId]) -> Result<SubgraphView, GraphError> {
    if nodes.is_empty() {
        return Err(GraphError::EmptyNodeSet);
    }
    let mut members = nodes.to_vec();
    members.sort_unstable();
    members.dedup();
    for &v in &members {
        g.check_node(v)?;
    }

    let mut offsets = Vec::with_capacity(members.len() + 1);
    offsets.push(0usize);
    let mut targets = Vec::new();
    let mut weights = Vec::new();
    for &p in &members {
        // parent neighbor lists are sorted and the mapping is monotone, so
        // local neighbor lists come out sorted too
        for (v, w) in g.neighbors(p) {
            if let Ok(local) = members.binary_search(&v) {
                targets.push(local as NodeId);
                weights.push(w);
            }
        }
        offsets.push(targets.len());
    }
    Ok(SubgraphView {
        graph: Graph {
            offsets,
            targets,
            weights,
        },
        to_parent: members,
    })
}
