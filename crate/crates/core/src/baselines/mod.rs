//! Comparison methods: plain Dijkstra on the whole graph, and two
//! partition-then-route baselines that restrict the search to a corridor of
//! precomputed groups (balanced cells or Louvain communities).

mod cells;
mod louvain;

pub use cells::{grow_cells, CellPartition};
pub use louvain::{louvain, modularity, LouvainResult};

use thiserror::Error;

use crate::graph::{induced_subgraph, Graph, NodeId};
use crate::search::{dijkstra, Path, SearchError};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("cell count {k} must lie in 2..={node_count}")]
    CellCount { k: usize, node_count: usize },
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Exact reference: Dijkstra on the full graph.
pub fn dijkstra_full(g: &Graph, s: NodeId, t: NodeId) -> Result<Path, SearchError> {
    dijkstra(g, s, t)
}

#[derive(Debug, Clone)]
pub struct BaselineRoute {
    pub path: Path,
    /// Group ids along the coarse path, source group first.
    pub coarse_path: Vec<u32>,
    pub corridor_nodes: usize,
    /// The corridor had to be widened by one ring of neighboring groups.
    pub widened: bool,
    /// No corridor path existed and the full graph was searched.
    pub fallback: bool,
}

/// Quotient graph over groups plus the sorted members of each group.
pub(crate) fn build_quotient(
    g: &Graph,
    group_of: &[u32],
    groups: usize,
) -> (Graph, Vec<Vec<NodeId>>) {
    let mut members = vec![Vec::new(); groups];
    for (v, &c) in group_of.iter().enumerate() {
        members[c as usize].push(v as NodeId);
    }
    let crossing = g.edges().filter_map(|(u, v, w)| {
        let (cu, cv) = (group_of[u as usize], group_of[v as usize]);
        (cu != cv).then_some((cu, cv, w))
    });
    let (quotient, _) = Graph::from_edges(groups, crossing).expect("quotient edges are valid");
    (quotient, members)
}

fn corridor_path(
    g: &Graph,
    members: &[Vec<NodeId>],
    groups: &[bool],
    s: NodeId,
    t: NodeId,
) -> (Option<Path>, usize) {
    let nodes: Vec<NodeId> = groups
        .iter()
        .enumerate()
        .filter(|(_, &on)| on)
        .flat_map(|(c, _)| members[c].iter().copied())
        .collect();
    let view = induced_subgraph(g, &nodes).expect("group members are valid nodes");
    let (ls, lt) = (
        view.local_of(s).expect("s in corridor"),
        view.local_of(t).expect("t in corridor"),
    );
    let path = dijkstra(view.graph(), ls, lt).ok().map(|p| Path {
        nodes: p.nodes.iter().map(|&v| view.parent_of(v)).collect(),
        cost: p.cost,
    });
    (path, view.node_count())
}

/// Routes `s` to `t` through the groups on a shortest quotient path.
///
/// The quotient path picks the groups; Dijkstra then runs on the subgraph
/// they induce. If that corridor is disconnected between the terminals, it is
/// widened once by all quotient neighbors, and after that the whole graph is
/// searched.
pub fn quotient_route(
    g: &Graph,
    group_of: &[u32],
    quotient: &Graph,
    members: &[Vec<NodeId>],
    s: NodeId,
    t: NodeId,
) -> Result<BaselineRoute, BaselineError> {
    g.check_node(s).map_err(SearchError::from)?;
    g.check_node(t).map_err(SearchError::from)?;
    let (cs, ct) = (group_of[s as usize], group_of[t as usize]);
    let coarse = match dijkstra(quotient, cs, ct) {
        Ok(p) => p.nodes,
        Err(SearchError::Disconnected { .. }) => {
            return Err(SearchError::Disconnected { from: s, to: t }.into());
        }
        Err(e) => return Err(e.into()),
    };
    let mut on = vec![false; quotient.node_count()];
    for &c in &coarse {
        on[c as usize] = true;
    }
    let (path, size) = corridor_path(g, members, &on, s, t);
    if let Some(path) = path {
        return Ok(BaselineRoute {
            path,
            coarse_path: coarse,
            corridor_nodes: size,
            widened: false,
            fallback: false,
        });
    }
    for &c in &coarse {
        for &d in quotient.neighbor_ids(c) {
            on[d as usize] = true;
        }
    }
    let (path, size) = corridor_path(g, members, &on, s, t);
    if let Some(path) = path {
        return Ok(BaselineRoute {
            path,
            coarse_path: coarse,
            corridor_nodes: size,
            widened: true,
            fallback: false,
        });
    }
    Ok(BaselineRoute {
        path: dijkstra(g, s, t)?,
        coarse_path: coarse,
        corridor_nodes: g.node_count(),
        widened: true,
        fallback: true,
    })
}

/// Corridor routing over a balanced cell partition.
pub fn corridor_route(
    g: &Graph,
    cells: &CellPartition,
    s: NodeId,
    t: NodeId,
) -> Result<BaselineRoute, BaselineError> {
    quotient_route(g, &cells.cell_of, &cells.quotient, &cells.members, s, t)
}

/// Corridor routing over Louvain communities.
pub fn louvain_route(
    g: &Graph,
    comms: &LouvainResult,
    s: NodeId,
    t: NodeId,
) -> Result<BaselineRoute, BaselineError> {
    quotient_route(
        g,
        &comms.community_of,
        &comms.quotient,
        &comms.members,
        s,
        t,
    )
}
