//! Hop spheres around a node, the two subgraphs they span, and sphere overlaps.
//!
//! The spherical subgraph keeps one shortest path from every member to the
//! center (the BFS tree); the induced sphere keeps every edge among members.

use fixedbitset::FixedBitSet;

use crate::graph::{induced_subgraph, Graph, NodeId, SubgraphView};
use crate::search::{bfs_hops, HopDistances, SearchError};

/// Closed hop sphere `{ v : d(center, v) <= radius }`.
#[derive(Debug, Clone)]
pub struct SphereSet {
    pub center: NodeId,
    pub radius: u32,
    /// Sorted member ids.
    pub members: Vec<NodeId>,
    /// Hop distance of `members[i]` from the center.
    pub dist: Vec<u32>,
    /// Membership keyed by parent-graph node id.
    pub bitmap: FixedBitSet,
}

impl SphereSet {
    /// Restricts a BFS (capped at `radius` or larger) to the sphere of `radius`.
    pub fn from_hops(g: &Graph, hops: &HopDistances, radius: u32) -> SphereSet {
        debug_assert!(hops.cap().is_none_or(|c| c >= radius));
        let mut members: Vec<NodeId> = hops
            .reached()
            .iter()
            .copied()
            .filter(|&v| hops.dist_slice()[v as usize] <= radius)
            .collect();
        members.sort_unstable();
        let dist = members
            .iter()
            .map(|&v| hops.dist_slice()[v as usize])
            .collect();
        let mut bitmap = FixedBitSet::with_capacity(g.node_count());
        for &v in &members {
            bitmap.insert(v as usize);
        }
        SphereSet {
            center: hops.source(),
            radius,
            members,
            dist,
            bitmap,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.bitmap.contains(v as usize)
    }

    pub fn dist_of(&self, v: NodeId) -> Option<u32> {
        self.members.binary_search(&v).ok().map(|i| self.dist[i])
    }
}

pub fn sphere(g: &Graph, v: NodeId, r: u32) -> Result<SphereSet, SearchError> {
    let hops = bfs_hops(g, v, Some(r))?;
    Ok(SphereSet::from_hops(g, &hops, r))
}

/// Sphere nodes plus the BFS-tree edge of every non-center member.
pub fn spherical_subgraph(g: &Graph, v: NodeId, r: u32) -> Result<SubgraphView, SearchError> {
    let hops = bfs_hops(g, v, Some(r))?;
    let mut members = hops.reached().to_vec();
    members.sort_unstable();
    let local = |p: NodeId| members.binary_search(&p).expect("member") as NodeId;
    let edges: Vec<(NodeId, NodeId, f64)> = hops
        .reached()
        .iter()
        .filter_map(|&x| {
            let p = hops.parent(x)?;
            let w = g.edge_weight(p, x).expect("BFS parent edge exists");
            Some((local(p), local(x), w))
        })
        .collect();
    let (tree, _) = Graph::from_edges(members.len(), edges).expect("tree edges are valid");
    Ok(SubgraphView::from_parts(tree, members))
}

/// Subgraph induced by the sphere of radius `r` around `v`.
pub fn induced_sphere(g: &Graph, v: NodeId, r: u32) -> Result<SubgraphView, SearchError> {
    let s = sphere(g, v, r)?;
    Ok(induced_subgraph(g, &s.members)?)
}

/// `sphere(s, rs) ∩ sphere(t, rt)` as a sorted id list.
pub fn overlap(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    rs: u32,
    rt: u32,
) -> Result<Vec<NodeId>, SearchError> {
    let hs = bfs_hops(g, s, Some(rs))?;
    let ht = bfs_hops(g, t, Some(rt))?;
    Ok(intersect_reached(&hs, &ht, rs, rt))
}

/// Nodes within `rs` of the first search's source and `rt` of the second's.
/// Scans the smaller reached set against the other's distance table.
pub(crate) fn intersect_reached(
    hs: &HopDistances,
    ht: &HopDistances,
    rs: u32,
    rt: u32,
) -> Vec<NodeId> {
    let (small, small_r, large, large_r) = if hs.reached().len() <= ht.reached().len() {
        (hs, rs, ht, rt)
    } else {
        (ht, rt, hs, rs)
    };
    let mut out: Vec<NodeId> = small
        .reached()
        .iter()
        .copied()
        .filter(|&v| {
            small.dist_slice()[v as usize] <= small_r && large.dist_slice()[v as usize] <= large_r
        })
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        path_graph, star_chords_graph, two_anchor_graph, StarChords, TwoAnchor,
    };

    fn edge_pairs(view: &SubgraphView) -> Vec<(NodeId, NodeId)> {
        let mut e: Vec<_> = view.parent_edges().map(|(u, v, _)| (u, v)).collect();
        e.sort_unstable();
        e
    }

    fn pair(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
        (a.min(b), a.max(b))
    }

    #[test]
    fn two_anchor_sphere_around_s() {
        let g = two_anchor_graph();
        let s = sphere(&g, TwoAnchor::S, 2).unwrap();
        let mut expected = vec![
            TwoAnchor::S,
            TwoAnchor::U2,
            TwoAnchor::U3,
            TwoAnchor::A,
            TwoAnchor::A_PRIME,
        ];
        expected.sort_unstable();
        assert_eq!(s.members, expected);
        assert_eq!(s.dist_of(TwoAnchor::A), Some(2));
        assert!(s.contains(TwoAnchor::A_PRIME));
        assert!(!s.contains(TwoAnchor::U5));
    }

    #[test]
    fn radius_extremes() {
        let g = path_graph(5);
        assert_eq!(sphere(&g, 3, 0).unwrap().members, vec![3]);
        assert_eq!(sphere(&g, 2, 10).unwrap().members, vec![0, 1, 2, 3, 4]);
        let whole = induced_sphere(&g, 2, 10).unwrap();
        assert_eq!(whole.graph(), &g);
    }

    #[test]
    fn star_with_chords_spherical_vs_induced() {
        use StarChords as F;
        let g = star_chords_graph();
        let sp = spherical_subgraph(&g, F::CENTER, 1).unwrap();
        assert_eq!(
            edge_pairs(&sp),
            vec![
                pair(F::CENTER, F::U1),
                pair(F::CENTER, F::U2),
                pair(F::CENTER, F::U3)
            ]
        );
        let ind = induced_sphere(&g, F::CENTER, 1).unwrap();
        let mut expected = vec![
            pair(F::CENTER, F::U1),
            pair(F::CENTER, F::U2),
            pair(F::CENTER, F::U3),
            pair(F::U1, F::U2),
            pair(F::U3, F::U2),
        ];
        expected.sort_unstable();
        assert_eq!(edge_pairs(&ind), expected);
    }

    #[test]
    fn zero_radius_spherical_subgraph() {
        let g = two_anchor_graph();
        let sp = spherical_subgraph(&g, TwoAnchor::A, 0).unwrap();
        assert_eq!(sp.to_parent(), &[TwoAnchor::A]);
        assert_eq!(sp.edge_count(), 0);
    }

    #[test]
    fn trees_have_one_subgraph() {
        let g = path_graph(9);
        for v in 0..9 {
            for r in 0..5 {
                assert_eq!(
                    spherical_subgraph(&g, v, r).unwrap(),
                    induced_sphere(&g, v, r).unwrap()
                );
            }
        }
    }

    #[test]
    fn two_anchor_induced_sphere_around_t() {
        use TwoAnchor as F;
        let g = two_anchor_graph();
        let ind = induced_sphere(&g, F::T, 2).unwrap();
        let mut nodes = vec![F::T, F::U5, F::U6, F::A, F::A_PRIME];
        nodes.sort_unstable();
        assert_eq!(ind.to_parent(), nodes.as_slice());
        let mut expected = vec![
            pair(F::T, F::U5),
            pair(F::T, F::U6),
            pair(F::U5, F::U6),
            pair(F::A, F::U5),
            pair(F::A_PRIME, F::U5),
        ];
        expected.sort_unstable();
        assert_eq!(edge_pairs(&ind), expected);
    }

    #[test]
    fn two_anchor_overlaps() {
        let g = two_anchor_graph();
        assert_eq!(
            overlap(&g, TwoAnchor::S, TwoAnchor::T, 2, 2).unwrap(),
            vec![TwoAnchor::A, TwoAnchor::A_PRIME]
        );
        // s-sphere of radius 1 is {s, u2, u3}; t-sphere of radius 2 misses all three
        assert!(overlap(&g, TwoAnchor::S, TwoAnchor::T, 1, 2)
            .unwrap()
            .is_empty());
        assert_eq!(
            overlap(&g, TwoAnchor::U5, TwoAnchor::U5, 0, 3).unwrap(),
            vec![TwoAnchor::U5]
        );
    }
}
