use proptest::prelude::*;
use sphere_core::baselines::{
    corridor_route, dijkstra_full, grow_cells, louvain, louvain_route, modularity,
};
use sphere_core::generators::{grid_graph, path_graph, random_connected, two_cliques};
use sphere_core::graph::{induced_subgraph, is_connected};
use sphere_core::{Graph, NodeId};

fn check_quotient(g: &Graph, group_of: &[u32], quotient: &Graph) {
    let mut lightest = std::collections::BTreeMap::new();
    for (u, v, w) in g.edges() {
        let (a, b) = (group_of[u as usize], group_of[v as usize]);
        if a != b {
            let e = lightest
                .entry((a.min(b), a.max(b)))
                .or_insert(f64::INFINITY);
            *e = f64::min(*e, w);
        }
    }
    let got: Vec<_> = quotient.edges().map(|(a, b, w)| ((a, b), w)).collect();
    let want: Vec<_> = lightest.into_iter().collect();
    assert_eq!(got, want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn baseline_routes_are_feasible_and_conservative(seed in any::<u64>(), k in 2usize..20) {
        let g = random_connected(200, 250, 40, seed);
        let cells = grow_cells(&g, k, seed).unwrap();
        let comms = louvain(&g, seed);
        check_quotient(&g, &cells.cell_of, &cells.quotient);
        check_quotient(&g, &comms.community_of, &comms.quotient);
        for i in 0..10u64 {
            let (s, t) = (((seed ^ i) % 200) as NodeId, ((seed / 3 + i * 17) % 200) as NodeId);
            let exact = dijkstra_full(&g, s, t).unwrap();
            for r in [corridor_route(&g, &cells, s, t).unwrap(), louvain_route(&g, &comms, s, t).unwrap()] {
                r.path.validate(&g, s, t).unwrap();
                prop_assert!(r.path.cost >= exact.cost);
            }
        }
    }
}

#[test]
fn partitions_are_deterministic() {
    let g = random_connected(400, 500, 10, 9);
    assert_eq!(
        grow_cells(&g, 16, 3).unwrap().cell_of,
        grow_cells(&g, 16, 3).unwrap().cell_of
    );
    assert_eq!(louvain(&g, 3).community_of, louvain(&g, 3).community_of);
}

#[test]
fn path_corridor_spans_both_cells() {
    let g = path_graph(8);
    let cells = grow_cells(&g, 2, 0).unwrap();
    let r = corridor_route(&g, &cells, 0, 7).unwrap();
    assert_eq!(r.corridor_nodes, 8);
    assert_eq!(r.path.cost, 7.0);
}

#[test]
fn same_cell_corridor_is_that_cell() {
    let g = grid_graph(8, 8, 1.0);
    let cells = grow_cells(&g, 4, 1).unwrap();
    let c = cells.cell_of[0];
    let other = cells.members[c as usize]
        .iter()
        .copied()
        .find(|&v| v != 0)
        .unwrap();
    let r = corridor_route(&g, &cells, 0, other).unwrap();
    assert_eq!(r.coarse_path, vec![c]);
    assert_eq!(r.corridor_nodes, cells.members[c as usize].len());
    assert!(r.path.cost >= dijkstra_full(&g, 0, other).unwrap().cost);
}

#[test]
fn grid_communities_are_connected() {
    let g = grid_graph(8, 8, 1.0);
    for seed in 0..5 {
        let comms = louvain(&g, seed);
        for m in &comms.members {
            assert!(!m.is_empty());
            assert!(is_connected(induced_subgraph(&g, m).unwrap().graph()));
        }
        assert!((modularity(&g, &comms.community_of) - comms.modularity()).abs() < 1e-9);
    }
}

#[test]
fn single_edge_graph_communities() {
    let g = Graph::from_edge_list(2, &[(0, 1, 3.0)]);
    let comms = louvain(&g, 0);
    assert!((1..=2).contains(&comms.communities));
    assert!((modularity(&g, &comms.community_of) - comms.modularity()).abs() < 1e-9);
}

#[test]
fn clique_bridge_route_is_exact() {
    let g = two_cliques(4);
    let comms = louvain(&g, 7);
    assert_eq!(comms.communities, 2);
    let r = louvain_route(&g, &comms, 0, 7).unwrap();
    assert_eq!(r.path.cost, dijkstra_full(&g, 0, 7).unwrap().cost);
    assert_eq!(r.coarse_path.len(), 2);
}
