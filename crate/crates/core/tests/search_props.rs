use proptest::prelude::*;
use sphere_core::generators::{grid_random_weights, random_connected, random_geometric};
use sphere_core::search::{bfs_hops, dijkstra, hop_distance};
use sphere_core::{Graph, NodeId};

fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..=12).prop_flat_map(|n| {
        let edge = (0..n as NodeId, 0..n as NodeId, 1u32..20);
        prop::collection::vec(edge, 0..3 * n).prop_map(move |edges| {
            let (g, _) =
                Graph::from_edges(n, edges.into_iter().map(|(u, v, w)| (u, v, w as f64))).unwrap();
            g
        })
    })
}

/// Cheapest simple path by exhaustive DFS, `None` when unreachable.
fn brute_force(g: &Graph, s: NodeId, t: NodeId) -> Option<f64> {
    fn dfs(
        g: &Graph,
        u: NodeId,
        t: NodeId,
        cost: f64,
        seen: &mut Vec<bool>,
        best: &mut Option<f64>,
    ) {
        if u == t {
            *best = Some(best.map_or(cost, |b: f64| b.min(cost)));
            return;
        }
        for (v, w) in g.neighbors(u) {
            if !seen[v as usize] {
                seen[v as usize] = true;
                dfs(g, v, t, cost + w, seen, best);
                seen[v as usize] = false;
            }
        }
    }
    let mut seen = vec![false; g.node_count()];
    seen[s as usize] = true;
    let mut best = None;
    dfs(g, s, t, 0.0, &mut seen, &mut best);
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dijkstra_matches_enumeration(g in small_graph()) {
        let n = g.node_count() as NodeId;
        for s in 0..n {
            for t in 0..n {
                match (dijkstra(&g, s, t), brute_force(&g, s, t)) {
                    (Ok(p), Some(best)) => {
                        prop_assert_eq!(p.cost, best);
                        p.validate(&g, s, t).unwrap();
                    }
                    (Err(_), None) => {}
                    (got, want) => prop_assert!(false, "{s}->{t}: {got:?} vs {want:?}"),
                }
            }
        }
    }

    #[test]
    fn capped_bfs_is_truncated_bfs(seed in any::<u64>(), cap in 0u32..12) {
        let g = random_connected(80, 60, 5, seed);
        let v = (seed % 80) as NodeId;
        let full = bfs_hops(&g, v, None).unwrap();
        let capped = bfs_hops(&g, v, Some(cap)).unwrap();
        let mut want: Vec<NodeId> = (0..80).filter(|&x| full.dist(x).is_some_and(|d| d <= cap)).collect();
        let mut got = capped.reached().to_vec();
        want.sort_unstable();
        got.sort_unstable();
        prop_assert_eq!(got, want);
        for x in 0..80 {
            if let Some(d) = capped.dist(x) {
                prop_assert_eq!(Some(d), full.dist(x));
            }
        }
    }
}

#[test]
fn bidirectional_hops_match_bfs() {
    let g = random_geometric(3000, 0.04, 11);
    let n = g.node_count() as u64;
    let mut state = 0x1234_5678u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % n) as NodeId
    };
    for _ in 0..1000 {
        let (s, t) = (next(), next());
        let bfs = bfs_hops(&g, s, None).unwrap();
        match bfs.dist(t) {
            Some(d) => assert_eq!(hop_distance(&g, s, t).unwrap(), d, "{s}->{t}"),
            None => assert!(hop_distance(&g, s, t).is_err()),
        }
    }
}

#[test]
fn hop_distance_triangle_inequality() {
    let g = grid_random_weights(30, 30, 1.0, 10.0, 4);
    for i in 0..200u32 {
        let (s, t, x) = ((i * 37) % 900, (i * 101 + 7) % 900, (i * 53 + 11) % 900);
        let st = hop_distance(&g, s, t).unwrap();
        assert!(st <= hop_distance(&g, s, x).unwrap() + hop_distance(&g, x, t).unwrap());
    }
}
