use std::io::Write;

use flate2::write::GzEncoder;
use flate2::Compression;
use proptest::prelude::*;
use sphere_core::generators::{random_connected, random_geometric};
use sphere_core::graph::{
    induced_subgraph, load_cached, parse_dimacs_gr, read_dimacs_file, write_dimacs_gr,
};
use sphere_core::{Graph, NodeId};

fn edge_multiset(g: &Graph) -> Vec<(NodeId, NodeId, u64)> {
    let mut e: Vec<_> = g.edges().map(|(u, v, w)| (u, v, w.to_bits())).collect();
    e.sort_unstable();
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn dimacs_round_trip(seed in any::<u64>(), n in 2usize..200) {
        let g = random_connected(n, n, 1000, seed);
        let mut buf = Vec::new();
        write_dimacs_gr(&g, &mut buf).unwrap();
        let back = parse_dimacs_gr(buf.as_slice()).unwrap();
        prop_assert_eq!(back.graph.node_count(), g.node_count());
        prop_assert_eq!(edge_multiset(&back.graph), edge_multiset(&g));
        prop_assert_eq!(back.arcs_read, 2 * g.edge_count());
    }

    #[test]
    fn induced_edges_grow_with_node_set(seed in any::<u64>(), mask in prop::collection::vec(0u8..3, 150)) {
        let g = random_connected(150, 200, 9, seed);
        // 0: in neither, 1: only in W, 2: in both
        let w: Vec<NodeId> = (0..150).filter(|&v| mask[v as usize] >= 1).collect();
        let u: Vec<NodeId> = (0..150).filter(|&v| mask[v as usize] == 2).collect();
        let small = induced_subgraph(&g, &u).unwrap();
        let large = induced_subgraph(&g, &w).unwrap();
        let mut large_edges: Vec<_> = large.parent_edges().map(|(a, b, _)| (a.min(b), a.max(b))).collect();
        large_edges.sort_unstable();
        for (a, b, _) in small.parent_edges() {
            prop_assert!(large_edges.binary_search(&(a.min(b), a.max(b))).is_ok());
        }
    }
}

#[test]
fn induced_on_all_nodes_is_identity() {
    let g = random_geometric(500, 0.08, 2);
    let all: Vec<NodeId> = (0..g.node_count() as NodeId).collect();
    let view = induced_subgraph(&g, &all).unwrap();
    assert_eq!(edge_multiset(view.graph()), edge_multiset(&g));
}

#[test]
fn gzip_file_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let gz = dir.path().join("g.gr.gz");
    let mut enc = GzEncoder::new(Vec::new(), Compression::default());
    enc.write_all(b"c tiny\np sp 3 4\na 1 2 4\na 2 1 4\na 2 3 1\na 3 2 2\n")
        .unwrap();
    std::fs::write(&gz, enc.finish().unwrap()).unwrap();
    let parsed = read_dimacs_file(&gz).unwrap();
    assert_eq!(parsed.graph.edge_count(), 2);
    assert_eq!(parsed.graph.edge_weight(1, 2), Some(1.0));

    let cache = dir.path().join("g.bin");
    let (first, hit) = load_cached(&gz, &cache).unwrap();
    assert!(!hit);
    let (second, hit) = load_cached(&gz, &cache).unwrap();
    assert!(hit);
    assert_eq!(first, second);
}
