use proptest::prelude::*;
use sphere_core::generators::{random_connected, random_geometric};
use sphere_core::search::{bfs_hops, hop_distance};
use sphere_core::sphere::{induced_sphere, overlap, spherical_subgraph};
use sphere_core::NodeId;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn spherical_edges_lie_in_induced_sphere(seed in any::<u64>(), r in 0u32..6) {
        let g = random_connected(120, 150, 9, seed);
        let v = (seed % 120) as NodeId;
        let sp = spherical_subgraph(&g, v, r).unwrap();
        let ind = induced_sphere(&g, v, r).unwrap();
        prop_assert_eq!(sp.to_parent(), ind.to_parent());
        let mut ind_edges: Vec<_> = ind.parent_edges().map(|(a, b, _)| (a.min(b), a.max(b))).collect();
        ind_edges.sort_unstable();
        for (a, b, w) in sp.parent_edges() {
            prop_assert!(ind_edges.binary_search(&(a.min(b), a.max(b))).is_ok());
            prop_assert_eq!(g.edge_weight(a, b), Some(w));
        }
    }

    #[test]
    fn induced_sphere_preserves_center_distances(seed in any::<u64>(), r in 0u32..8) {
        let g = random_connected(150, 120, 9, seed);
        let v = (seed % 150) as NodeId;
        let ind = induced_sphere(&g, v, r).unwrap();
        let center = ind.local_of(v).unwrap();
        let inside = bfs_hops(ind.graph(), center, None).unwrap();
        let outside = bfs_hops(&g, v, None).unwrap();
        for local in 0..ind.node_count() as NodeId {
            prop_assert_eq!(inside.dist(local), outside.dist(ind.parent_of(local)));
        }
    }

    #[test]
    fn overlap_grows_with_each_radius(seed in any::<u64>(), rs in 0u32..7, rt in 0u32..7) {
        let g = random_connected(100, 80, 5, seed);
        let (s, t) = ((seed % 100) as NodeId, ((seed / 100) % 100) as NodeId);
        let base = overlap(&g, s, t, rs, rt).unwrap();
        let wider_s = overlap(&g, s, t, rs + 1, rt).unwrap();
        let wider_t = overlap(&g, s, t, rs, rt + 1).unwrap();
        for v in &base {
            prop_assert!(wider_s.binary_search(v).is_ok());
            prop_assert!(wider_t.binary_search(v).is_ok());
        }
    }

    #[test]
    fn overlap_nonempty_once_radii_cover_distance(seed in any::<u64>(), split in 0.0f64..=1.0) {
        let g = random_geometric(800, 0.08, seed);
        let n = g.node_count() as u64;
        let (s, t) = ((seed % n) as NodeId, ((seed / 7) % n) as NodeId);
        let d = hop_distance(&g, s, t).unwrap();
        let rs = (d as f64 * split).round() as u32;
        let rt = d - rs;
        prop_assert!(!overlap(&g, s, t, rs, rt).unwrap().is_empty());
    }
}
