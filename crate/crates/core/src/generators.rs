//! Synthetic graphs: paths, grids, random geometric graphs, random sparse
//! connected graphs, and the small worked examples used throughout the tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{largest_component, Graph, NodeId};

/// Unit-weight path `0 - 1 - ... - (n-1)`.
pub fn path_graph(n: usize) -> Graph {
    let edges: Vec<_> = (1..n as NodeId).map(|v| (v - 1, v, 1.0)).collect();
    Graph::from_edge_list(n, &edges)
}

/// Row-major `width x height` grid; node `(x, y)` has id `y * width + x`.
pub fn grid_graph(width: usize, height: usize, weight: f64) -> Graph {
    grid_with(width, height, |_, _| weight)
}

/// Grid with independent uniform weights in `[lo, hi]`.
pub fn grid_random_weights(width: usize, height: usize, lo: f64, hi: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    grid_with(width, height, |_, _| rng.random_range(lo..=hi))
}

pub fn grid_with(
    width: usize,
    height: usize,
    mut weight: impl FnMut(NodeId, NodeId) -> f64,
) -> Graph {
    let id = |x: usize, y: usize| (y * width + x) as NodeId;
    let mut edges = Vec::with_capacity(2 * width * height);
    for y in 0..height {
        for x in 0..width {
            if x + 1 < width {
                let (u, v) = (id(x, y), id(x + 1, y));
                edges.push((u, v, weight(u, v)));
            }
            if y + 1 < height {
                let (u, v) = (id(x, y), id(x, y + 1));
                edges.push((u, v, weight(u, v)));
            }
        }
    }
    Graph::from_edge_list(width * height, &edges)
}

/// Random geometric graph on `n` points in the unit square, connecting pairs
/// closer than `radius`, weighted by Euclidean length (scaled by 1000).
/// Returns the largest connected component, relabelled densely.
pub fn random_geometric(n: usize, radius: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    let cells = ((1.0 / radius).floor() as usize).max(1);
    let cell_of = |p: (f64, f64)| {
        let cx = ((p.0 * cells as f64) as usize).min(cells - 1);
        let cy = ((p.1 * cells as f64) as usize).min(cells - 1);
        (cx, cy)
    };
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); cells * cells];
    for (i, &p) in pts.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        buckets[cy * cells + cx].push(i);
    }
    let mut edges = Vec::new();
    for (i, &p) in pts.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        for ny in cy.saturating_sub(1)..=(cy + 1).min(cells - 1) {
            for nx in cx.saturating_sub(1)..=(cx + 1).min(cells - 1) {
                for &j in &buckets[ny * cells + nx] {
                    if j <= i {
                        continue;
                    }
                    let d = ((p.0 - pts[j].0).powi(2) + (p.1 - pts[j].1).powi(2)).sqrt();
                    if d < radius && d > 0.0 {
                        edges.push((i as NodeId, j as NodeId, d * 1000.0));
                    }
                }
            }
        }
    }
    let g = Graph::from_edge_list(n, &edges);
    largest_component(&g).into_graph()
}

/// Connection radius that makes a random geometric graph on `n` points
/// connected with high probability.
pub fn geometric_radius(n: usize) -> f64 {
    (2.0 * (n as f64).ln() / (std::f64::consts::PI * n as f64)).sqrt()
}

/// Random connected graph: a random spanning tree plus `extra` random
/// chords, integer weights in `1..=max_weight`.
pub fn random_connected(n: usize, extra: usize, max_weight: u32, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n + extra);
    for v in 1..n as NodeId {
        let u = rng.random_range(0..v);
        edges.push((u, v, rng.random_range(1..=max_weight) as f64));
    }
    if n >= 2 {
        for _ in 0..extra {
            let u = rng.random_range(0..n as NodeId);
            let v = rng.random_range(0..n as NodeId);
            if u != v {
                edges.push((u, v, rng.random_range(1..=max_weight) as f64));
            }
        }
    }
    Graph::from_edges(n, edges)
        .expect("generated edges are valid")
        .0
}

/// Two `size`-cliques joined by the single edge `(size-1, size)`.
pub fn two_cliques(size: usize) -> Graph {
    let mut edges = Vec::new();
    for offset in [0, size] {
        for i in 0..size {
            for j in i + 1..size {
                edges.push(((offset + i) as NodeId, (offset + j) as NodeId, 1.0));
            }
        }
    }
    edges.push(((size - 1) as NodeId, size as NodeId, 1.0));
    Graph::from_edge_list(2 * size, &edges)
}

/// Node names of the eight-node "last nonempty overlap" example graph.
pub struct TwoAnchor;

impl TwoAnchor {
    pub const S: NodeId = 0;
    pub const U2: NodeId = 1;
    pub const U3: NodeId = 2;
    pub const A: NodeId = 3;
    pub const A_PRIME: NodeId = 4;
    pub const U5: NodeId = 5;
    pub const U6: NodeId = 6;
    pub const T: NodeId = 7;
}

/// The eight-node overlap example: `s` reaches `t` through either anchor
/// candidate `a` or `a'`, which are both two hops from each terminal.
pub fn two_anchor_graph() -> Graph {
    use TwoAnchor as F;
    Graph::from_edge_list(
        8,
        &[
            (F::S, F::U2, 1.0),
            (F::S, F::U3, 1.0),
            (F::U2, F::A, 1.0),
            (F::U3, F::A, 1.0),
            (F::A, F::U5, 1.0),
            (F::U5, F::U6, 1.0),
            (F::U5, F::T, 1.0),
            (F::U6, F::T, 1.0),
            (F::U2, F::A_PRIME, 1.0),
            (F::A_PRIME, F::U5, 1.0),
        ],
    )
}

/// Node names of the five-node star-with-chords example.
pub struct StarChords;

impl StarChords {
    pub const CENTER: NodeId = 0;
    pub const U1: NodeId = 1;
    pub const U2: NodeId = 2;
    pub const U3: NodeId = 3;
    pub const U4: NodeId = 4;
}

/// Center joined to `u1, u2, u3`, chords `u1-u2` and `u3-u2`, and `u4`
/// hanging off `u2` outside the unit sphere.
pub fn star_chords_graph() -> Graph {
    use StarChords as F;
    Graph::from_edge_list(
        5,
        &[
            (F::CENTER, F::U1, 1.0),
            (F::CENTER, F::U2, 1.0),
            (F::CENTER, F::U3, 1.0),
            (F::U1, F::U2, 1.0),
            (F::U3, F::U2, 1.0),
            (F::U2, F::U4, 1.0),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_connected;

    #[test]
    fn shapes() {
        let g = grid_graph(3, 2, 1.0);
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 7);
        assert_eq!(two_anchor_graph().edge_count(), 10);
        assert_eq!(two_cliques(4).edge_count(), 13);
    }

    #[test]
    fn generated_graphs_are_connected() {
        assert!(is_connected(&random_connected(50, 20, 9, 3)));
        let rgg = random_geometric(2000, geometric_radius(2000), 1);
        assert!(is_connected(&rgg));
        assert!(rgg.node_count() > 1800, "{}", rgg.node_count());
    }

    #[test]
    fn random_weights_in_range() {
        let g = grid_random_weights(10, 10, 1.0, 10.0, 5);
        assert!(g.edges().all(|(_, _, w)| (1.0..=10.0).contains(&w)));
        assert_eq!(g, grid_random_weights(10, 10, 1.0, 10.0, 5));
    }
}
