//! Louvain community detection (greedy modularity with graph aggregation).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::build_quotient;
use crate::graph::{Graph, NodeId};

const MIN_GAIN: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct LouvainResult {
    pub community_of: Vec<u32>,
    pub communities: usize,
    /// Modularity after each aggregation level, first level first.
    pub level_modularity: Vec<f64>,
    pub quotient: Graph,
    pub members: Vec<Vec<NodeId>>,
}

impl LouvainResult {
    pub fn modularity(&self) -> f64 {
        self.level_modularity.last().copied().unwrap_or(0.0)
    }
}

/// Weighted multigraph used between levels. `self_loop[c]` is the total
/// weight of ordered pairs inside `c`, i.e. twice its internal edge weight.
struct Level {
    adj: Vec<Vec<(u32, f64)>>,
    self_loop: Vec<f64>,
}

impl Level {
    fn from_graph(g: &Graph) -> Level {
        let adj = (0..g.node_count() as NodeId)
            .map(|v| g.neighbors(v).collect())
            .collect();
        Level {
            adj,
            self_loop: vec![0.0; g.node_count()],
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn degree(&self, v: usize) -> f64 {
        self.adj[v].iter().map(|&(_, w)| w).sum::<f64>() + self.self_loop[v]
    }

    /// One round of local moves. Returns the community of every node and
    /// whether any node moved.
    fn local_moves(&self, two_m: f64, rng: &mut ChaCha8Rng) -> (Vec<u32>, bool) {
        let n = self.len();
        let degree: Vec<f64> = (0..n).map(|v| self.degree(v)).collect();
        let mut comm: Vec<u32> = (0..n as u32).collect();
        let mut tot = degree.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut link = vec![0.0f64; n];
        let mut touched: Vec<u32> = Vec::new();
        let mut any_moved = false;
        loop {
            let mut moved = false;
            for &v in &order {
                let own = comm[v];
                for &(u, w) in &self.adj[v] {
                    let c = comm[u as usize];
                    if link[c as usize] == 0.0 {
                        touched.push(c);
                    }
                    link[c as usize] += w;
                }
                tot[own as usize] -= degree[v];
                let gain =
                    |c: u32, link: &[f64]| link[c as usize] - tot[c as usize] * degree[v] / two_m;
                let mut best = own;
                let mut best_gain = gain(own, &link);
                for &c in &touched {
                    let g = gain(c, &link);
                    if g > best_gain + 1e-12 * degree[v] {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best as usize] += degree[v];
                if best != own {
                    comm[v] = best;
                    moved = true;
                }
                for &c in &touched {
                    link[c as usize] = 0.0;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
            any_moved = true;
        }
        (comm, any_moved)
    }

    fn aggregate(&self, comm: &[u32], count: usize) -> Level {
        let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); count];
        let mut self_loop = vec![0.0; count];
        for v in 0..self.len() {
            let cv = comm[v];
            self_loop[cv as usize] += self.self_loop[v];
            for &(u, w) in &self.adj[v] {
                let cu = comm[u as usize];
                if cu == cv {
                    self_loop[cv as usize] += w;
                } else {
                    adj[cv as usize].push((cu, w));
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(c, _)| c);
            list.dedup_by(|next, kept| {
                if next.0 == kept.0 {
                    kept.1 += next.1;
                    true
                } else {
                    false
                }
            });
        }
        Level { adj, self_loop }
    }
}

/// Renumbers community labels densely in order of first appearance.
fn compact(comm: &mut [u32]) -> usize {
    let mut remap = vec![u32::MAX; comm.len()];
    let mut next = 0u32;
    for c in comm.iter_mut() {
        if remap[*c as usize] == u32::MAX {
            remap[*c as usize] = next;
            next += 1;
        }
        *c = remap[*c as usize];
    }
    next as usize
}

/// Newman modularity of a node labelling.
pub fn modularity(g: &Graph, community_of: &[u32]) -> f64 {
    let two_m = 2.0 * g.total_weight();
    if two_m == 0.0 {
        return 0.0;
    }
    let count = community_of
        .iter()
        .map(|&c| c as usize + 1)
        .max()
        .unwrap_or(0);
    let mut internal = vec![0.0; count];
    let mut tot = vec![0.0; count];
    for v in 0..g.node_count() as NodeId {
        let cv = community_of[v as usize] as usize;
        for (u, w) in g.neighbors(v) {
            tot[cv] += w;
            if community_of[u as usize] as usize == cv {
                internal[cv] += w;
            }
        }
    }
    internal
        .iter()
        .zip(&tot)
        .map(|(&i, &t)| i / two_m - (t / two_m) * (t / two_m))
        .sum()
}

/// Louvain communities of `g`; the visiting order of each local-move phase is
/// a seeded shuffle. Levels stop once modularity improves by less than 1e-7.
pub fn louvain(g: &Graph, seed: u64) -> LouvainResult {
    let n = g.node_count();
    let two_m = 2.0 * g.total_weight();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut community_of: Vec<u32> = (0..n as u32).collect();
    let mut level_modularity = Vec::new();
    let mut current = modularity(g, &community_of);

    if two_m > 0.0 {
        let mut level = Level::from_graph(g);
        loop {
            let (mut comm, moved) = level.local_moves(two_m, &mut rng);
            if !moved {
                break;
            }
            let count = compact(&mut comm);
            let mut candidate = community_of.clone();
            for c in candidate.iter_mut() {
                *c = comm[*c as usize];
            }
            let q = modularity(g, &candidate);
            if q - current < MIN_GAIN {
                break;
            }
            community_of = candidate;
            current = q;
            level_modularity.push(q);
            level = level.aggregate(&comm, count);
        }
    }
    if level_modularity.is_empty() {
        level_modularity.push(current);
    }
    let communities = compact(&mut community_of);
    let (quotient, members) = build_quotient(g, &community_of, communities);
    LouvainResult {
        community_of,
        communities,
        level_modularity,
        quotient,
        members,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{grid_graph, random_connected, two_cliques};

    /// Every set partition of `0..n` as a label vector (restricted growth strings).
    fn all_partitions(n: usize) -> Vec<Vec<u32>> {
        fn rec(i: usize, n: usize, labels: &mut Vec<u32>, max: u32, out: &mut Vec<Vec<u32>>) {
            if i == n {
                out.push(labels.clone());
                return;
            }
            for c in 0..=max + 1 {
                labels.push(c);
                rec(i + 1, n, labels, max.max(c), out);
                labels.pop();
            }
        }
        let mut out = Vec::new();
        let mut labels = vec![0];
        rec(1, n, &mut labels, 0, &mut out);
        out
    }

    #[test]
    fn bell_number_enumeration() {
        assert_eq!(all_partitions(8).len(), 4140);
    }

    #[test]
    fn two_cliques_match_exhaustive_optimum() {
        let g = two_cliques(4);
        let best = all_partitions(8)
            .iter()
            .map(|p| modularity(&g, p))
            .fold(f64::NEG_INFINITY, f64::max);
        for seed in 0..20 {
            let r = louvain(&g, seed);
            assert_eq!(r.communities, 2, "seed {seed}");
            assert!((r.modularity() - best).abs() < 1e-9);
            assert_eq!(r.community_of[..4], [r.community_of[0]; 4]);
            assert_eq!(r.community_of[4..], [r.community_of[4]; 4]);
        }
    }

    #[test]
    fn reported_modularity_matches_recompute() {
        for seed in 0..5 {
            let g = random_connected(300, 600, 20, seed);
            let r = louvain(&g, seed);
            assert!((r.modularity() - modularity(&g, &r.community_of)).abs() < 1e-9);
        }
    }

    #[test]
    fn levels_never_decrease() {
        let g = grid_graph(30, 30, 1.0);
        let r = louvain(&g, 3);
        assert!(r.level_modularity.windows(2).all(|w| w[1] >= w[0]));
        assert!(r.modularity() > 0.5);
        assert!(r.communities > 1);
    }

    #[test]
    fn singletons_of_an_edgeless_graph() {
        let (g, _) = Graph::from_edges(3, std::iter::empty()).unwrap();
        let r = louvain(&g, 0);
        assert_eq!(r.communities, 3);
        assert_eq!(r.modularity(), 0.0);
    }

    #[test]
    fn modularity_of_known_split() {
        // two triangles joined by one edge, split at the bridge
        let g = Graph::from_edge_list(
            6,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
                (2, 3, 1.0),
            ],
        );
        // m = 7; each side: internal 3, degree sum 7
        let expected = 2.0 * (3.0 / 7.0 - (7.0 / 14.0f64).powi(2));
        assert!((modularity(&g, &[0, 0, 0, 1, 1, 1]) - expected).abs() < 1e-12);
    }
}
