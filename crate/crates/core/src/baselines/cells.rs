//! Query-agnostic `k`-cell partition by farthest-point seeding and balanced
//! BFS region growing.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_quotient, BaselineError};
use crate::graph::{Graph, NodeId};
use crate::search::{bfs_hops, UNREACHED};

#[derive(Debug, Clone)]
pub struct CellPartition {
    pub cell_of: Vec<u32>,
    /// Number of cells; exceeds the requested count only when the graph has
    /// components that received no seed.
    pub k: usize,
    /// Graph over cells; edge weight is the lightest crossing edge.
    pub quotient: Graph,
    pub members: Vec<Vec<NodeId>>,
    pub seeds: Vec<NodeId>,
}

impl CellPartition {
    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// Largest over smallest cell size.
    pub fn size_ratio(&self) -> f64 {
        let sizes = self.sizes();
        let max = *sizes.iter().max().unwrap_or(&1) as f64;
        let min = *sizes.iter().min().unwrap_or(&1) as f64;
        max / min
    }
}

/// Seeds spread by farthest-point sampling on hop distance. The first seed
/// is the node farthest from a random start node; each further seed
/// maximizes the hop distance to the seeds chosen so far (lowest id on ties,
/// unreachable nodes first).
fn farthest_point_seeds(g: &Graph, k: usize, rng: &mut ChaCha8Rng) -> Vec<NodeId> {
    let n = g.node_count();
    let probe = rng.random_range(0..n as u64) as NodeId;
    let from_probe = bfs_hops(g, probe, None).expect("probe is a valid node");
    let first = (0..n as NodeId)
        .filter(|&v| from_probe.is_reached(v))
        .max_by(|&a, &b| {
            from_probe.dist_slice()[a as usize]
                .cmp(&from_probe.dist_slice()[b as usize])
                .then(b.cmp(&a))
        })
        .unwrap_or(probe);

    let mut min_dist = vec![UNREACHED; n];
    let mut seeds = Vec::with_capacity(k);
    let mut queue = VecDeque::new();
    let mut next = first;
    loop {
        seeds.push(next);
        // BFS from the new seed, pruned where an older seed is at least as close
        min_dist[next as usize] = 0;
        queue.push_back(next);
        while let Some(u) = queue.pop_front() {
            let du = min_dist[u as usize];
            for &v in g.neighbor_ids(u) {
                if du + 1 < min_dist[v as usize] {
                    min_dist[v as usize] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        if seeds.len() == k {
            break;
        }
        let Some(cand) = (0..n as NodeId).max_by(|&a, &b| {
            min_dist[a as usize]
                .cmp(&min_dist[b as usize])
                .then(b.cmp(&a))
        }) else {
            break;
        };
        if min_dist[cand as usize] == 0 {
            break;
        }
        next = cand;
    }
    seeds
}

/// Partitions `g` into `k` connected cells.
///
/// Cells grow from farthest-point seeds; at every step the currently smallest
/// cell that can still grow claims the next unclaimed node from its own BFS
/// frontier, so cells stay connected and roughly balanced.
pub fn grow_cells(g: &Graph, k: usize, seed: u64) -> Result<CellPartition, BaselineError> {
    let n = g.node_count();
    if k < 2 || k > n {
        return Err(BaselineError::CellCount { k, node_count: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds = farthest_point_seeds(g, k, &mut rng);

    const FREE: u32 = u32::MAX;
    let mut cell_of = vec![FREE; n];
    let mut frontiers: Vec<VecDeque<NodeId>> = Vec::with_capacity(seeds.len());
    let mut sizes = vec![0usize; seeds.len()];
    let mut heap = BinaryHeap::new();

    let claim = |v: NodeId, c: usize, cell_of: &mut Vec<u32>, frontier: &mut VecDeque<NodeId>| {
        cell_of[v as usize] = c as u32;
        frontier.extend(
            g.neighbor_ids(v)
                .iter()
                .filter(|&&x| cell_of[x as usize] == FREE),
        );
    };
    for (c, &s) in seeds.iter().enumerate() {
        let mut frontier = VecDeque::new();
        claim(s, c, &mut cell_of, &mut frontier);
        frontiers.push(frontier);
        sizes[c] = 1;
        heap.push(Reverse((1usize, c)));
    }
    while let Some(Reverse((size, c))) = heap.pop() {
        if size != sizes[c] {
            continue;
        }
        let mut grown = false;
        while let Some(v) = frontiers[c].pop_front() {
            if cell_of[v as usize] == FREE {
                claim(v, c, &mut cell_of, &mut frontiers[c]);
                grown = true;
                break;
            }
        }
        if grown {
            sizes[c] += 1;
            heap.push(Reverse((sizes[c], c)));
        }
    }

    // components that received no seed become extra cells
    let mut cells = seeds.len();
    for v in 0..n as NodeId {
        if cell_of[v as usize] != FREE {
            continue;
        }
        let hops = bfs_hops(g, v, None).expect("valid node");
        for &u in hops.reached() {
            cell_of[u as usize] = cells as u32;
        }
        cells += 1;
    }

    let (quotient, members) = build_quotient(g, &cell_of, cells);
    Ok(CellPartition {
        cell_of,
        k: cells,
        quotient,
        members,
        seeds,
    })
}
