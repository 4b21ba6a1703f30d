//! Query-aware spherical partitioning for point-to-point shortest paths on
//! large weighted undirected graphs, with an exact Dijkstra reference,
//! partition-based baselines, and a seeded benchmark harness.

pub mod baselines;
pub mod bench;
pub mod generators;
pub mod graph;
pub mod partition;
pub mod router;
pub mod search;
pub mod sphere;

pub use graph::{Graph, NodeId, SubgraphView};
pub use partition::{PartitionConfig, RadiusPair, RuleSet, TaskTriple};
pub use router::{route, solve_tasks, DijkstraSolver, Route, RunStats, Solver, SolverRegistry};
pub use search::{bfs_hops, dijkstra, hop_distance, Path};
