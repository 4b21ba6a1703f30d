//! Solving leaf tasks and stitching their paths into one route.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::partition::{sph_partition, PartitionConfig, PartitionError, RuleSet, TaskTriple};
use crate::search::{dijkstra, Path, PathError, SearchError};

#[derive(Debug, Error)]
pub enum RouterError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("task {index} failed: {source}")]
    TaskFailed {
        index: usize,
        #[source]
        source: SearchError,
    },
    #[error("task {index} returned an invalid path: {source}")]
    InvalidTaskPath {
        index: usize,
        #[source]
        source: PathError,
    },
    #[error("task {index} terminal {node} is not in its subgraph")]
    TerminalOutsideSubgraph { index: usize, node: NodeId },
    #[error("tasks {index} and {} do not chain", index + 1)]
    BrokenChain { index: usize },
    #[error("no tasks to solve")]
    NoTasks,
    #[error("workers must be at least 1")]
    NoWorkers,
    #[error("unknown solver `{0}`")]
    UnknownSolver(String),
}

/// A shortest-path strategy applied to one `(subgraph, entry, exit)` task.
pub trait Solver: Send + Sync {
    fn name(&self) -> &str;
    fn solve(&self, g: &Graph, entry: NodeId, exit: NodeId) -> Result<Path, SearchError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DijkstraSolver;

impl Solver for DijkstraSolver {
    fn name(&self) -> &str {
        "dijkstra"
    }

    fn solve(&self, g: &Graph, entry: NodeId, exit: NodeId) -> Result<Path, SearchError> {
        dijkstra(g, entry, exit)
    }
}

/// Solvers by name. `dijkstra` is always present.
#[derive(Clone)]
pub struct SolverRegistry {
    solvers: BTreeMap<String, Arc<dyn Solver>>,
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut r = SolverRegistry {
            solvers: BTreeMap::new(),
        };
        r.register(Arc::new(DijkstraSolver));
        r
    }
}

impl SolverRegistry {
    pub fn register(&mut self, solver: Arc<dyn Solver>) {
        self.solvers.insert(solver.name().to_string(), solver);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Solver>, RouterError> {
        self.solvers
            .get(name)
            .cloned()
            .ok_or_else(|| RouterError::UnknownSolver(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.solvers.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub entry: NodeId,
    pub exit: NodeId,
    pub cost: f64,
    pub subgraph_nodes: usize,
    pub subgraph_edges: usize,
    pub solve_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub nodes: Vec<NodeId>,
    pub cost: f64,
    pub segments: Vec<Segment>,
}

impl Route {
    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn target(&self) -> NodeId {
        *self.nodes.last().expect("routes are nonempty")
    }

    /// Checks the route edge by edge against `g` and its cost bookkeeping.
    pub fn validate(&self, g: &Graph, s: NodeId, t: NodeId) -> Result<(), PathError> {
        Path {
            nodes: self.nodes.clone(),
            cost: self.cost,
        }
        .validate(g, s, t)
    }

    pub fn as_path(&self) -> Path {
        Path {
            nodes: self.nodes.clone(),
            cost: self.cost,
        }
    }
}

/// Runs `job(i)` for every `i < count` on up to `workers` threads and
/// returns the results in index order, whatever order they finish in.
pub fn run_indexed<T, F>(count: usize, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = workers.max(1).min(count);
    if threads <= 1 {
        return (0..count).map(job).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..count).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let out = job(i);
                slots.lock().expect("no worker panicked")[i] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|slot| slot.expect("every index ran"))
        .collect()
}

fn check_chain(tasks: &[TaskTriple]) -> Result<(), RouterError> {
    if tasks.is_empty() {
        return Err(RouterError::NoTasks);
    }
    for (index, pair) in tasks.windows(2).enumerate() {
        if pair[0].exit != pair[1].entry {
            return Err(RouterError::BrokenChain { index });
        }
    }
    Ok(())
}

fn solve_one(
    task: &TaskTriple,
    index: usize,
    solver: &dyn Solver,
) -> Result<(Path, Duration), RouterError> {
    let view = &task.subgraph;
    let local = |node| {
        view.local_of(node)
            .ok_or(RouterError::TerminalOutsideSubgraph { index, node })
    };
    let (u, w) = (local(task.entry)?, local(task.exit)?);
    let started = Instant::now();
    let path = solver
        .solve(view.graph(), u, w)
        .map_err(|source| RouterError::TaskFailed { index, source })?;
    let elapsed = started.elapsed();
    path.validate(view.graph(), u, w)
        .map_err(|source| RouterError::InvalidTaskPath { index, source })?;
    Ok((
        Path {
            nodes: path.nodes.iter().map(|&v| view.parent_of(v)).collect(),
            cost: path.cost,
        },
        elapsed,
    ))
}

/// Joins per-task paths at their shared junctions, dropping the repeated
/// junction node.
fn concatenate(tasks: &[TaskTriple], solved: Vec<(Path, Duration)>) -> Route {
    let mut nodes: Vec<NodeId> = Vec::new();
    let mut cost = 0.0;
    let mut segments = Vec::with_capacity(tasks.len());
    for (task, (path, solve_time)) in tasks.iter().zip(solved) {
        let skip = usize::from(!nodes.is_empty());
        nodes.extend_from_slice(&path.nodes[skip..]);
        cost += path.cost;
        segments.push(Segment {
            entry: task.entry,
            exit: task.exit,
            cost: path.cost,
            subgraph_nodes: task.subgraph.node_count(),
            subgraph_edges: task.subgraph.edge_count(),
            solve_time,
        });
    }
    Route {
        nodes,
        cost,
        segments,
    }
}

/// Solves chained tasks independently with up to `workers` threads and folds
/// the paths left to right. The route does not depend on `workers`.
pub fn solve_tasks(
    tasks: &[TaskTriple],
    solver: &dyn Solver,
    workers: usize,
) -> Result<Route, RouterError> {
    if workers == 0 {
        return Err(RouterError::NoWorkers);
    }
    check_chain(tasks)?;
    let results = run_indexed(tasks.len(), workers, |i| solve_one(&tasks[i], i, solver));
    let solved = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(concatenate(tasks, solved))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub partition_time: Duration,
    /// Wall-clock of the parallel solve phase.
    pub solve_time: Duration,
    pub task_solve_times: Vec<Duration>,
    pub concat_time: Duration,
    /// Partition + solve + concatenation, measured end to end.
    pub total_time: Duration,
    pub task_count: usize,
    pub cut_count: usize,
    pub forced_leaves: usize,
    pub max_depth: u32,
    pub max_subgraph_nodes: usize,
    pub max_subgraph_edges: usize,
}

/// Partitions `s -> t`, solves the leaves, and joins them into one route.
pub fn route(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    cfg: &PartitionConfig,
    rules: &RuleSet,
    solver: &dyn Solver,
    workers: usize,
) -> Result<(Route, RunStats), RouterError> {
    if workers == 0 {
        return Err(RouterError::NoWorkers);
    }
    let started = Instant::now();
    let partition = sph_partition(g, s, t, cfg, rules)?;
    let partition_time = started.elapsed();

    let solve_started = Instant::now();
    check_chain(&partition.tasks)?;
    let results = run_indexed(partition.tasks.len(), workers, |i| {
        solve_one(&partition.tasks[i], i, solver)
    });
    let solved = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let solve_time = solve_started.elapsed();

    let concat_started = Instant::now();
    let task_solve_times = solved.iter().map(|(_, d)| *d).collect();
    let route = concatenate(&partition.tasks, solved);
    let concat_time = concat_started.elapsed();
    let total_time = started.elapsed();

    let stats = RunStats {
        partition_time,
        solve_time,
        task_solve_times,
        concat_time,
        total_time,
        task_count: partition.tasks.len(),
        cut_count: partition.cuts.len(),
        forced_leaves: partition.forced_count(),
        max_depth: partition.max_depth(),
        max_subgraph_nodes: route
            .segments
            .iter()
            .map(|s| s.subgraph_nodes)
            .max()
            .unwrap_or(0),
        max_subgraph_edges: route
            .segments
            .iter()
            .map(|s| s.subgraph_edges)
            .max()
            .unwrap_or(0),
    };
    Ok((route, stats))
}
