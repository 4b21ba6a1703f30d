//! Seeded benchmark harness: (s, t) sampling, timed runs of every method
//! against the Dijkstra oracle, aggregation over inner seeds, profiles and
//! Pareto dominance, and CSV persistence.

mod csvio;
mod metrics;

pub use csvio::{
    read_profiles, read_records, read_summaries, write_profiles, write_records, write_summaries,
    CsvError, Metadata, SCHEMA_VERSION,
};
pub use metrics::{
    accuracy_profile, aggregate, describe, dominance, gap, pareto_dominance, performance_profile,
    Dominance, InstanceVerdict, MetricError, ParetoReport, ProfileCurve, Sample, Stats, Summary,
    TimeGap, GAP_TOLERANCE,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::baselines::{
    corridor_route, grow_cells, louvain, louvain_route, BaselineError, CellPartition, LouvainResult,
};
use crate::graph::{connected_components, Graph, NodeId};
use crate::partition::{PartitionConfig, RuleSet};
use crate::router::{route, DijkstraSolver, RouterError};
use crate::search::{dijkstra, hop_distance, SearchError};

/// Method name of the exact reference in records and profiles.
pub const ORACLE_METHOD: &str = "dijkstra";
/// Inner seed slot of the oracle record; the oracle runs once per problem seed.
pub const ORACLE_Q: u64 = 0;

/// Serializes measured sections across threads.
static TIMING: Mutex<()> = Mutex::new(());

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let _guard = TIMING.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error("graph has no two connected nodes to sample")]
    NoPair,
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Router(#[from] RouterError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Sphere,
    Corridor,
    Louvain,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Sphere, Method::Corridor, Method::Louvain];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Sphere => "sphere",
            Method::Corridor => "corridor",
            Method::Louvain => "louvain",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sphere" => Ok(Method::Sphere),
            "corridor" => Ok(Method::Corridor),
            "louvain" => Ok(Method::Louvain),
            other => Err(format!(
                "unknown method `{other}` (expected sphere, corridor or louvain)"
            )),
        }
    }
}

/// How the SPHERE radius cap is chosen per (s, t) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RMaxPolicy {
    Fixed(u32),
    /// `ceil(R / 2)` where `R` is the hop distance of the pair, at least 1.
    HalfHops,
}

impl RMaxPolicy {
    pub fn resolve(self, hops: u32) -> u32 {
        match self {
            RMaxPolicy::Fixed(r) => r,
            RMaxPolicy::HalfHops => hops.div_ceil(2).max(1),
        }
    }
}

impl fmt::Display for RMaxPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RMaxPolicy::Fixed(r) => write!(f, "{r}"),
            RMaxPolicy::HalfHops => f.write_str("half-hops"),
        }
    }
}

impl FromStr for RMaxPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "half-hops" {
            return Ok(RMaxPolicy::HalfHops);
        }
        s.parse::<u32>()
            .map(RMaxPolicy::Fixed)
            .map_err(|_| format!("r_max must be a positive integer or `half-hops`, got `{s}`"))
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem_seeds: Vec<u64>,
    pub inner_seeds: Vec<u64>,
    pub methods: Vec<Method>,
    pub r_max: RMaxPolicy,
    /// Cell count of the corridor baseline.
    pub k: usize,
    /// Worker threads for SPHERE's leaf solves.
    pub workers: usize,
    /// Remaining SPHERE parameters; `r_max` and `rng_seed` are set per record.
    pub partition: PartitionConfig,
    /// Run every method once before measuring.
    pub warmup: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem_seeds: (1..=30).collect(),
            inner_seeds: (1..=5).collect(),
            methods: Method::ALL.to_vec(),
            r_max: RMaxPolicy::Fixed(crate::partition::DEFAULT_R_MAX),
            k: 64,
            workers: 1,
            partition: PartitionConfig::default(),
            warmup: true,
        }
    }
}

fn has_duplicates(v: &[u64]) -> bool {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.windows(2).any(|w| w[0] == w[1])
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::InvalidConfig(m.to_string()));
        if self.problem_seeds.is_empty() {
            return bad("problem_seeds must not be empty");
        }
        if self.inner_seeds.is_empty() {
            return bad("inner_seeds must not be empty");
        }
        if has_duplicates(&self.problem_seeds) || has_duplicates(&self.inner_seeds) {
            return bad("seed lists must not repeat a seed");
        }
        if self.inner_seeds.contains(&ORACLE_Q) {
            return bad("inner seed 0 is reserved for the oracle record");
        }
        if self.methods.is_empty() {
            return bad("methods must not be empty");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        if let RMaxPolicy::Fixed(0) = self.r_max {
            return bad("r_max must be at least 1");
        }
        if self.methods.contains(&Method::Corridor) && self.k < 2 {
            return bad("k must be at least 2");
        }
        self.partition
            .validate()
            .map_err(|e| BenchError::InvalidConfig(e.to_string()))
    }

    pub fn method_names(&self) -> Vec<String> {
        self.methods
            .iter()
            .map(|m| m.as_str().to_string())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub p: u64,
    pub q: u64,
    pub method: String,
    pub s: NodeId,
    pub t: NodeId,
    pub cost: f64,
    pub oracle: f64,
    pub gap: f64,
    pub time_s: f64,
    pub tasks: usize,
    pub fallback: bool,
}

impl ExperimentRecord {
    pub fn sample(&self) -> Sample {
        Sample {
            p: self.p,
            q: self.q,
            method: self.method.clone(),
            gap: self.gap,
            time_s: self.time_s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StPair {
    pub s: NodeId,
    pub t: NodeId,
    /// Draws rejected because `t` lay outside the component of `s`.
    pub resampled: u32,
}

/// Uniform ordered pair `s != t` from `ChaCha8(p)`, redrawn until both lie in
/// one component.
pub fn sample_st(g: &Graph, p: u64) -> Result<StPair, BenchError> {
    sample_st_in(g, &connected_components(g), p)
}

/// [`sample_st`] with precomputed component labels.
pub fn sample_st_in(g: &Graph, components: &[u32], p: u64) -> Result<StPair, BenchError> {
    let n = g.node_count();
    let mut sizes = BTreeMap::<u32, usize>::new();
    for &c in components {
        *sizes.entry(c).or_default() += 1;
    }
    if n < 2 || sizes.values().all(|&s| s < 2) {
        return Err(BenchError::NoPair);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p);
    let mut resampled = 0;
    loop {
        let s = rng.random_range(0..n as u64) as NodeId;
        let t = rng.random_range(0..n as u64) as NodeId;
        if s == t {
            continue;
        }
        if components[s as usize] != components[t as usize] {
            resampled += 1;
            continue;
        }
        return Ok(StPair { s, t, resampled });
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub pairs: Vec<(u64, StPair)>,
}

impl ExperimentOutput {
    pub fn samples(&self) -> Vec<Sample> {
        self.records.iter().map(ExperimentRecord::sample).collect()
    }
}

struct MethodRun {
    cost: f64,
    tasks: usize,
    fallback: bool,
    time: Duration,
}

/// Query-agnostic baseline structures, built once per inner seed.
struct Prebuilt {
    cells: Option<(CellPartition, Duration)>,
    communities: Option<(LouvainResult, Duration)>,
}

fn prebuild(g: &Graph, cfg: &ExperimentConfig, q: u64) -> Result<Prebuilt, BenchError> {
    let cells = if cfg.methods.contains(&Method::Corridor) {
        let (cells, d) = timed(|| grow_cells(g, cfg.k, q));
        Some((cells?, d))
    } else {
        None
    };
    let communities = if cfg.methods.contains(&Method::Louvain) {
        let (comm, d) = timed(|| louvain(g, q));
        Some((comm, d))
    } else {
        None
    };
    Ok(Prebuilt { cells, communities })
}

fn run_method(
    g: &Graph,
    cfg: &ExperimentConfig,
    pre: &Prebuilt,
    method: Method,
    pair: StPair,
    r_max: u32,
    q: u64,
) -> Result<MethodRun, BenchError> {
    match method {
        Method::Sphere => {
            let pcfg = PartitionConfig {
                r_max,
                rng_seed: q,
                ..cfg.partition.clone()
            };
            let rules = RuleSet::for_config(&pcfg);
            let (res, time) = timed(|| {
                route(
                    g,
                    pair.s,
                    pair.t,
                    &pcfg,
                    &rules,
                    &DijkstraSolver,
                    cfg.workers,
                )
            });
            let (r, stats) = res?;
            Ok(MethodRun {
                cost: r.cost,
                tasks: stats.task_count,
                fallback: false,
                time,
            })
        }
        Method::Corridor => {
            let (cells, build) = pre.cells.as_ref().expect("cells prebuilt");
            let (res, time) = timed(|| corridor_route(g, cells, pair.s, pair.t));
            let r = res?;
            Ok(MethodRun {
                cost: r.path.cost,
                tasks: 1,
                fallback: r.fallback,
                time: *build + time,
            })
        }
        Method::Louvain => {
            let (comm, build) = pre.communities.as_ref().expect("communities prebuilt");
            let (res, time) = timed(|| louvain_route(g, comm, pair.s, pair.t));
            let r = res?;
            Ok(MethodRun {
                cost: r.path.cost,
                tasks: 1,
                fallback: r.fallback,
                time: *build + time,
            })
        }
    }
}

/// Runs every (p, q, method) cell of the experiment sequentially.
///
/// The oracle runs once per `p` and is recorded with `q = 0`. Corridor and
/// Louvain times include building their partition for that inner seed. The
/// hop distance used by [`RMaxPolicy::HalfHops`] is computed outside timing.
pub fn run_experiment(g: &Graph, cfg: &ExperimentConfig) -> Result<ExperimentOutput, BenchError> {
    cfg.validate()?;
    let components = connected_components(g);
    let pairs = cfg
        .problem_seeds
        .iter()
        .map(|&p| sample_st_in(g, &components, p).map(|pair| (p, pair)))
        .collect::<Result<Vec<_>, _>>()?;
    let hops = pairs
        .iter()
        .map(|(_, pair)| match cfg.r_max {
            RMaxPolicy::Fixed(r) => Ok(r),
            RMaxPolicy::HalfHops => hop_distance(g, pair.s, pair.t).map(|h| cfg.r_max.resolve(h)),
        })
        .collect::<Result<Vec<u32>, _>>()?;

    let mut prebuilt = Vec::with_capacity(cfg.inner_seeds.len());
    for &q in &cfg.inner_seeds {
        prebuilt.push(prebuild(g, cfg, q)?);
    }

    if cfg.warmup {
        let (_, pair) = pairs[0];
        let _ = timed(|| dijkstra(g, pair.s, pair.t));
        for &m in &cfg.methods {
            run_method(g, cfg, &prebuilt[0], m, pair, hops[0], cfg.inner_seeds[0])?;
        }
    }

    let mut records = Vec::new();
    for (i, &(p, pair)) in pairs.iter().enumerate() {
        let (oracle, otime) = timed(|| dijkstra(g, pair.s, pair.t));
        let oracle = oracle?.cost;
        records.push(ExperimentRecord {
            p,
            q: ORACLE_Q,
            method: ORACLE_METHOD.to_string(),
            s: pair.s,
            t: pair.t,
            cost: oracle,
            oracle,
            gap: 0.0,
            time_s: otime.as_secs_f64(),
            tasks: 1,
            fallback: false,
        });
        for (j, &q) in cfg.inner_seeds.iter().enumerate() {
            for &m in &cfg.methods {
                let run = run_method(g, cfg, &prebuilt[j], m, pair, hops[i], q)?;
                records.push(ExperimentRecord {
                    p,
                    q,
                    method: m.as_str().to_string(),
                    s: pair.s,
                    t: pair.t,
                    cost: run.cost,
                    oracle,
                    gap: gap(run.cost, oracle)?,
                    time_s: run.time.as_secs_f64(),
                    tasks: run.tasks,
                    fallback: run.fallback,
                });
            }
        }
    }
    Ok(ExperimentOutput { records, pairs })
}

/// Aggregates records with the oracle treated as a single-shot method.
pub fn summarize(
    records: &[ExperimentRecord],
    methods: &[String],
    inner_seeds: &[u64],
) -> Result<Vec<Summary>, MetricError> {
    let samples: Vec<Sample> = records.iter().map(ExperimentRecord::sample).collect();
    let oracle = [ORACLE_METHOD.to_string()];
    let single: &[String] = if records.iter().any(|r| r.method == ORACLE_METHOD) {
        &oracle
    } else {
        &[]
    };
    aggregate(&samples, methods, inner_seeds, single)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Median,
    Mean,
}

impl Basis {
    pub fn as_str(self) -> &'static str {
        match self {
            Basis::Median => "median",
            Basis::Mean => "mean",
        }
    }

    fn time(self, s: &Summary) -> f64 {
        match self {
            Basis::Median => s.median_time,
            Basis::Mean => s.avg_time,
        }
    }

    fn gap(self, s: &Summary) -> f64 {
        match self {
            Basis::Median => s.median_gap,
            Basis::Mean => s.avg_gap,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub kind: String,
    pub basis: String,
    pub method: String,
    pub tau: f64,
    pub fraction: f64,
}

/// Per-method columns of one basis, instances ordered by `p`.
pub fn per_instance(
    summaries: &[Summary],
    basis: Basis,
) -> (BTreeMap<String, Vec<f64>>, BTreeMap<String, Vec<f64>>) {
    let mut sorted: Vec<&Summary> = summaries.iter().collect();
    sorted.sort_by(|a, b| a.p.cmp(&b.p).then_with(|| a.method.cmp(&b.method)));
    let mut times: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut gaps: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for s in sorted {
        times
            .entry(s.method.clone())
            .or_default()
            .push(basis.time(s));
        gaps.entry(s.method.clone()).or_default().push(basis.gap(s));
    }
    (times, gaps)
}

/// Runtime and accuracy profiles on both bases.
pub fn profile_rows(summaries: &[Summary]) -> Result<Vec<ProfileRow>, MetricError> {
    let mut rows = Vec::new();
    for basis in [Basis::Median, Basis::Mean] {
        let (times, gaps) = per_instance(summaries, basis);
        for (kind, curves) in [
            ("runtime", performance_profile(&times)?),
            ("accuracy", accuracy_profile(&gaps)?),
        ] {
            for c in curves {
                for (tau, fraction) in c.points {
                    rows.push(ProfileRow {
                        kind: kind.to_string(),
                        basis: basis.as_str().to_string(),
                        method: c.method.clone(),
                        tau,
                        fraction,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Pareto table keyed `P<p>` from average time and gap of `methods`.
pub fn pareto_table(
    summaries: &[Summary],
    methods: &[&str],
) -> Vec<(String, BTreeMap<String, TimeGap>)> {
    let mut by_p: BTreeMap<u64, BTreeMap<String, TimeGap>> = BTreeMap::new();
    for s in summaries
        .iter()
        .filter(|s| methods.contains(&s.method.as_str()))
    {
        by_p.entry(s.p).or_default().insert(
            s.method.clone(),
            TimeGap {
                time: s.avg_time,
                gap: s.avg_gap,
            },
        );
    }
    by_p.into_iter()
        .map(|(p, row)| (format!("P{p}"), row))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{grid_random_weights, path_graph};

    #[test]
    fn two_node_graph_pairs() {
        let g = path_graph(2);
        for p in 0..20 {
            let pair = sample_st(&g, p).unwrap();
            assert!((pair.s, pair.t) == (0, 1) || (pair.s, pair.t) == (1, 0));
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = path_graph(50);
        assert_eq!(sample_st(&g, 9).unwrap(), sample_st(&g, 9).unwrap());
    }

    #[test]
    fn sampling_stays_in_one_component() {
        let g = Graph::from_edge_list(6, &[(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0)]);
        let comps = connected_components(&g);
        for p in 0..100 {
            let pair = sample_st_in(&g, &comps, p).unwrap();
            assert_eq!(comps[pair.s as usize], comps[pair.t as usize]);
        }
        let (isolated, _) = Graph::from_edges(3, std::iter::empty()).unwrap();
        assert!(matches!(sample_st(&isolated, 0), Err(BenchError::NoPair)));
    }

    #[test]
    fn rmax_policy() {
        assert_eq!(RMaxPolicy::HalfHops.resolve(7), 4);
        assert_eq!(RMaxPolicy::HalfHops.resolve(1), 1);
        assert_eq!(RMaxPolicy::Fixed(1800).resolve(7), 1800);
        assert_eq!(
            "half-hops".parse::<RMaxPolicy>().unwrap(),
            RMaxPolicy::HalfHops
        );
        assert_eq!("12".parse::<RMaxPolicy>().unwrap(), RMaxPolicy::Fixed(12));
        assert!("x".parse::<RMaxPolicy>().is_err());
    }

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig::default();
        ok.validate().unwrap();
        let bad = ExperimentConfig {
            inner_seeds: vec![0, 1],
            ..ExperimentConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig {
            methods: vec![],
            ..ExperimentConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig {
            problem_seeds: vec![1, 1],
            ..ExperimentConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn small_experiment_is_complete_and_reproducible() {
        let g = grid_random_weights(12, 12, 1.0, 10.0, 5);
        let cfg = ExperimentConfig {
            problem_seeds: vec![1, 2, 3],
            inner_seeds: vec![1, 2],
            r_max: RMaxPolicy::HalfHops,
            k: 8,
            ..ExperimentConfig::default()
        };
        let a = run_experiment(&g, &cfg).unwrap();
        let b = run_experiment(&g, &cfg).unwrap();
        assert_eq!(a.records.len(), 3 * (1 + 2 * 3));
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(
                (x.cost.to_bits(), x.gap.to_bits()),
                (y.cost.to_bits(), y.gap.to_bits())
            );
            assert!(x.gap >= 0.0);
        }
        let summaries = summarize(&a.records, &cfg.method_names(), &cfg.inner_seeds).unwrap();
        assert_eq!(summaries.len(), 3 * 4);
        let rows = profile_rows(&summaries).unwrap();
        for kind in ["runtime", "accuracy"] {
            for basis in ["median", "mean"] {
                for m in ["dijkstra", "sphere", "corridor", "louvain"] {
                    let last = rows
                        .iter()
                        .rfind(|r| r.kind == kind && r.basis == basis && r.method == m)
                        .unwrap();
                    assert_eq!(last.fraction, 1.0);
                }
            }
        }
        let exact = rows
            .iter()
            .filter(|r| r.kind == "accuracy" && r.method == "dijkstra")
            .all(|r| r.fraction == 1.0);
        assert!(exact);
    }
}
