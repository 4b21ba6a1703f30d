//! Query-aware recursive spherical partitioning.
//!
//! A *partition cut* grows hop spheres around both terminals until they
//! overlap, shrinks them with a decrement rule until one more step would
//! drop the overlap below `eps_overlap`, and picks an anchor inside that last
//! overlap. The query `u -> w` then splits into `u -> a` on the induced
//! sphere around `u` and `a -> w` on the induced sphere around `w`. Sides
//! whose radius exceeds `r_max` are cut again. Because every anchor lies in
//! both spheres, solving the leaves independently and joining them at the
//! anchors always gives a walk in the original graph.
//!
//! Rules are pluggable through [`StartRule`], [`DecrementRule`] and
//! [`AnchorRule`]; [`RuleSet::standard`] gives the balanced start, the
//! larger-radius-first decrement and the uniform anchor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{induced_subgraph, Graph, GraphError, NodeId, SubgraphView};
use crate::search::{bfs_hops, hop_distance, HopDistances, SearchError};
use crate::sphere::intersect_reached;

/// Generator used for anchor draws.
pub type AnchorRng = ChaCha8Rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("invalid partition config: {0}")]
    InvalidConfig(String),
    #[error("source and target are both node {0}")]
    SameTerminals(NodeId),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("start rule returned {radii:?} whose overlap has {overlap_len} nodes, need at least {required}")]
    StartRuleViolation {
        radii: RadiusPair,
        overlap_len: usize,
        required: usize,
    },
    #[error("decrement rule increased {from:?} to {to:?}")]
    DecrementIncreased { from: RadiusPair, to: RadiusPair },
    #[error("decrement rule made no progress at {radii:?}")]
    DecrementStalled { radii: RadiusPair },
    #[error("anchor rule picked node {anchor}, which is not in the overlap")]
    AnchorOutsideOverlap { anchor: NodeId },
    #[error("anchor rule called with an empty candidate set")]
    EmptyCandidates,
}

/// Sphere radii around source and target. The derived order is lexicographic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RadiusPair {
    pub rs: u32,
    pub rt: u32,
}

impl RadiusPair {
    pub const fn new(rs: u32, rt: u32) -> RadiusPair {
        RadiusPair { rs, rt }
    }

    /// Componentwise `<=`.
    pub fn le_componentwise(self, other: RadiusPair) -> bool {
        self.rs <= other.rs && self.rt <= other.rt
    }
}

/// Initial radii, which must already have a large enough overlap.
pub trait StartRule: Send + Sync {
    /// `known_hops`, when given, is the exact hop distance between `s` and `t`.
    fn start(
        &self,
        g: &Graph,
        s: NodeId,
        t: NodeId,
        known_hops: Option<u32>,
    ) -> Result<RadiusPair, PartitionError>;
}

/// Lexicographically monotone map that never increases a coordinate.
pub trait DecrementRule: Send + Sync {
    fn decrement(&self, radii: RadiusPair) -> RadiusPair;
}

/// Picks the split point from a sorted, nonempty overlap.
pub trait AnchorRule: Send + Sync {
    fn select(&self, candidates: &[NodeId], rng: &mut AnchorRng) -> Result<NodeId, PartitionError>;
}

/// Both radii set to `ceil(d / 2)` for hop distance `d`, so `rs + rt >= d`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BalancedStart;

impl StartRule for BalancedStart {
    fn start(
        &self,
        g: &Graph,
        s: NodeId,
        t: NodeId,
        known_hops: Option<u32>,
    ) -> Result<RadiusPair, PartitionError> {
        let d = match known_hops {
            Some(d) => d,
            None => hop_distance(g, s, t)?,
        };
        let r = d.div_ceil(2);
        Ok(RadiusPair::new(r, r))
    }
}

/// Shrinks the larger radius by `step` (the source radius on ties),
/// saturating at zero.
#[derive(Debug, Clone, Copy)]
pub struct LargerFirstDecrement {
    pub step: u32,
}

impl Default for LargerFirstDecrement {
    fn default() -> Self {
        LargerFirstDecrement { step: 1 }
    }
}

impl DecrementRule for LargerFirstDecrement {
    fn decrement(&self, p: RadiusPair) -> RadiusPair {
        if p.rs >= p.rt {
            RadiusPair::new(p.rs.saturating_sub(self.step), p.rt)
        } else {
            RadiusPair::new(p.rs, p.rt.saturating_sub(self.step))
        }
    }
}

/// Uniform draw over the sorted candidate list.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformAnchor;

impl AnchorRule for UniformAnchor {
    fn select(&self, candidates: &[NodeId], rng: &mut AnchorRng) -> Result<NodeId, PartitionError> {
        anchor_uniform(candidates, rng)
    }
}

pub fn default_decru(p: RadiusPair) -> RadiusPair {
    LargerFirstDecrement::default().decrement(p)
}

pub fn default_staru(g: &Graph, s: NodeId, t: NodeId) -> Result<RadiusPair, PartitionError> {
    if s == t {
        return Err(PartitionError::SameTerminals(s));
    }
    BalancedStart.start(g, s, t, None)
}

/// Uniform choice from `candidates`. The index is drawn as a `u64` so the
/// pick for a given generator state is the same on every platform.
pub fn anchor_uniform(
    candidates: &[NodeId],
    rng: &mut AnchorRng,
) -> Result<NodeId, PartitionError> {
    if candidates.is_empty() {
        return Err(PartitionError::EmptyCandidates);
    }
    let i = rng.random_range(0..candidates.len() as u64) as usize;
    Ok(candidates[i])
}

pub struct RuleSet {
    pub start: Box<dyn StartRule>,
    pub decrement: Box<dyn DecrementRule>,
    pub anchor: Box<dyn AnchorRule>,
}

impl RuleSet {
    pub fn standard(delta_r: u32) -> RuleSet {
        RuleSet {
            start: Box::new(BalancedStart),
            decrement: Box::new(LargerFirstDecrement { step: delta_r }),
            anchor: Box::new(UniformAnchor),
        }
    }

    pub fn for_config(cfg: &PartitionConfig) -> RuleSet {
        RuleSet::standard(cfg.delta_r)
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::standard(1)
    }
}

/// Default radius cap, the value used for continental road networks.
pub const DEFAULT_R_MAX: u32 = 1800;

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionConfig {
    /// Sides with a larger radius are split again.
    pub r_max: u32,
    /// Optional node cap per leaf subgraph.
    pub v_max: Option<usize>,
    /// Optional edge cap per leaf subgraph.
    pub e_max: Option<usize>,
    /// Minimum overlap size the cut keeps.
    pub eps_overlap: usize,
    /// Step of the standard decrement rule.
    pub delta_r: u32,
    /// Maximum recursion depth; deeper sides become forced leaves.
    pub l_max: Option<u32>,
    /// Anchors per cut. Only 1 is supported.
    pub k_anchor: u32,
    pub rng_seed: u64,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            r_max: DEFAULT_R_MAX,
            v_max: None,
            e_max: None,
            eps_overlap: 1,
            delta_r: 1,
            l_max: None,
            k_anchor: 1,
            rng_seed: 0,
        }
    }
}

impl PartitionConfig {
    pub fn with_r_max(r_max: u32) -> PartitionConfig {
        PartitionConfig {
            r_max,
            ..PartitionConfig::default()
        }
    }

    pub fn seeded(mut self, seed: u64) -> PartitionConfig {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), PartitionError> {
        let bad = |m: &str| Err(PartitionError::InvalidConfig(m.to_string()));
        if self.r_max < 1 {
            return bad("r_max must be at least 1");
        }
        if self.eps_overlap < 1 {
            return bad("eps_overlap must be at least 1");
        }
        if self.delta_r < 1 {
            return bad("delta_r must be at least 1");
        }
        if self.k_anchor != 1 {
            return bad("only k_anchor = 1 is supported");
        }
        if self.v_max == Some(0) || self.e_max == Some(0) {
            return bad("v_max and e_max must be positive when set");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    /// Last radii along the decrement trajectory whose overlap is large enough.
    pub radii: RadiusPair,
    /// Sorted overlap at `radii`.
    pub overlap: Vec<NodeId>,
    pub anchor: NodeId,
    /// One further decrement of `radii`, and its overlap size (below threshold).
    pub decremented: RadiusPair,
    pub decremented_overlap_len: usize,
    pub entry_to_anchor_hops: u32,
    pub anchor_to_exit_hops: u32,
}

/// Runs one cut on `g`, also returning the two capped searches so callers can
/// build the side spheres without searching again.
fn cut_with_searches(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    known_hops: u32,
    rules: &RuleSet,
    cfg: &PartitionConfig,
    rng: &mut AnchorRng,
) -> Result<(CutResult, HopDistances, HopDistances), PartitionError> {
    let start = rules.start.start(g, s, t, Some(known_hops))?;
    let hs = bfs_hops(g, s, Some(start.rs))?;
    let ht = bfs_hops(g, t, Some(start.rt))?;
    let (small, large, small_is_s) = if hs.reached().len() <= ht.reached().len() {
        (&hs, &ht, true)
    } else {
        (&ht, &hs, false)
    };
    // decrements never grow a radius, so both searches cover every later pair
    let overlap_len = |p: RadiusPair| -> usize {
        let (rs_small, r_large) = if small_is_s {
            (p.rs, p.rt)
        } else {
            (p.rt, p.rs)
        };
        small
            .reached()
            .iter()
            .filter(|&&v| {
                small.dist_slice()[v as usize] <= rs_small
                    && large.dist_slice()[v as usize] <= r_large
            })
            .count()
    };

    let initial = overlap_len(start);
    if initial < cfg.eps_overlap {
        return Err(PartitionError::StartRuleViolation {
            radii: start,
            overlap_len: initial,
            required: cfg.eps_overlap,
        });
    }
    let mut current = start;
    let (decremented, decremented_overlap_len) = loop {
        let next = rules.decrement.decrement(current);
        if !next.le_componentwise(current) {
            return Err(PartitionError::DecrementIncreased {
                from: current,
                to: next,
            });
        }
        if next == current {
            return Err(PartitionError::DecrementStalled { radii: current });
        }
        let len = overlap_len(next);
        if len < cfg.eps_overlap {
            break (next, len);
        }
        current = next;
    };

    let overlap = intersect_reached(&hs, &ht, current.rs, current.rt);
    let anchor = rules.anchor.select(&overlap, rng)?;
    if overlap.binary_search(&anchor).is_err() {
        return Err(PartitionError::AnchorOutsideOverlap { anchor });
    }
    let cut = CutResult {
        radii: current,
        entry_to_anchor_hops: hs.dist(anchor).expect("anchor in s-sphere"),
        anchor_to_exit_hops: ht.dist(anchor).expect("anchor in t-sphere"),
        overlap,
        anchor,
        decremented,
        decremented_overlap_len,
    };
    Ok((cut, hs, ht))
}

/// One partition cut of the query `s -> t` on `g`.
pub fn partition_cut(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    rules: &RuleSet,
    cfg: &PartitionConfig,
    rng: &mut AnchorRng,
) -> Result<CutResult, PartitionError> {
    cfg.validate()?;
    g.check_node(s)?;
    g.check_node(t)?;
    if s == t {
        return Err(PartitionError::SameTerminals(s));
    }
    let d = hop_distance(g, s, t)?;
    cut_with_searches(g, s, t, d, rules, cfg, rng).map(|(cut, _, _)| cut)
}

/// Why a side was emitted as a leaf although it exceeds a size cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcedLeaf {
    /// Splitting would exceed `l_max`.
    DepthLimit,
    /// Terminals at most two hops apart.
    ShortTerminals,
    /// The anchor coincides with one of the cut's terminals.
    AnchorAtEndpoint,
    /// The side's terminals are no closer than the parent's.
    NoProgress,
}

impl ForcedLeaf {
    pub fn as_str(self) -> &'static str {
        match self {
            ForcedLeaf::DepthLimit => "depth_limit",
            ForcedLeaf::ShortTerminals => "short_terminals",
            ForcedLeaf::AnchorAtEndpoint => "anchor_at_endpoint",
            ForcedLeaf::NoProgress => "no_progress",
        }
    }
}

/// Leaf task: route `entry -> exit` inside `subgraph`. Terminals are ids of
/// the graph that was partitioned, as is the subgraph's parent mapping.
#[derive(Debug, Clone)]
pub struct TaskTriple {
    pub subgraph: SubgraphView,
    pub entry: NodeId,
    pub exit: NodeId,
    /// Depth of the cut that produced this side (the first cut is depth 0).
    pub depth: u32,
    /// Sphere radius of the subgraph around its center terminal.
    pub radius: u32,
    pub forced: Option<ForcedLeaf>,
}

/// One executed cut, kept for inspection and property checks.
#[derive(Debug, Clone)]
pub struct CutRecord {
    pub depth: u32,
    pub entry: NodeId,
    pub exit: NodeId,
    pub terminal_hops: u32,
    pub radii: RadiusPair,
    pub overlap_len: usize,
    pub decremented: RadiusPair,
    pub decremented_overlap_len: usize,
    pub anchor: NodeId,
    /// Node set (original ids) of the graph the cut ran on; only filled when
    /// tracing, and `None` for the first cut, which ran on the whole graph.
    pub scope: Option<Vec<NodeId>>,
}

#[derive(Debug, Clone)]
pub struct Partition {
    /// Leaves in chain order: `tasks[i].exit == tasks[i + 1].entry`.
    pub tasks: Vec<TaskTriple>,
    pub cuts: Vec<CutRecord>,
}

impl Partition {
    pub fn max_depth(&self) -> u32 {
        self.tasks.iter().map(|t| t.depth).max().unwrap_or(0)
    }

    pub fn forced_count(&self) -> usize {
        self.tasks.iter().filter(|t| t.forced.is_some()).count()
    }
}

/// Recursively partitions `s -> t` into chained leaf tasks.
pub fn sph_partition(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    cfg: &PartitionConfig,
    rules: &RuleSet,
) -> Result<Partition, PartitionError> {
    Partitioner::new(g, cfg, rules, false).run(s, t)
}

/// Like [`sph_partition`], additionally recording every cut's node set.
pub fn sph_partition_traced(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    cfg: &PartitionConfig,
    rules: &RuleSet,
) -> Result<Partition, PartitionError> {
    Partitioner::new(g, cfg, rules, true).run(s, t)
}

enum Scope<'a> {
    Root(&'a Graph),
    Sub(SubgraphView),
}

impl Scope<'_> {
    fn graph(&self) -> &Graph {
        match self {
            Scope::Root(g) => g,
            Scope::Sub(view) => view.graph(),
        }
    }

    fn original(&self, local: NodeId) -> NodeId {
        match self {
            Scope::Root(_) => local,
            Scope::Sub(view) => view.parent_of(local),
        }
    }

    fn induce(&self, local_nodes: &[NodeId]) -> Result<SubgraphView, GraphError> {
        match self {
            Scope::Root(g) => induced_subgraph(g, local_nodes),
            Scope::Sub(view) => view.induced(local_nodes),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Source = 0,
    Target = 1,
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the cut at a given position in the recursion tree. Depends only
/// on the base seed and the path of sides taken, never on execution order.
fn cut_seed(base: u64, depth: u32, path_key: u64) -> u64 {
    mix64(base ^ mix64(path_key ^ mix64(depth as u64)))
}

struct Partitioner<'a> {
    root: &'a Graph,
    cfg: &'a PartitionConfig,
    rules: &'a RuleSet,
    trace: bool,
    tasks: Vec<TaskTriple>,
    cuts: Vec<CutRecord>,
}

struct SideSpec<'h> {
    side: Side,
    hops: &'h HopDistances,
    radius: u32,
    entry: NodeId,
    exit: NodeId,
    terminal_hops: u32,
}

impl<'a> Partitioner<'a> {
    fn new(root: &'a Graph, cfg: &'a PartitionConfig, rules: &'a RuleSet, trace: bool) -> Self {
        Partitioner {
            root,
            cfg,
            rules,
            trace,
            tasks: Vec::new(),
            cuts: Vec::new(),
        }
    }

    fn run(mut self, s: NodeId, t: NodeId) -> Result<Partition, PartitionError> {
        self.cfg.validate()?;
        self.root.check_node(s)?;
        self.root.check_node(t)?;
        if s == t {
            return Err(PartitionError::SameTerminals(s));
        }
        let d = hop_distance(self.root, s, t)?;
        let scope = Scope::Root(self.root);
        self.split(&scope, s, t, d, 0, 1)?;
        Ok(Partition {
            tasks: self.tasks,
            cuts: self.cuts,
        })
    }

    fn split(
        &mut self,
        scope: &Scope<'_>,
        u: NodeId,
        w: NodeId,
        hops: u32,
        depth: u32,
        path_key: u64,
    ) -> Result<(), PartitionError> {
        let g = scope.graph();
        let mut rng = AnchorRng::seed_from_u64(cut_seed(self.cfg.rng_seed, depth, path_key));
        let (cut, hs, ht) = cut_with_searches(g, u, w, hops, self.rules, self.cfg, &mut rng)?;
        self.cuts.push(CutRecord {
            depth,
            entry: scope.original(u),
            exit: scope.original(w),
            terminal_hops: hops,
            radii: cut.radii,
            overlap_len: cut.overlap.len(),
            decremented: cut.decremented,
            decremented_overlap_len: cut.decremented_overlap_len,
            anchor: scope.original(cut.anchor),
            scope: match scope {
                Scope::Sub(view) if self.trace => Some(view.to_parent().to_vec()),
                _ => None,
            },
        });

        let a = cut.anchor;
        for spec in [
            SideSpec {
                side: Side::Source,
                hops: &hs,
                radius: cut.radii.rs,
                entry: u,
                exit: a,
                terminal_hops: cut.entry_to_anchor_hops,
            },
            SideSpec {
                side: Side::Target,
                hops: &ht,
                radius: cut.radii.rt,
                entry: a,
                exit: w,
                terminal_hops: cut.anchor_to_exit_hops,
            },
        ] {
            self.side(scope, &spec, (u, w), hops, a, depth, path_key)?;
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn side(
        &mut self,
        scope: &Scope<'_>,
        spec: &SideSpec<'_>,
        terminals: (NodeId, NodeId),
        parent_hops: u32,
        anchor: NodeId,
        depth: u32,
        path_key: u64,
    ) -> Result<(), PartitionError> {
        let members: Vec<NodeId> = spec
            .hops
            .reached()
            .iter()
            .copied()
            .filter(|&v| spec.hops.dist_slice()[v as usize] <= spec.radius)
            .collect();
        let view = scope.induce(&members)?;

        let oversized = spec.radius > self.cfg.r_max
            || self.cfg.v_max.is_some_and(|m| view.node_count() > m)
            || self.cfg.e_max.is_some_and(|m| view.edge_count() > m);
        let child_depth = depth + 1;
        let forced = if !oversized {
            None
        } else if anchor == terminals.0 || anchor == terminals.1 {
            Some(ForcedLeaf::AnchorAtEndpoint)
        } else if self.cfg.l_max.is_some_and(|l| child_depth > l) {
            Some(ForcedLeaf::DepthLimit)
        } else if spec.terminal_hops <= 2 {
            Some(ForcedLeaf::ShortTerminals)
        } else if spec.terminal_hops >= parent_hops {
            Some(ForcedLeaf::NoProgress)
        } else {
            let child = Scope::Sub(view);
            let local = |v: NodeId| match &child {
                Scope::Sub(view) => view
                    .local_of(scope.original(v))
                    .expect("terminal inside its sphere"),
                Scope::Root(_) => unreachable!(),
            };
            let (entry, exit) = (local(spec.entry), local(spec.exit));
            let key = mix64(path_key.wrapping_mul(2).wrapping_add(spec.side as u64));
            return self.split(&child, entry, exit, spec.terminal_hops, child_depth, key);
        };

        self.tasks.push(TaskTriple {
            entry: scope.original(spec.entry),
            exit: scope.original(spec.exit),
            subgraph: view,
            depth,
            radius: spec.radius,
            forced,
        });
        Ok(())
    }
}
