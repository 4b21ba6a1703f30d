use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;
use sphere_core::baselines::{corridor_route, dijkstra_full, grow_cells, louvain, louvain_route};
use sphere_core::bench::{
    pareto_dominance, pareto_table, profile_rows, read_summaries, run_experiment, summarize,
    write_profiles, write_records, write_summaries, Metadata, RMaxPolicy, Summary,
};
use sphere_core::generators::{
    geometric_radius, grid_random_weights, path_graph, random_geometric,
};
use sphere_core::graph::{content_hash, largest_component, read_dimacs_file, write_dimacs_gr};
use sphere_core::partition::sph_partition;
use sphere_core::{hop_distance, route as sphere_route, Graph, NodeId, RuleSet, SolverRegistry};

use crate::config::CliConfig;
use crate::error::Failure;
use crate::{BaselineMethod, GraphKind, Output};

/// A loaded graph plus the map back to file ids when it was reduced to one component.
struct Loaded {
    graph: Graph,
    parent: Option<Vec<NodeId>>,
    /// Node count declared by the file.
    file_nodes: usize,
    hash: String,
    path: PathBuf,
}

impl Loaded {
    fn open(cfg: &CliConfig) -> Result<Loaded, Failure> {
        let path = cfg.graph.clone().ok_or_else(|| {
            Failure::usage("no graph given (use --graph, SPHERE_GRAPH or `graph` in the config)")
        })?;
        let hash = content_hash(&path)
            .map_err(|e| Failure::data(format!("cannot read {}: {e}", path.display())))?;
        let d = read_dimacs_file(&path)
            .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
        if d.report.self_loops > 0 {
            eprintln!("note: dropped {} self-loops", d.report.self_loops);
        }
        let file_nodes = d.graph.node_count();
        let (graph, parent) = if cfg.largest_component {
            let view = largest_component(&d.graph);
            let parent = view.to_parent().to_vec();
            (view.into_graph(), Some(parent))
        } else {
            (d.graph, None)
        };
        Ok(Loaded {
            graph,
            parent,
            file_nodes,
            hash,
            path,
        })
    }

    /// 1-based file id to internal id.
    fn internal(&self, id: u64) -> Result<NodeId, Failure> {
        if id == 0 || id > self.file_nodes as u64 {
            return Err(Failure::usage(format!(
                "node {id} is not in 1..={}",
                self.file_nodes
            )));
        }
        let v = (id - 1) as NodeId;
        match &self.parent {
            None => Ok(v),
            Some(p) => p
                .binary_search(&v)
                .map(|i| i as NodeId)
                .map_err(|_| Failure::data(format!("node {id} is outside the largest component"))),
        }
    }

    /// Internal id to 1-based file id.
    fn external(&self, v: NodeId) -> u64 {
        self.parent.as_ref().map_or(v, |p| p[v as usize]) as u64 + 1
    }

    fn metadata(&self, cfg: &CliConfig) -> Metadata {
        let mut m = Metadata::new(concat!("sphere ", env!("CARGO_PKG_VERSION")))
            .with("config_hash", cfg.hash())
            .with("graph_hash", &self.hash)
            .with("graph_nodes", self.graph.node_count())
            .with("graph_edges", self.graph.edge_count());
        for (k, v) in cfg.entries() {
            m.set(&format!("config.{k}"), v);
        }
        m
    }
}

fn write_path_file(
    dest: &Path,
    meta: &Metadata,
    nodes: impl Iterator<Item = u64>,
) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::data(format!("cannot write {}: {e}", dest.display()));
    let mut w = BufWriter::new(File::create(dest).map_err(io)?);
    for (k, v) in &meta.entries {
        writeln!(w, "# {k}={v}").map_err(io)?;
    }
    for v in nodes {
        writeln!(w, "{v}").map_err(io)?;
    }
    w.flush().map_err(io)
}

fn resolve_r_max(cfg: &CliConfig, g: &Graph, s: NodeId, t: NodeId) -> Result<u32, Failure> {
    Ok(match cfg.r_max {
        RMaxPolicy::Fixed(r) => r,
        policy @ RMaxPolicy::HalfHops => policy.resolve(hop_distance(g, s, t)?),
    })
}

pub fn route(
    cfg: &CliConfig,
    out: Output,
    s: u64,
    t: u64,
    emit: Option<&Path>,
) -> Result<(), Failure> {
    let g = Loaded::open(cfg)?;
    let (si, ti) = (g.internal(s)?, g.internal(t)?);
    let r_max = resolve_r_max(cfg, &g.graph, si, ti)?;
    let pcfg = cfg.partition(r_max);
    let solver = SolverRegistry::default().get(&cfg.solver)?;
    let (r, stats) = sphere_route(
        &g.graph,
        si,
        ti,
        &pcfg,
        &RuleSet::for_config(&pcfg),
        solver.as_ref(),
        cfg.workers,
    )?;
    r.validate(&g.graph, si, ti)
        .map_err(|e| Failure::Internal(e.into()))?;
    if let Some(dest) = emit {
        write_path_file(
            dest,
            &g.metadata(cfg),
            r.nodes.iter().map(|&v| g.external(v)),
        )?;
    }
    match out {
        Output::Quiet => {}
        Output::Json => println!(
            "{}",
            json!({
                "s": s, "t": t, "r_max": r_max,
                "cost": r.cost, "nodes": r.nodes.len(),
                "tasks": stats.task_count, "cuts": stats.cut_count, "forced": stats.forced_leaves,
                "max_depth": stats.max_depth,
                "max_subgraph_nodes": stats.max_subgraph_nodes, "max_subgraph_edges": stats.max_subgraph_edges,
                "partition_s": stats.partition_time.as_secs_f64(),
                "solve_s": stats.solve_time.as_secs_f64(),
                "concat_s": stats.concat_time.as_secs_f64(),
                "total_s": stats.total_time.as_secs_f64(),
            })
        ),
        Output::Text => {
            println!("route      {s} -> {t} (r_max {r_max})");
            println!("cost       {}", r.cost);
            println!("nodes      {}", r.nodes.len());
            println!(
                "tasks      {} ({} cuts, {} forced, depth {})",
                stats.task_count, stats.cut_count, stats.forced_leaves, stats.max_depth
            );
            println!(
                "largest    {} nodes, {} edges",
                stats.max_subgraph_nodes, stats.max_subgraph_edges
            );
            println!("partition  {:.6} s", stats.partition_time.as_secs_f64());
            println!("solve      {:.6} s", stats.solve_time.as_secs_f64());
            println!("concat     {:.6} s", stats.concat_time.as_secs_f64());
            println!("total      {:.6} s", stats.total_time.as_secs_f64());
        }
    }
    Ok(())
}

pub fn partition(cfg: &CliConfig, s: u64, t: u64) -> Result<(), Failure> {
    let g = Loaded::open(cfg)?;
    let (si, ti) = (g.internal(s)?, g.internal(t)?);
    let pcfg = cfg.partition(resolve_r_max(cfg, &g.graph, si, ti)?);
    let part = sph_partition(&g.graph, si, ti, &pcfg, &RuleSet::for_config(&pcfg))?;
    let stdout = std::io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    let io = |e: std::io::Error| Failure::data(format!("cannot write output: {e}"));
    for (index, task) in part.tasks.iter().enumerate() {
        let line = json!({
            "index": index,
            "entry": g.external(task.entry),
            "exit": g.external(task.exit),
            "nodes": task.subgraph.node_count(),
            "edges": task.subgraph.edge_count(),
            "radius": task.radius,
            "depth": task.depth,
            "forced": task.forced.map(|f| f.as_str()),
        });
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn baseline(
    cfg: &CliConfig,
    out: Output,
    method: BaselineMethod,
    s: u64,
    t: u64,
    emit: Option<&Path>,
) -> Result<(), Failure> {
    let g = Loaded::open(cfg)?;
    let (si, ti) = (g.internal(s)?, g.internal(t)?);
    let build_start = Instant::now();
    let (path, detail, route_time) = match method {
        BaselineMethod::Dijkstra => {
            let start = Instant::now();
            let p = dijkstra_full(&g.graph, si, ti)?;
            (p, None, start.elapsed())
        }
        BaselineMethod::Corridor => {
            let cells = grow_cells(&g.graph, cfg.k, cfg.seed)?;
            let start = Instant::now();
            let r = corridor_route(&g.graph, &cells, si, ti)?;
            (r.path.clone(), Some((cells.k, r)), start.elapsed())
        }
        BaselineMethod::Louvain => {
            let comms = louvain(&g.graph, cfg.seed);
            let start = Instant::now();
            let r = louvain_route(&g.graph, &comms, si, ti)?;
            (
                r.path.clone(),
                Some((comms.communities, r)),
                start.elapsed(),
            )
        }
    };
    let total = build_start.elapsed();
    path.validate(&g.graph, si, ti)
        .map_err(|e| Failure::Internal(e.into()))?;
    if let Some(dest) = emit {
        write_path_file(
            dest,
            &g.metadata(cfg),
            path.nodes.iter().map(|&v| g.external(v)),
        )?;
    }
    let name = format!("{method:?}").to_lowercase();
    match out {
        Output::Quiet => {}
        Output::Json => {
            let mut v = json!({
                "method": name, "s": s, "t": t,
                "cost": path.cost, "nodes": path.nodes.len(),
                "route_s": route_time.as_secs_f64(), "total_s": total.as_secs_f64(),
            });
            if let Some((groups, r)) = &detail {
                v["groups"] = json!(groups);
                v["coarse_path"] = json!(r.coarse_path.len());
                v["corridor_nodes"] = json!(r.corridor_nodes);
                v["widened"] = json!(r.widened);
                v["fallback"] = json!(r.fallback);
            }
            println!("{v}");
        }
        Output::Text => {
            println!("{name:<10} {s} -> {t}");
            println!("cost       {}", path.cost);
            println!("nodes      {}", path.nodes.len());
            if let Some((groups, r)) = &detail {
                println!(
                    "groups     {groups} ({} on the coarse path, corridor of {} nodes)",
                    r.coarse_path.len(),
                    r.corridor_nodes
                );
                if r.widened || r.fallback {
                    println!("corridor   widened {}, fallback {}", r.widened, r.fallback);
                }
            }
            println!("route      {:.6} s", route_time.as_secs_f64());
            println!("total      {:.6} s", total.as_secs_f64());
        }
    }
    Ok(())
}

fn print_summary(summaries: &[Summary], methods: &[&str]) {
    let mut gaps: std::collections::BTreeMap<&str, Vec<f64>> = Default::default();
    let mut times: std::collections::BTreeMap<&str, Vec<f64>> = Default::default();
    for s in summaries {
        gaps.entry(&s.method).or_default().push(s.median_gap);
        times.entry(&s.method).or_default().push(s.median_time);
    }
    println!(
        "{:<10} {:>12} {:>12} {:>14}",
        "method", "mean gap", "max gap", "mean time (s)"
    );
    for (m, g) in &gaps {
        let t = &times[m];
        println!(
            "{m:<10} {:>12.4} {:>12.4} {:>14.6}",
            g.iter().sum::<f64>() / g.len() as f64,
            g.iter().copied().fold(0.0, f64::max),
            t.iter().sum::<f64>() / t.len() as f64
        );
    }
    if methods.contains(&"sphere") && methods.len() > 1 {
        let report = pareto_dominance(&pareto_table(summaries, methods), "sphere");
        println!(
            "sphere dominates every baseline on {} of {} instances",
            report.dominates_all,
            report.verdicts.len()
        );
    }
}

pub fn bench(cfg: &CliConfig, out: Output) -> Result<(), Failure> {
    let g = Loaded::open(cfg)?;
    let ecfg = cfg.experiment();
    ecfg.validate()?;
    let mut output = run_experiment(&g.graph, &ecfg)?;
    for r in &mut output.records {
        r.s = g.external(r.s) as NodeId - 1;
        r.t = g.external(r.t) as NodeId - 1;
    }
    let methods = ecfg.method_names();
    let summaries = summarize(&output.records, &methods, &ecfg.inner_seeds)
        .map_err(|e| Failure::Internal(e.into()))?;
    let rows = profile_rows(&summaries).map_err(|e| Failure::Internal(e.into()))?;
    let meta = g.metadata(cfg).with("graph_path", g.path.display()).with(
        "oracle",
        "dijkstra once per problem seed, recorded with q=0",
    );
    let dir = &cfg.output_dir;
    let files = [
        dir.join("records.csv"),
        dir.join("summary.csv"),
        dir.join("profiles.csv"),
    ];
    let csv = |e: sphere_core::bench::CsvError| Failure::Data(e.into());
    write_records(&files[0], &meta, &output.records).map_err(csv)?;
    write_summaries(&files[1], &meta, &summaries).map_err(csv)?;
    write_profiles(&files[2], &meta, &rows).map_err(csv)?;
    let names: Vec<&str> = methods.iter().map(String::as_str).collect();
    match out {
        Output::Quiet => {}
        Output::Json => {
            let report = pareto_dominance(&pareto_table(&summaries, &names), "sphere");
            println!(
                "{}",
                json!({
                    "records": output.records.len(),
                    "files": files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
                    "sphere_dominates_all": report.dominates_all,
                    "instances": report.verdicts.len(),
                })
            );
        }
        Output::Text => {
            println!(
                "{} records over {} problem seeds",
                output.records.len(),
                ecfg.problem_seeds.len()
            );
            print_summary(&summaries, &names);
            for f in &files {
                println!("wrote {}", f.display());
            }
        }
    }
    Ok(())
}

pub fn profiles(
    cfg: &CliConfig,
    out: Output,
    input: Option<PathBuf>,
    dest: Option<PathBuf>,
) -> Result<(), Failure> {
    let input = input.unwrap_or_else(|| cfg.output_dir.join("summary.csv"));
    let dest = dest.unwrap_or_else(|| cfg.output_dir.join("profiles.csv"));
    let (mut meta, summaries) = read_summaries(&input).map_err(|e| Failure::Data(e.into()))?;
    let rows =
        profile_rows(&summaries).map_err(|e| Failure::data(format!("{}: {e}", input.display())))?;
    meta.set("profiles_from", input.display());
    meta.set("config_hash", cfg.hash());
    write_profiles(&dest, &meta, &rows).map_err(|e| Failure::Data(e.into()))?;
    match out {
        Output::Quiet => {}
        Output::Json => println!(
            "{}",
            json!({"rows": rows.len(), "file": dest.display().to_string()})
        ),
        Output::Text => println!("wrote {} profile points to {}", rows.len(), dest.display()),
    }
    Ok(())
}

/// Rounds weights to positive integers so the file is plain DIMACS.
fn integral(g: &Graph) -> Graph {
    let edges: Vec<_> = g
        .edges()
        .map(|(u, v, w)| (u, v, w.round().max(1.0)))
        .collect();
    Graph::from_edge_list(g.node_count(), &edges)
}

pub fn generate(
    out: Output,
    kind: GraphKind,
    nodes: usize,
    width: usize,
    height: usize,
    seed: u64,
    dest: &Path,
) -> Result<(), Failure> {
    let g = match kind {
        GraphKind::Path if nodes >= 2 => path_graph(nodes),
        GraphKind::Grid if width * height >= 2 => {
            integral(&grid_random_weights(width, height, 1.0, 10.0, seed))
        }
        GraphKind::Rgg if nodes >= 2 => {
            integral(&random_geometric(nodes, geometric_radius(nodes), seed))
        }
        _ => return Err(Failure::usage("a generated graph needs at least 2 nodes")),
    };
    let io = |e: std::io::Error| Failure::data(format!("cannot write {}: {e}", dest.display()));
    write_dimacs_gr(&g, BufWriter::new(File::create(dest).map_err(io)?)).map_err(io)?;
    match out {
        Output::Quiet => {}
        Output::Json => println!(
            "{}",
            json!({"nodes": g.node_count(), "edges": g.edge_count(), "file": dest.display().to_string()})
        ),
        Output::Text => println!(
            "wrote {} nodes, {} edges to {}",
            g.node_count(),
            g.edge_count(),
            dest.display()
        ),
    }
    Ok(())
}
