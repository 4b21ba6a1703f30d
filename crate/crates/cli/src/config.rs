//! Layered configuration: flag > `SPHERE_*` environment > flat TOML file > defaults.
//!
//! Flags and environment variables are both handled by clap, so by the time
//! [`Overrides`] reaches [`CliConfig::resolve`] an explicit value already
//! outranks the file.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use sphere_core::bench::{ExperimentConfig, Method, RMaxPolicy};
use sphere_core::PartitionConfig;

use crate::error::Failure;

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Flat TOML config file.
    #[arg(long, global = true, env = "SPHERE_CONFIG", value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// DIMACS `.gr` graph, optionally gzip-compressed.
    #[arg(long, global = true, env = "SPHERE_GRAPH", value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Keep only the largest connected component after loading.
    #[arg(long, global = true, env = "SPHERE_LARGEST_COMPONENT", num_args = 0..=1, default_missing_value = "true")]
    pub largest_component: Option<bool>,
    /// Seed for the anchor rule and the baselines.
    #[arg(long, global = true, env = "SPHERE_SEED")]
    pub seed: Option<u64>,
    /// Radius cap, or `half-hops` for ceil(hops / 2) per pair.
    #[arg(long, global = true, env = "SPHERE_R_MAX", value_parser = parse_r_max)]
    pub r_max: Option<RMaxPolicy>,
    /// Cell count of the corridor baseline.
    #[arg(long, global = true, env = "SPHERE_K")]
    pub k: Option<usize>,
    /// Worker threads for leaf solves.
    #[arg(long, global = true, env = "SPHERE_WORKERS")]
    pub workers: Option<usize>,
    /// Leaf solver name.
    #[arg(long, global = true, env = "SPHERE_SOLVER")]
    pub solver: Option<String>,
    /// Directory for CSV outputs.
    #[arg(long, global = true, env = "SPHERE_OUTPUT_DIR", value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// Problem seeds, e.g. `1-30` or `1,4,9`.
    #[arg(long, global = true, env = "SPHERE_PROBLEM_SEEDS", value_parser = parse_seed_list)]
    pub problem_seeds: Option<SeedList>,
    /// Inner seeds, e.g. `1-5`.
    #[arg(long, global = true, env = "SPHERE_INNER_SEEDS", value_parser = parse_seed_list)]
    pub inner_seeds: Option<SeedList>,
    /// Comma-separated bench methods.
    #[arg(long, global = true, env = "SPHERE_METHODS", value_parser = parse_methods)]
    pub methods: Option<MethodList>,
    /// Run each method once before measuring (`--warmup=false` to skip).
    #[arg(long, global = true, env = "SPHERE_WARMUP", num_args = 0..=1, default_missing_value = "true")]
    pub warmup: Option<bool>,
    /// Minimum overlap size kept by each cut.
    #[arg(long, global = true, env = "SPHERE_EPS_OVERLAP")]
    pub eps_overlap: Option<usize>,
    /// Maximum recursion depth.
    #[arg(long, global = true, env = "SPHERE_L_MAX")]
    pub l_max: Option<u32>,
    /// Node cap per leaf subgraph.
    #[arg(long, global = true, env = "SPHERE_V_MAX")]
    pub v_max: Option<usize>,
    /// Edge cap per leaf subgraph.
    #[arg(long, global = true, env = "SPHERE_E_MAX")]
    pub e_max: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedList(pub Vec<u64>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodList(pub Vec<Method>);

fn parse_r_max(s: &str) -> Result<RMaxPolicy, String> {
    match s.parse()? {
        RMaxPolicy::Fixed(0) => Err("r_max must be at least 1".into()),
        p => Ok(p),
    }
}

pub fn parse_seed_list(s: &str) -> Result<SeedList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |x: &str| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| format!("bad seed `{x}` in `{s}`"))
        };
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty seed range `{part}`"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        return Err(format!("no seeds in `{s}`"));
    }
    Ok(SeedList(out))
}

fn parse_methods(s: &str) -> Result<MethodList, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::parse)
        .collect::<Result<Vec<_>, _>>()
        .map(MethodList)
}

/// Seeds in a file may be an integer array or a range string.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FileSeeds {
    List(Vec<u64>),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FileRMax {
    Int(u32),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    graph: Option<PathBuf>,
    largest_component: Option<bool>,
    seed: Option<u64>,
    r_max: Option<FileRMax>,
    k: Option<usize>,
    workers: Option<usize>,
    solver: Option<String>,
    output_dir: Option<PathBuf>,
    problem_seeds: Option<FileSeeds>,
    inner_seeds: Option<FileSeeds>,
    methods: Option<Vec<String>>,
    warmup: Option<bool>,
    eps_overlap: Option<usize>,
    l_max: Option<u32>,
    v_max: Option<usize>,
    e_max: Option<usize>,
}

fn read_file(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::data(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| Failure::data(format!("invalid config {}: {e}", path.display())))
}

fn seeds_from_file(v: FileSeeds) -> Result<Vec<u64>, Failure> {
    match v {
        FileSeeds::List(l) => Ok(l),
        FileSeeds::Text(s) => parse_seed_list(&s).map(|l| l.0).map_err(Failure::usage),
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Fully resolved settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub graph: Option<PathBuf>,
    pub largest_component: bool,
    pub seed: u64,
    pub r_max: RMaxPolicy,
    pub k: usize,
    pub workers: usize,
    pub solver: String,
    pub output_dir: PathBuf,
    pub problem_seeds: Vec<u64>,
    pub inner_seeds: Vec<u64>,
    pub methods: Vec<Method>,
    pub warmup: bool,
    pub eps_overlap: usize,
    pub l_max: Option<u32>,
    pub v_max: Option<usize>,
    pub e_max: Option<usize>,
}

impl Default for CliConfig {
    fn default() -> Self {
        let bench = ExperimentConfig::default();
        let part = PartitionConfig::default();
        CliConfig {
            graph: None,
            largest_component: false,
            seed: part.rng_seed,
            r_max: RMaxPolicy::Fixed(part.r_max),
            k: bench.k,
            workers: default_workers(),
            solver: "dijkstra".into(),
            output_dir: PathBuf::from("results"),
            problem_seeds: bench.problem_seeds,
            inner_seeds: bench.inner_seeds,
            methods: bench.methods,
            warmup: bench.warmup,
            eps_overlap: part.eps_overlap,
            l_max: part.l_max,
            v_max: part.v_max,
            e_max: part.e_max,
        }
    }
}

impl CliConfig {
    pub fn resolve(o: &Overrides) -> Result<CliConfig, Failure> {
        let file = match &o.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let d = CliConfig::default();
        let file_r_max = match file.r_max {
            Some(FileRMax::Int(r)) => Some(parse_r_max(&r.to_string()).map_err(Failure::usage)?),
            Some(FileRMax::Text(s)) => Some(parse_r_max(&s).map_err(Failure::usage)?),
            None => None,
        };
        let file_methods = file
            .methods
            .map(|m| parse_methods(&m.join(",")).map(|l| l.0))
            .transpose()
            .map_err(Failure::usage)?;
        let cfg = CliConfig {
            graph: o.graph.clone().or(file.graph),
            largest_component: o
                .largest_component
                .or(file.largest_component)
                .unwrap_or(d.largest_component),
            seed: o.seed.or(file.seed).unwrap_or(d.seed),
            r_max: o.r_max.or(file_r_max).unwrap_or(d.r_max),
            k: o.k.or(file.k).unwrap_or(d.k),
            workers: o.workers.or(file.workers).unwrap_or(d.workers),
            solver: o.solver.clone().or(file.solver).unwrap_or(d.solver),
            output_dir: o
                .output_dir
                .clone()
                .or(file.output_dir)
                .unwrap_or(d.output_dir),
            problem_seeds: match (&o.problem_seeds, file.problem_seeds) {
                (Some(l), _) => l.0.clone(),
                (None, Some(f)) => seeds_from_file(f)?,
                (None, None) => d.problem_seeds,
            },
            inner_seeds: match (&o.inner_seeds, file.inner_seeds) {
                (Some(l), _) => l.0.clone(),
                (None, Some(f)) => seeds_from_file(f)?,
                (None, None) => d.inner_seeds,
            },
            methods: o
                .methods
                .clone()
                .map(|m| m.0)
                .or(file_methods)
                .unwrap_or(d.methods),
            warmup: o.warmup.or(file.warmup).unwrap_or(d.warmup),
            eps_overlap: o.eps_overlap.or(file.eps_overlap).unwrap_or(d.eps_overlap),
            l_max: o.l_max.or(file.l_max).or(d.l_max),
            v_max: o.v_max.or(file.v_max).or(d.v_max),
            e_max: o.e_max.or(file.e_max).or(d.e_max),
        };
        if cfg.workers == 0 {
            return Err(Failure::usage("workers must be at least 1"));
        }
        if cfg.k < 2 {
            return Err(Failure::usage("k must be at least 2"));
        }
        Ok(cfg)
    }

    /// Canonical `key=value` pairs, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        let seeds = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        vec![
            (
                "graph",
                opt(self.graph.as_ref().map(|p| p.display().to_string())),
            ),
            ("largest_component", self.largest_component.to_string()),
            ("seed", self.seed.to_string()),
            ("r_max", self.r_max.to_string()),
            ("k", self.k.to_string()),
            ("workers", self.workers.to_string()),
            ("solver", self.solver.clone()),
            ("output_dir", self.output_dir.display().to_string()),
            ("problem_seeds", seeds(&self.problem_seeds)),
            ("inner_seeds", seeds(&self.inner_seeds)),
            (
                "methods",
                self.methods
                    .iter()
                    .map(|m| m.as_str())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("warmup", self.warmup.to_string()),
            ("eps_overlap", self.eps_overlap.to_string()),
            ("l_max", opt(self.l_max.map(|v| v.to_string()))),
            ("v_max", opt(self.v_max.map(|v| v.to_string()))),
            ("e_max", opt(self.e_max.map(|v| v.to_string()))),
        ]
    }

    /// Hex SHA-256 of [`CliConfig::entries`] without `output_dir`, which
    /// changes where results land but not what they contain.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self
            .entries()
            .into_iter()
            .filter(|(k, _)| *k != "output_dir")
        {
            h.update(format!("{k}={v}\n"));
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn partition(&self, r_max: u32) -> PartitionConfig {
        PartitionConfig {
            eps_overlap: self.eps_overlap,
            l_max: self.l_max,
            v_max: self.v_max,
            e_max: self.e_max,
            ..PartitionConfig::with_r_max(r_max).seeded(self.seed)
        }
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            problem_seeds: self.problem_seeds.clone(),
            inner_seeds: self.inner_seeds.clone(),
            methods: self.methods.clone(),
            r_max: self.r_max,
            k: self.k,
            workers: self.workers,
            partition: self.partition(1),
            warmup: self.warmup,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(text: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), text).unwrap();
        f
    }

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seed_list("1-3,7").unwrap().0, vec![1, 2, 3, 7]);
        assert_eq!(parse_seed_list(" 4 ").unwrap().0, vec![4]);
        assert!(parse_seed_list("3-1").is_err());
        assert!(parse_seed_list("").is_err());
        assert!(parse_seed_list("x").is_err());
    }

    #[test]
    fn flag_beats_file_beats_default() {
        let f = write("r_max = 40\nk = 8\nproblem_seeds = \"1-4\"\nmethods = [\"sphere\"]\n");
        let o = Overrides {
            config: Some(f.path().to_path_buf()),
            k: Some(16),
            ..Overrides::default()
        };
        let c = CliConfig::resolve(&o).unwrap();
        assert_eq!(c.k, 16);
        assert_eq!(c.r_max, RMaxPolicy::Fixed(40));
        assert_eq!(c.problem_seeds, vec![1, 2, 3, 4]);
        assert_eq!(c.methods, vec![Method::Sphere]);
        assert_eq!(c.inner_seeds, CliConfig::default().inner_seeds);
    }

    #[test]
    fn half_hops_in_file() {
        let f = write("r_max = \"half-hops\"\ninner_seeds = [2, 3]\n");
        let o = Overrides {
            config: Some(f.path().to_path_buf()),
            ..Overrides::default()
        };
        let c = CliConfig::resolve(&o).unwrap();
        assert_eq!(c.r_max, RMaxPolicy::HalfHops);
        assert_eq!(c.inner_seeds, vec![2, 3]);
    }

    #[test]
    fn bad_files_are_data_errors() {
        let missing = Overrides {
            config: Some(PathBuf::from("/nonexistent/sphere.toml")),
            ..Overrides::default()
        };
        assert_eq!(CliConfig::resolve(&missing).unwrap_err().code(), 2);
        let f = write("colour = 3\n");
        let unknown = Overrides {
            config: Some(f.path().to_path_buf()),
            ..Overrides::default()
        };
        assert_eq!(CliConfig::resolve(&unknown).unwrap_err().code(), 2);
    }

    #[test]
    fn hash_tracks_every_field() {
        let a = CliConfig::default();
        let b = CliConfig {
            seed: a.seed + 1,
            ..a.clone()
        };
        assert_eq!(a.hash(), a.clone().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        let moved = CliConfig {
            output_dir: "elsewhere".into(),
            ..a.clone()
        };
        assert_eq!(a.hash(), moved.hash());
    }
}
