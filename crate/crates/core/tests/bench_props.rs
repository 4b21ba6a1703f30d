use std::collections::BTreeMap;
use std::path::Path;

use sphere_core::bench::{
    pareto_dominance, profile_rows, read_records, run_experiment, sample_st, summarize,
    write_records, Dominance, ExperimentConfig, Metadata, Method, RMaxPolicy, TimeGap,
    GAP_TOLERANCE,
};
use sphere_core::generators::grid_random_weights;
use sphere_core::Graph;

pub fn published_table() -> Vec<(String, BTreeMap<String, TimeGap>)> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/west_usa_routing.csv");
    let mut reader = csv::Reader::from_path(path).unwrap();
    let mut rows: Vec<(String, BTreeMap<String, TimeGap>)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.unwrap();
        let instance = rec[0].to_string();
        let tg = TimeGap {
            time: rec[2].parse().unwrap(),
            gap: rec[3].parse().unwrap(),
        };
        if rows.last().is_none_or(|(i, _)| *i != instance) {
            rows.push((instance.clone(), BTreeMap::new()));
        }
        rows.last_mut().unwrap().1.insert(rec[1].to_string(), tg);
    }
    rows
}

#[test]
fn published_rows_first_and_last() {
    let table = published_table();
    assert_eq!(table.len(), 30);
    let report = pareto_dominance(&table, "sphere");
    let p1 = &report.verdicts[0];
    assert_eq!(p1.instance, "P1");
    assert!(p1.dominates_all());
    let p30 = report
        .verdicts
        .iter()
        .find(|v| v.instance == "P30")
        .unwrap();
    assert_eq!(p30.against["corridor"], Dominance::TradeOff);
}

#[test]
fn published_dominance_count() {
    let report = pareto_dominance(&published_table(), "sphere");
    let failing: Vec<&str> = report
        .verdicts
        .iter()
        .filter(|v| !v.dominates_all())
        .map(|v| v.instance.as_str())
        .collect();
    assert_eq!(failing, vec!["P12", "P18", "P30"]);
    assert_eq!(report.dominates_all, 27);
    assert_eq!(report.counts["louvain"], 29);
    let p30 = report
        .verdicts
        .iter()
        .find(|v| v.instance == "P30")
        .unwrap();
    assert_eq!(p30.against["louvain"], Dominance::TradeOff);
}

#[test]
fn clique_pairs_are_uniform() {
    let mut edges = Vec::new();
    for u in 0..5 {
        for v in u + 1..5 {
            edges.push((u, v, 1.0));
        }
    }
    let g = Graph::from_edge_list(5, &edges);
    let mut counts = BTreeMap::new();
    for p in 0..10_000u64 {
        let pair = sample_st(&g, p).unwrap();
        assert_ne!(pair.s, pair.t);
        *counts.entry((pair.s, pair.t)).or_insert(0u32) += 1;
    }
    assert_eq!(counts.len(), 20);
    let sigma = (10_000.0f64 * 0.05 * 0.95).sqrt();
    for (&pair, &c) in &counts {
        assert!((c as f64 - 500.0).abs() <= 4.0 * sigma, "{pair:?}: {c}");
    }
}

#[test]
fn csv_round_trip_preserves_statistics() {
    let g = grid_random_weights(15, 15, 1.0, 10.0, 1);
    let cfg = ExperimentConfig {
        problem_seeds: vec![1, 2, 3, 4],
        inner_seeds: vec![1, 2, 3],
        methods: vec![Method::Sphere, Method::Corridor],
        r_max: RMaxPolicy::HalfHops,
        k: 6,
        warmup: false,
        ..ExperimentConfig::default()
    };
    let out = run_experiment(&g, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.csv");
    write_records(&path, &Metadata::new("test"), &out.records).unwrap();
    let (_, back) = read_records(&path).unwrap();
    assert_eq!(back, out.records);
    let a = summarize(&out.records, &cfg.method_names(), &cfg.inner_seeds).unwrap();
    let b = summarize(&back, &cfg.method_names(), &cfg.inner_seeds).unwrap();
    assert_eq!(a, b);

    for r in &out.records {
        let oracle = out
            .records
            .iter()
            .find(|o| o.p == r.p && o.method == "dijkstra")
            .unwrap();
        assert_eq!(r.oracle.to_bits(), oracle.cost.to_bits());
        assert!(r.cost >= r.oracle * (1.0 - GAP_TOLERANCE));
        assert!(r.gap >= 0.0);
    }

    let rows = profile_rows(&a).unwrap();
    let mut series: BTreeMap<(String, String, String), Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        series
            .entry((r.kind, r.basis, r.method))
            .or_default()
            .push((r.tau, r.fraction));
    }
    assert_eq!(series.len(), 2 * 2 * 3);
    for ((kind, _, _), pts) in &series {
        assert!(pts.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
        assert_eq!(pts.last().unwrap().1, 1.0);
        if kind == "runtime" {
            assert!(pts[0].0 >= 1.0);
        }
    }
}
