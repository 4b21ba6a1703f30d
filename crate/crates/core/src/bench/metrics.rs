//! Gap arithmetic, per-instance aggregation, performance and accuracy
//! profiles, and Pareto dominance.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

/// Relative tolerance below which a negative gap is treated as rounding noise.
pub const GAP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("oracle cost must be positive, got {0}")]
    NonPositiveOracle(f64),
    #[error("cost {cost} is below the oracle {oracle}")]
    BelowOracle { cost: f64, oracle: f64 },
    #[error("time for {method} on instance {instance} must be positive, got {time}")]
    NonPositiveTime {
        instance: usize,
        method: String,
        time: f64,
    },
    #[error("gap for {method} on instance {instance} is negative: {gap}")]
    NegativeGap {
        instance: usize,
        method: String,
        gap: f64,
    },
    #[error("method {method} has {got} instances, expected {expected}")]
    RaggedTable {
        method: String,
        got: usize,
        expected: usize,
    },
    #[error("incomplete run, missing (p, method, q): {}", format_missing(.0))]
    Incomplete(Vec<(u64, String, u64)>),
    #[error("empty sample")]
    Empty,
}

fn format_missing(cells: &[(u64, String, u64)]) -> String {
    cells
        .iter()
        .map(|(p, m, q)| format!("({p}, {m}, {q})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// `(cost - oracle) / oracle`, with tiny negative values clamped to zero.
pub fn gap(cost: f64, oracle: f64) -> Result<f64, MetricError> {
    if oracle <= 0.0 || !oracle.is_finite() {
        return Err(MetricError::NonPositiveOracle(oracle));
    }
    let g = (cost - oracle) / oracle;
    if g < -GAP_TOLERANCE || g.is_nan() {
        return Err(MetricError::BelowOracle { cost, oracle });
    }
    Ok(g.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub median: f64,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

pub fn describe(values: &[f64]) -> Result<Stats, MetricError> {
    if values.is_empty() {
        return Err(MetricError::Empty);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    Ok(Stats {
        median,
        mean,
        std: var.sqrt(),
    })
}

/// One measured (p, q, method) cell, as far as aggregation is concerned.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub p: u64,
    pub q: u64,
    pub method: String,
    pub gap: f64,
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub p: u64,
    pub method: String,
    pub avg_time: f64,
    pub avg_gap: f64,
    pub median_gap: f64,
    pub std_gap: f64,
    pub median_time: f64,
    pub samples: usize,
}

/// Per-(p, method) medians and means over inner seeds.
///
/// Every method in `methods` must have every seed in `inner_seeds` for every
/// p that appears; methods listed in `single_shot` instead need exactly one
/// record per p (any q).
pub fn aggregate(
    samples: &[Sample],
    methods: &[String],
    inner_seeds: &[u64],
    single_shot: &[String],
) -> Result<Vec<Summary>, MetricError> {
    let mut cells: BTreeMap<(u64, String), BTreeMap<u64, (f64, f64)>> = BTreeMap::new();
    let mut ps = BTreeSet::new();
    for s in samples {
        ps.insert(s.p);
        cells
            .entry((s.p, s.method.clone()))
            .or_default()
            .insert(s.q, (s.gap, s.time_s));
    }
    let mut missing = Vec::new();
    for &p in &ps {
        for m in methods {
            let have = cells.get(&(p, m.clone()));
            for &q in inner_seeds {
                if have.is_none_or(|c| !c.contains_key(&q)) {
                    missing.push((p, m.clone(), q));
                }
            }
        }
        for m in single_shot {
            if cells.get(&(p, m.clone())).is_none_or(|c| c.is_empty()) {
                missing.push((p, m.clone(), 0));
            }
        }
    }
    if !missing.is_empty() {
        return Err(MetricError::Incomplete(missing));
    }
    let mut out = Vec::new();
    for ((p, method), by_q) in &cells {
        let gaps: Vec<f64> = by_q.values().map(|v| v.0).collect();
        let times: Vec<f64> = by_q.values().map(|v| v.1).collect();
        let g = describe(&gaps)?;
        let t = describe(&times)?;
        out.push(Summary {
            p: *p,
            method: method.clone(),
            avg_time: t.mean,
            avg_gap: g.mean,
            median_gap: g.median,
            std_gap: g.std,
            median_time: t.median,
            samples: by_q.len(),
        });
    }
    Ok(out)
}

/// Right-continuous step curve: `fraction` holds from its `tau` up to the
/// next breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub method: String,
    pub points: Vec<(f64, f64)>,
}

impl ProfileCurve {
    pub fn eval(&self, tau: f64) -> f64 {
        let idx = self.points.partition_point(|&(x, _)| x <= tau);
        if idx == 0 {
            0.0
        } else {
            self.points[idx - 1].1
        }
    }

    pub fn final_fraction(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.1)
    }
}

/// Every curve is emitted at the union of all methods' achieved values.
fn step_curves(values: &BTreeMap<String, Vec<f64>>) -> Vec<ProfileCurve> {
    let mut taus: Vec<f64> = values.values().flatten().copied().collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    values
        .iter()
        .map(|(method, vals)| {
            let mut sorted = vals.clone();
            sorted.sort_by(f64::total_cmp);
            let n = sorted.len() as f64;
            let points = taus
                .iter()
                .map(|&tau| (tau, sorted.partition_point(|&v| v <= tau) as f64 / n))
                .collect();
            ProfileCurve {
                method: method.clone(),
                points,
            }
        })
        .collect()
}

fn check_rectangular(values: &BTreeMap<String, Vec<f64>>) -> Result<usize, MetricError> {
    let expected = values.values().next().map_or(0, Vec::len);
    if expected == 0 {
        return Err(MetricError::Empty);
    }
    for (method, v) in values {
        if v.len() != expected {
            return Err(MetricError::RaggedTable {
                method: method.clone(),
                got: v.len(),
                expected,
            });
        }
    }
    Ok(expected)
}

/// Runtime profile. `times[method][i]` is the time of `method` on instance `i`.
pub fn performance_profile(
    times: &BTreeMap<String, Vec<f64>>,
) -> Result<Vec<ProfileCurve>, MetricError> {
    let instances = check_rectangular(times)?;
    for (method, v) in times {
        if let Some((i, &t)) = v
            .iter()
            .enumerate()
            .find(|(_, &t)| t <= 0.0 || !t.is_finite())
        {
            return Err(MetricError::NonPositiveTime {
                instance: i,
                method: method.clone(),
                time: t,
            });
        }
    }
    let best: Vec<f64> = (0..instances)
        .map(|i| times.values().map(|v| v[i]).fold(f64::INFINITY, f64::min))
        .collect();
    let ratios = times
        .iter()
        .map(|(m, v)| (m.clone(), v.iter().zip(&best).map(|(t, b)| t / b).collect()))
        .collect();
    Ok(step_curves(&ratios))
}

/// Accuracy profile. `gaps[method][i]` is the gap of `method` on instance `i`.
pub fn accuracy_profile(
    gaps: &BTreeMap<String, Vec<f64>>,
) -> Result<Vec<ProfileCurve>, MetricError> {
    check_rectangular(gaps)?;
    for (method, v) in gaps {
        if let Some((i, &g)) = v.iter().enumerate().find(|(_, &g)| g < 0.0 || g.is_nan()) {
            return Err(MetricError::NegativeGap {
                instance: i,
                method: method.clone(),
                gap: g,
            });
        }
    }
    Ok(step_curves(gaps))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGap {
    pub time: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    Dominates,
    Dominated,
    Equal,
    TradeOff,
}

pub fn dominance(a: TimeGap, b: TimeGap) -> Dominance {
    let a_le = a.time <= b.time && a.gap <= b.gap;
    let b_le = b.time <= a.time && b.gap <= a.gap;
    match (a_le, b_le) {
        (true, true) => Dominance::Equal,
        (true, false) => Dominance::Dominates,
        (false, true) => Dominance::Dominated,
        (false, false) => Dominance::TradeOff,
    }
}

#[derive(Debug, Clone)]
pub struct InstanceVerdict {
    pub instance: String,
    pub against: BTreeMap<String, Dominance>,
}

impl InstanceVerdict {
    pub fn dominates_all(&self) -> bool {
        self.against.values().all(|&d| d == Dominance::Dominates)
    }
}

#[derive(Debug, Clone)]
pub struct ParetoReport {
    pub verdicts: Vec<InstanceVerdict>,
    /// Instances on which the reference dominates each baseline.
    pub counts: BTreeMap<String, usize>,
    /// Instances on which it dominates every baseline at once.
    pub dominates_all: usize,
}

/// Compares `reference` against every other method, instance by instance.
pub fn pareto_dominance(
    table: &[(String, BTreeMap<String, TimeGap>)],
    reference: &str,
) -> ParetoReport {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut verdicts = Vec::with_capacity(table.len());
    for (instance, row) in table {
        let Some(&me) = row.get(reference) else {
            continue;
        };
        let against: BTreeMap<String, Dominance> = row
            .iter()
            .filter(|(m, _)| m.as_str() != reference)
            .map(|(m, &other)| (m.clone(), dominance(me, other)))
            .collect();
        for (m, d) in &against {
            *counts.entry(m.clone()).or_default() += usize::from(*d == Dominance::Dominates);
        }
        verdicts.push(InstanceVerdict {
            instance: instance.clone(),
            against,
        });
    }
    let dominates_all = verdicts.iter().filter(|v| v.dominates_all()).count();
    ParetoReport {
        verdicts,
        counts,
        dominates_all,
    }
}
