//! CSV tables with a leading `# key=value` metadata block.

use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ExperimentRecord, ProfileRow, Summary};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unsupported schema `{0}`, expected {SCHEMA_VERSION}")]
    Schema(String),
    #[error("node id 0 in a 1-based column")]
    ZeroNodeId,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    pub entries: Vec<(String, String)>,
}

impl Metadata {
    /// Tool name and version, schema version and a Unix timestamp.
    pub fn new(tool: &str) -> Metadata {
        let ts = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Metadata::default()
            .with("tool", tool)
            .with("schema", SCHEMA_VERSION)
            .with("timestamp", ts)
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Metadata {
        self.set(key, value);
        self
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string().replace('\n', " ");
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(w, "# {k}={v}")?;
        }
        Ok(())
    }

    /// Splits the leading comment block off `text`.
    fn parse(text: &str) -> (Metadata, &str) {
        let mut meta = Metadata::default();
        let mut rest = text;
        while let Some(line) = rest.strip_prefix('#') {
            let (line, tail) = line.split_once('\n').unwrap_or((line, ""));
            if let Some((k, v)) = line.trim().split_once('=') {
                meta.entries
                    .push((k.trim().to_string(), v.trim().to_string()));
            }
            rest = tail;
        }
        (meta, rest)
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CsvError + '_ {
    move |source| CsvError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_table<T: Serialize>(
    path: &Path,
    meta: &Metadata,
    rows: impl IntoIterator<Item = T>,
) -> Result<(), CsvError> {
    let mut buf = Vec::new();
    meta.write_to(&mut buf).map_err(io_err(path))?;
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush().map_err(io_err(path))?;
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(path))?;
    }
    fs::write(path, buf).map_err(io_err(path))
}

fn read_table<T: DeserializeOwned>(path: &Path) -> Result<(Metadata, Vec<T>), CsvError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let (meta, body) = Metadata::parse(&text);
    if let Some(v) = meta.get("schema") {
        if v != SCHEMA_VERSION.to_string() {
            return Err(CsvError::Schema(v.to_string()));
        }
    }
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let rows = r.deserialize().collect::<Result<Vec<T>, _>>()?;
    Ok((meta, rows))
}

#[derive(Serialize, Deserialize)]
struct RecordRow {
    #[serde(rename = "schema=1")]
    schema: u32,
    p: u64,
    q: u64,
    method: String,
    s: u64,
    t: u64,
    cost: f64,
    oracle: f64,
    gap: f64,
    time_s: f64,
    tasks: usize,
    fallback: bool,
}

/// Records CSV; node ids are written 1-based.
pub fn write_records(
    path: &Path,
    meta: &Metadata,
    records: &[ExperimentRecord],
) -> Result<(), CsvError> {
    write_table(
        path,
        meta,
        records.iter().map(|r| RecordRow {
            schema: SCHEMA_VERSION,
            p: r.p,
            q: r.q,
            method: r.method.clone(),
            s: r.s as u64 + 1,
            t: r.t as u64 + 1,
            cost: r.cost,
            oracle: r.oracle,
            gap: r.gap,
            time_s: r.time_s,
            tasks: r.tasks,
            fallback: r.fallback,
        }),
    )
}

pub fn read_records(path: &Path) -> Result<(Metadata, Vec<ExperimentRecord>), CsvError> {
    let (meta, rows) = read_table::<RecordRow>(path)?;
    let records = rows
        .into_iter()
        .map(|r| {
            if r.schema != SCHEMA_VERSION {
                return Err(CsvError::Schema(r.schema.to_string()));
            }
            if r.s == 0 || r.t == 0 {
                return Err(CsvError::ZeroNodeId);
            }
            Ok(ExperimentRecord {
                p: r.p,
                q: r.q,
                method: r.method,
                s: (r.s - 1) as u32,
                t: (r.t - 1) as u32,
                cost: r.cost,
                oracle: r.oracle,
                gap: r.gap,
                time_s: r.time_s,
                tasks: r.tasks,
                fallback: r.fallback,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((meta, records))
}

#[derive(Serialize, Deserialize)]
struct SummaryRow {
    p: u64,
    method: String,
    avg_time: f64,
    avg_gap: f64,
    median_gap: f64,
    std_gap: f64,
    median_time: f64,
    samples: usize,
}

pub fn write_summaries(
    path: &Path,
    meta: &Metadata,
    summaries: &[Summary],
) -> Result<(), CsvError> {
    write_table(
        path,
        meta,
        summaries.iter().map(|s| SummaryRow {
            p: s.p,
            method: s.method.clone(),
            avg_time: s.avg_time,
            avg_gap: s.avg_gap,
            median_gap: s.median_gap,
            std_gap: s.std_gap,
            median_time: s.median_time,
            samples: s.samples,
        }),
    )
}

pub fn read_summaries(path: &Path) -> Result<(Metadata, Vec<Summary>), CsvError> {
    let (meta, rows) = read_table::<SummaryRow>(path)?;
    let out = rows
        .into_iter()
        .map(|s| Summary {
            p: s.p,
            method: s.method,
            avg_time: s.avg_time,
            avg_gap: s.avg_gap,
            median_gap: s.median_gap,
            std_gap: s.std_gap,
            median_time: s.median_time,
            samples: s.samples,
        })
        .collect();
    Ok((meta, out))
}

#[derive(Serialize, Deserialize)]
struct ProfileCsvRow {
    kind: String,
    basis: String,
    method: String,
    tau: f64,
    fraction: f64,
}

pub fn write_profiles(path: &Path, meta: &Metadata, rows: &[ProfileRow]) -> Result<(), CsvError> {
    write_table(
        path,
        meta,
        rows.iter().map(|r| ProfileCsvRow {
            kind: r.kind.clone(),
            basis: r.basis.clone(),
            method: r.method.clone(),
            tau: r.tau,
            fraction: r.fraction,
        }),
    )
}

pub fn read_profiles(path: &Path) -> Result<(Metadata, Vec<ProfileRow>), CsvError> {
    let (meta, rows) = read_table::<ProfileCsvRow>(path)?;
    let out = rows
        .into_iter()
        .map(|r| ProfileRow {
            kind: r.kind,
            basis: r.basis,
            method: r.method,
            tau: r.tau,
            fraction: r.fraction,
        })
        .collect();
    Ok((meta, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(q: u64, gap: f64) -> ExperimentRecord {
        ExperimentRecord {
            p: 3,
            q,
            method: "sphere".into(),
            s: 0,
            t: 41,
            cost: 1.0 + gap,
            oracle: 1.0,
            gap,
            time_s: 0.1 + 1e-17 * q as f64,
            tasks: 2,
            fallback: false,
        }
    }

    #[test]
    fn records_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        let records: Vec<_> = (1..=5).map(|q| record(q, 0.1 / q as f64)).collect();
        let meta = Metadata::new("sphere 0.1.0").with("config_hash", "abc");
        write_records(&path, &meta, &records).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains("\nschema=1,p,q,method,s,t,cost,oracle,gap,time_s,tasks,fallback\n"));
        assert!(text.contains("\n1,3,1,sphere,1,42,"));
        assert!(!text.contains('\r'));
        let (back_meta, back) = read_records(&path).unwrap();
        assert_eq!(back, records);
        assert_eq!(back_meta.get("config_hash"), Some("abc"));
        assert_eq!(back_meta.get("schema"), Some("1"));
    }

    #[test]
    fn metadata_parse_stops_at_header() {
        let (meta, rest) = Metadata::parse("# a=1\n# b = two\nx,y\n1,2\n");
        assert_eq!(meta.get("a"), Some("1"));
        assert_eq!(meta.get("b"), Some("two"));
        assert_eq!(rest, "x,y\n1,2\n");
    }

    #[test]
    fn wrong_schema_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        fs::write(&path, "# schema=2\nkind,basis,method,tau,fraction\n").unwrap();
        assert!(matches!(read_profiles(&path), Err(CsvError::Schema(_))));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            read_summaries(Path::new("/nonexistent/summary.csv")),
            Err(CsvError::Io { .. })
        ));
    }
}
