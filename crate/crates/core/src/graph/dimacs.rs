//! DIMACS shortest-path `.gr` reader and writer.
//!
//! Files list directed arcs `a u v w` with 1-based ids; road networks list
//! both directions of every street. Arcs are collapsed into undirected edges,
//! keeping the minimum weight when the two directions disagree.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use thiserror::Error;

use super::{BuildReport, Graph, GraphError, NodeId};

#[derive(Debug, Error)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing problem line `p sp <n> <m>`")]
    MissingProblemLine,
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl DimacsError {
    pub fn line(&self) -> Option<usize> {
        match self {
            DimacsError::Syntax { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// A parsed `.gr` file plus ingestion diagnostics.
#[derive(Debug, Clone)]
pub struct DimacsGraph {
    pub graph: Graph,
    /// Arc count declared on the problem line.
    pub declared_arcs: usize,
    pub arcs_read: usize,
    pub report: BuildReport,
}

fn syntax(line: usize, message: impl Into<String>) -> DimacsError {
    DimacsError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_dimacs_gr<R: BufRead>(reader: R) -> Result<DimacsGraph, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(NodeId, NodeId, f64)> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let mut fields = line.split_ascii_whitespace();
        let Some(tag) = fields.next() else {
            continue;
        };
        match tag {
            "c" => {}
            "p" => {
                if header.is_some() {
                    return Err(syntax(line_no, "duplicate problem line"));
                }
                let rest: Vec<&str> = fields.collect();
                let (n, m) = match rest.as_slice() {
                    ["sp", n, m] => (
                        n.parse::<usize>()
                            .map_err(|_| syntax(line_no, format!("malformed node count `{n}`")))?,
                        m.parse::<usize>()
                            .map_err(|_| syntax(line_no, format!("malformed arc count `{m}`")))?,
                    ),
                    _ => {
                        return Err(syntax(
                            line_no,
                            "malformed problem line, expected `p sp <n> <m>`",
                        ))
                    }
                };
                if n == 0 {
                    return Err(syntax(line_no, "problem line declares zero nodes"));
                }
                if n > NodeId::MAX as usize {
                    return Err(syntax(
                        line_no,
                        format!("node count {n} exceeds 32-bit ids"),
                    ));
                }
                edges.reserve(m);
                header = Some((n, m));
            }
            "a" => {
                let Some((n, _)) = header else {
                    return Err(syntax(line_no, "arc before problem line"));
                };
                let rest: Vec<&str> = fields.collect();
                let [u, v, w] = rest.as_slice() else {
                    return Err(syntax(
                        line_no,
                        "malformed arc line, expected `a <u> <v> <w>`",
                    ));
                };
                let parse_id = |s: &str| -> Result<NodeId, DimacsError> {
                    let id: u64 = s
                        .parse()
                        .map_err(|_| syntax(line_no, format!("malformed node id `{s}`")))?;
                    if id == 0 || id > n as u64 {
                        return Err(syntax(
                            line_no,
                            format!("node id {id} out of range 1..={n}"),
                        ));
                    }
                    Ok((id - 1) as NodeId)
                };
                let u = parse_id(u)?;
                let v = parse_id(v)?;
                let w: f64 = w
                    .parse()
                    .map_err(|_| syntax(line_no, format!("malformed weight `{w}`")))?;
                if !(w > 0.0 && w.is_finite()) {
                    return Err(syntax(line_no, format!("non-positive weight {w}")));
                }
                edges.push((u, v, w));
            }
            other => return Err(syntax(line_no, format!("unknown line type `{other}`"))),
        }
    }

    let (n, declared_arcs) = header.ok_or(DimacsError::MissingProblemLine)?;
    let arcs_read = edges.len();
    let (graph, report) = Graph::from_edges(n, edges)?;
    Ok(DimacsGraph {
        graph,
        declared_arcs,
        arcs_read,
        report,
    })
}

/// Reads a `.gr` file, transparently decompressing gzip input.
pub fn read_dimacs_file(path: &Path) -> Result<DimacsGraph, DimacsError> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic)?;
    let file = File::open(path)?;
    if n == 2 && magic == [0x1f, 0x8b] {
        parse_dimacs_gr(BufReader::new(MultiGzDecoder::new(file)))
    } else {
        parse_dimacs_gr(BufReader::new(file))
    }
}

fn format_weight(w: f64) -> String {
    if w.fract() == 0.0 && w.abs() < 9.007_199_254_740_992e15 {
        format!("{}", w as i64)
    } else {
        format!("{w}")
    }
}

/// Writes `g` as a `.gr` file listing both directions of every edge.
pub fn write_dimacs_gr<W: Write>(g: &Graph, mut out: W) -> io::Result<()> {
    writeln!(out, "c undirected graph, both arc directions listed")?;
    writeln!(out, "p sp {} {}", g.node_count(), 2 * g.edge_count())?;
    for (u, v, w) in g.edges() {
        let w = format_weight(w);
        writeln!(out, "a {} {} {}", u + 1, v + 1, w)?;
        writeln!(out, "a {} {} {}", v + 1, u + 1, w)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<DimacsGraph, DimacsError> {
        parse_dimacs_gr(text.as_bytes())
    }

    #[test]
    fn transcribes_listed_arcs() {
        let d = parse("p sp 3 2\na 1 2 5\na 2 3 7").unwrap();
        assert_eq!(d.graph.node_count(), 3);
        let edges: Vec<_> = d.graph.edges().collect();
        assert_eq!(edges, vec![(0, 1, 5.0), (1, 2, 7.0)]);
    }

    #[test]
    fn symmetric_pair_collapses() {
        let d = parse("p sp 2 2\na 1 2 4\na 2 1 4").unwrap();
        assert_eq!(d.graph.edge_count(), 1);
        assert_eq!(d.graph.edge_weight(0, 1), Some(4.0));
        assert_eq!(d.report.conflicting_duplicates, 0);
    }

    #[test]
    fn asymmetric_pair_keeps_minimum_and_warns() {
        let d = parse("c road\np sp 2 2\na 1 2 4\na 2 1 3\n").unwrap();
        assert_eq!(d.graph.edge_weight(0, 1), Some(3.0));
        assert_eq!(d.report.conflicting_duplicates, 1);
    }

    #[test]
    fn zero_weight_names_line() {
        let err = parse("p sp 2 1\na 1 2 0").unwrap_err();
        assert_eq!(err.line(), Some(2));
        assert!(err.to_string().contains("non-positive weight"), "{err}");
    }

    #[test]
    fn error_paths() {
        assert_eq!(parse("a 1 2 3\np sp 2 1").unwrap_err().line(), Some(1));
        assert_eq!(parse("p sp 2 1\na 1 3 1").unwrap_err().line(), Some(2));
        assert_eq!(parse("p sp 2 1\na 0 1 1").unwrap_err().line(), Some(2));
        assert_eq!(parse("p sp x 1").unwrap_err().line(), Some(1));
        assert_eq!(parse("p max 2 1").unwrap_err().line(), Some(1));
        assert_eq!(parse("c\np sp 2 1\na 1 2").unwrap_err().line(), Some(3));
        assert_eq!(parse("p sp 2 1\np sp 2 1").unwrap_err().line(), Some(2));
        assert!(matches!(
            parse("c only comments\n").unwrap_err(),
            DimacsError::MissingProblemLine
        ));
    }

    #[test]
    fn gzip_input() {
        use flate2::write::GzEncoder;
        use flate2::Compression;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.gr.gz");
        let mut enc = GzEncoder::new(File::create(&path).unwrap(), Compression::fast());
        enc.write_all(b"p sp 3 2\na 1 2 5\na 2 3 7\n").unwrap();
        enc.finish().unwrap();
        let d = read_dimacs_file(&path).unwrap();
        assert_eq!(d.graph.edge_count(), 2);
    }

    #[test]
    fn fractional_weights_survive_writing() {
        let g = Graph::from_edge_list(3, &[(0, 1, 2.5), (1, 2, 7.0)]);
        let mut buf = Vec::new();
        write_dimacs_gr(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("a 2 3 7\n"));
        assert_eq!(parse(&text).unwrap().graph, g);
    }
}
