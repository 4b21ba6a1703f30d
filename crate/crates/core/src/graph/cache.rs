//! Binary adjacency cache for fast reloads of large `.gr` files.
//!
//! Layout (little endian): magic, version `u32`, SHA-256 of the source file,
//! node count `u64`, arc count `u64`, offsets `u64 * (n + 1)`, targets
//! `u32 * arcs`, weights `f64 * arcs`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::dimacs::{read_dimacs_file, DimacsError};
use super::{Graph, NodeId};

pub const CACHE_MAGIC: &[u8; 8] = b"SPHGRAPH";
pub const CACHE_VERSION: u32 = 1;

/// Hex SHA-256 of a file's bytes.
pub fn content_hash(path: &Path) -> io::Result<String> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(to_hex(&hasher.finalize()))
}

fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn from_hex(hex: &str) -> Option<[u8; 32]> {
    if hex.len() != 64 {
        return None;
    }
    let mut out = [0u8; 32];
    for (i, chunk) in hex.as_bytes().chunks(2).enumerate() {
        let s = std::str::from_utf8(chunk).ok()?;
        out[i] = u8::from_str_radix(s, 16).ok()?;
    }
    Some(out)
}

pub fn write_cache(g: &Graph, source_hash: &str, path: &Path) -> io::Result<()> {
    let hash = from_hex(source_hash)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "hash must be 64 hex chars"))?;
    let (offsets, targets, weights) = g.raw_parts();
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(CACHE_MAGIC)?;
    out.write_all(&CACHE_VERSION.to_le_bytes())?;
    out.write_all(&hash)?;
    out.write_all(&(g.node_count() as u64).to_le_bytes())?;
    out.write_all(&(targets.len() as u64).to_le_bytes())?;
    for &o in offsets {
        out.write_all(&(o as u64).to_le_bytes())?;
    }
    for &t in targets {
        out.write_all(&t.to_le_bytes())?;
    }
    for &w in weights {
        out.write_all(&w.to_le_bytes())?;
    }
    out.flush()
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

fn read_u64(r: &mut impl Read) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Reads a cache file, returning the graph and the recorded source hash.
pub fn read_cache(path: &Path) -> io::Result<(Graph, String)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(invalid("not a graph cache file"));
    }
    let mut v = [0u8; 4];
    r.read_exact(&mut v)?;
    if u32::from_le_bytes(v) != CACHE_VERSION {
        return Err(invalid("unsupported cache version"));
    }
    let mut hash = [0u8; 32];
    r.read_exact(&mut hash)?;
    let n = read_u64(&mut r)? as usize;
    let arcs = read_u64(&mut r)? as usize;
    if n == 0 || n > NodeId::MAX as usize {
        return Err(invalid("bad node count"));
    }
    let mut offsets = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        offsets.push(read_u64(&mut r)? as usize);
    }
    let mut targets = Vec::with_capacity(arcs);
    let mut b4 = [0u8; 4];
    for _ in 0..arcs {
        r.read_exact(&mut b4)?;
        targets.push(NodeId::from_le_bytes(b4));
    }
    let mut weights = Vec::with_capacity(arcs);
    let mut b8 = [0u8; 8];
    for _ in 0..arcs {
        r.read_exact(&mut b8)?;
        weights.push(f64::from_le_bytes(b8));
    }
    let graph = Graph::from_csr(offsets, targets, weights).map_err(invalid)?;
    Ok((graph, to_hex(&hash)))
}

/// Loads `source` through the cache at `cache`, rebuilding the cache when it
/// is missing, unreadable, or was built from different file contents.
/// Returns the graph and whether it came from the cache.
pub fn load_cached(source: &Path, cache: &Path) -> Result<(Graph, bool), DimacsError> {
    let hash = content_hash(source)?;
    if let Ok((graph, cached_hash)) = read_cache(cache) {
        if cached_hash == hash {
            return Ok((graph, true));
        }
    }
    let parsed = read_dimacs_file(source)?;
    write_cache(&parsed.graph, &hash, cache)?;
    Ok((parsed.graph, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::grid_graph;
    use crate::graph::write_dimacs_gr;

    #[test]
    fn cache_reload_and_invalidation() {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("g.gr");
        let cache = dir.path().join("g.bin");
        let g = grid_graph(4, 3, 1.0);
        write_dimacs_gr(&g, File::create(&src).unwrap()).unwrap();

        let (first, hit) = load_cached(&src, &cache).unwrap();
        assert!(!hit);
        assert_eq!(first, g);
        let (second, hit) = load_cached(&src, &cache).unwrap();
        assert!(hit);
        assert_eq!(second, g);

        let h = grid_graph(2, 2, 1.0);
        write_dimacs_gr(&h, File::create(&src).unwrap()).unwrap();
        let (third, hit) = load_cached(&src, &cache).unwrap();
        assert!(!hit, "stale cache must be rebuilt");
        assert_eq!(third, h);
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("junk.bin");
        std::fs::write(&p, b"not a cache at all").unwrap();
        assert!(read_cache(&p).is_err());
    }
}
