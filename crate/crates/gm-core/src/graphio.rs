//! Plain-text file formats. All files are UTF-8 with LF line endings and
//! allow `#` comment lines; weights are written as the shortest decimal
//! that round-trips the underlying binary float, so save/load is exact.
//!
//! Matrix: `gm-matrix v1 <n> <nnz> <dense|sparse>` then one `i j w` line
//! per stored upper-triangle entry, 0-based.
//! Points: `gm-points v1 <n>` then one `x y` line per point.
//! Matching: a JSON object
//! `{"n":..,"m":..,"pairs":[[src,tgt],..],"algorithm":..,"seconds":..}`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::PointSet;
use crate::matching::Matching;
use crate::matrix::AffinityMatrix;

/// How to interpret a whitespace-separated edge-list file.
#[derive(Debug, Clone, Copy)]
pub struct EdgeListOptions {
    /// Index base of the file, 0 or 1.
    pub base: usize,
    /// Expect `u v w` lines (otherwise `u v`, weight 1).
    pub weighted: bool,
    /// Accept mirrored re-listings with conflicting weights, keeping the
    /// last; without it mirrored duplicates must agree.
    pub symmetrize: bool,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions {
            base: 0,
            weighted: false,
            symmetrize: true,
        }
    }
}

/// An edge list plus what the loader had to clean up.
#[derive(Debug)]
pub struct EdgeListLoad {
    pub matrix: AffinityMatrix,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

/// Loads a SNAP-style edge list: `u v` or `u v w` per line, `#`
/// comments. Nodes are re-indexed densely in first-appearance order,
/// duplicate edges collapse keeping the last weight, self-loops are
/// dropped and counted.
pub fn load_edge_list(path: impl AsRef<Path>, opts: EdgeListOptions) -> Result<EdgeListLoad> {
    let path = path.as_ref();
    if opts.base > 1 {
        return Err(Error::Domain(format!("index base must be 0 or 1, got {}", opts.base)));
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut ids: std::collections::HashMap<u64, usize> = std::collections::HashMap::new();
    let mut order: Vec<u64> = Vec::new();
    let intern = |raw: u64, order: &mut Vec<u64>, ids: &mut std::collections::HashMap<u64, usize>| {
        *ids.entry(raw).or_insert_with(|| {
            order.push(raw);
            order.len() - 1
        })
    };
    let mut edges: std::collections::HashMap<(usize, usize), f64> =
        std::collections::HashMap::new();
    let mut self_loops = 0usize;
    let mut duplicates = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let expected = if opts.weighted { 3 } else { 2 };
        if fields.len() != expected {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected {expected} fields, got {}", fields.len()),
            ));
        }
        let u: u64 = fields[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad node id '{}'", fields[0])))?;
        let v: u64 = fields[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad node id '{}'", fields[1])))?;
        let w: f64 = if opts.weighted {
            fields[2]
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad weight '{}'", fields[2])))?
        } else {
            1.0
        };
        if !w.is_finite() || w < 0.0 {
            return Err(Error::Domain(format!(
                "negative or non-finite weight {w} at {path:?} line {lineno}"
            )));
        }
        if (u as usize) < opts.base || (v as usize) < opts.base {
            return Err(Error::parse(
                path,
                lineno,
                format!("node id below the declared base {}", opts.base),
            ));
        }
        let (u, v) = (u - opts.base as u64, v - opts.base as u64);
        let ui = intern(u, &mut order, &mut ids);
        let vi = intern(v, &mut order, &mut ids);
        if ui == vi {
            self_loops += 1;
            continue;
        }
        let key = (ui.min(vi), ui.max(vi));
        match edges.entry(key) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let old_w = *e.get();
                if !opts.symmetrize && (old_w - w).abs() > crate::matrix::SYMMETRY_TOL {
                    return Err(Error::Domain(format!(
                        "conflicting weights {old_w} and {w} for edge {key:?} at {path:?} line \
                         {lineno}; pass symmetrize to keep the last"
                    )));
                }
                *e.get_mut() = w;
                duplicates += 1;
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(w);
            }
        }
    }
    if order.is_empty() {
        return Err(Error::Degenerate(format!("edge list {path:?} has no edges")));
    }
    let n = order.len();
    let entries: Vec<(usize, usize, f64)> = edges.into_iter().map(|((i, j), w)| (i, j, w)).collect();
    let matrix = AffinityMatrix::sparse(n, entries)?;
    Ok(EdgeListLoad {
        matrix,
        self_loops_dropped: self_loops,
        duplicates_collapsed: duplicates,
    })
}

/// Writes the `gm-matrix v1` format: nonzero upper-triangle entries in
/// sorted order.
pub fn save_matrix(a: &AffinityMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let kind = if a.is_sparse() { "sparse" } else { "dense" };
    let nnz = a.nonzero_upper().count();
    (|| -> std::io::Result<()> {
        writeln!(out, "gm-matrix v1 {} {} {}", a.order(), nnz, kind)?;
        for (i, j, w) in a.nonzero_upper() {
            writeln!(out, "{i} {j} {w}")?;
        }
        out.flush()
    })()
    .map_err(|e| Error::io(path, e))
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<AffinityMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (lineno, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "gm-matrix" || fields[1] != "v1" {
        return Err(Error::parse(path, lineno, "expected 'gm-matrix v1 <n> <nnz> <kind>'"));
    }
    let n: usize = fields[2]
        .parse()
        .map_err(|_| Error::parse(path, lineno, "bad order"))?;
    let nnz: usize = fields[3]
        .parse()
        .map_err(|_| Error::parse(path, lineno, "bad entry count"))?;
    let dense = match fields[4] {
        "dense" => true,
        "sparse" => false,
        other => {
            return Err(Error::parse(path, lineno, format!("unknown storage kind '{other}'")))
        }
    };
    let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(nnz);
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(path, lineno, "expected 'i j w'"));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno, "bad row index"))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, "bad column index"))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(path, lineno, "bad weight"))?;
        entries.push((i, j, w));
    }
    if entries.len() != nnz {
        return Err(Error::parse(
            path,
            1,
            format!("header promises {nnz} entries, found {}", entries.len()),
        ));
    }
    if dense {
        let mut data = vec![0.0; n * n];
        for &(i, j, w) in &entries {
            if i >= n || j >= n {
                return Err(Error::parse(path, 1, format!("entry ({i}, {j}) out of range")));
            }
            data[i * n + j] = w;
            data[j * n + i] = w;
        }
        AffinityMatrix::dense(n, data)
    } else {
        AffinityMatrix::sparse(n, entries)
    }
}

pub fn save_points(p: &PointSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(out, "gm-points v1 {}", p.len())?;
        for &(x, y) in p.as_slice() {
            writeln!(out, "{x} {y}")?;
        }
        out.flush()
    })()
    .map_err(|e| Error::io(path, e))
}

pub fn load_points(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (lineno, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "gm-points" || fields[1] != "v1" {
        return Err(Error::parse(path, lineno, "expected 'gm-points v1 <n>'"));
    }
    let n: usize = fields[2]
        .parse()
        .map_err(|_| Error::parse(path, lineno, "bad point count"))?;
    let mut coords = Vec::with_capacity(n);
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::parse(path, lineno, "expected 'x y'"));
        }
        let x: f64 = fields[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno, "bad x coordinate"))?;
        let y: f64 = fields[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, "bad y coordinate"))?;
        coords.push((x, y));
    }
    if coords.len() != n {
        return Err(Error::parse(
            path,
            1,
            format!("header promises {n} points, found {}", coords.len()),
        ));
    }
    PointSet::new(coords)
}

#[derive(Debug, Serialize, Deserialize)]
struct MatchingJson {
    n: usize,
    m: usize,
    pairs: Vec<(usize, usize)>,
    algorithm: Option<String>,
    seconds: Option<f64>,
}

/// A matching read back from disk, with whatever metadata the file
/// carried.
#[derive(Debug)]
pub struct LoadedMatching {
    pub matching: Matching,
    pub algorithm: Option<String>,
    pub seconds: Option<f64>,
}

pub fn save_matching(m: &Matching, path: impl AsRef<Path>) -> Result<()> {
    save_matching_with(m, None, None, path)
}

pub fn save_matching_with(
    m: &Matching,
    algorithm: Option<&str>,
    seconds: Option<f64>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let doc = MatchingJson {
        n: m.source_size(),
        m: m.target_size(),
        pairs: m.as_slice().iter().copied().enumerate().collect(),
        algorithm: algorithm.map(str::to_owned),
        seconds,
    };
    let json = serde_json::to_string_pretty(&doc).expect("matching serializes");
    fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_matching(path: impl AsRef<Path>) -> Result<LoadedMatching> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: MatchingJson = serde_json::from_str(&text)
        .map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
    if doc.pairs.len() != doc.n {
        return Err(Error::parse(
            path,
            1,
            format!("matching promises {} pairs, found {}", doc.n, doc.pairs.len()),
        ));
    }
    let mut assignment = vec![usize::MAX; doc.n];
    for &(src, tgt) in &doc.pairs {
        if src >= doc.n || assignment[src] != usize::MAX {
            return Err(Error::parse(path, 1, format!("bad or repeated source {src}")));
        }
        assignment[src] = tgt;
    }
    let matching = Matching::new(assignment, doc.m)?;
    Ok(LoadedMatching {
        matching,
        algorithm: doc.algorithm,
        seconds: doc.seconds,
    })
}
