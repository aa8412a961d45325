//! Synthetic benchmark instances: random points in the unit square,
//! dense Euclidean and Delaunay-sparse graphs, ground-truth permutation
//! twins and the edge-noise model. Every generator is a bit-deterministic
//! function of `(parameters, seed)`; points, permutation and noise each
//! consume an independent sub-stream of the seed.

use std::collections::BTreeSet;

use crate::delaunay::delaunay_edges;
use crate::error::{Error, Result};
use crate::instance::{GraphInstance, GraphKind, PointSet};
use crate::matching::Matching;
use crate::matrix::AffinityMatrix;
use crate::rng::{SplitMix64, STREAM_NOISE, STREAM_PERMUTATION, STREAM_POINTS};

/// Edge-noise model `w -> |w + level * eps|`, applied symmetrically to a
/// sample of unordered pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    /// Noise level `l`; zero leaves the matrix untouched.
    pub level: f64,
    /// Open interval `eps` is drawn from, symmetric about zero.
    pub epsilon_range: (f64, f64),
    /// How many distinct pairs to perturb; `None` means the node count.
    pub edges_perturbed: Option<usize>,
}

impl NoiseSpec {
    pub fn new(level: f64) -> Result<Self> {
        let spec = NoiseSpec {
            level,
            epsilon_range: (-0.01, 0.01),
            edges_perturbed: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.level >= 0.0) {
            return Err(Error::Domain(format!(
                "noise level must be non-negative, got {}",
                self.level
            )));
        }
        let (lo, hi) = self.epsilon_range;
        if !(hi > 0.0) || lo != -hi {
            return Err(Error::Domain(format!(
                "epsilon range must be symmetric about zero, got ({lo}, {hi})"
            )));
        }
        Ok(())
    }
}

/// The per-entry noise update.
pub fn perturbed_weight(w: f64, level: f64, eps: f64) -> f64 {
    (w + level * eps).abs()
}

/// `n` points i.i.d. uniform on the unit square, from the points
/// sub-stream of `seed`.
pub fn gen_points(n: usize, seed: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::Domain("cannot generate an empty point set".into()));
    }
    let mut rng = SplitMix64::stream(seed, STREAM_POINTS);
    let coords = (0..n)
        .map(|_| {
            let x = rng.next_f64();
            let y = rng.next_f64();
            (x, y)
        })
        .collect();
    PointSet::new(coords)
}

fn euclid(p: (f64, f64), q: (f64, f64)) -> f64 {
    ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
}

/// Fully connected graph weighted by pairwise Euclidean distance, zero
/// diagonal.
pub fn dense_euclidean(p: &PointSet) -> Result<AffinityMatrix> {
    let n = p.len();
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "dense Euclidean graph needs at least 2 points, got {n}"
        )));
    }
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclid(p.get(i), p.get(j));
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    Ok(AffinityMatrix::dense_unchecked(n, data))
}

/// Sparse graph over the Delaunay edges of `p`, weighted by Euclidean
/// distance.
pub fn sparse_weighted(p: &PointSet) -> Result<AffinityMatrix> {
    let edges = delaunay_edges(p)?;
    let entries = edges
        .into_iter()
        .map(|(i, j)| (i, j, euclid(p.get(i), p.get(j))))
        .collect();
    AffinityMatrix::sparse(p.len(), entries)
}

/// Sparse graph over the Delaunay edges of `p` with unit weights.
pub fn sparse_binary(p: &PointSet) -> Result<AffinityMatrix> {
    let edges = delaunay_edges(p)?;
    let entries = edges.into_iter().map(|(i, j)| (i, j, 1.0)).collect();
    AffinityMatrix::sparse(p.len(), entries)
}

/// Relabels `a` by a uniform random permutation `sigma` drawn from the
/// permutation sub-stream of `seed`: the twin satisfies
/// `b[sigma(i)][sigma(j)] = a[i][j]`, and `sigma` (as a matching from
/// `a`-nodes to `b`-nodes) is returned as the ground truth.
pub fn permute_instance(a: &AffinityMatrix, seed: u64) -> (AffinityMatrix, Matching) {
    let n = a.order();
    let mut rng = SplitMix64::stream(seed, STREAM_PERMUTATION);
    let sigma = rng.permutation(n);
    let b = if a.is_sparse() {
        let entries = a
            .stored_upper()
            .map(|(i, j, w)| (sigma[i], sigma[j], w))
            .collect();
        AffinityMatrix::sparse(n, entries).expect("relabeling preserves validity")
    } else {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[sigma[i] * n + sigma[j]] = a.get(i, j);
            }
        }
        AffinityMatrix::dense_unchecked(n, data)
    };
    let truth = Matching::new(sigma, n).expect("a permutation is a valid matching");
    (b, truth)
}

/// Applies `w -> |w + level * eps|` to `edges_perturbed` distinct
/// unordered pairs chosen uniformly from the noise sub-stream of `seed`:
/// all off-diagonal pairs for dense storage, stored edges for sparse.
/// Both orientations change together, so symmetry and non-negativity are
/// preserved and a sparse pattern never grows.
pub fn perturb(a: &AffinityMatrix, spec: &NoiseSpec, seed: u64) -> Result<AffinityMatrix> {
    spec.validate()?;
    let n = a.order();
    let k = spec.edges_perturbed.unwrap_or(n);
    let (lo, hi) = spec.epsilon_range;
    if a.is_sparse() {
        let mut entries: Vec<(usize, usize, f64)> = a.stored_upper().collect();
        if k > entries.len() {
            return Err(Error::Domain(format!(
                "cannot perturb {k} edges of a sparse graph with {} stored edges",
                entries.len()
            )));
        }
        // selection draws first, then one epsilon per chosen edge in
        // ascending order
        let mut rng = SplitMix64::stream(seed, STREAM_NOISE);
        let chosen = sample_distinct(&mut rng, entries.len() as u64, k);
        for &idx in &chosen {
            let eps = loop {
                let u = rng.next_f64();
                if u > 0.0 {
                    break lo + u * (hi - lo);
                }
            };
            entries[idx as usize].2 = perturbed_weight(entries[idx as usize].2, spec.level, eps);
        }
        AffinityMatrix::sparse(n, entries)
    } else {
        let pairs = n * (n - 1) / 2;
        if k > pairs {
            return Err(Error::Domain(format!(
                "cannot perturb {k} pairs of a dense graph with {pairs} off-diagonal pairs"
            )));
        }
        let mut rng = SplitMix64::stream(seed, STREAM_NOISE);
        let chosen = sample_distinct(&mut rng, pairs as u64, k);
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = a.get(i, j);
            }
        }
        for &p in &chosen {
            let (i, j) = pair_from_index(n, p);
            let eps = loop {
                let u = rng.next_f64();
                if u > 0.0 {
                    break lo + u * (hi - lo);
                }
            };
            let w = perturbed_weight(data[i * n + j], spec.level, eps);
            data[i * n + j] = w;
            data[j * n + i] = w;
        }
        Ok(AffinityMatrix::dense_unchecked(n, data))
    }
}

/// Floyd's sampling of `k` distinct values from `[0, universe)`,
/// returned ascending so later draws pair with edges deterministically.
fn sample_distinct(rng: &mut SplitMix64, universe: u64, k: usize) -> Vec<u64> {
    let mut chosen: BTreeSet<u64> = BTreeSet::new();
    for j in (universe - k as u64)..universe {
        let t = rng.next_range(j + 1);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    chosen.into_iter().collect()
}

/// Inverse of the row-major enumeration of unordered pairs `(i, j)`,
/// `i < j`, of `0..n`: pair index `p` maps back to coordinates.
fn pair_from_index(n: usize, p: u64) -> (usize, usize) {
    let mut i = 0usize;
    let mut first_of_row = 0u64;
    loop {
        let row_len = (n - i - 1) as u64;
        if p < first_of_row + row_len {
            let j = i + 1 + (p - first_of_row) as usize;
            return (i, j);
        }
        first_of_row += row_len;
        i += 1;
    }
}

/// Full benchmark instance: points, the `kind` graph, a permuted twin
/// with ground truth, and optional noise on the twin.
pub fn generate_instance(
    kind: GraphKind,
    n: usize,
    noise_level: f64,
    seed: u64,
) -> Result<GraphInstance> {
    let points = gen_points(n, seed)?;
    let a = match kind {
        GraphKind::DenseWeighted => dense_euclidean(&points)?,
        GraphKind::SparseWeighted => sparse_weighted(&points)?,
        GraphKind::SparseBinary => sparse_binary(&points)?,
        GraphKind::External => {
            return Err(Error::Domain(
                "external instances are loaded from files, not generated".into(),
            ))
        }
    };
    let (b, truth) = permute_instance(&a, seed);
    let b = if noise_level > 0.0 {
        perturb(&b, &NoiseSpec::new(noise_level)?, seed)?
    } else {
        b
    };
    GraphInstance::new(a, b, Some(truth), kind, noise_level, seed, Some(points))
}
