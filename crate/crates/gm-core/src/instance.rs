use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::matrix::AffinityMatrix;

/// Families of benchmark instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    /// Fully connected, Euclidean-distance weights.
    DenseWeighted,
    /// Delaunay edges, Euclidean-distance weights.
    SparseWeighted,
    /// Delaunay edges, unit weights.
    SparseBinary,
    /// Loaded from a file rather than generated.
    External,
}

impl GraphKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GraphKind::DenseWeighted => "dense-weighted",
            GraphKind::SparseWeighted => "sparse-weighted",
            GraphKind::SparseBinary => "sparse-binary",
            GraphKind::External => "external",
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            // "dense" is the CLI shorthand
            "dense" | "dense-weighted" => Ok(GraphKind::DenseWeighted),
            "sparse-weighted" => Ok(GraphKind::SparseWeighted),
            "sparse-binary" => Ok(GraphKind::SparseBinary),
            "external" => Ok(GraphKind::External),
            other => Err(Error::Domain(format!("unknown graph kind '{other}'"))),
        }
    }
}

/// Planar point cloud in the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    coords: Vec<(f64, f64)>,
}

impl PointSet {
    pub fn new(coords: Vec<(f64, f64)>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Dimension("point set must be non-empty".into()));
        }
        for (k, &(x, y)) in coords.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::Domain(format!("point {k} has non-finite coordinates")));
            }
        }
        Ok(PointSet { coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, i: usize) -> (f64, f64) {
        self.coords[i]
    }

    pub fn as_slice(&self) -> &[(f64, f64)] {
        &self.coords
    }
}

/// A matched pair of graphs plus everything needed to score and
/// reproduce it. Matchers only ever see `a` and `b`; the points are
/// debugging metadata.
#[derive(Debug, Clone)]
pub struct GraphInstance {
    pub a: AffinityMatrix,
    pub b: AffinityMatrix,
    pub ground_truth: Option<Matching>,
    pub kind: GraphKind,
    pub noise_level: f64,
    pub seed: u64,
    pub points: Option<PointSet>,
}

impl GraphInstance {
    pub fn new(
        a: AffinityMatrix,
        b: AffinityMatrix,
        ground_truth: Option<Matching>,
        kind: GraphKind,
        noise_level: f64,
        seed: u64,
        points: Option<PointSet>,
    ) -> Result<Self> {
        if let Some(truth) = &ground_truth {
            if truth.source_size() != a.order() || truth.target_size() != b.order() {
                return Err(Error::Dimension(format!(
                    "ground truth is {}->{} but graphs have orders {} and {}",
                    truth.source_size(),
                    truth.target_size(),
                    a.order(),
                    b.order()
                )));
            }
        }
        if !(noise_level >= 0.0) {
            return Err(Error::Domain(format!("noise level must be >= 0, got {noise_level}")));
        }
        Ok(GraphInstance {
            a,
            b,
            ground_truth,
            kind,
            noise_level,
            seed,
            points,
        })
    }
}
