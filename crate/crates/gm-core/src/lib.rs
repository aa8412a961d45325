//! Spectral graph matching at benchmark scale.
//!
//! The crate implements three matchers for pairs of symmetric
//! non-negative affinity matrices:
//!
//! * **LiSA** - lightning spectral assignment: a leading eigenvector per
//!   graph (power method), then a one-dimensional sort assignment.
//!   O(n^2) dense, O(edges) sparse per iteration, O(n) auxiliary memory.
//! * **SM** - classic spectral matching on the materialized Kronecker
//!   affinity of order `n * n~`, rounded greedily. Capped by default at
//!   150x150 nodes because the Kronecker matrix has `(n n~)^2` entries.
//! * **SM-KB** - the same fixed point computed in matrix form,
//!   `X <- A X B / max(A X B)`, O(n^3) per dense iteration.
//!
//! Around them: seeded instance generators (dense Euclidean and
//! Delaunay-sparse point graphs, permutation twins, edge noise), plain
//! text formats for matrices / points / matchings plus a SNAP-style
//! edge-list loader, and a benchmark harness that emits deterministic
//! CSV.

pub mod assign;
pub mod bench;
pub mod delaunay;
pub mod error;
pub mod graphgen;
pub mod graphio;
pub mod instance;
pub mod matchers;
pub mod matching;
pub mod matrix;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use instance::{GraphInstance, GraphKind, PointSet};
pub use matchers::{Algorithm, MatchResult};
pub use matching::{validate_matching, Matching};
pub use matrix::{affinity_score, kb_discrepancy, AffinityMatrix};
pub use spectral::{PowerConfig, SpectralScores};
