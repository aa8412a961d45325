//! The three end-to-end matchers: LiSA (sort assignment on leading
//! eigenvectors), SM (power iteration on the materialized Kronecker
//! affinity), and SM-KB (the same iteration in matrix form).

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::assign::{greedy_discretize, one_dim_assign, ProfitMatrix};
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::matrix::AffinityMatrix;
use crate::spectral::{power_iterate_traced, power_method, PowerConfig};

/// Default cap on `n * n~` for SM, matching the size at which the
/// materialized Kronecker affinity becomes impractical (150x150 nodes).
pub const SM_DEFAULT_CAP: usize = 22_500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Lisa,
    Sm,
    Smkb,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Lisa => "lisa",
            Algorithm::Sm => "sm",
            Algorithm::Smkb => "smkb",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lisa" => Ok(Algorithm::Lisa),
            "sm" => Ok(Algorithm::Sm),
            "smkb" => Ok(Algorithm::Smkb),
            other => Err(Error::Domain(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Outcome of one matcher run. `wall_seconds` covers the full operation
/// on a monotonic clock, discretization included.
#[derive(Debug, Clone)]
pub struct MatchResult {
    pub matching: Matching,
    pub iterations: usize,
    pub converged: bool,
    pub wall_seconds: f64,
    pub algorithm: Algorithm,
}

fn check_pair(a: &AffinityMatrix, b: &AffinityMatrix) -> Result<()> {
    if a.order() > b.order() {
        return Err(Error::Dimension(format!(
            "source graph ({} nodes) is larger than target graph ({} nodes)",
            a.order(),
            b.order()
        )));
    }
    Ok(())
}

/// Lightning spectral assignment: leading eigenvectors of both graphs,
/// then the one-dimensional sort assignment. O(n^2) per dense iteration,
/// O(edges) sparse; auxiliary memory stays O(n) - no profit matrix or
/// other n x n~ object is ever formed.
pub fn lisa_match(a: &AffinityMatrix, b: &AffinityMatrix, cfg: &PowerConfig) -> Result<MatchResult> {
    check_pair(a, b)?;
    let start = Instant::now();
    let phi = power_method(a, cfg)?;
    let phi_t = power_method(b, cfg)?;
    let matching = one_dim_assign(&phi.values, &phi_t.values)?;
    Ok(MatchResult {
        matching,
        iterations: phi.iterations + phi_t.iterations,
        converged: phi.converged && phi_t.converged,
        wall_seconds: start.elapsed().as_secs_f64(),
        algorithm: Algorithm::Lisa,
    })
}

/// `lisa_match` with the two independent eigenvector computations run on
/// separate threads. They touch disjoint data and each is internally
/// sequential, so the result is identical to the serial version.
pub fn lisa_match_parallel(
    a: &AffinityMatrix,
    b: &AffinityMatrix,
    cfg: &PowerConfig,
) -> Result<MatchResult> {
    check_pair(a, b)?;
    let start = Instant::now();
    let (phi, phi_t) = rayon::join(|| power_method(a, cfg), || power_method(b, cfg));
    let (phi, phi_t) = (phi?, phi_t?);
    let matching = one_dim_assign(&phi.values, &phi_t.values)?;
    Ok(MatchResult {
        matching,
        iterations: phi.iterations + phi_t.iterations,
        converged: phi.converged && phi_t.converged,
        wall_seconds: start.elapsed().as_secs_f64(),
        algorithm: Algorithm::Lisa,
    })
}

/// Kronecker affinity `W = B (x) A` of orders n and n~, laid out so that
/// `W vec(X) = vec(A X B)` holds for the column-stacked vec of
/// `n x n~` matrices. Symmetric and non-negative whenever both factors
/// are, so it can feed `power_method` directly.
pub fn kronecker_affinity(a: &AffinityMatrix, b: &AffinityMatrix) -> Result<AffinityMatrix> {
    let n = a.order();
    let nt = b.order();
    let nn = n
        .checked_mul(nt)
        .ok_or_else(|| Error::SizeLimit("Kronecker order overflows".into()))?;
    let mut a_rows = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            a_rows[i * n + k] = a.get(i, k);
        }
    }
    let mut w = vec![0.0; nn * nn];
    // row (j * n + i) holds b[j][l] * a[i][k] at column (l * n + k)
    for j in 0..nt {
        for i in 0..n {
            let row = &mut w[(j * n + i) * nn..(j * n + i + 1) * nn];
            let a_row = &a_rows[i * n..(i + 1) * n];
            for l in 0..nt {
                let bjl = b.get(j, l);
                let block = &mut row[l * n..(l + 1) * n];
                if bjl == 0.0 {
                    continue;
                }
                for (dst, &av) in block.iter_mut().zip(a_row) {
                    *dst = bjl * av;
                }
            }
        }
    }
    Ok(AffinityMatrix::dense_unchecked(nn, w))
}

/// Classic spectral matching: materializes `W = B (x) A`, runs the power
/// method on it from the all-ones vector, reshapes the soft solution to
/// an `n x n~` profit and rounds it greedily. Guarded by `cap` on
/// `n * n~` because `W` has `(n n~)^2` entries.
pub fn sm_match_capped(
    a: &AffinityMatrix,
    b: &AffinityMatrix,
    cfg: &PowerConfig,
    cap: usize,
) -> Result<MatchResult> {
    sm_core(a, b, cfg, cap, None)
}

/// `sm_match_capped` with the default cap.
pub fn sm_match(a: &AffinityMatrix, b: &AffinityMatrix, cfg: &PowerConfig) -> Result<MatchResult> {
    sm_core(a, b, cfg, SM_DEFAULT_CAP, None)
}

/// SM that also returns its max-normalized iterates in column-stacked
/// order, for cross-checking against SM-KB.
pub fn sm_match_traced(
    a: &AffinityMatrix,
    b: &AffinityMatrix,
    cfg: &PowerConfig,
) -> Result<(MatchResult, Vec<Vec<f64>>)> {
    let mut trace = Vec::new();
    let result = sm_core(a, b, cfg, SM_DEFAULT_CAP, Some(&mut trace))?;
    Ok((result, trace))
}

fn sm_core(
    a: &AffinityMatrix,
    b: &AffinityMatrix,
    cfg: &PowerConfig,
    cap: usize,
    trace: Option<&mut Vec<Vec<f64>>>,
) -> Result<MatchResult> {
    check_pair(a, b)?;
    let n = a.order();
    let nt = b.order();
    let nn = n * nt;
    if nn > cap {
        return Err(Error::SizeLimit(format!(
            "problem of {n}x{nt} nodes needs a Kronecker affinity of order {nn}, \
             above the cap of {cap} (the default cap {SM_DEFAULT_CAP} corresponds \
             to 150x150 nodes)"
        )));
    }
    if a.is_zero() || b.is_zero() {
        return Err(Error::Degenerate("spectral matching on a zero matrix".into()));
    }
    let start = Instant::now();
    let w = kronecker_affinity(a, b)?;
    let scores = power_iterate_traced(&w, cfg, trace)?;
    drop(w);
    let profit = ProfitMatrix::from_column_stacked(&scores.values, n, nt)?;
    let matching = greedy_discretize(&profit)?;
    Ok(MatchResult {
        matching,
        iterations: scores.iterations,
        converged: scores.converged,
        wall_seconds: start.elapsed().as_secs_f64(),
        algorithm: Algorithm::Sm,
    })
}

/// Spectral matching for the Koopmans-Beckmann form: iterates
/// `X <- A X B / max(A X B)` from `X = 11^T / (n n~)` to the same
/// entrywise tolerance as the vector power method, then rounds greedily.
/// O(n^3) per dense iteration; sparse factors use their edge lists.
pub fn smkb_match(a: &AffinityMatrix, b: &AffinityMatrix, cfg: &PowerConfig) -> Result<MatchResult> {
    smkb_core(a, b, cfg, None)
}

/// SM-KB that also returns its iterates, column-stacked, for
/// cross-checking against SM.
pub fn smkb_match_traced(
    a: &AffinityMatrix,
    b: &AffinityMatrix,
    cfg: &PowerConfig,
) -> Result<(MatchResult, Vec<Vec<f64>>)> {
    let mut trace = Vec::new();
    let result = smkb_core(a, b, cfg, Some(&mut trace))?;
    Ok((result, trace))
}

fn smkb_core(
    a: &AffinityMatrix,
    b: &AffinityMatrix,
    cfg: &PowerConfig,
    mut trace: Option<&mut Vec<Vec<f64>>>,
) -> Result<MatchResult> {
    check_pair(a, b)?;
    if a.is_zero() || b.is_zero() {
        return Err(Error::Degenerate("spectral matching on a zero matrix".into()));
    }
    let n = a.order();
    let nt = b.order();
    let start = Instant::now();
    let mut x = vec![1.0 / (n * nt) as f64; n * nt]; // row-major n x nt
    let mut t = vec![0.0; n * nt];
    let mut z = vec![0.0; n * nt];
    let mut iterations = 0;
    let mut converged = false;
    for k in 1..=cfg.max_iterations {
        left_multiply(a, &x, nt, &mut t);
        right_multiply(&t, b, n, &mut z);
        let mx = z.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        if mx <= 0.0 {
            return Err(Error::Breakdown(format!(
                "max of the iterate is {mx} at step {k}; cannot normalize"
            )));
        }
        let mut diff = 0.0f64;
        for (xi, &zi) in x.iter_mut().zip(z.iter()) {
            let v = zi / mx;
            diff = diff.max((v - *xi).abs());
            *xi = v;
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(column_stacked(&x, n, nt));
        }
        iterations = k;
        if diff < cfg.tolerance {
            converged = true;
            break;
        }
    }
    let profit = ProfitMatrix::new(n, nt, x)?;
    let matching = greedy_discretize(&profit)?;
    Ok(MatchResult {
        matching,
        iterations,
        converged,
        wall_seconds: start.elapsed().as_secs_f64(),
        algorithm: Algorithm::Smkb,
    })
}

/// `out = A * X` for row-major `X` with `cols` columns; fixed summation
/// order in both storage branches.
fn left_multiply(a: &AffinityMatrix, x: &[f64], cols: usize, out: &mut [f64]) {
    let n = a.order();
    out.fill(0.0);
    if a.is_sparse() {
        for (i, k, w) in a.stored_upper() {
            for c in 0..cols {
                out[i * cols + c] += w * x[k * cols + c];
            }
            if i != k {
                for c in 0..cols {
                    out[k * cols + c] += w * x[i * cols + c];
                }
            }
        }
    } else {
        for i in 0..n {
            let dst = &mut out[i * cols..(i + 1) * cols];
            for k in 0..n {
                let aik = a.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                let src = &x[k * cols..(k + 1) * cols];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += aik * s;
                }
            }
        }
    }
}

/// `out = X * B` for row-major `X` with `rows` rows; `B` symmetric, so
/// `(X B)[i][l] = sum_k X[i][k] B[k][l]` reads B by rows.
fn right_multiply(x: &[f64], b: &AffinityMatrix, rows: usize, out: &mut [f64]) {
    let nt = b.order();
    out.fill(0.0);
    if b.is_sparse() {
        for i in 0..rows {
            let src = &x[i * nt..(i + 1) * nt];
            let dst = &mut out[i * nt..(i + 1) * nt];
            for (k, l, w) in b.stored_upper() {
                dst[l] += src[k] * w;
                if k != l {
                    dst[k] += src[l] * w;
                }
            }
        }
    } else {
        for i in 0..rows {
            let src = &x[i * nt..(i + 1) * nt];
            let dst = &mut out[i * nt..(i + 1) * nt];
            for (k, &xik) in src.iter().enumerate() {
                if xik == 0.0 {
                    continue;
                }
                for l in 0..nt {
                    dst[l] += xik * b.get(k, l);
                }
            }
        }
    }
}

/// Column-stacked copy of a row-major `rows x cols` table.
fn column_stacked(x: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut v = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            v[j * rows + i] = x[i * cols + j];
        }
    }
    v
}
