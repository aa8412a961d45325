//! Discretization back ends: the one-dimensional sort assignment used by
//! LiSA, greedy rounding for SM and SM-KB, and an exhaustive solver kept
//! small enough to act as an exact oracle.

use crate::error::{Error, Result};
use crate::matching::Matching;

/// Upper bound on the target count accepted by [`brute_force_lap`].
pub const BRUTE_FORCE_MAX_TARGETS: usize = 9;

/// Dense real profit table with `rows <= cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ProfitMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("profit matrix must be non-empty".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for {rows}x{cols}, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("profit entries must be finite".into()));
        }
        Ok(ProfitMatrix { rows, cols, data })
    }

    /// Rank-1 profit `X[i][j] = phi[i] * phi_t[j]`.
    pub fn outer(phi: &[f64], phi_t: &[f64]) -> Result<Self> {
        let data = phi
            .iter()
            .flat_map(|&p| phi_t.iter().map(move |&q| p * q))
            .collect();
        ProfitMatrix::new(phi.len(), phi_t.len(), data)
    }

    /// Reshape a column-stacked vector of length `rows * cols` into the
    /// `rows x cols` profit it represents: entry `(i, j)` is `x[j * rows + i]`.
    pub fn from_column_stacked(x: &[f64], rows: usize, cols: usize) -> Result<Self> {
        if x.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "vector of length {} cannot reshape to {rows}x{cols}",
                x.len()
            )));
        }
        let mut data = vec![0.0; rows * cols];
        for j in 0..cols {
            for i in 0..rows {
                data[i * cols + j] = x[j * rows + i];
            }
        }
        ProfitMatrix::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Objective of a matching against this profit.
    pub fn objective(&self, m: &Matching) -> f64 {
        (0..self.rows).map(|i| self.get(i, m.target_of(i))).sum()
    }
}

/// Matches two score sequences by descending sort: rank k of `phi` pairs
/// with rank k of `phi_t`. By the rearrangement inequality (and its
/// unbalanced corollary for `n < n~`) this maximizes
/// `sum_i phi[i] * phi_t[m(i)]` over injections. Ties keep ascending
/// original-index order, so the result is deterministic. O(n~ log n~).
pub fn one_dim_assign(phi: &[f64], phi_t: &[f64]) -> Result<Matching> {
    let n = phi.len();
    let nt = phi_t.len();
    if n == 0 {
        return Err(Error::Dimension("source score sequence is empty".into()));
    }
    if n > nt {
        return Err(Error::Dimension(format!(
            "cannot assign {n} sources into {nt} targets"
        )));
    }
    if phi.iter().chain(phi_t).any(|x| !x.is_finite()) {
        return Err(Error::Domain("scores must be finite".into()));
    }
    let mut src: Vec<usize> = (0..n).collect();
    src.sort_by(|&i, &j| phi[j].total_cmp(&phi[i]));
    let mut tgt: Vec<usize> = (0..nt).collect();
    tgt.sort_by(|&i, &j| phi_t[j].total_cmp(&phi_t[i]));
    let mut assignment = vec![0usize; n];
    for k in 0..n {
        assignment[src[k]] = tgt[k];
    }
    Matching::new(assignment, nt)
}

/// Rounds a continuous profit to a matching by repeatedly taking the
/// largest remaining entry and striking its row and column. Ties pick
/// the smallest (row, column). O(n * rows * cols); the profit is already
/// dense here, LiSA's path never builds one.
pub fn greedy_discretize(x: &ProfitMatrix) -> Result<Matching> {
    let (n, nt) = (x.rows(), x.cols());
    if n > nt {
        return Err(Error::Dimension(format!(
            "profit has more rows ({n}) than columns ({nt})"
        )));
    }
    let mut row_free = vec![true; n];
    let mut col_free = vec![true; nt];
    let mut assignment = vec![usize::MAX; n];
    for _ in 0..n {
        let mut best = f64::NEG_INFINITY;
        let mut pick = None;
        for i in 0..n {
            if !row_free[i] {
                continue;
            }
            for j in 0..nt {
                // strict comparison keeps the first (lexicographically
                // smallest) maximum
                if col_free[j] && x.get(i, j) > best {
                    best = x.get(i, j);
                    pick = Some((i, j));
                }
            }
        }
        let (i, j) = pick.expect("free row and column remain");
        row_free[i] = false;
        col_free[j] = false;
        assignment[i] = j;
    }
    Matching::new(assignment, nt)
}

/// Exhaustive linear-assignment solver over all injections. Exact but
/// factorial; refuses more than [`BRUTE_FORCE_MAX_TARGETS`] targets.
/// Returns an optimizer (the lexicographically first among optima) and
/// the optimal objective.
pub fn brute_force_lap(x: &ProfitMatrix) -> Result<(Matching, f64)> {
    let (n, nt) = (x.rows(), x.cols());
    if n > nt {
        return Err(Error::Dimension(format!(
            "profit has more rows ({n}) than columns ({nt})"
        )));
    }
    if nt > BRUTE_FORCE_MAX_TARGETS {
        return Err(Error::SizeLimit(format!(
            "brute-force assignment is capped at {BRUTE_FORCE_MAX_TARGETS} targets, got {nt}"
        )));
    }
    let mut used = vec![false; nt];
    let mut current = vec![0usize; n];
    let mut best_sum = f64::NEG_INFINITY;
    let mut best: Vec<usize> = Vec::new();
    fn rec(
        x: &ProfitMatrix,
        row: usize,
        used: &mut [bool],
        current: &mut [usize],
        sum: f64,
        best_sum: &mut f64,
        best: &mut Vec<usize>,
    ) {
        if row == x.rows() {
            if sum > *best_sum {
                *best_sum = sum;
                best.clear();
                best.extend_from_slice(current);
            }
            return;
        }
        for j in 0..x.cols() {
            if !used[j] {
                used[j] = true;
                current[row] = j;
                rec(x, row + 1, used, current, sum + x.get(row, j), best_sum, best);
                used[j] = false;
            }
        }
    }
    rec(x, 0, &mut used, &mut current, 0.0, &mut best_sum, &mut best);
    Ok((Matching::new(best, nt)?, best_sum))
}
