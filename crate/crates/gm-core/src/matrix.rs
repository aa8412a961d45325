use crate::error::{Error, Result};
use crate::matching::Matching;

/// Absolute tolerance for the symmetry check on dense input. Matrices
/// built by this crate are symmetric by construction; the check only
/// guards hand-written or corrupted input.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// One stored entry of a sparse matrix, normalized to the upper
/// triangle (`i <= j`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseEntry {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    /// Row-major `n * n` table.
    Dense(Vec<f64>),
    /// Upper triangle stored once, sorted by `(i, j)`, mirrored on access.
    Sparse(Vec<SparseEntry>),
}

/// Square symmetric non-negative matrix: the weighted adjacency of one
/// graph. Off-diagonal entries are edge weights; the diagonal may carry a
/// node attribute (zero for distance graphs).
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    n: usize,
    storage: Storage,
}

fn check_weight(w: f64, what: &str) -> Result<()> {
    if !w.is_finite() {
        return Err(Error::Domain(format!("{what} is not finite: {w}")));
    }
    if w < 0.0 {
        return Err(Error::Domain(format!("{what} is negative: {w}")));
    }
    Ok(())
}

impl AffinityMatrix {
    /// Dense matrix from a row-major table of length `n * n`.
    pub fn dense(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("matrix order must be positive".into()));
        }
        if entries.len() != n * n {
            return Err(Error::Dimension(format!(
                "expected {} entries for order {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        for (k, &w) in entries.iter().enumerate() {
            check_weight(w, &format!("entry ({}, {})", k / n, k % n))?;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (entries[i * n + j] - entries[j * n + i]).abs();
                if d > SYMMETRY_TOL {
                    return Err(Error::Domain(format!(
                        "asymmetric pair ({i}, {j}): |{} - {}| > {SYMMETRY_TOL:e}",
                        entries[i * n + j],
                        entries[j * n + i]
                    )));
                }
            }
        }
        Ok(AffinityMatrix {
            n,
            storage: Storage::Dense(entries),
        })
    }

    /// Dense matrix known symmetric and non-negative by construction.
    pub(crate) fn dense_unchecked(n: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        AffinityMatrix {
            n,
            storage: Storage::Dense(entries),
        }
    }

    /// Convenience constructor from nested rows (tests, small examples).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::Dimension("ragged rows".into()));
            }
        }
        AffinityMatrix::dense(n, rows.concat())
    }

    /// Sparse matrix from coordinate entries. Either orientation of an
    /// undirected edge is accepted and normalized to `i <= j`; listing
    /// the same pair twice is an error.
    pub fn sparse(n: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("matrix order must be positive".into()));
        }
        let mut stored: Vec<SparseEntry> = Vec::with_capacity(entries.len());
        for (i, j, w) in entries {
            if i >= n || j >= n {
                return Err(Error::Dimension(format!(
                    "entry ({i}, {j}) out of range for order {n}"
                )));
            }
            check_weight(w, &format!("entry ({i}, {j})"))?;
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            stored.push(SparseEntry { i, j, weight: w });
        }
        stored.sort_by_key(|e| (e.i, e.j));
        for k in 1..stored.len() {
            if stored[k].i == stored[k - 1].i && stored[k].j == stored[k - 1].j {
                return Err(Error::Domain(format!(
                    "duplicate sparse entry ({}, {})",
                    stored[k].i, stored[k].j
                )));
            }
        }
        Ok(AffinityMatrix {
            n,
            storage: Storage::Sparse(stored),
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    /// Number of stored upper-triangle entries (sparse) or nonzero
    /// upper-triangle entries (dense).
    pub fn stored_entries(&self) -> usize {
        match &self.storage {
            Storage::Sparse(e) => e.len(),
            Storage::Dense(_) => self.nonzero_upper().count(),
        }
    }

    /// Entry `(i, j)`, mirroring sparse storage across the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.n && j < self.n);
        match &self.storage {
            Storage::Dense(d) => d[i * self.n + j],
            Storage::Sparse(e) => {
                let (i, j) = if i <= j { (i, j) } else { (j, i) };
                match e.binary_search_by_key(&(i, j), |x| (x.i, x.j)) {
                    Ok(k) => e[k].weight,
                    Err(_) => 0.0,
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.storage {
            Storage::Dense(d) => d.iter().all(|&w| w == 0.0),
            Storage::Sparse(e) => e.iter().all(|x| x.weight == 0.0),
        }
    }

    /// Nonzero upper-triangle entries `(i, j, w)` with `i <= j`, in
    /// sorted order for both storages.
    pub fn nonzero_upper(&self) -> Box<dyn Iterator<Item = (usize, usize, f64)> + '_> {
        match &self.storage {
            Storage::Dense(d) => {
                let n = self.n;
                Box::new((0..n).flat_map(move |i| {
                    (i..n).filter_map(move |j| {
                        let w = d[i * n + j];
                        (w != 0.0).then_some((i, j, w))
                    })
                }))
            }
            Storage::Sparse(e) => Box::new(
                e.iter()
                    .filter(|x| x.weight != 0.0)
                    .map(|x| (x.i, x.j, x.weight)),
            ),
        }
    }

    /// Stored upper-triangle entries including explicit zeros (sparse
    /// pattern inspection).
    pub fn stored_upper(&self) -> Box<dyn Iterator<Item = (usize, usize, f64)> + '_> {
        match &self.storage {
            Storage::Dense(_) => self.nonzero_upper(),
            Storage::Sparse(e) => Box::new(e.iter().map(|x| (x.i, x.j, x.weight))),
        }
    }

    /// `y = A x` with a fixed summation order: dense rows left to right,
    /// sparse entries in stored order. O(n^2) dense, O(edges) sparse.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        match &self.storage {
            Storage::Dense(d) => {
                for (i, yi) in y.iter_mut().enumerate() {
                    let row = &d[i * self.n..(i + 1) * self.n];
                    *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
            Storage::Sparse(e) => {
                y.fill(0.0);
                for x_e in e {
                    y[x_e.i] += x_e.weight * x[x_e.j];
                    if x_e.i != x_e.j {
                        y[x_e.j] += x_e.weight * x[x_e.i];
                    }
                }
            }
        }
    }

    /// Sum of squares of all `n^2` entries.
    pub fn sum_of_squares(&self) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d.iter().map(|w| w * w).sum(),
            Storage::Sparse(e) => e
                .iter()
                .map(|x| {
                    let s = x.weight * x.weight;
                    if x.i == x.j {
                        s
                    } else {
                        2.0 * s
                    }
                })
                .sum(),
        }
    }
}

/// Koopmans-Beckmann discrepancy `sum_ij (A_ij - B_{m(i)m(j)})^2`,
/// evaluated entrywise without materializing the matching as a matrix.
/// Requires equal orders and a permutation matching.
pub fn kb_discrepancy(a: &AffinityMatrix, b: &AffinityMatrix, m: &Matching) -> Result<f64> {
    if a.order() != b.order() {
        return Err(Error::Dimension(format!(
            "kb_discrepancy needs equal orders, got {} and {}",
            a.order(),
            b.order()
        )));
    }
    if m.source_size() != a.order() || !m.is_permutation() {
        return Err(Error::Dimension(
            "kb_discrepancy needs a permutation matching of the common order".into(),
        ));
    }
    let n = a.order();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = a.get(i, j) - b.get(m.target_of(i), m.target_of(j));
            total += d * d;
        }
    }
    Ok(total)
}

/// Matching objective `sum_ij A_ij * B_{m(i)m(j)}`: the Lawler quadratic
/// score specialized to the Kronecker-structured affinity `W = A (x) B`.
pub fn affinity_score(a: &AffinityMatrix, b: &AffinityMatrix, m: &Matching) -> Result<f64> {
    if m.source_size() != a.order() || m.target_size() != b.order() {
        return Err(Error::Dimension(format!(
            "matching is {}->{} but matrices have orders {} and {}",
            m.source_size(),
            m.target_size(),
            a.order(),
            b.order()
        )));
    }
    let mut total = 0.0;
    if a.is_sparse() {
        for (i, j, w) in a.stored_upper() {
            let t = w * b.get(m.target_of(i), m.target_of(j));
            total += if i == j { t } else { 2.0 * t };
        }
    } else {
        let n = a.order();
        for i in 0..n {
            for j in 0..n {
                total += a.get(i, j) * b.get(m.target_of(i), m.target_of(j));
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cycle() -> AffinityMatrix {
        AffinityMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn dense_rejects_asymmetry_and_negatives() {
        assert!(AffinityMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0 + 1e-9, 0.0]]).is_err());
        assert!(AffinityMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
        assert!(AffinityMatrix::from_rows(&[vec![0.0, f64::NAN], vec![f64::NAN, 0.0]]).is_err());
        // within tolerance is accepted
        assert!(AffinityMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0 + 1e-13, 0.0]]).is_ok());
    }

    #[test]
    fn sparse_rejects_duplicates() {
        assert!(AffinityMatrix::sparse(3, vec![(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(AffinityMatrix::sparse(3, vec![(0, 1, 1.0), (0, 1, 1.0)]).is_err());
        assert!(AffinityMatrix::sparse(3, vec![(0, 3, 1.0)]).is_err());
    }

    #[test]
    fn sparse_mirrors_on_access() {
        let a = AffinityMatrix::sparse(3, vec![(1, 0, 0.5), (1, 2, 2.0)]).unwrap();
        assert_eq!(a.get(0, 1), 0.5);
        assert_eq!(a.get(1, 0), 0.5);
        assert_eq!(a.get(2, 1), 2.0);
        assert_eq!(a.get(0, 2), 0.0);
        assert_eq!(a.stored_entries(), 2);
    }

    #[test]
    fn matvec_dense_and_sparse_agree() {
        let dense =
            AffinityMatrix::from_rows(&[vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.0], vec![2.0, 0.0, 0.0]])
                .unwrap();
        let sparse =
            AffinityMatrix::sparse(3, vec![(0, 1, 1.0), (0, 2, 2.0), (1, 1, 0.5)]).unwrap();
        let x = [1.0, 2.0, 3.0];
        let mut yd = [0.0; 3];
        let mut ys = [0.0; 3];
        dense.matvec(&x, &mut yd);
        sparse.matvec(&x, &mut ys);
        for (a, b) in yd.iter().zip(&ys) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn kb_identical_graphs_is_zero() {
        let a = two_cycle();
        let m = Matching::identity(2).unwrap();
        assert_eq!(kb_discrepancy(&a, &a, &m).unwrap(), 0.0);
    }

    #[test]
    fn kb_direct_arithmetic() {
        let a = two_cycle();
        let b = AffinityMatrix::from_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let m = Matching::identity(2).unwrap();
        // two off-diagonal entries each differ by 1
        assert_eq!(kb_discrepancy(&a, &b, &m).unwrap(), 2.0);
    }

    #[test]
    fn kb_rejects_size_mismatch() {
        let a = two_cycle();
        let b = AffinityMatrix::from_rows(&[vec![0.0]]).unwrap();
        let m = Matching::identity(2).unwrap();
        assert!(kb_discrepancy(&a, &b, &m).is_err());
    }

    #[test]
    fn affinity_score_two_unit_edges() {
        let a = two_cycle();
        let m = Matching::identity(2).unwrap();
        assert_eq!(affinity_score(&a, &a, &m).unwrap(), 2.0);
    }

    #[test]
    fn affinity_score_zero_matrix() {
        let z = AffinityMatrix::dense(2, vec![0.0; 4]).unwrap();
        let b = two_cycle();
        for assignment in [vec![0, 1], vec![1, 0]] {
            let m = Matching::new(assignment, 2).unwrap();
            assert_eq!(affinity_score(&z, &b, &m).unwrap(), 0.0);
        }
    }
}
