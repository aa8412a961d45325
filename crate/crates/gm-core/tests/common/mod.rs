//! Independent oracles shared by the integration tests. Nothing here
//! calls into the code paths it checks: the eigensolver is cyclic
//! Jacobi, the Kronecker product is built entrywise, and the Delaunay
//! oracle tests every triple against every point.
#![allow(dead_code)]

use gm_core::rng::SplitMix64;

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi
/// rotations. Returns eigenvalues sorted descending by value with the
/// matching unit eigenvectors as rows.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale: f64 = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |s, &x| s.max(x.abs()))
        .max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p][q] * m[p][q];
            }
        }
        if off.sqrt() <= 1e-13 * scale {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                if m[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]));
    let values: Vec<f64> = order.iter().map(|&i| m[i][i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row][col]).collect())
        .collect();
    (values, vectors)
}

/// Among the non-leading eigenvalues, the one of largest magnitude (the
/// limit of deflated power iteration), with its eigenvector.
pub fn second_by_magnitude(values: &[f64], vectors: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let idx = (1..values.len())
        .max_by(|&i, &j| values[i].abs().total_cmp(&values[j].abs()))
        .expect("order >= 2");
    (values[idx], vectors[idx].clone())
}

/// Entrywise Kronecker product `left (x) right` as a dense table of
/// order `rows(left) * rows(right)`.
pub fn kron_dense(left: &[Vec<f64>], right: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = left.len();
    let q = right.len();
    let n = p * q;
    let mut out = vec![vec![0.0; n]; n];
    for a in 0..p {
        for b in 0..q {
            for c in 0..p {
                for d in 0..q {
                    out[a * q + b][c * q + d] = left[a][c] * right[b][d];
                }
            }
        }
    }
    out
}

/// Dense table of an `AffinityMatrix`.
pub fn to_rows(a: &gm_core::AffinityMatrix) -> Vec<Vec<f64>> {
    let n = a.order();
    (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j)).collect())
        .collect()
}

pub fn random_symmetric_nonneg(n: usize, rng: &mut SplitMix64) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let w = rng.next_f64();
            m[i][j] = w;
            m[j][i] = w;
        }
    }
    m
}

pub fn max_normalized(v: &[f64]) -> Vec<f64> {
    let m = v.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    v.iter().map(|x| x / m).collect()
}

pub fn l2_normalized(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

pub fn inf_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sign-align `b` to `a` by inner product, then return both 2-normalized.
pub fn aligned_unit_pair(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let ua = l2_normalized(a);
    let mut ub = l2_normalized(b);
    if dot(&ua, &ub) < 0.0 {
        for x in &mut ub {
            *x = -*x;
        }
    }
    (ua, ub)
}

pub mod delaunay_oracle {
    //! Brute-force Delaunay: a triple is a triangle iff no other point
    //! is strictly inside its circumcircle, under the same lexicographic
    //! lift perturbation the library documents (re-derived here from the
    //! 4x4 homogeneous determinant rather than the translated 3x3 form).

    use std::collections::BTreeSet;

    pub type QPoint = (i64, i64);

    /// The library's documented quantization: 2^18 steps across [0, 1].
    pub fn quantize(points: &[(f64, f64)]) -> Vec<QPoint> {
        let grid = (1i64 << 18) as f64;
        points
            .iter()
            .map(|&(x, y)| {
                (
                    (x.clamp(0.0, 1.0) * grid).round() as i64,
                    (y.clamp(0.0, 1.0) * grid).round() as i64,
                )
            })
            .collect()
    }

    fn orient(a: QPoint, b: QPoint, c: QPoint) -> i128 {
        let abx = (b.0 - a.0) as i128;
        let aby = (b.1 - a.1) as i128;
        let acx = (c.0 - a.0) as i128;
        let acy = (c.1 - a.1) as i128;
        abx * acy - aby * acx
    }

    /// 4x4 homogeneous in-circle determinant, expanded along the lift
    /// column: `det = sum_r w_r * C_r` with `C_r` the lift cofactors.
    fn incircle_det4(a: QPoint, b: QPoint, c: QPoint, d: QPoint) -> i128 {
        let lift = |p: QPoint| (p.0 as i128) * (p.0 as i128) + (p.1 as i128) * (p.1 as i128);
        lift(a) * orient(b, c, d) - lift(b) * orient(a, c, d) + lift(c) * orient(a, b, d)
            - lift(d) * orient(a, b, c)
    }

    /// Strictly inside under the lift perturbation; `(a, b, c)` must be
    /// counterclockwise and carry their global indices.
    pub fn strictly_inside(
        pts: &[QPoint],
        ia: usize,
        ib: usize,
        ic: usize,
        id: usize,
    ) -> bool {
        let (a, b, c, d) = (pts[ia], pts[ib], pts[ic], pts[id]);
        assert!(orient(a, b, c) > 0);
        let det = incircle_det4(a, b, c, d);
        if det != 0 {
            return det > 0;
        }
        let mut cof = [
            (ia, orient(b, c, d)),
            (ib, -orient(a, c, d)),
            (ic, orient(a, b, d)),
            (id, -orient(a, b, c)),
        ];
        cof.sort_by_key(|&(i, _)| i);
        for (_, c) in cof {
            if c != 0 {
                return c < 0;
            }
        }
        unreachable!("zero-area query triangle");
    }

    /// Every edge of every empty-circumcircle triangle, O(n^4).
    pub fn edges(points: &[(f64, f64)]) -> BTreeSet<(usize, usize)> {
        let q = quantize(points);
        let n = q.len();
        let mut out = BTreeSet::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let (a, b, c) = if orient(q[i], q[j], q[k]) > 0 {
                        (i, j, k)
                    } else if orient(q[i], q[k], q[j]) > 0 {
                        (i, k, j)
                    } else {
                        continue; // collinear triple
                    };
                    let empty = (0..n)
                        .filter(|&m| m != i && m != j && m != k)
                        .all(|m| !strictly_inside(&q, a, b, c, m));
                    if empty {
                        out.insert((i, j));
                        out.insert((i, k));
                        out.insert((j, k));
                    }
                }
            }
        }
        out
    }
}

/// Union-find connectivity check over an edge list.
pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = n;
    for &(a, b) in edges {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components == 1
}
