//! Delaunay triangulation of points in the unit square, by incremental
//! Bowyer-Watson insertion inside a large super-triangle.
//!
//! Robustness scheme: coordinates are quantized to a `2^18` grid and all
//! predicates are exact integer determinants (i128), so no sign is ever
//! decided by floating-point rounding. Cocircular ties are resolved by a
//! lexicographic symbolic perturbation of the paraboloid lift: point `i`
//! has its lift lowered by an infinitesimal `eps_i`, with `eps_0 >>
//! eps_1 >> ...`, which makes the in-circle predicate total and
//! independent of insertion order. Coincident grid points are separated
//! by one grid step before insertion.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::instance::PointSet;

const GRID_BITS: u32 = 18;
/// Quantization steps across `[0, 1]`.
const GRID: i64 = 1 << GRID_BITS;
/// Distance of the super-triangle vertices from the grid center. Far
/// enough (2048 box widths) that empty circumdisks of random data
/// triangles do not reach them, small enough that every determinant
/// below stays within i128.
const SUPER_REACH: i64 = 1 << 29;
const NO_NEIGHBOR: usize = usize::MAX;

type QPoint = (i64, i64);

/// `> 0` iff `c` lies strictly left of the directed line `a -> b`.
fn orient2d(a: QPoint, b: QPoint, c: QPoint) -> i128 {
    let abx = (b.0 - a.0) as i128;
    let aby = (b.1 - a.1) as i128;
    let acx = (c.0 - a.0) as i128;
    let acy = (c.1 - a.1) as i128;
    abx * acy - aby * acx
}

/// In-circle determinant, translated form: positive iff `d` is strictly
/// inside the circumcircle of the counterclockwise triangle `(a, b, c)`.
fn incircle_det(a: QPoint, b: QPoint, c: QPoint, d: QPoint) -> i128 {
    let adx = (a.0 - d.0) as i128;
    let ady = (a.1 - d.1) as i128;
    let bdx = (b.0 - d.0) as i128;
    let bdy = (b.1 - d.1) as i128;
    let cdx = (c.0 - d.0) as i128;
    let cdy = (c.1 - d.1) as i128;
    let la = adx * adx + ady * ady;
    let lb = bdx * bdx + bdy * bdy;
    let lc = cdx * cdx + cdy * cdy;
    adx * (bdy * lc - cdy * lb) - ady * (bdx * lc - cdx * lb) + la * (bdx * cdy - bdy * cdx)
}

/// Strictly-inside-circumcircle test for the counterclockwise triangle
/// `(ia, ib, ic)` against `id`, total via the lift perturbation: on an
/// exact tie the perturbed determinant is `-sum_i eps_i * cof_i`, so the
/// smallest involved point index with a nonzero cofactor decides. The
/// final cofactor is the triangle's orientation, which is nonzero, so
/// the rule always terminates.
fn in_circle_sos(pts: &[QPoint], ia: usize, ib: usize, ic: usize, id: usize) -> bool {
    let (a, b, c, d) = (pts[ia], pts[ib], pts[ic], pts[id]);
    debug_assert!(orient2d(a, b, c) > 0);
    let det = incircle_det(a, b, c, d);
    if det != 0 {
        return det > 0;
    }
    let mut cof = [
        (ia, orient2d(b, c, d)),
        (ib, -orient2d(a, c, d)),
        (ic, orient2d(a, b, d)),
        (id, -orient2d(a, b, c)),
    ];
    cof.sort_by_key(|&(i, _)| i);
    for (_, c) in cof {
        if c != 0 {
            return c < 0;
        }
    }
    unreachable!("degenerate in-circle query on a zero-area triangle");
}

#[derive(Debug, Clone)]
struct Tri {
    /// Vertex indices, counterclockwise.
    v: [usize; 3],
    /// `nb[k]` is the neighbor across the edge opposite `v[k]`.
    nb: [usize; 3],
    alive: bool,
}

struct Triangulation {
    pts: Vec<QPoint>,
    n_data: usize,
    tris: Vec<Tri>,
    /// Flood-fill stamps, one slot per triangle.
    seen: Vec<u32>,
    bad: Vec<u32>,
    stamp: u32,
    last: usize,
}

impl Triangulation {
    fn new(mut pts: Vec<QPoint>) -> Self {
        let n_data = pts.len();
        let c = GRID / 2;
        pts.push((c, c + SUPER_REACH));
        pts.push((c - SUPER_REACH, c - SUPER_REACH));
        pts.push((c + SUPER_REACH, c - SUPER_REACH));
        let root = Tri {
            v: [n_data, n_data + 1, n_data + 2],
            nb: [NO_NEIGHBOR; 3],
            alive: true,
        };
        Triangulation {
            pts,
            n_data,
            tris: vec![root],
            seen: vec![0],
            bad: vec![0],
            stamp: 0,
            last: 0,
        }
    }

    fn locate(&self, p: QPoint) -> usize {
        let mut t = self.last;
        let mut steps = 0usize;
        'walk: loop {
            debug_assert!(self.tris[t].alive);
            let v = self.tris[t].v;
            for k in 0..3 {
                let u = self.pts[v[(k + 1) % 3]];
                let w = self.pts[v[(k + 2) % 3]];
                if orient2d(u, w, p) < 0 {
                    t = self.tris[t].nb[k];
                    debug_assert_ne!(t, NO_NEIGHBOR, "walked out of the super-triangle");
                    steps += 1;
                    if steps > 4 * self.tris.len() {
                        break 'walk;
                    }
                    continue 'walk;
                }
            }
            return t;
        }
        // walk cycled on a degenerate configuration; scan instead
        for (i, tri) in self.tris.iter().enumerate() {
            if tri.alive
                && (0..3).all(|k| {
                    orient2d(self.pts[tri.v[(k + 1) % 3]], self.pts[tri.v[(k + 2) % 3]], p) >= 0
                })
            {
                return i;
            }
        }
        unreachable!("point not contained in any triangle");
    }

    fn is_bad(&self, t: usize, p_idx: usize) -> bool {
        let [a, b, c] = self.tris[t].v;
        in_circle_sos(&self.pts, a, b, c, p_idx)
    }

    fn insert(&mut self, p_idx: usize) {
        let p = self.pts[p_idx];
        let t0 = self.locate(p);
        debug_assert!(self.is_bad(t0, p_idx));

        // flood-fill the cavity of triangles whose circumcircle contains p
        self.stamp += 1;
        let stamp = self.stamp;
        let mut cavity = Vec::new();
        let mut stack = vec![t0];
        self.seen[t0] = stamp;
        while let Some(t) = stack.pop() {
            if !self.is_bad(t, p_idx) {
                continue;
            }
            self.bad[t] = stamp;
            cavity.push(t);
            for k in 0..3 {
                let nb = self.tris[t].nb[k];
                if nb != NO_NEIGHBOR && self.seen[nb] != stamp {
                    self.seen[nb] = stamp;
                    stack.push(nb);
                }
            }
        }

        // boundary edges of the cavity, kept in their counterclockwise
        // orientation, with the surviving outer neighbor
        let mut boundary: Vec<(usize, usize, usize)> = Vec::new();
        for &t in &cavity {
            for k in 0..3 {
                let nb = self.tris[t].nb[k];
                if nb == NO_NEIGHBOR || self.bad[nb] != stamp {
                    let u = self.tris[t].v[(k + 1) % 3];
                    let w = self.tris[t].v[(k + 2) % 3];
                    boundary.push((u, w, nb));
                }
            }
        }
        for &t in &cavity {
            self.tris[t].alive = false;
        }

        // star the cavity from p; new triangle (u, w, p) is CCW because p
        // lies inside the cavity, left of every boundary edge
        let base = self.tris.len();
        let mut by_first: HashMap<usize, usize> = HashMap::with_capacity(boundary.len());
        let mut by_second: HashMap<usize, usize> = HashMap::with_capacity(boundary.len());
        for (off, &(u, w, _)) in boundary.iter().enumerate() {
            by_first.insert(u, base + off);
            by_second.insert(w, base + off);
        }
        // a repeated boundary vertex would mean a pinched cavity
        debug_assert_eq!(by_first.len(), boundary.len());
        debug_assert_eq!(by_second.len(), boundary.len());
        for &(u, w, outer) in &boundary {
            debug_assert!(orient2d(self.pts[u], self.pts[w], p) > 0);
            let idx = self.tris.len();
            self.tris.push(Tri {
                v: [u, w, p_idx],
                nb: [by_first[&w], by_second[&u], outer],
                alive: true,
            });
            self.seen.push(0);
            self.bad.push(0);
            if outer != NO_NEIGHBOR {
                // the shared edge runs (w, u) seen from the outer side
                let back = &mut self.tris[outer];
                for k in 0..3 {
                    if back.v[(k + 1) % 3] == w && back.v[(k + 2) % 3] == u {
                        back.nb[k] = idx;
                        break;
                    }
                }
            }
        }
        self.last = self.tris.len() - 1;
    }

    fn data_edges(&self) -> BTreeSet<(usize, usize)> {
        let mut edges = BTreeSet::new();
        for t in &self.tris {
            if !t.alive {
                continue;
            }
            for k in 0..3 {
                let a = t.v[k];
                let b = t.v[(k + 1) % 3];
                if a < self.n_data && b < self.n_data {
                    edges.insert((a.min(b), a.max(b)));
                }
            }
        }
        edges
    }
}

/// Quantize unit-square coordinates to the predicate grid, separating
/// coincident grid points deterministically.
pub(crate) fn quantize(points: &[(f64, f64)]) -> Vec<QPoint> {
    let mut used: HashSet<QPoint> = HashSet::with_capacity(points.len());
    let mut out = Vec::with_capacity(points.len());
    for &(x, y) in points {
        let mut q = (
            (x.clamp(0.0, 1.0) * GRID as f64).round() as i64,
            (y.clamp(0.0, 1.0) * GRID as f64).round() as i64,
        );
        while !used.insert(q) {
            q.0 += 1;
            if q.0 > GRID {
                q.0 = 0;
                q.1 += 1;
                if q.1 > GRID {
                    q.1 = 0;
                }
            }
        }
        out.push(q);
    }
    out
}

/// Edge set of the Delaunay triangulation of `p`, sorted, with
/// `(i, j), i < j`. Every returned triangle of the underlying
/// triangulation has a circumcircle empty of other points in the
/// symbolically perturbed sense.
pub fn delaunay_edges(p: &PointSet) -> Result<Vec<(usize, usize)>> {
    let n = p.len();
    if n < 3 {
        return Err(Error::Degenerate(format!(
            "Delaunay triangulation needs at least 3 points, got {n}"
        )));
    }
    let q = quantize(p.as_slice());
    let mut tri = Triangulation::new(q);
    for i in 0..n {
        tri.insert(i);
    }
    Ok(tri.data_edges().into_iter().collect())
}
