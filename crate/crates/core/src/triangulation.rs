//! Delaunay triangulation and the quantities derived from it: the sharpest
//! angle, the Euclidean minimum spanning tree, the weight comparison between
//! the two, and circumdisk coverage counts.
//!
//! Construction is randomized-order incremental insertion (Bowyer–Watson
//! cavities over a triangulation closed with ghost triangles). All decisions
//! use exact predicates. Cocircular ties are broken by symbolic perturbation:
//! every site is lifted onto the paraboloid and site `i` is raised by an
//! infinitesimal that dominates the raise of every site with a larger index.
//! The result is the unique regular triangulation of the perturbed lift, so it
//! does not depend on insertion order. For the unit square listed
//! counterclockwise from the origin the diagonal joins sites 1 and 3.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{angle_at, incircle_ccw, orient2d, Point};

/// Below this sharpest angle (radians) spanner construction refuses to run.
pub const ALPHA_FLOOR: f64 = 1e-6;

/// Default seed for the random insertion order. The result does not depend
/// on it; only the running time does.
pub const INSERTION_SEED: u64 = 0x5eed_de1a_7a11;
const GHOST: usize = usize::MAX;

/// An undirected triangulation edge with its one or two incident triangles.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Endpoints, smaller site index first.
    pub v: [usize; 2],
    pub tris: [Option<usize>; 2],
}

impl Edge {
    pub fn is_hull(&self) -> bool {
        self.tris[1].is_none()
    }
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    sites: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    tri_edges: Vec<[usize; 3]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpanningTree {
    pub edges: Vec<[usize; 2]>,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangulationStats {
    pub alpha: f64,
    pub dt_weight: f64,
    pub mst_weight: f64,
    pub fw: f64,
    pub fe: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightCheck {
    pub dt_weight: f64,
    pub mst_weight: f64,
    pub fw: f64,
    pub holds: bool,
}

/// `(1 + cos α) / (1 − cos α)`: the Delaunay-to-MST weight factor.
pub fn weight_factor(alpha: f64) -> f64 {
    let c = alpha.cos();
    (1.0 + c) / (1.0 - c)
}

/// `2π / α`: the circumdisk coverage bound.
pub fn coverage_bound(alpha: f64) -> f64 {
    2.0 * PI / alpha
}

/// Checks the site preconditions shared by every way of obtaining a
/// triangulation: finite, at least three, pairwise distinct, not collinear.
pub fn validate_sites(sites: &[Point]) -> Result<()> {
    if sites.len() < 3 {
        return Err(Error::TooFewSites(sites.len()));
    }
    if sites.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut order: Vec<usize> = (0..sites.len()).collect();
    order.sort_by(|&i, &j| sites[i].lex_cmp(&sites[j]).then(i.cmp(&j)));
    for w in order.windows(2) {
        if sites[w[0]] == sites[w[1]] {
            return Err(Error::DuplicateSites {
                first: w[0].min(w[1]),
                second: w[0].max(w[1]),
            });
        }
    }
    let (a, b) = (sites[0], sites[1]);
    if sites.iter().all(|&c| orient2d(a, b, c) == 0) {
        return Err(Error::AllCollinear);
    }
    Ok(())
}

pub fn build_delaunay(sites: &[Point]) -> Result<Triangulation> {
    build_delaunay_seeded(sites, INSERTION_SEED)
}

/// Same as [`build_delaunay`] with an explicit insertion-order seed.
pub fn build_delaunay_seeded(sites: &[Point], seed: u64) -> Result<Triangulation> {
    validate_sites(sites)?;
    let triangles = DelaunayBuilder::run(sites, seed);
    Ok(Triangulation::assemble(sites.to_vec(), triangles))
}

pub fn sharpest_angle(t: &Triangulation) -> f64 {
    t.sharpest_angle()
}

pub fn euclidean_mst(t: &Triangulation) -> SpanningTree {
    t.mst()
}

/// Compares the triangulation weight against `f_w(α)` times the MST weight.
pub fn weight_bound_check(t: &Triangulation) -> WeightCheck {
    t.weight_check()
}

pub fn circumdisk_coverage(x: Point, t: &Triangulation) -> usize {
    t.circumdisk_coverage(x)
}

impl Triangulation {
    /// Builds the Delaunay triangulation of `sites`.
    pub fn delaunay(sites: &[Point]) -> Result<Self> {
        build_delaunay(sites)
    }

    /// Adopts a precomputed triangulation after checking that it tiles the
    /// convex hull of `sites` and has the empty-circumcircle property.
    pub fn from_triangles(sites: &[Point], triangles: &[[usize; 3]]) -> Result<Self> {
        validate_sites(sites)?;
        let n = sites.len();
        let bad = |msg: String| Err(Error::InvalidTriangulation(msg));
        let mut tris = Vec::with_capacity(triangles.len());
        let mut used = vec![false; n];
        for (k, &[a, b, c]) in triangles.iter().enumerate() {
            if a >= n || b >= n || c >= n {
                return bad(format!("triangle {k} references a site out of range"));
            }
            if a == b || b == c || a == c {
                return bad(format!("triangle {k} repeats a site"));
            }
            let t = match orient2d(sites[a], sites[b], sites[c]) {
                0 => return bad(format!("triangle {k} is degenerate")),
                1 => [a, b, c],
                _ => [a, c, b],
            };
            used[a] = true;
            used[b] = true;
            used[c] = true;
            tris.push(canonical_rotation(t));
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return bad(format!("site {i} belongs to no triangle"));
        }
        tris.sort_unstable();

        // Each directed edge may appear once; each undirected edge at most twice.
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (k, t) in tris.iter().enumerate() {
            for i in 0..3 {
                let e = (t[i], t[(i + 1) % 3]);
                if directed.insert(e, k).is_some() {
                    return bad(format!("edge {:?} is used twice with the same orientation", e));
                }
            }
        }
        let boundary: Vec<(usize, usize)> = directed
            .keys()
            .filter(|&&(a, b)| !directed.contains_key(&(b, a)))
            .copied()
            .collect();
        let mut on_boundary = vec![false; n];
        let mut out_deg = vec![0usize; n];
        for &(a, b) in &boundary {
            on_boundary[a] = true;
            out_deg[a] += 1;
            for (i, &s) in sites.iter().enumerate() {
                if orient2d(sites[a], sites[b], s) < 0 {
                    return bad(format!("site {i} lies outside boundary edge ({a}, {b})"));
                }
            }
        }
        if out_deg.iter().any(|&d| d > 1) {
            return bad("boundary is not a simple cycle".into());
        }
        let b = on_boundary.iter().filter(|&&x| x).count();
        if tris.len() + b + 2 != 2 * n {
            return bad(format!(
                "{} triangles cannot tile the hull of {} sites with {} boundary sites",
                tris.len(),
                n,
                b
            ));
        }
        for (k, t) in tris.iter().enumerate() {
            let [a, b, c] = *t;
            for (i, &s) in sites.iter().enumerate() {
                if i != a && i != b && i != c && incircle_ccw(sites[a], sites[b], sites[c], s) > 0 {
                    return bad(format!("site {i} lies inside the circumcircle of triangle {k}"));
                }
            }
        }
        Ok(Self::assemble(sites.to_vec(), tris))
    }

    fn assemble(sites: Vec<Point>, triangles: Vec<[usize; 3]>) -> Self {
        let mut edges: Vec<Edge> = Vec::new();
        let mut index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        for (k, t) in triangles.iter().enumerate() {
            let mut te = [0; 3];
            for i in 0..3 {
                let (a, b) = (t[(i + 1) % 3], t[(i + 2) % 3]);
                let key = [a.min(b), a.max(b)];
                let e = *index.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        v: key,
                        tris: [None, None],
                    });
                    edges.len() - 1
                });
                let slot = &mut edges[e].tris;
                if slot[0].is_none() {
                    slot[0] = Some(k);
                } else {
                    slot[1] = Some(k);
                }
                te[i] = e;
            }
            tri_edges.push(te);
        }
        Triangulation {
            sites,
            triangles,
            edges,
            tri_edges,
        }
    }

    pub fn sites(&self) -> &[Point] {
        &self.sites
    }

    /// Counterclockwise site-index triples, each rotated to start at its
    /// smallest index, sorted lexicographically.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge indices of triangle `t`; entry `i` is the edge opposite corner `i`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|i| self.sites[i])
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e].v;
        self.sites[a].dist(self.sites[b])
    }

    pub fn sharpest_angle(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.triangle_points(t);
                angle_at(c, a, b).min(angle_at(a, b, c)).min(angle_at(b, c, a))
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn weight(&self) -> f64 {
        kahan_sum((0..self.edges.len()).map(|e| self.edge_length(e)))
    }

    /// Kruskal over the Delaunay edges; ties broken by endpoint indices.
    pub fn mst(&self) -> SpanningTree {
        let mut order: Vec<(f64, [usize; 2])> = (0..self.edges.len())
            .map(|e| (self.edge_length(e), self.edges[e].v))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut uf = UnionFind::new(self.sites.len());
        let mut edges = Vec::with_capacity(self.sites.len() - 1);
        let mut lengths = Vec::with_capacity(self.sites.len() - 1);
        for (len, [a, b]) in order {
            if uf.union(a, b) {
                edges.push([a, b]);
                lengths.push(len);
            }
        }
        SpanningTree {
            edges,
            weight: kahan_sum(lengths),
        }
    }

    pub fn weight_check(&self) -> WeightCheck {
        let fw = weight_factor(self.sharpest_angle());
        let dt_weight = self.weight();
        let mst_weight = self.mst().weight;
        WeightCheck {
            dt_weight,
            mst_weight,
            fw,
            holds: dt_weight <= fw * mst_weight,
        }
    }

    pub fn stats(&self) -> TriangulationStats {
        let alpha = self.sharpest_angle();
        TriangulationStats {
            alpha,
            dt_weight: self.weight(),
            mst_weight: self.mst().weight,
            fw: weight_factor(alpha),
            fe: coverage_bound(alpha),
        }
    }

    /// Number of triangles whose open circumdisk contains `x`.
    pub fn circumdisk_coverage(&self, x: Point) -> usize {
        if self.sites.contains(&x) {
            return 0;
        }
        (0..self.triangles.len())
            .filter(|&t| {
                let [a, b, c] = self.triangle_points(t);
                incircle_ccw(a, b, c, x) > 0
            })
            .count()
    }

    /// Number of sites adjacent to site `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.v.contains(&v)).count()
    }
}

fn canonical_rotation(t: [usize; 3]) -> [usize; 3] {
    let k = (0..3).min_by_key(|&i| t[i]).unwrap();
    [t[k], t[(k + 1) % 3], t[(k + 2) % 3]]
}

pub(crate) fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `false` if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// In-circle test for counterclockwise `a, b, c` under the index-ordered
/// symbolic perturbation of the lifted heights. Never returns zero.
fn incircle_perturbed(pts: &[Point], a: usize, b: usize, c: usize, d: usize) -> i8 {
    let s = incircle_ccw(pts[a], pts[b], pts[c], pts[d]);
    if s != 0 {
        return s;
    }
    // Cofactors of the lifted coordinate in the 4x4 lifting determinant.
    let mut terms = [
        (a, orient2d(pts[b], pts[c], pts[d])),
        (b, -orient2d(pts[a], pts[c], pts[d])),
        (c, orient2d(pts[a], pts[b], pts[d])),
        (d, -orient2d(pts[a], pts[b], pts[c])),
    ];
    terms.sort_by_key(|t| t.0);
    terms
        .iter()
        .map(|t| t.1)
        .find(|&s| s != 0)
        .unwrap_or(-1)
}

struct DelaunayBuilder<'a> {
    pts: &'a [Point],
    tri: Vec<[usize; 3]>,
    nbr: Vec<[usize; 3]>,
    alive: Vec<bool>,
    mark: Vec<u32>,
    stamp: u32,
    last: usize,
}

impl<'a> DelaunayBuilder<'a> {
    fn run(pts: &'a [Point], seed: u64) -> Vec<[usize; 3]> {
        let n = pts.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

        let (i0, i1) = (order[0], order[1]);
        let k = (2..n)
            .find(|&k| orient2d(pts[i0], pts[i1], pts[order[k]]) != 0)
            .expect("validated: not all collinear");
        let i2 = order[k];
        let first = if orient2d(pts[i0], pts[i1], pts[i2]) > 0 {
            [i0, i1, i2]
        } else {
            [i0, i2, i1]
        };

        let mut b = DelaunayBuilder {
            pts,
            tri: Vec::with_capacity(4 * n),
            nbr: Vec::with_capacity(4 * n),
            alive: Vec::with_capacity(4 * n),
            mark: Vec::with_capacity(4 * n),
            stamp: 0,
            last: 0,
        };
        b.init(first);
        for (j, &p) in order.iter().enumerate() {
            if j < 2 || j == k {
                continue;
            }
            b.insert(p);
        }

        let mut out: Vec<[usize; 3]> = b
            .tri
            .iter()
            .zip(&b.alive)
            .filter(|(t, &alive)| alive && !t.contains(&GHOST))
            .map(|(t, _)| canonical_rotation(*t))
            .collect();
        out.sort_unstable();
        out
    }

    fn push(&mut self, t: [usize; 3], n: [usize; 3]) -> usize {
        self.tri.push(t);
        self.nbr.push(n);
        self.alive.push(true);
        self.mark.push(0);
        self.tri.len() - 1
    }

    fn init(&mut self, [a, b, c]: [usize; 3]) {
        // 0 = solid; 1..=3 ghosts on the edges opposite a, b, c.
        self.push([a, b, c], [1, 2, 3]);
        self.push([c, b, GHOST], [3, 2, 0]);
        self.push([a, c, GHOST], [1, 3, 0]);
        self.push([b, a, GHOST], [2, 1, 0]);
        self.last = 0;
    }

    fn conflict(&self, t: usize, p: usize) -> bool {
        let v = self.tri[t];
        match v.iter().position(|&x| x == GHOST) {
            None => incircle_perturbed(self.pts, v[0], v[1], v[2], p) > 0,
            Some(g) => {
                let (a, b) = (v[(g + 1) % 3], v[(g + 2) % 3]);
                match orient2d(self.pts[a], self.pts[b], self.pts[p]) {
                    1 => true,
                    -1 => false,
                    _ => self.conflict(self.nbr[t][g], p),
                }
            }
        }
    }

    fn locate(&self, p: usize) -> usize {
        let q = self.pts[p];
        let mut t = self.last;
        let mut steps = 0usize;
        'walk: while steps <= self.tri.len() {
            steps += 1;
            let v = self.tri[t];
            if v.contains(&GHOST) {
                if self.conflict(t, p) {
                    return t;
                }
                break;
            }
            for i in 0..3 {
                let (a, b) = (v[(i + 1) % 3], v[(i + 2) % 3]);
                if orient2d(self.pts[a], self.pts[b], q) < 0 {
                    t = self.nbr[t][i];
                    continue 'walk;
                }
            }
            return t;
        }
        (0..self.tri.len())
            .find(|&t| self.alive[t] && self.conflict(t, p))
            .expect("every new site conflicts with some triangle")
    }

    fn insert(&mut self, p: usize) {
        let seed = self.locate(p);
        self.stamp += 2;
        let (inside, outside) = (self.stamp, self.stamp + 1);
        self.mark[seed] = inside;
        let mut cavity = vec![seed];
        let mut stack = vec![seed];
        let mut boundary: Vec<(usize, usize)> = Vec::new();
        while let Some(t) = stack.pop() {
            for i in 0..3 {
                let n = self.nbr[t][i];
                if self.mark[n] == inside {
                    continue;
                }
                if self.mark[n] != outside && self.conflict(n, p) {
                    self.mark[n] = inside;
                    cavity.push(n);
                    stack.push(n);
                } else {
                    self.mark[n] = outside;
                    boundary.push((t, i));
                }
            }
        }

        let mut created: Vec<usize> = Vec::with_capacity(boundary.len());
        for &(t, i) in &boundary {
            let x = self.tri[t][(i + 1) % 3];
            let y = self.tri[t][(i + 2) % 3];
            let out = self.nbr[t][i];
            let nt = self.push([x, y, p], [usize::MAX, usize::MAX, out]);
            let j = (0..3)
                .find(|&j| {
                    let w = self.tri[out];
                    w[(j + 1) % 3] == y && w[(j + 2) % 3] == x
                })
                .expect("neighbour shares the cavity edge");
            self.nbr[out][j] = nt;
            created.push(nt);
        }
        for &nt in &created {
            let [x, y, _] = self.tri[nt];
            let by_first = created.iter().copied().find(|&o| self.tri[o][0] == y);
            let by_second = created.iter().copied().find(|&o| self.tri[o][1] == x);
            self.nbr[nt][0] = by_first.expect("cavity boundary is a closed loop");
            self.nbr[nt][1] = by_second.expect("cavity boundary is a closed loop");
        }
        for t in cavity {
            self.alive[t] = false;
        }
        self.last = created
            .iter()
            .copied()
            .find(|&t| !self.tri[t].contains(&GHOST))
            .unwrap_or(created[0]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn random_points(n: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| p(rng.gen(), rng.gen())).collect()
    }

    /// All counterclockwise triples whose circumcircle has no site strictly inside.
    fn brute_force_delaunay(pts: &[Point]) -> Vec<[usize; 3]> {
        let n = pts.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let t = match orient2d(pts[i], pts[j], pts[k]) {
                        0 => continue,
                        1 => [i, j, k],
                        _ => [i, k, j],
                    };
                    let empty = (0..n).all(|l| {
                        l == i
                            || l == j
                            || l == k
                            || incircle_ccw(pts[t[0]], pts[t[1]], pts[t[2]], pts[l]) <= 0
                    });
                    if empty {
                        out.push(t);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn single_triangle() {
        let t = build_delaunay(&[p(0., 0.), p(1., 0.), p(0., 1.)]).unwrap();
        assert_eq!(t.triangles(), &[[0, 1, 2]]);
        assert_eq!(t.edges().len(), 3);
        assert!(t.edges().iter().all(Edge::is_hull));
    }

    #[test]
    fn unit_square_tie_break() {
        let sq = [p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)];
        let t = build_delaunay(&sq).unwrap();
        assert_eq!(t.triangles(), &[[0, 1, 3], [1, 2, 3]]);
        // relabelled in reverse, the diagonal again avoids the new site 0
        let rev: Vec<Point> = sq.iter().rev().copied().collect();
        let t2 = build_delaunay(&rev).unwrap();
        assert_eq!(t2.triangles(), &[[0, 3, 1], [1, 3, 2]]);
        assert_relative_eq!(t.sharpest_angle(), PI / 4.0, epsilon = 1e-12);
        assert_relative_eq!(t.mst().weight, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn cocircular_grid_is_valid() {
        let pts: Vec<Point> = (0..36).map(|i| p((i % 6) as f64, (i / 6) as f64)).collect();
        let t = build_delaunay(&pts).unwrap();
        assert_eq!(t.triangles().len(), 50);
        Triangulation::from_triangles(&pts, t.triangles()).unwrap();
    }

    #[test]
    fn collinear_hull_points() {
        let pts = vec![p(0., 0.), p(1., 0.), p(2., 0.), p(3., 0.), p(1.5, 2.)];
        let t = build_delaunay(&pts).unwrap();
        assert_eq!(t.triangles().len(), 3);
        Triangulation::from_triangles(&pts, t.triangles()).unwrap();
    }

    #[test]
    fn input_errors() {
        assert!(matches!(build_delaunay(&[p(0., 0.), p(1., 0.)]), Err(Error::TooFewSites(2))));
        assert!(matches!(
            build_delaunay(&[p(0., 0.), p(1., 0.), p(0., 0.)]),
            Err(Error::DuplicateSites { first: 0, second: 2 })
        ));
        assert!(matches!(
            build_delaunay(&[p(0., 0.), p(1., 1.), p(2., 2.)]),
            Err(Error::AllCollinear)
        ));
    }

    #[test]
    fn matches_brute_force() {
        for seed in 0..5 {
            let pts = random_points(50, seed);
            let t = build_delaunay(&pts).unwrap();
            assert_eq!(t.triangles(), brute_force_delaunay(&pts).as_slice());
        }
    }

    #[test]
    fn insertion_seed_does_not_matter() {
        let pts = random_points(80, 9);
        let a = build_delaunay(&pts).unwrap();
        for seed in [1, 2, 3] {
            assert_eq!(build_delaunay_seeded(&pts, seed).unwrap().triangles(), a.triangles());
        }
        // cocircular grid as well
        let grid: Vec<Point> = (0..25).map(|i| p((i % 5) as f64, (i / 5) as f64)).collect();
        let g = build_delaunay(&grid).unwrap();
        assert_eq!(build_delaunay_seeded(&grid, 77).unwrap().triangles(), g.triangles());
    }

    #[test]
    fn sharpest_angle_examples() {
        let h = 3f64.sqrt() / 2.0;
        let t = build_delaunay(&[p(0., 0.), p(1., 0.), p(0.5, h)]).unwrap();
        assert_relative_eq!(t.sharpest_angle(), PI / 3.0, epsilon = 1e-12);

        let pts = random_points(40, 11);
        let t = build_delaunay(&pts).unwrap();
        let mut expect = f64::INFINITY;
        for tri in t.triangles() {
            let [a, b, c] = tri.map(|i| pts[i]);
            let la = b.dist(c);
            let lb = a.dist(c);
            let lc = a.dist(b);
            // law of cosines
            for (o, u, v) in [(la, lb, lc), (lb, la, lc), (lc, la, lb)] {
                let ang = ((u * u + v * v - o * o) / (2.0 * u * v)).clamp(-1.0, 1.0).acos();
                expect = expect.min(ang);
            }
        }
        assert_relative_eq!(t.sharpest_angle(), expect, epsilon = 1e-9);
    }

    fn complete_graph_mst(pts: &[Point]) -> f64 {
        // Prim, O(n^2)
        let n = pts.len();
        let mut in_tree = vec![false; n];
        let mut best = vec![f64::INFINITY; n];
        best[0] = 0.0;
        let mut total = 0.0;
        for _ in 0..n {
            let u = (0..n)
                .filter(|&i| !in_tree[i])
                .min_by(|&a, &b| best[a].total_cmp(&best[b]))
                .unwrap();
            in_tree[u] = true;
            total += best[u];
            for v in 0..n {
                if !in_tree[v] {
                    best[v] = best[v].min(pts[u].dist(pts[v]));
                }
            }
        }
        total
    }

    #[test]
    fn mst_matches_complete_graph() {
        for seed in 0..5 {
            let pts = random_points(30, 100 + seed);
            let t = build_delaunay(&pts).unwrap();
            let tree = t.mst();
            assert_eq!(tree.edges.len(), 29);
            assert_relative_eq!(tree.weight, complete_graph_mst(&pts), max_relative = 1e-12);
        }
    }

    #[test]
    fn mst_three_sites_takes_two_shortest() {
        let t = build_delaunay(&[p(0., 0.), p(3., 0.), p(0., 4.)]).unwrap();
        let tree = t.mst();
        assert_relative_eq!(tree.weight, 7.0);
        assert_eq!(tree.edges, vec![[0, 1], [0, 2]]);
    }

    #[test]
    fn mst_invariant_under_reordering() {
        let pts = random_points(40, 5);
        let w = build_delaunay(&pts).unwrap().mst().weight;
        let mut shuffled = pts.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(9));
        let w2 = build_delaunay(&shuffled).unwrap().mst().weight;
        assert_relative_eq!(w, w2, max_relative = 1e-12);
    }

    #[test]
    fn weight_check_examples() {
        assert_relative_eq!(weight_factor(PI / 3.0), 3.0, max_relative = 1e-12);
        let r = 2f64.sqrt() / 2.0;
        assert_relative_eq!(weight_factor(PI / 4.0), (1.0 + r) / (1.0 - r), max_relative = 1e-12);
        assert_relative_eq!(weight_factor(PI / 4.0), 5.828427124746, max_relative = 1e-10);

        let h = 3f64.sqrt() / 2.0;
        let t = build_delaunay(&[p(0., 0.), p(1., 0.), p(0.5, h)]).unwrap();
        let c = t.weight_check();
        assert_relative_eq!(c.dt_weight, 3.0, max_relative = 1e-12);
        assert_relative_eq!(c.mst_weight, 2.0, max_relative = 1e-12);
        assert!(c.holds);
    }

    #[test]
    fn coverage_examples() {
        let pts = [p(0., 0.), p(1., 0.), p(0., 1.)];
        let t = build_delaunay(&pts).unwrap();
        assert_eq!(t.circumdisk_coverage(p(1. / 3., 1. / 3.)), 1);
        assert_eq!(t.circumdisk_coverage(p(10., 10.)), 0);
        assert_eq!(t.circumdisk_coverage(pts[1]), 0);
    }

    #[test]
    fn rejects_non_delaunay_input() {
        // the square split along the other diagonal is still Delaunay (cocircular)
        let sq = [p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)];
        Triangulation::from_triangles(&sq, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        // a kite whose short diagonal is the Delaunay one
        let kite = [p(0., 0.), p(2., -0.5), p(4., 0.), p(2., 0.5)];
        assert!(Triangulation::from_triangles(&kite, &[[0, 1, 2], [0, 2, 3]]).is_err());
        Triangulation::from_triangles(&kite, &[[0, 1, 3], [1, 2, 3]]).unwrap();
        // missing triangle
        assert!(Triangulation::from_triangles(&sq, &[[0, 1, 2]]).is_err());
    }
}
