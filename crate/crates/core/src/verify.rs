//! Independent checks on built spanners: dilation, planarity, tours, and a
//! combined report.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::{Adjacency, PlanarGraph};
use crate::error::{Error, Result};
use crate::geom::{segment_intersection, BBox, Point, SegmentIntersection};
use crate::spanner::PlanarSpanner;
use crate::triangulation::{Triangulation, WeightCheck};

// ---------------------------------------------------------------------------
// shortest paths

/// Single-source shortest path lengths (`∞` when unreachable).
///
/// With `targets`, the search stops once every target is settled, and only
/// those entries are guaranteed final. Non-negative floats order like their
/// bit patterns, which keeps heap entries to plain integers.
pub fn shortest_paths(adj: &Adjacency, source: usize, targets: Option<&[usize]>) -> Vec<f64> {
    let n = adj.offsets.len() - 1;
    let mut dist = vec![f64::INFINITY; n];
    let mut want = vec![false; n];
    let mut remaining = match targets {
        Some(t) => {
            for &v in t {
                want[v] = true;
            }
            want.iter().filter(|&&w| w).count()
        }
        None => usize::MAX,
    };
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((0u64, source as u32)));
    while let Some(Reverse((key, v))) = heap.pop() {
        let v = v as usize;
        let d = dist[v];
        if key != d.to_bits() {
            continue;
        }
        if want[v] {
            want[v] = false;
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }
        for (w, len) in adj.neighbors(v) {
            let nd = d + len;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Reverse((nd.to_bits(), w as u32)));
            }
        }
    }
    dist
}

// ---------------------------------------------------------------------------
// dilation

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Pairs {
    All,
    Sample { count: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dilation {
    pub ratio: f64,
    /// Site indices of a worst pair.
    pub pair: [usize; 2],
}

fn sampled_pairs(n: usize, count: usize, seed: u64) -> BTreeMap<usize, Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for _ in 0..count {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        by_source.entry(i.min(j)).or_default().push(i.max(j));
    }
    for v in by_source.values_mut() {
        v.sort_unstable();
        v.dedup();
    }
    by_source
}

/// Largest ratio of graph distance to Euclidean distance over site pairs.
///
/// `sites[i]` is the graph vertex of site `i`.
pub fn max_dilation_graph(graph: &PlanarGraph, sites: &[usize], pairs: &Pairs) -> Result<Dilation> {
    let n = sites.len();
    if n < 2 {
        return Ok(Dilation { ratio: 1.0, pair: [0, 0] });
    }
    let jobs: Vec<(usize, Vec<usize>)> = match pairs {
        Pairs::All => (0..n - 1).map(|i| (i, (i + 1..n).collect())).collect(),
        Pairs::Sample { count, seed } => sampled_pairs(n, *count, *seed).into_iter().collect(),
    };
    let adj = graph.adjacency();
    let pts = graph.vertices();
    let per_source: Vec<Result<Option<Dilation>>> = jobs
        .par_iter()
        .map(|(i, js)| {
            let targets: Vec<usize> = js.iter().map(|&j| sites[j]).collect();
            let d = shortest_paths(adj, sites[*i], Some(&targets));
            let mut best: Option<Dilation> = None;
            for &j in js {
                let g = d[sites[j]];
                if !g.is_finite() {
                    return Err(Error::Disconnected { from: *i, site: j });
                }
                let e = pts[sites[*i]].dist(pts[sites[j]]);
                let r = g / e;
                if best.is_none_or(|b| r > b.ratio) {
                    best = Some(Dilation { ratio: r, pair: [*i, j] });
                }
            }
            Ok(best)
        })
        .collect();
    let mut worst = Dilation { ratio: 1.0, pair: [0, 1] };
    let mut first = true;
    for r in per_source {
        if let Some(d) = r? {
            if first || d.ratio > worst.ratio {
                worst = d;
                first = false;
            }
        }
    }
    Ok(worst)
}

pub fn max_dilation(spanner: &PlanarSpanner, pairs: &Pairs) -> Result<Dilation> {
    max_dilation_graph(&spanner.graph, &spanner.site_map, pairs)
}

// ---------------------------------------------------------------------------
// planarity

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneCheck {
    pub plane: bool,
    /// Lexicographically smallest offending edge pair.
    pub witness: Option<[usize; 2]>,
}

fn edges_conflict(g: &PlanarGraph, e: usize, f: usize) -> bool {
    match segment_intersection(&g.segment(e), &g.segment(f)) {
        SegmentIntersection::None => false,
        SegmentIntersection::SharedEndpoint(p) => {
            let [a, b] = g.edges()[e];
            let [c, d] = g.edges()[f];
            let shared = [a, b].into_iter().find(|&v| v == c || v == d);
            !matches!(shared, Some(v) if g.vertices()[v] == p)
        }
        SegmentIntersection::Point(_) | SegmentIntersection::Overlap(_) => true,
    }
}

/// Exact test that no two edges meet other than at a common vertex.
pub fn check_plane(g: &PlanarGraph) -> PlaneCheck {
    let m = g.edge_count();
    let Some(bb) = BBox::of_points(g.vertices()) else {
        return PlaneCheck { plane: true, witness: None };
    };
    let side = ((m as f64).sqrt().ceil() as usize).clamp(1, 2048);
    let w = ((bb.max.x - bb.min.x) / side as f64).max(f64::MIN_POSITIVE);
    let h = ((bb.max.y - bb.min.y) / side as f64).max(f64::MIN_POSITIVE);
    let cell = |p: Point| {
        let cx = (((p.x - bb.min.x) / w) as usize).min(side - 1);
        let cy = (((p.y - bb.min.y) / h) as usize).min(side - 1);
        (cx, cy)
    };
    let ranges: Vec<[usize; 4]> = (0..m)
        .map(|e| {
            let s = g.segment(e);
            let (ax, ay) = cell(s.a);
            let (bx, by) = cell(s.b);
            [ax.min(bx), ax.max(bx), ay.min(by), ay.max(by)]
        })
        .collect();
    let mut count = vec![0usize; side * side + 1];
    for r in &ranges {
        for x in r[0]..=r[1] {
            for y in r[2]..=r[3] {
                count[x * side + y + 1] += 1;
            }
        }
    }
    for i in 0..side * side {
        count[i + 1] += count[i];
    }
    let mut fill = count.clone();
    let mut items = vec![0u32; count[side * side]];
    for (e, r) in ranges.iter().enumerate() {
        for x in r[0]..=r[1] {
            for y in r[2]..=r[3] {
                items[fill[x * side + y]] = e as u32;
                fill[x * side + y] += 1;
            }
        }
    }
    let witness = (0..side * side)
        .into_par_iter()
        .filter_map(|c| {
            let (cx, cy) = (c / side, c % side);
            let bucket = &items[count[c]..count[c + 1]];
            let mut best: Option<[usize; 2]> = None;
            for (k, &e) in bucket.iter().enumerate() {
                let re = ranges[e as usize];
                for &f in &bucket[k + 1..] {
                    let rf = ranges[f as usize];
                    // test each pair only in the lowest cell the two share
                    if re[0].max(rf[0]) != cx || re[2].max(rf[2]) != cy {
                        continue;
                    }
                    let (a, b) = ((e.min(f)) as usize, (e.max(f)) as usize);
                    if best.is_some_and(|w| w <= [a, b]) {
                        continue;
                    }
                    if edges_conflict(g, a, b) {
                        best = Some([a, b]);
                    }
                }
            }
            best
        })
        .min();
    PlaneCheck { plane: witness.is_none(), witness }
}

/// Quadratic reference version of [`check_plane`].
pub fn check_plane_brute(g: &PlanarGraph) -> PlaneCheck {
    for e in 0..g.edge_count() {
        for f in e + 1..g.edge_count() {
            if edges_conflict(g, e, f) {
                return PlaneCheck { plane: false, witness: Some([e, f]) };
            }
        }
    }
    PlaneCheck { plane: true, witness: None }
}

// ---------------------------------------------------------------------------
// tours

pub const MAX_TOUR_POINTS: usize = 15;

/// Optimal closed tour length for a symmetric distance matrix.
pub fn held_karp(dist: &[Vec<f64>]) -> Result<f64> {
    let n = dist.len();
    if !(3..=MAX_TOUR_POINTS).contains(&n) {
        return Err(Error::TourSize(n));
    }
    // node 0 is fixed; subsets range over nodes 1..n
    let k = n - 1;
    let full = 1usize << k;
    let mut dp = vec![f64::INFINITY; full * k];
    for j in 0..k {
        dp[(1 << j) * k + j] = dist[0][j + 1];
    }
    for mask in 1..full {
        for j in 0..k {
            let cur = dp[mask * k + j];
            if mask & (1 << j) == 0 || !cur.is_finite() {
                continue;
            }
            for nxt in 0..k {
                if mask & (1 << nxt) != 0 {
                    continue;
                }
                let m2 = mask | (1 << nxt);
                let cand = cur + dist[j + 1][nxt + 1];
                if cand < dp[m2 * k + nxt] {
                    dp[m2 * k + nxt] = cand;
                }
            }
        }
    }
    Ok((0..k)
        .map(|j| dp[(full - 1) * k + j] + dist[j + 1][0])
        .fold(f64::INFINITY, f64::min))
}

pub fn held_karp_euclidean(points: &[Point]) -> Result<f64> {
    let dist: Vec<Vec<f64>> = points.iter().map(|p| points.iter().map(|q| p.dist(*q)).collect()).collect();
    held_karp(&dist)
}

/// Optimal tour over the sites under shortest-path distances in `graph`.
pub fn held_karp_graph(graph: &PlanarGraph, sites: &[usize]) -> Result<f64> {
    let n = sites.len();
    if !(3..=MAX_TOUR_POINTS).contains(&n) {
        return Err(Error::TourSize(n));
    }
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        let d = shortest_paths(graph.adjacency(), sites[i], Some(sites));
        for j in 0..n {
            if !d[sites[j]].is_finite() {
                return Err(Error::Disconnected { from: i, site: j });
            }
            dist[i][j] = d[sites[j]];
        }
    }
    // symmetrize the two directions of each pair
    for i in 0..n {
        for j in i + 1..n {
            let m = dist[i][j].min(dist[j][i]);
            dist[i][j] = m;
            dist[j][i] = m;
        }
    }
    held_karp(&dist)
}

pub fn held_karp_metric(spanner: &PlanarSpanner) -> Result<f64> {
    held_karp_graph(&spanner.graph, &spanner.site_map)
}

// ---------------------------------------------------------------------------
// report

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub samples: usize,
    pub seed: u64,
    pub max_observed: usize,
    /// `⌊2π/α⌋`.
    pub bound: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TourReport {
    pub euclid_opt: f64,
    pub spanner_opt: f64,
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unreachable {
    pub from: usize,
    pub site: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub eps: f64,
    pub pairs: Pairs,
    pub max_dilation: Option<Dilation>,
    pub disconnected: Option<Unreachable>,
    pub dilation_ok: bool,
    pub plane: PlaneCheck,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub weight: f64,
    pub mst_weight: f64,
    pub weight_ratio: f64,
    pub alpha: f64,
    pub weight_bound: WeightCheck,
    pub coverage: CoverageReport,
    pub tsp: Option<TourReport>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub pairs: Pairs,
    pub coverage_samples: usize,
    pub seed: u64,
    /// Compare optimal tours when there are at most this many sites.
    pub tour_limit: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            pairs: Pairs::All,
            coverage_samples: 1000,
            seed: 1,
            tour_limit: MAX_TOUR_POINTS,
        }
    }
}

/// Runs every check against a spanner built for `eps`.
pub fn verify_spanner(spanner: &PlanarSpanner, eps: f64, opts: &VerifyOptions) -> Result<VerificationReport> {
    let g = &spanner.graph;
    let sites: Vec<Point> = spanner.site_map.iter().map(|&v| g.vertices()[v]).collect();
    let tri = Triangulation::delaunay(&sites)?;
    let alpha = tri.sharpest_angle();
    let weight_bound = tri.weight_check();

    let (max_dilation, disconnected) = match max_dilation(spanner, &opts.pairs) {
        Ok(d) => (Some(d), None),
        Err(Error::Disconnected { from, site }) => (None, Some(Unreachable { from, site })),
        Err(e) => return Err(e),
    };
    let dilation_ok = max_dilation.is_some_and(|d| d.ratio <= 1.0 + eps);
    let plane = check_plane(g);

    let bb = BBox::of_points(&sites).expect("at least three sites");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let max_observed = (0..opts.coverage_samples)
        .map(|_| {
            let x = Point::new(rng.gen_range(bb.min.x..=bb.max.x), rng.gen_range(bb.min.y..=bb.max.y));
            tri.circumdisk_coverage(x)
        })
        .max()
        .unwrap_or(0);
    let coverage = CoverageReport {
        samples: opts.coverage_samples,
        seed: opts.seed,
        max_observed,
        bound: (2.0 * std::f64::consts::PI / alpha).floor() as usize,
    };

    let tsp = if disconnected.is_none() && sites.len() >= 3 && sites.len() <= opts.tour_limit.min(MAX_TOUR_POINTS) {
        let euclid_opt = held_karp_euclidean(&sites)?;
        let spanner_opt = held_karp_metric(spanner)?;
        Some(TourReport { euclid_opt, spanner_opt, ratio: spanner_opt / euclid_opt })
    } else {
        None
    };

    let weight = g.total_length();
    let mst_weight = weight_bound.mst_weight;
    let passed = dilation_ok
        && plane.plane
        && weight_bound.holds
        && coverage.max_observed <= coverage.bound
        && tsp.is_none_or(|t| t.ratio <= 1.0 + eps && t.ratio >= 1.0 - 1e-12);
    Ok(VerificationReport {
        eps,
        pairs: opts.pairs.clone(),
        max_dilation,
        disconnected,
        dilation_ok,
        plane,
        vertex_count: g.vertex_count(),
        edge_count: g.edge_count(),
        weight,
        mst_weight,
        weight_ratio: weight / mst_weight,
        alpha,
        weight_bound,
        coverage,
        tsp,
        passed,
    })
}
