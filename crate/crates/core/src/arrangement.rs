//! Straight-line plane graphs and segment arrangements.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::geom::{segment_intersection, BBox, Point, Segment, SegmentIntersection};
use crate::triangulation::UnionFind;

/// Compressed adjacency: neighbours of `v` are `targets[offsets[v]..offsets[v+1]]`,
/// with the matching edge lengths in `weights`.
#[derive(Clone, Debug)]
pub struct Adjacency {
    pub offsets: Vec<usize>,
    pub targets: Vec<u32>,
    pub weights: Vec<f64>,
}

impl Adjacency {
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.targets[r.clone()].iter().map(|&t| t as usize).zip(self.weights[r].iter().copied())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

#[derive(Clone, Debug)]
pub struct PlanarGraph {
    vertices: Vec<Point>,
    edges: Vec<[usize; 2]>,
    lengths: Vec<f64>,
    adjacency: OnceLock<Adjacency>,
}

impl PartialEq for PlanarGraph {
    fn eq(&self, o: &Self) -> bool {
        self.vertices == o.vertices && self.edges == o.edges
    }
}

impl PlanarGraph {
    /// Checks indices, self-loops and duplicates; does not check planarity.
    pub fn new(vertices: Vec<Point>, edges: Vec<[usize; 2]>) -> Result<Self> {
        let n = vertices.len();
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for (i, &[u, v]) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::Document(format!("edge {i} references a missing vertex")));
            }
            if vertices[u] == vertices[v] {
                return Err(Error::Document(format!("edge {i} has zero length")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::Document(format!("edge {i} is a duplicate")));
            }
        }
        Ok(Self::from_parts(vertices, edges))
    }

    pub(crate) fn from_parts(vertices: Vec<Point>, edges: Vec<[usize; 2]>) -> Self {
        let lengths = edges.iter().map(|&[u, v]| vertices[u].dist(vertices[v])).collect();
        PlanarGraph {
            vertices,
            edges,
            lengths,
            adjacency: OnceLock::new(),
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn segment(&self, e: usize) -> Segment {
        let [u, v] = self.edges[e];
        Segment {
            a: self.vertices[u],
            b: self.vertices[v],
        }
    }

    pub fn total_length(&self) -> f64 {
        crate::triangulation::kahan_sum(self.lengths.iter().copied())
    }

    pub fn adjacency(&self) -> &Adjacency {
        self.adjacency.get_or_init(|| {
            let n = self.vertices.len();
            let mut deg = vec![0usize; n + 1];
            for &[u, v] in &self.edges {
                deg[u] += 1;
                deg[v] += 1;
            }
            let mut offsets = vec![0usize; n + 1];
            for v in 0..n {
                offsets[v + 1] = offsets[v] + deg[v];
            }
            let mut fill = offsets.clone();
            let mut targets = vec![0u32; offsets[n]];
            let mut weights = vec![0.0; offsets[n]];
            for (e, &[u, v]) in self.edges.iter().enumerate() {
                targets[fill[u]] = v as u32;
                weights[fill[u]] = self.lengths[e];
                fill[u] += 1;
                targets[fill[v]] = u as u32;
                weights[fill[v]] = self.lengths[e];
                fill[v] += 1;
            }
            Adjacency {
                offsets,
                targets,
                weights,
            }
        })
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let mut uf = UnionFind::new(n);
        let mut parts = n;
        for &[u, v] in &self.edges {
            if uf.union(u, v) {
                parts -= 1;
            }
        }
        parts == 1
    }
}

/// Arrangement of `segments` with the default merge tolerance
/// (`1e-9` times the bounding-box diagonal).
pub fn planarize(segments: &[Segment]) -> PlanarGraph {
    let eta = BBox::of_points(segments.iter().flat_map(|s| [&s.a, &s.b]))
        .map_or(0.0, |b| b.merge_tolerance());
    planarize_with(segments, eta)
}

/// Arrangement of `segments`, merging vertices closer than `eta`.
///
/// Vertices keep the order in which they first appear as segment endpoints,
/// followed by crossing points; a merged cluster takes the coordinates of
/// its earliest member.
pub fn planarize_with(segments: &[Segment], eta: f64) -> PlanarGraph {
    let m = segments.len();
    let mut pts: Vec<Point> = Vec::with_capacity(2 * m);
    for s in segments {
        pts.push(s.a);
        pts.push(s.b);
    }
    // (param, vertex) split points per segment
    let mut splits: Vec<Vec<(f64, usize)>> = (0..m).map(|i| vec![(0.0, 2 * i), (1.0, 2 * i + 1)]).collect();

    let param = |s: &Segment, p: Point| {
        let d = s.b - s.a;
        ((p - s.a).dot(d) / d.dot(d)).clamp(0.0, 1.0)
    };

    let mut order: Vec<usize> = (0..m).collect();
    let minx = |s: &Segment| s.a.x.min(s.b.x);
    order.sort_by(|&i, &j| minx(&segments[i]).total_cmp(&minx(&segments[j])).then(i.cmp(&j)));
    for (oi, &i) in order.iter().enumerate() {
        let si = &segments[i];
        let maxx = si.a.x.max(si.b.x) + eta;
        let (ylo, yhi) = (si.a.y.min(si.b.y) - eta, si.a.y.max(si.b.y) + eta);
        for &j in &order[oi + 1..] {
            let sj = &segments[j];
            if minx(sj) > maxx {
                break;
            }
            if sj.a.y.max(sj.b.y) < ylo || sj.a.y.min(sj.b.y) > yhi {
                continue;
            }
            match segment_intersection(si, sj) {
                SegmentIntersection::Point(p) => {
                    let v = pts.len();
                    pts.push(p);
                    splits[i].push((param(si, p), v));
                    splits[j].push((param(sj, p), v));
                }
                SegmentIntersection::Overlap(o) => {
                    for p in [o.a, o.b] {
                        let v = pts.len();
                        pts.push(p);
                        splits[i].push((param(si, p), v));
                        splits[j].push((param(sj, p), v));
                    }
                }
                SegmentIntersection::SharedEndpoint(_) => {}
                SegmentIntersection::None => {
                    // endpoints that miss the other segment by less than eta
                    for (a, b, ia, ib) in [(si, sj, i, j), (sj, si, j, i)] {
                        for (k, p) in [a.a, a.b].into_iter().enumerate() {
                            if b.distance_to(p) <= eta {
                                splits[ib].push((param(b, p), 2 * ia + k));
                            }
                        }
                    }
                }
            }
        }
    }

    // merge everything within eta through a hash grid
    let n = pts.len();
    let mut uf = UnionFind::new(n);
    if eta > 0.0 {
        let cell = |p: Point| ((p.x / eta).floor() as i64, (p.y / eta).floor() as i64);
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::with_capacity(n);
        for (v, &p) in pts.iter().enumerate() {
            grid.entry(cell(p)).or_default().push(v);
        }
        for (v, &p) in pts.iter().enumerate() {
            let (cx, cy) = cell(p);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                        for &w in bucket {
                            if w < v && pts[w].dist(p) <= eta {
                                uf.union(v, w);
                            }
                        }
                    }
                }
            }
        }
    } else {
        let mut exact: HashMap<(u64, u64), usize> = HashMap::with_capacity(n);
        for (v, p) in pts.iter().enumerate() {
            let w = *exact.entry((p.x.to_bits(), p.y.to_bits())).or_insert(v);
            uf.union(v, w);
        }
    }
    // lowest index in each cluster represents it
    let mut rep_of_root: HashMap<usize, usize> = HashMap::new();
    let mut rep = vec![0usize; n];
    for v in 0..n {
        let r = uf.find(v);
        rep[v] = *rep_of_root.entry(r).or_insert(v);
    }

    let mut edges: Vec<[usize; 2]> = Vec::new();
    for sp in &mut splits {
        sp.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut prev = rep[sp[0].1];
        for &(_, v) in sp.iter().skip(1) {
            let r = rep[v];
            if r != prev {
                edges.push([prev.min(r), prev.max(r)]);
                prev = r;
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();

    // renumber representatives in index order
    let mut new_id = vec![usize::MAX; n];
    let mut vertices = Vec::new();
    for v in 0..n {
        if rep[v] == v {
            new_id[v] = vertices.len();
            vertices.push(pts[v]);
        }
    }
    let edges: Vec<[usize; 2]> = edges
        .into_iter()
        .map(|[u, v]| [new_id[u], new_id[v]])
        .filter(|&[u, v]| vertices[u] != vertices[v])
        .collect();
    PlanarGraph::from_parts(vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seg(a: (f64, f64), b: (f64, f64)) -> Segment {
        Segment::new(Point::new(a.0, a.1), Point::new(b.0, b.1)).unwrap()
    }

    #[test]
    fn x_shape() {
        let g = planarize(&[seg((0., -1.), (0., 1.)), seg((-1., 0.), (1., 0.))]);
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 4));
        assert!(g.vertices().contains(&Point::new(0., 0.)));
    }

    #[test]
    fn disjoint() {
        let g = planarize(&[seg((0., 0.), (1., 0.)), seg((2., 0.), (3., 0.))]);
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 2));
    }

    #[test]
    fn t_touch_and_overlap() {
        let g = planarize(&[seg((0., 0.), (2., 0.)), seg((1., 0.), (1., 1.))]);
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 3));
        let g = planarize(&[seg((0., 0.), (2., 0.)), seg((1., 0.), (3., 0.))]);
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 3));
        let g = planarize(&[seg((0., 0.), (2., 0.)), seg((0., 0.), (2., 0.))]);
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));
    }

    #[test]
    fn near_touch_snaps() {
        let g = planarize(&[seg((0., 0.), (2., 0.)), seg((1., 1e-13), (1., 1.))]);
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 3));
    }

    #[test]
    fn graph_validation() {
        let v = vec![Point::new(0., 0.), Point::new(1., 0.)];
        assert!(PlanarGraph::new(v.clone(), vec![[0, 2]]).is_err());
        assert!(PlanarGraph::new(v.clone(), vec![[0, 1], [1, 0]]).is_err());
        let g = PlanarGraph::new(v, vec![[0, 1]]).unwrap();
        assert_eq!(g.lengths(), &[1.0]);
        assert_eq!(g.adjacency().neighbors(0).collect::<Vec<_>>(), vec![(1, 1.0)]);
        assert!(g.is_connected());
    }

    fn proper_crossings(s: &[Segment]) -> usize {
        let mut c = 0;
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                if let SegmentIntersection::Point(_) = segment_intersection(&s[i], &s[j]) {
                    c += 1;
                }
            }
        }
        c
    }

    pub(crate) fn random_soup(rng: &mut impl Rng, m: usize) -> Vec<Segment> {
        (0..m)
            .map(|_| {
                let a = Point::new(rng.gen(), rng.gen());
                let b = Point::new(rng.gen(), rng.gen());
                Segment::new(a, b).unwrap()
            })
            .collect()
    }

    #[test]
    fn soup_vertex_count_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let m = rng.gen_range(1..=50);
            let s = random_soup(&mut rng, m);
            let x = proper_crossings(&s);
            let g = planarize(&s);
            assert_eq!(g.vertex_count(), 2 * m + x);
            assert_eq!(g.edge_count(), m + 2 * x);
        }
    }

    #[test]
    fn output_has_no_crossings() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let s = random_soup(&mut rng, 40);
            let g = planarize(&s);
            for e in 0..g.edge_count() {
                for f in e + 1..g.edge_count() {
                    match segment_intersection(&g.segment(e), &g.segment(f)) {
                        SegmentIntersection::None | SegmentIntersection::SharedEndpoint(_) => {}
                        other => panic!("edges {e} and {f}: {other:?}"),
                    }
                }
            }
            let total: f64 = s.iter().map(|s| s.length()).sum();
            assert!((g.total_length() - total).abs() < 1e-9 * total);
        }
    }
}
