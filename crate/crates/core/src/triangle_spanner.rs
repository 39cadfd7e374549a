//! Plane Steiner spanner over points on the boundary of one convex polygon.
//!
//! One wedge system per direction `θ_i = 2δi` is overlaid together with the
//! boundary itself, and the union is planarized.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::arrangement::{planarize_with, PlanarGraph};
use crate::error::{Error, Result};
use crate::geom::{BBox, Point, Segment};
use crate::wedge::{build_wedges_with, BoundaryPoint, ConvexPolygon, Side, Termination, WedgeOptions};

/// Wedge half-angle for an in-polygon stretch budget `eps`.
pub fn triangle_delta(eps: f64) -> f64 {
    0.25 * (eps / 2.0).sqrt()
}

/// Rounds `delta` down to `π / D` for an integer `D`, so that the directions
/// `2δi` close up exactly. Returns `(δ, D)`.
pub fn snap_delta(delta: f64) -> (f64, usize) {
    let d = (PI / delta - 1e-9).ceil().max(1.0) as usize;
    (PI / d as f64, d)
}

/// A wedge segment that survived the duplicate-ray filter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlaySegment {
    pub origin: usize,
    /// Direction as an odd multiple of `δ`, modulo `2D`.
    pub key: usize,
    pub segment: Segment,
    /// Set when the segment ends on the polygon boundary.
    pub boundary_end: Option<BoundaryPoint>,
}

/// Wedge systems for all `directions` directions with half-angle
/// `π / directions`, with collinear rays from one origin reduced to the
/// longest.
pub fn wedge_overlay(
    k: &ConvexPolygon,
    points: &[BoundaryPoint],
    directions: usize,
    opts: WedgeOptions,
) -> Result<Vec<OverlaySegment>> {
    if directions < 2 {
        return Err(Error::param("directions", directions as f64, "at least 2"));
    }
    let delta = PI / directions as f64;
    let modulus = 2 * directions;
    let mut best: BTreeMap<(usize, usize), OverlaySegment> = BTreeMap::new();
    for i in 0..directions {
        let theta = 2.0 * delta * i as f64;
        let sys = build_wedges_with(k, points, theta, delta, opts)?;
        for s in sys.segments() {
            let key = match s.side {
                Side::Minus => (2 * i + modulus - 1) % modulus,
                Side::Plus => 2 * i + 1,
            };
            let boundary_end = match s.end {
                Termination::Boundary(bp) => Some(bp),
                Termination::Hit(_) => None,
            };
            let cand = OverlaySegment {
                origin: s.origin,
                key,
                segment: s.segment,
                boundary_end,
            };
            best.entry((s.origin, key))
                .and_modify(|cur| {
                    if cand.segment.length() > cur.segment.length() {
                        *cur = cand;
                    }
                })
                .or_insert(cand);
        }
    }
    Ok(best.into_values().collect())
}

/// Boundary of `k` subdivided at `stops`, as consecutive segments.
pub fn boundary_chain(k: &ConvexPolygon, stops: &[BoundaryPoint]) -> Vec<Segment> {
    let mut per_edge: Vec<Vec<(f64, Point)>> = (0..k.len())
        .map(|i| vec![(0.0, k.vertices()[i]), (1.0, k.edge(i).1)])
        .collect();
    for bp in stops {
        if !bp.is_corner() {
            per_edge[bp.edge].push((bp.t, bp.point));
        }
    }
    let mut out = Vec::new();
    for mut stops in per_edge {
        stops.sort_by(|a, b| a.0.total_cmp(&b.0));
        stops.dedup_by(|a, b| a.1 == b.1);
        for w in stops.windows(2) {
            if let Ok(s) = Segment::new(w[0].1, w[1].1) {
                out.push(s);
            }
        }
    }
    out
}

pub fn build_triangle_spanner(k: &ConvexPolygon, points: &[BoundaryPoint], eps: f64) -> Result<PlanarGraph> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", eps, "0 < eps < 1"));
    }
    let (_, directions) = snap_delta(triangle_delta(eps));
    build_triangle_spanner_with(k, points, directions, WedgeOptions::default())
}

pub fn build_triangle_spanner_with(
    k: &ConvexPolygon,
    points: &[BoundaryPoint],
    directions: usize,
    opts: WedgeOptions,
) -> Result<PlanarGraph> {
    if points.is_empty() {
        return Err(Error::param("points", 0.0, "at least one boundary point"));
    }
    let overlay = wedge_overlay(k, points, directions, opts)?;
    let mut stops: Vec<BoundaryPoint> = points.to_vec();
    stops.extend(overlay.iter().filter_map(|s| s.boundary_end));
    let mut segments = boundary_chain(k, &stops);
    segments.extend(overlay.iter().map(|s| s.segment));
    let eta = BBox::of_points(k.vertices()).map_or(0.0, |b| b.merge_tolerance());
    Ok(planarize_with(&segments, eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{check_plane, shortest_paths};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn equilateral() -> ConvexPolygon {
        ConvexPolygon::triangle(Point::new(0., 0.), Point::new(1., 0.), Point::new(0.5, 3f64.sqrt() / 2.)).unwrap()
    }

    fn vertex_of(g: &PlanarGraph, p: Point) -> usize {
        g.vertices()
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.dist(p).total_cmp(&b.1.dist(p)))
            .map(|(i, q)| {
                assert!(q.dist(p) < 1e-9);
                i
            })
            .unwrap()
    }

    fn dilation(g: &PlanarGraph, pts: &[BoundaryPoint]) -> f64 {
        let ids: Vec<usize> = pts.iter().map(|p| vertex_of(g, p.point)).collect();
        let mut worst: f64 = 1.0;
        for (i, &s) in ids.iter().enumerate() {
            let d = shortest_paths(g.adjacency(), s, None);
            for (j, &t) in ids.iter().enumerate() {
                let e = pts[i].point.dist(pts[j].point);
                if e > 0.0 {
                    worst = worst.max(d[t] / e);
                }
            }
        }
        worst
    }

    #[test]
    fn snapping() {
        let (d, n) = snap_delta(0.1);
        assert_eq!(n, 32);
        assert!(d <= 0.1 && (d * n as f64 - PI).abs() < 1e-15);
        assert_eq!(snap_delta(PI / 8.0).1, 8);
    }

    #[test]
    fn two_points() {
        let k = equilateral();
        let pts = [BoundaryPoint::on_edge(&k, 0, 0.3), BoundaryPoint::on_edge(&k, 1, 0.6)];
        let g = build_triangle_spanner(&k, &pts, 0.2).unwrap();
        assert!(dilation(&g, &pts) <= 1.2);
    }

    #[test]
    fn one_edge_is_exact() {
        let k = equilateral();
        let pts: Vec<_> = [0.1, 0.25, 0.5, 0.9].iter().map(|&t| BoundaryPoint::on_edge(&k, 0, t)).collect();
        let g = build_triangle_spanner(&k, &pts, 0.3).unwrap();
        assert!((dilation(&g, &pts) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_portals_equilateral() {
        let k = equilateral();
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let pts: Vec<_> = (0..20)
            .map(|_| BoundaryPoint::on_edge(&k, rng.gen_range(0..3), rng.gen()))
            .collect();
        let g = build_triangle_spanner(&k, &pts, 0.2).unwrap();
        assert!(check_plane(&g).plane);
        let d = dilation(&g, &pts);
        assert!(d <= 1.2, "{d}");
        for v in g.vertices() {
            assert!(k.contains(*v, 1e-12));
        }
    }

    #[test]
    fn rejects_bad_eps() {
        let k = equilateral();
        let pts = [BoundaryPoint::on_edge(&k, 0, 0.5)];
        for e in [0.0, 1.0, -1.0] {
            assert!(build_triangle_spanner(&k, &pts, e).is_err());
        }
    }
}
