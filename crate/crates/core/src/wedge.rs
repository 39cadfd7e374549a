//! Direction-bounded escape systems inside a convex polygon.
//!
//! For a direction `θ` and half-angle `δ`, a boundary point is *extreme* when
//! every ray within `δ` of `θ` leaves the polygon immediately. Every other
//! point of the input set gets a path to the extreme arc whose links all stay
//! within `δ` of `θ`: it shoots rays at `θ − δ` and `θ + δ` that stop at the
//! first earlier ray they meet, or at the boundary.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geom::{orient2d, Point, Segment};

/// Slack used when comparing directions, in radians.
pub const ANGLE_MARGIN: f64 = 1e-9;

pub(crate) fn norm_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
    perimeter: f64,
}

impl ConvexPolygon {
    /// Vertices must be counterclockwise with a strict left turn at each one.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let k = vertices.len();
        if k < 3 {
            return Err(Error::InvalidPolygon(format!("{k} vertices")));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        for i in 0..k {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % k], vertices[(i + 2) % k]);
            if orient2d(a, b, c) <= 0 {
                return Err(Error::InvalidPolygon(format!(
                    "no strict left turn at vertex {}",
                    (i + 1) % k
                )));
            }
        }
        // a star-shaped walk can still wind twice
        let turn: f64 = (0..k)
            .map(|i| {
                let (a, b, c) = (vertices[i], vertices[(i + 1) % k], vertices[(i + 2) % k]);
                norm_angle((c - b).angle() - (b - a).angle())
            })
            .sum();
        if (turn - TAU).abs() > 1e-6 {
            return Err(Error::InvalidPolygon("boundary winds more than once".into()));
        }
        let perimeter = (0..k).map(|i| vertices[i].dist(vertices[(i + 1) % k])).sum();
        Ok(ConvexPolygon {
            vertices,
            perimeter,
        })
    }

    /// Triangle from three points in either orientation.
    pub fn triangle(a: Point, b: Point, c: Point) -> Result<Self> {
        match orient2d(a, b, c) {
            0 => Err(Error::DegenerateTriangle),
            o if o > 0 => Self::new(vec![a, b, c]),
            _ => Self::new(vec![a, c, b]),
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn edge(&self, i: usize) -> (Point, Point) {
        let k = self.vertices.len();
        (self.vertices[i % k], self.vertices[(i + 1) % k])
    }

    pub fn edge_angle(&self, i: usize) -> f64 {
        let (a, b) = self.edge(i);
        norm_angle((b - a).angle())
    }

    /// Interior angle at vertex `i`.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let k = self.vertices.len();
        crate::geom::angle_at(self.vertices[(i + k - 1) % k], self.vertices[i], self.vertices[(i + 1) % k])
    }

    /// Boundary position of `(edge, t)` measured counterclockwise from vertex 0.
    pub fn boundary_position(&self, edge: usize, t: f64) -> f64 {
        let before: f64 = (0..edge).map(|i| {
            let (a, b) = self.edge(i);
            a.dist(b)
        }).sum();
        let (a, b) = self.edge(edge);
        before + t * a.dist(b)
    }

    /// Signed distance of `p` inside the half-plane of edge `i` (negative outside).
    pub fn edge_clearance(&self, i: usize, p: Point) -> f64 {
        let (a, b) = self.edge(i);
        (b - a).cross(p - a) / a.dist(b)
    }

    /// True when `p` is inside or within `tol` of every edge half-plane.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        (0..self.len()).all(|i| self.edge_clearance(i, p) >= -tol)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    /// Where the ray `o + s·u` (`u` unit, `o` in the polygon) leaves it.
    pub fn exit(&self, o: Point, u: Point) -> Option<(f64, BoundaryPoint)> {
        let mut best: Option<(f64, usize)> = None;
        for j in 0..self.len() {
            let (a, b) = self.edge(j);
            let e = b - a;
            let len = e.norm();
            let n = Point::new(e.y / len, -e.x / len);
            let un = u.dot(n);
            if un > 1e-15 {
                let s = (n.dot(a - o) / un).max(0.0);
                if best.is_none_or(|(bs, _)| s < bs) {
                    best = Some((s, j));
                }
            }
        }
        let (s, j) = best?;
        let (a, b) = self.edge(j);
        let e = b - a;
        let h = o + u * s;
        let t = ((h - a).dot(e) / e.dot(e)).clamp(0.0, 1.0);
        let bp = BoundaryPoint::on_edge(self, j, t);
        Some((o.dist(bp.point), bp))
    }
}

/// A point on the boundary, given as an edge and a parameter along it.
/// Corners use `t = 0` of the edge that leaves them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub edge: usize,
    pub t: f64,
    pub point: Point,
}

/// Parameters closer than this to an edge end are snapped onto the corner.
const CORNER_SNAP: f64 = 1e-12;

impl BoundaryPoint {
    /// Materializes `(edge, t)`; corners come out bit-exact.
    pub fn on_edge(k: &ConvexPolygon, edge: usize, t: f64) -> Self {
        let n = k.len();
        let edge = edge % n;
        if t <= CORNER_SNAP {
            BoundaryPoint { edge, t: 0.0, point: k.vertices[edge] }
        } else if t >= 1.0 - CORNER_SNAP {
            let e = (edge + 1) % n;
            BoundaryPoint { edge: e, t: 0.0, point: k.vertices[e] }
        } else {
            let (a, b) = k.edge(edge);
            BoundaryPoint { edge, t, point: Point::lerp(a, b, t) }
        }
    }

    /// Uses caller-supplied coordinates, e.g. shared portal positions.
    pub fn with_point(edge: usize, t: f64, point: Point) -> Self {
        BoundaryPoint { edge, t, point }
    }

    pub fn is_corner(&self) -> bool {
        self.t == 0.0
    }

    /// Start angle and width of the cone of directions pointing into the polygon.
    fn interior_cone(&self, k: &ConvexPolygon) -> (f64, f64) {
        let a0 = k.edge_angle(self.edge);
        if self.is_corner() {
            (a0, k.interior_angle(self.edge))
        } else {
            (a0, PI)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cone {
    Extreme,
    Open,
}

fn classify(a0: f64, beta: f64, theta: f64, delta: f64) -> Cone {
    let r = norm_angle(theta - delta - a0);
    if r > beta + ANGLE_MARGIN && r + 2.0 * delta < TAU - ANGLE_MARGIN {
        Cone::Extreme
    } else {
        Cone::Open
    }
}

fn strictly_inside(a0: f64, beta: f64, phi: f64) -> bool {
    let rel = norm_angle(phi - a0);
    rel > ANGLE_MARGIN && rel < beta - ANGLE_MARGIN
}

fn in_ray_cone(phi: f64, theta: f64, delta: f64) -> bool {
    norm_angle(phi - (theta - delta)) <= 2.0 * delta + ANGLE_MARGIN
}

fn corner_is_extreme(k: &ConvexPolygon, i: usize, theta: f64, delta: f64) -> bool {
    classify(k.edge_angle(i), k.interior_angle(i), theta, delta) == Cone::Extreme
}

/// Whether a point is extreme for `(θ, δ)`.
pub fn is_extreme(k: &ConvexPolygon, p: &BoundaryPoint, theta: f64, delta: f64) -> bool {
    let (a0, beta) = p.interior_cone(k);
    classify(a0, beta, theta, delta) == Cone::Extreme
}

/// Maximal counterclockwise boundary arc of extreme points, as `(start, end)`.
///
/// An arc that begins or ends inside an edge is reported closed at the
/// adjacent corner.
pub fn extreme_arc(k: &ConvexPolygon, theta: f64, delta: f64) -> (BoundaryPoint, BoundaryPoint) {
    let n = k.len();
    // element 2i is corner i, element 2i+1 the interior of edge i
    let flags: Vec<bool> = (0..2 * n)
        .map(|e| {
            let i = e / 2;
            if e % 2 == 0 {
                corner_is_extreme(k, i, theta, delta)
            } else {
                classify(k.edge_angle(i), PI, theta, delta) == Cone::Extreme
            }
        })
        .collect();
    let m = flags.len();
    // the vertex furthest along θ is always extreme
    let u = Point::from_angle(theta);
    let support = (0..n)
        .max_by(|&a, &b| u.dot(k.vertices[a]).total_cmp(&u.dot(k.vertices[b])))
        .unwrap();
    let mut s = 2 * support;
    let mut steps = 0;
    while flags[(s + m - 1) % m] && steps < m {
        s = (s + m - 1) % m;
        steps += 1;
    }
    let mut e = 2 * support;
    steps = 0;
    while flags[(e + 1) % m] && steps < m {
        e = (e + 1) % m;
        steps += 1;
    }
    let start = BoundaryPoint::on_edge(k, s / 2, 0.0);
    let end = BoundaryPoint::on_edge(k, e / 2 + e % 2, 0.0);
    (start, end)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Minus,
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    Boundary(BoundaryPoint),
    /// Stopped on an earlier segment of the same system.
    Hit(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WedgeSegment {
    /// Index into the input point list.
    pub origin: usize,
    pub side: Side,
    pub angle: f64,
    pub segment: Segment,
    pub end: Termination,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Route {
    Extreme,
    /// Walks along the boundary to an extreme corner.
    Escape { corner: usize },
    Rays { minus: Option<usize>, plus: Option<usize> },
    /// Non-extreme but no admissible ray or escape.
    Stuck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WedgeOptions {
    /// Let points whose ray cone contains a boundary direction walk along
    /// the boundary instead of emitting rays.
    pub boundary_escape: bool,
}

impl Default for WedgeOptions {
    fn default() -> Self {
        WedgeOptions {
            boundary_escape: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SegmentSystem {
    pub theta: f64,
    pub delta: f64,
    polygon: ConvexPolygon,
    points: Vec<BoundaryPoint>,
    routes: Vec<Route>,
    segments: Vec<WedgeSegment>,
    order: Vec<usize>,
}

impl SegmentSystem {
    pub fn segments(&self) -> &[WedgeSegment] {
        &self.segments
    }

    pub fn routes(&self) -> &[Route] {
        &self.routes
    }

    pub fn points(&self) -> &[BoundaryPoint] {
        &self.points
    }

    pub fn polygon(&self) -> &ConvexPolygon {
        &self.polygon
    }

    /// Non-extreme points in processing order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.segment.length()).sum()
    }

    pub fn non_extreme_count(&self) -> usize {
        self.routes.iter().filter(|r| !matches!(r, Route::Extreme)).count()
    }
}

fn processing_order(len: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    out.push(0);
    if len > 1 {
        out.push(len - 1);
    }
    // explicit stack keeps the left-first depth-first order
    let mut stack = vec![(0usize, len - 1)];
    while let Some((lo, hi)) = stack.pop() {
        if hi <= lo + 1 {
            continue;
        }
        let mid = (lo + hi) / 2;
        out.push(mid);
        stack.push((mid, hi));
        stack.push((lo, mid));
    }
    out
}

fn ray_hit(o: Point, u: Point, s: &Segment, min_s: f64) -> Option<(f64, Point)> {
    let w = s.b - s.a;
    let denom = u.cross(w);
    if denom.abs() <= 1e-15 * w.norm() {
        return None;
    }
    let ao = s.a - o;
    let dist = ao.cross(w) / denom;
    let tau = ao.cross(u) / denom;
    if dist > min_s && (-1e-12..=1.0 + 1e-12).contains(&tau) {
        Some((dist, Point::lerp(s.a, s.b, tau.clamp(0.0, 1.0))))
    } else {
        None
    }
}

pub fn build_wedges(
    k: &ConvexPolygon,
    points: &[BoundaryPoint],
    theta: f64,
    delta: f64,
) -> Result<SegmentSystem> {
    build_wedges_with(k, points, theta, delta, WedgeOptions::default())
}

pub fn build_wedges_with(
    k: &ConvexPolygon,
    points: &[BoundaryPoint],
    theta: f64,
    delta: f64,
    opts: WedgeOptions,
) -> Result<SegmentSystem> {
    if !(delta > 0.0 && delta < PI / 2.0) {
        return Err(Error::param("delta", delta, "0 < delta < pi/2"));
    }
    let theta = norm_angle(theta);
    let min_s = 1e-9 * k.diameter();

    let mut routes = vec![Route::Stuck; points.len()];
    for (i, p) in points.iter().enumerate() {
        let (a0, beta) = p.interior_cone(k);
        if classify(a0, beta, theta, delta) == Cone::Extreme {
            routes[i] = Route::Extreme;
            continue;
        }
        if opts.boundary_escape {
            let n = k.len();
            let forward = (p.edge + 1) % n;
            let backward = if p.is_corner() { (p.edge + n - 1) % n } else { p.edge };
            let escape = [(a0, forward), (a0 + beta, backward)]
                .into_iter()
                .find(|&(dir, c)| in_ray_cone(dir, theta, delta) && corner_is_extreme(k, c, theta, delta));
            if let Some((_, corner)) = escape {
                routes[i] = Route::Escape { corner };
                continue;
            }
        }
        routes[i] = Route::Rays { minus: None, plus: None };
    }

    // order the open points counterclockwise starting after the extreme arc
    let (_, arc_end) = extreme_arc(k, theta, delta);
    let origin = k.boundary_position(arc_end.edge, arc_end.t);
    let per = k.perimeter();
    let mut open: Vec<usize> = (0..points.len())
        .filter(|&i| routes[i] != Route::Extreme)
        .collect();
    open.sort_by(|&a, &b| {
        let pa = (k.boundary_position(points[a].edge, points[a].t) - origin).rem_euclid(per);
        let pb = (k.boundary_position(points[b].edge, points[b].t) - origin).rem_euclid(per);
        pa.total_cmp(&pb).then(a.cmp(&b))
    });
    let order: Vec<usize> = processing_order(open.len()).into_iter().map(|j| open[j]).collect();

    let mut segments: Vec<WedgeSegment> = Vec::new();
    for &pi in &order {
        if !matches!(routes[pi], Route::Rays { .. }) {
            continue;
        }
        let p = points[pi];
        let (a0, beta) = p.interior_cone(k);
        let mut emitted = [None, None];
        for (slot, side, phi) in [(0, Side::Minus, theta - delta), (1, Side::Plus, theta + delta)] {
            let phi = norm_angle(phi);
            if !strictly_inside(a0, beta, phi) {
                continue;
            }
            let u = Point::from_angle(phi);
            let Some((exit_s, exit_bp)) = k.exit(p.point, u) else {
                continue;
            };
            let mut end = (exit_s, exit_bp.point, Termination::Boundary(exit_bp));
            for (j, seg) in segments.iter().enumerate() {
                if let Some((d, at)) = ray_hit(p.point, u, &seg.segment, min_s) {
                    if d < end.0 {
                        end = (d, at, Termination::Hit(j));
                    }
                }
            }
            let Ok(segment) = Segment::new(p.point, end.1) else {
                continue;
            };
            if segment.length() <= min_s {
                continue;
            }
            emitted[slot] = Some(segments.len());
            segments.push(WedgeSegment {
                origin: pi,
                side,
                angle: phi,
                segment,
                end: end.2,
            });
        }
        routes[pi] = match emitted {
            [None, None] => Route::Stuck,
            [minus, plus] => Route::Rays { minus, plus },
        };
    }

    Ok(SegmentSystem {
        theta,
        delta,
        polygon: k.clone(),
        points: points.to_vec(),
        routes,
        segments,
        order,
    })
}

/// Follows the escape path of `points[start]`, returning its polyline
/// (empty when the point is extreme or has no route).
pub fn trace_path(system: &SegmentSystem, start: usize) -> Result<Vec<Point>> {
    let p = system
        .points
        .get(start)
        .ok_or_else(|| Error::Internal(format!("no boundary point {start}")))?;
    match system.routes[start] {
        Route::Extreme | Route::Stuck => Ok(Vec::new()),
        Route::Escape { corner } => Ok(vec![p.point, system.polygon.vertices[corner]]),
        Route::Rays { minus, plus } => {
            let mut cur = plus.or(minus).expect("ray route without rays");
            let mut path = vec![p.point, system.segments[cur].segment.b];
            loop {
                match system.segments[cur].end {
                    Termination::Boundary(_) => return Ok(path),
                    Termination::Hit(j) => {
                        if j >= cur {
                            return Err(Error::Internal(format!(
                                "escape path revisits segment {j} after {cur}"
                            )));
                        }
                        cur = j;
                        path.push(system.segments[j].segment.b);
                    }
                }
            }
        }
    }
}

pub fn path_length(path: &[Point]) -> f64 {
    path.windows(2).map(|w| w[0].dist(w[1])).sum()
}
