//! Planar primitives and predicates.
//!
//! Topological decisions (orientation, in-circle, segment classification) go
//! through adaptive exact predicates. Constructed coordinates (circumcenters,
//! crossing points) use plain floating arithmetic.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex-merge tolerance relative to the bounding-box diagonal.
pub const MERGE_TOLERANCE_FACTOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn dist2(self, o: Point) -> f64 {
        let d = self - o;
        d.dot(d)
    }

    /// Unit vector at angle `theta` (radians, counterclockwise from +x).
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Point::new(c, s)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// `a + t (b - a)`, returning the endpoints exactly for `t = 0` and `t = 1`.
    pub fn lerp(a: Point, b: Point, t: f64) -> Point {
        if t == 0.0 {
            a
        } else if t == 1.0 {
            b
        } else {
            Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
        }
    }

    /// Lexicographic total order on (x, y).
    pub fn lex_cmp(&self, o: &Point) -> Ordering {
        self.x.total_cmp(&o.x).then(self.y.total_cmp(&o.y))
    }

    fn coord(self) -> robust::Coord<f64> {
        robust::Coord {
            x: self.x,
            y: self.y,
        }
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite);
        }
        if a == b {
            return Err(Error::DegenerateSegment);
        }
        Ok(Segment { a, b })
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn reversed(&self) -> Segment {
        Segment {
            a: self.b,
            b: self.a,
        }
    }

    pub fn point_at(&self, t: f64) -> Point {
        Point::lerp(self.a, self.b, t)
    }

    /// Euclidean distance from `p` to the closed segment.
    pub fn distance_to(&self, p: Point) -> f64 {
        point_segment_distance(p, self.a, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::NonFinite);
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidRadius(radius));
        }
        Ok(Circle { center, radius })
    }

    pub fn point_at_angle(&self, phi: f64) -> Point {
        self.center + Point::from_angle(phi) * self.radius
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn of_points<'a>(pts: impl IntoIterator<Item = &'a Point>) -> Option<BBox> {
        let mut it = pts.into_iter();
        let first = *it.next()?;
        let mut bb = BBox {
            min: first,
            max: first,
        };
        for p in it {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    pub fn diagonal(&self) -> f64 {
        self.min.dist(self.max)
    }

    /// The merge tolerance η for coordinates inside this box.
    pub fn merge_tolerance(&self) -> f64 {
        MERGE_TOLERANCE_FACTOR * self.diagonal()
    }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// `+1` if `c` lies strictly left of the directed line `a -> b`, `-1` if
/// strictly right, `0` if the three points are collinear. Exact.
pub fn orient2d(a: Point, b: Point, c: Point) -> i8 {
    sign(robust::orient2d(a.coord(), b.coord(), c.coord()))
}

/// Raw in-circle determinant sign for a counterclockwise `a, b, c`: `+1`
/// strictly inside, `0` on the circle, `-1` outside. Exact.
pub(crate) fn incircle_ccw(a: Point, b: Point, c: Point, d: Point) -> i8 {
    sign(robust::incircle(a.coord(), b.coord(), c.coord(), d.coord()))
}

/// Position of `d` relative to the circumcircle of `a, b, c`, independent
/// of the orientation of the triangle.
pub fn in_circumcircle(a: Point, b: Point, c: Point, d: Point) -> Result<i8> {
    match orient2d(a, b, c) {
        0 => Err(Error::DegenerateTriangle),
        1 => Ok(incircle_ccw(a, b, c, d)),
        _ => Ok(incircle_ccw(a, c, b, d)),
    }
}

pub fn circumcircle(a: Point, b: Point, c: Point) -> Result<Circle> {
    if orient2d(a, b, c) == 0 {
        return Err(Error::DegenerateTriangle);
    }
    // Translate to `a` to keep the magnitudes small.
    let ba = b - a;
    let ca = c - a;
    let d = 2.0 * ba.cross(ca);
    let bl = ba.dot(ba);
    let cl = ca.dot(ca);
    let ux = (ca.y * bl - ba.y * cl) / d;
    let uy = (ba.x * cl - ca.x * bl) / d;
    let center = Point::new(a.x + ux, a.y + uy);
    let radius = (center.dist(a) + center.dist(b) + center.dist(c)) / 3.0;
    Circle::new(center, radius)
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(Point::lerp(a, b, t))
}

/// Interior angle at `b` of the path `a, b, c`, in `[0, π]`.
pub fn angle_at(a: Point, b: Point, c: Point) -> f64 {
    let u = a - b;
    let v = c - b;
    u.cross(v).abs().atan2(u.dot(v))
}

/// How two closed segments meet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SegmentIntersection {
    None,
    /// A single point that is not a common endpoint: a proper crossing, or
    /// an endpoint of one segment touching the interior of the other.
    Point(Point),
    /// The segments meet only at an endpoint they share.
    SharedEndpoint(Point),
    /// Collinear overlap of positive length.
    Overlap(Segment),
}

/// Classifies the intersection of two segments with exact predicates.
///
/// The computation is canonicalised on the unordered pair, so swapping the
/// arguments yields bit-identical crossing points.
pub fn segment_intersection(s1: &Segment, s2: &Segment) -> SegmentIntersection {
    let canon = |s: &Segment| {
        if s.a.lex_cmp(&s.b) == Ordering::Greater {
            s.reversed()
        } else {
            *s
        }
    };
    let (mut p, mut q) = (canon(s1), canon(s2));
    if (p.a.lex_cmp(&q.a)).then(p.b.lex_cmp(&q.b)) == Ordering::Greater {
        std::mem::swap(&mut p, &mut q);
    }
    classify(&p, &q)
}

fn on_closed_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn classify(s1: &Segment, s2: &Segment) -> SegmentIntersection {
    let (a, b, c, d) = (s1.a, s1.b, s2.a, s2.b);
    let o1 = orient2d(a, b, c);
    let o2 = orient2d(a, b, d);
    let o3 = orient2d(c, d, a);
    let o4 = orient2d(c, d, b);

    if o1 == 0 && o2 == 0 {
        return collinear_overlap(s1, s2);
    }
    if o1 * o2 > 0 || o3 * o4 > 0 {
        return SegmentIntersection::None;
    }
    if o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 {
        let r = b - a;
        let s = d - c;
        let t = (c - a).cross(s) / r.cross(s);
        return SegmentIntersection::Point(Point::lerp(a, b, t));
    }
    let touch = if o1 == 0 && on_closed_segment(a, b, c) {
        c
    } else if o2 == 0 && on_closed_segment(a, b, d) {
        d
    } else if o3 == 0 && on_closed_segment(c, d, a) {
        a
    } else if o4 == 0 && on_closed_segment(c, d, b) {
        b
    } else {
        return SegmentIntersection::None;
    };
    let endpoint_of = |s: &Segment| s.a == touch || s.b == touch;
    if endpoint_of(s1) && endpoint_of(s2) {
        SegmentIntersection::SharedEndpoint(touch)
    } else {
        SegmentIntersection::Point(touch)
    }
}

fn collinear_overlap(s1: &Segment, s2: &Segment) -> SegmentIntersection {
    let dir = s1.b - s1.a;
    let key = |p: Point| if dir.x.abs() >= dir.y.abs() { p.x } else { p.y };
    let ordered = |s: &Segment| {
        if key(s.a) <= key(s.b) {
            (s.a, s.b)
        } else {
            (s.b, s.a)
        }
    };
    let (lo1, hi1) = ordered(s1);
    let (lo2, hi2) = ordered(s2);
    let lo = if key(lo1) >= key(lo2) { lo1 } else { lo2 };
    let hi = if key(hi1) <= key(hi2) { hi1 } else { hi2 };
    match key(lo).total_cmp(&key(hi)) {
        Ordering::Greater => SegmentIntersection::None,
        Ordering::Equal => SegmentIntersection::SharedEndpoint(lo),
        Ordering::Less => SegmentIntersection::Overlap(Segment { a: lo, b: hi }),
    }
}
