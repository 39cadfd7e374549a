//! Portal placement along triangulation edges.
//!
//! A portal set on an edge of length `L` holds both endpoints, the midpoint,
//! and from each endpoint a geometric run of offsets `d_1 = (ε_p² / 2) L`,
//! `d_{i+1} = (1 + 2 ε_p) d_i`, cut off before the midpoint. Any chord of a
//! circle through the edge's endpoints that crosses the edge passes within
//! `ε_p |t|` of some portal, where `|t|` is the chord length.

use crate::error::{Error, Result};
use crate::geom::{segment_intersection, Circle, Point, Segment, SegmentIntersection};

#[derive(Clone, Debug, PartialEq)]
pub struct PortalSet {
    edge: Segment,
    eps_p: f64,
    offsets: Vec<f64>,
}

/// Upper bound on the number of portals for a given `ε_p`.
pub fn portal_count_bound(eps_p: f64) -> usize {
    let per_half = ((1.0 / (eps_p * eps_p)).ln() / (1.0 + 2.0 * eps_p).ln()).ceil();
    3 + 2 * per_half as usize
}

/// Offsets measured from `edge.a`, symmetric about the midpoint.
fn half_offsets(len: f64, eps_p: f64) -> Vec<f64> {
    let half = len / 2.0;
    let ratio = 1.0 + 2.0 * eps_p;
    let mut d = 0.5 * eps_p * eps_p * len;
    let mut out = Vec::new();
    while d < half {
        out.push(d);
        d *= ratio;
    }
    out
}

pub fn place_portals(edge: Segment, eps_p: f64) -> Result<PortalSet> {
    PortalSet::place(edge, eps_p)
}

impl PortalSet {
    pub fn place(edge: Segment, eps_p: f64) -> Result<Self> {
        if !(eps_p > 0.0 && eps_p < 0.5) {
            return Err(Error::param("eps_p", eps_p, "0 < eps_p < 1/2"));
        }
        let len = edge.length();
        if !(len > 0.0) {
            return Err(Error::DegenerateSegment);
        }
        let near = half_offsets(len, eps_p);
        let mut offsets = Vec::with_capacity(2 * near.len() + 3);
        offsets.push(0.0);
        offsets.extend_from_slice(&near);
        offsets.push(len / 2.0);
        offsets.extend(near.iter().rev().map(|d| len - d));
        offsets.push(len);
        Ok(PortalSet {
            edge,
            eps_p,
            offsets,
        })
    }

    pub fn edge(&self) -> &Segment {
        &self.edge
    }

    pub fn eps_p(&self) -> f64 {
        self.eps_p
    }

    /// Sorted arclength offsets from `edge.a`.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Offsets as fractions of the edge length, exactly `0` and `1` at the ends.
    pub fn fractions(&self) -> impl Iterator<Item = f64> + '_ {
        let len = self.edge.length();
        let last = self.offsets.len() - 1;
        self.offsets.iter().enumerate().map(move |(i, &o)| {
            if i == 0 {
                0.0
            } else if i == last {
                1.0
            } else if 2 * i == last {
                0.5
            } else {
                o / len
            }
        })
    }

    /// Portal coordinates, endpoints reproduced exactly.
    pub fn points(&self) -> Vec<Point> {
        self.fractions().map(|t| self.edge.point_at(t)).collect()
    }
}

/// Distance from chord `t` to the nearest portal.
///
/// Requires that the portal edge and `t` are both chords of `circle` (ends
/// within `1e-9` of the radius) and that `t` crosses the portal edge.
pub fn chord_portal_distance(portals: &PortalSet, circle: &Circle, t: &Segment) -> Result<f64> {
    let tol = 1e-9 * circle.radius;
    let on_circle = |p: Point| (p.dist(circle.center) - circle.radius).abs() <= tol;
    let s = portals.edge();
    if !(on_circle(s.a) && on_circle(s.b) && on_circle(t.a) && on_circle(t.b)) {
        return Err(Error::param(
            "chord",
            circle.radius,
            "segment endpoints must lie on the circle",
        ));
    }
    match segment_intersection(s, t) {
        SegmentIntersection::Point(_) | SegmentIntersection::SharedEndpoint(_) => {}
        _ => return Err(Error::NoCrossing),
    }
    Ok(portals
        .points()
        .into_iter()
        .map(|p| t.distance_to(p))
        .fold(f64::INFINITY, f64::min))
}
