//! Global assembly: portals on every Delaunay edge, one plane spanner per
//! triangle, merged into a single embedded graph.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::{planarize_with, PlanarGraph};
use crate::error::{Error, Result};
use crate::geom::{BBox, Point, Segment};
use crate::portals::PortalSet;
use crate::triangle_spanner::{snap_delta, wedge_overlay, OverlaySegment};
use crate::triangulation::{build_delaunay_seeded, Triangulation, ALPHA_FLOOR, INSERTION_SEED};
use crate::wedge::{BoundaryPoint, ConvexPolygon, WedgeOptions};

/// Largest portal parameter the practical profile will use.
pub const PRACTICAL_EPS_P_CAP: f64 = 0.45;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Constants exactly as the worst-case analysis demands.
    Theory,
    /// Calibrated constants, checked by measuring the dilation.
    Practical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpannerConfig {
    pub eps: f64,
    pub alpha: f64,
    pub eps_p: f64,
    /// Requested wedge half-angle; construction uses `π / directions ≤ delta`.
    pub delta: f64,
    pub directions: usize,
    pub beta: f64,
    pub boundary_escape: bool,
    pub profile: Profile,
    /// Delaunay insertion-order seed.
    pub seed: u64,
}

fn check_eps_alpha(eps: f64, alpha: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", eps, "0 < eps < 1"));
    }
    if !(alpha > 0.0 && alpha <= PI / 3.0 + 1e-12) {
        return Err(Error::param("alpha", alpha, "0 < alpha <= pi/3"));
    }
    Ok(())
}

/// `(1/(αε)) ln(1/(αε))`.
pub fn beta(eps: f64, alpha: f64) -> f64 {
    let x = 1.0 / (alpha * eps);
    x * x.ln()
}

/// Worst-case constants: portal detour and in-triangle stretch each get
/// half of `eps`, each with a factor-two margin.
pub fn derive_config(eps: f64, alpha: f64) -> Result<SpannerConfig> {
    check_eps_alpha(eps, alpha)?;
    let delta = 0.25 * (eps / 4.0).sqrt();
    Ok(SpannerConfig {
        eps,
        alpha,
        eps_p: alpha * eps / (16.0 * PI),
        delta,
        directions: snap_delta(delta).1,
        beta: beta(eps, alpha),
        boundary_escape: true,
        profile: Profile::Theory,
        seed: INSERTION_SEED,
    })
}

/// Calibrated constants: `eps_p = min(0.45, 4.5 eps)` and
/// `δ = min(π/4, 1.2 √eps)`. Measured dilation stays well under `1 + eps`
/// at a small fraction of the theory-profile size.
pub fn practical_config(eps: f64, alpha: f64) -> Result<SpannerConfig> {
    check_eps_alpha(eps, alpha)?;
    let delta = (1.2 * eps.sqrt()).min(PI / 4.0);
    Ok(SpannerConfig {
        eps,
        alpha,
        eps_p: (4.5 * eps).min(PRACTICAL_EPS_P_CAP),
        delta,
        directions: snap_delta(delta).1,
        beta: beta(eps, alpha),
        boundary_escape: true,
        profile: Profile::Practical,
        seed: INSERTION_SEED,
    })
}

impl SpannerConfig {
    pub fn for_profile(profile: Profile, eps: f64, alpha: f64) -> Result<Self> {
        match profile {
            Profile::Theory => derive_config(eps, alpha),
            Profile::Practical => practical_config(eps, alpha),
        }
    }

    /// Half-angle actually used by the wedge systems.
    pub fn effective_delta(&self) -> f64 {
        PI / self.directions as f64
    }

    fn validate(&self) -> Result<()> {
        check_eps_alpha(self.eps, self.alpha)?;
        if !(self.eps_p > 0.0 && self.eps_p < 0.5) {
            return Err(Error::param("eps_p", self.eps_p, "0 < eps_p < 1/2"));
        }
        if self.directions < 2 {
            return Err(Error::param("directions", self.directions as f64, "at least 2"));
        }
        Ok(())
    }
}

/// Overrides applied on top of a profile once `α` is known.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildOptions {
    pub profile: Profile,
    pub eps_p: Option<f64>,
    pub delta: Option<f64>,
    pub boundary_escape: bool,
    pub seed: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            profile: Profile::Practical,
            eps_p: None,
            delta: None,
            boundary_escape: true,
            seed: INSERTION_SEED,
        }
    }
}

impl BuildOptions {
    pub fn config(&self, eps: f64, alpha: f64) -> Result<SpannerConfig> {
        let mut c = SpannerConfig::for_profile(self.profile, eps, alpha)?;
        if let Some(e) = self.eps_p {
            c.eps_p = e;
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d < PI / 2.0) {
                return Err(Error::param("delta", d, "0 < delta < pi/2"));
            }
            c.delta = d;
            c.directions = snap_delta(d).1;
        }
        c.boundary_escape = self.boundary_escape;
        c.seed = self.seed;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpannerStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub weight: f64,
    pub mst_weight: f64,
    pub dt_weight: f64,
    pub triangles: usize,
    pub portals: usize,
}

#[derive(Clone, Debug)]
pub struct PlanarSpanner {
    pub graph: PlanarGraph,
    /// Graph vertex of each input site.
    pub site_map: Vec<usize>,
    pub config: SpannerConfig,
    pub stats: SpannerStats,
}

pub fn build_spanner(sites: &[Point], eps: f64, dt: Option<&Triangulation>) -> Result<PlanarSpanner> {
    build_spanner_with(sites, eps, dt, &BuildOptions::default())
}

/// One side of a triangle: the Delaunay edge it lies on and whether the
/// side runs against the edge's canonical (lower index first) direction.
#[derive(Clone, Copy)]
struct Side {
    edge: usize,
    reversed: bool,
}

struct TriangleWork {
    sides: [Side; 3],
    overlay: Vec<OverlaySegment>,
}

fn triangle_sides(tri: &Triangulation, t: usize) -> [Side; 3] {
    let v = tri.triangles()[t];
    let opp = tri.triangle_edges(t);
    // side j runs from v[j] to v[j+1], opposite corner j+2
    std::array::from_fn(|j| Side {
        edge: opp[(j + 2) % 3],
        reversed: v[j] > v[(j + 1) % 3],
    })
}

pub fn build_spanner_with(
    sites: &[Point],
    eps: f64,
    dt: Option<&Triangulation>,
    opts: &BuildOptions,
) -> Result<PlanarSpanner> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", eps, "0 < eps < 1"));
    }
    let tri = match dt {
        Some(t) => {
            if t.sites() != sites {
                return Err(Error::InvalidTriangulation(
                    "triangulation was built for different sites".into(),
                ));
            }
            t.clone()
        }
        None => build_delaunay_seeded(sites, opts.seed)?,
    };
    let alpha = tri.sharpest_angle();
    if alpha < ALPHA_FLOOR {
        return Err(Error::TooSharp {
            alpha,
            threshold: ALPHA_FLOOR,
        });
    }
    let config = opts.config(eps, alpha.min(PI / 3.0))?;
    let eta = BBox::of_points(sites).expect("validated sites").merge_tolerance();
    let wedge_opts = WedgeOptions {
        boundary_escape: config.boundary_escape,
    };

    // one portal set per Delaunay edge, in canonical orientation
    let portals: Vec<PortalSet> = tri
        .edges()
        .par_iter()
        .map(|e| PortalSet::place(Segment::new(sites[e.v[0]], sites[e.v[1]])?, config.eps_p))
        .collect::<Result<_>>()?;
    let portal_points: Vec<Vec<Point>> = portals.par_iter().map(|p| p.points()).collect();
    let portal_fracs: Vec<Vec<f64>> = portals.iter().map(|p| p.fractions().collect()).collect();

    // wedge overlays per triangle
    let work: Vec<TriangleWork> = (0..tri.triangles().len())
        .into_par_iter()
        .map(|t| {
            let sides = triangle_sides(&tri, t);
            let corners = tri.triangle_points(t);
            let k = ConvexPolygon::new(corners.to_vec())?;
            let mut pts = Vec::new();
            for (j, side) in sides.iter().enumerate() {
                let fr = &portal_fracs[side.edge];
                let pp = &portal_points[side.edge];
                for q in 0..fr.len() {
                    let local = if side.reversed { 1.0 - fr[q] } else { fr[q] };
                    if local == 1.0 {
                        continue;
                    }
                    if local == 0.0 {
                        pts.push(BoundaryPoint::with_point(j, 0.0, corners[j]));
                    } else {
                        pts.push(BoundaryPoint::with_point(j, local, pp[q]));
                    }
                }
            }
            let overlay = wedge_overlay(&k, &pts, config.directions, wedge_opts)?;
            Ok(TriangleWork { sides, overlay })
        })
        .collect::<Result<_>>()?;

    // boundary chains: portals plus every ray that ends on the edge, merged
    // within eta with portals taking precedence
    #[derive(Clone, Copy)]
    enum Stop {
        Portal(usize),
        Hit { tri: usize, seg: usize },
    }
    let mut stops: Vec<Vec<(f64, Stop)>> = portal_fracs
        .iter()
        .map(|f| f.iter().enumerate().map(|(q, &x)| (x, Stop::Portal(q))).collect())
        .collect();
    for (t, w) in work.iter().enumerate() {
        for (s, seg) in w.overlay.iter().enumerate() {
            if let Some(bp) = seg.boundary_end {
                if bp.is_corner() {
                    continue;
                }
                let side = w.sides[bp.edge];
                let frac = if side.reversed { 1.0 - bp.t } else { bp.t };
                stops[side.edge].push((frac, Stop::Hit { tri: t, seg: s }));
            }
        }
    }
    let mut hit_point: Vec<Vec<Option<Point>>> = work.iter().map(|w| vec![None; w.overlay.len()]).collect();
    let mut chains: Vec<Vec<Point>> = Vec::with_capacity(stops.len());
    for (e, list) in stops.iter_mut().enumerate() {
        let edge = &tri.edges()[e];
        let seg = Segment::new(sites[edge.v[0]], sites[edge.v[1]])?;
        let len = seg.length();
        list.sort_by(|a, b| {
            let rank = |s: &Stop| matches!(s, Stop::Hit { .. }) as u8;
            a.0.total_cmp(&b.0).then(rank(&a.1).cmp(&rank(&b.1)))
        });
        let mut chain: Vec<Point> = Vec::new();
        let mut i = 0;
        while i < list.len() {
            let start = list[i].0;
            let mut j = i;
            while j < list.len() && (list[j].0 - start) * len <= eta {
                j += 1;
            }
            let cluster = &list[i..j];
            let rep = cluster
                .iter()
                .find_map(|(_, s)| match s {
                    Stop::Portal(q) => Some(portal_points[e][*q]),
                    _ => None,
                })
                .unwrap_or_else(|| seg.point_at(cluster[0].0));
            // a cluster touching an end collapses onto the site
            let rep = if cluster.iter().any(|c| c.0 == 0.0) {
                seg.a
            } else if cluster.iter().any(|c| c.0 == 1.0) {
                seg.b
            } else {
                rep
            };
            if chain.last() != Some(&rep) {
                chain.push(rep);
            }
            for (_, s) in cluster {
                if let Stop::Hit { tri: t, seg: k } = s {
                    hit_point[*t][*k] = Some(rep);
                }
            }
            i = j;
        }
        chains.push(chain);
    }

    // planarize each triangle against its final boundary chains
    let locals: Vec<PlanarGraph> = work
        .par_iter()
        .enumerate()
        .map(|(t, w)| {
            let corners = tri.triangle_points(t);
            let mut segs: Vec<Segment> = Vec::new();
            for side in &w.sides {
                for pair in chains[side.edge].windows(2) {
                    segs.push(Segment { a: pair[0], b: pair[1] });
                }
            }
            for (s, o) in w.overlay.iter().enumerate() {
                let end = match o.boundary_end {
                    Some(bp) if bp.is_corner() => corners[bp.edge],
                    Some(_) => hit_point[t][s].expect("every boundary hit joins a chain"),
                    None => o.segment.b,
                };
                if end != o.segment.a {
                    segs.push(Segment { a: o.segment.a, b: end });
                }
            }
            planarize_with(&segs, eta)
        })
        .collect();

    // merge: sites first, then chain interiors, then triangle interiors
    let mut vertices: Vec<Point> = sites.to_vec();
    let key = |p: &Point| (p.x.to_bits(), p.y.to_bits());
    let mut boundary: HashMap<(u64, u64), usize> = HashMap::new();
    for (i, p) in sites.iter().enumerate() {
        boundary.insert(key(p), i);
    }
    for chain in &chains {
        for p in &chain[1..chain.len() - 1] {
            boundary.entry(key(p)).or_insert_with(|| {
                vertices.push(*p);
                vertices.len() - 1
            });
        }
    }
    let mut edges: Vec<[usize; 2]> = Vec::new();
    for g in &locals {
        let ids: Vec<usize> = g
            .vertices()
            .iter()
            .map(|p| match boundary.get(&key(p)) {
                Some(&v) => v,
                None => {
                    vertices.push(*p);
                    vertices.len() - 1
                }
            })
            .collect();
        for &[u, v] in g.edges() {
            let (a, b) = (ids[u], ids[v]);
            if a != b {
                edges.push([a.min(b), a.max(b)]);
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let graph = PlanarGraph::from_parts(vertices, edges);

    let stats = SpannerStats {
        vertex_count: graph.vertex_count(),
        edge_count: graph.edge_count(),
        weight: graph.total_length(),
        mst_weight: tri.mst().weight,
        dt_weight: tri.weight(),
        triangles: tri.triangles().len(),
        portals: portals.iter().map(|p| p.len()).sum(),
    };
    Ok(PlanarSpanner {
        graph,
        site_map: (0..sites.len()).collect(),
        config,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{check_plane, max_dilation, Pairs};
    use approx::assert_relative_eq;

    fn square() -> Vec<Point> {
        vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(1., 1.), Point::new(0., 1.)]
    }

    #[test]
    fn derive_examples() {
        let c = derive_config(0.2, PI / 6.0).unwrap();
        assert_relative_eq!(c.eps_p, 1.0 / 480.0, max_relative = 1e-12);
        assert_relative_eq!(c.delta, 0.25 * 0.05f64.sqrt(), max_relative = 1e-12);
        let b = derive_config(0.2, PI / 3.0).unwrap().beta;
        let x = 1.0 / (PI / 3.0 * 0.2);
        assert_relative_eq!(b, x * x.ln(), max_relative = 1e-12);
        assert!((b - 7.47).abs() < 0.01);
        assert!(derive_config(1.0, 0.5).is_err());
        assert!(derive_config(0.5, 0.0).is_err());
        assert!(derive_config(0.5, 1.2).is_err());
    }

    #[test]
    fn derive_monotone_in_eps() {
        let mut prev = derive_config(0.9, 0.5).unwrap();
        for k in 2..50 {
            let c = derive_config(0.9 / k as f64, 0.5).unwrap();
            assert!(c.eps_p < prev.eps_p && c.delta < prev.delta);
            prev = c;
        }
    }

    #[test]
    fn single_triangle_is_exact() {
        let pts = [Point::new(0., 0.), Point::new(2., 0.), Point::new(0.7, 1.5)];
        let s = build_spanner(&pts, 0.3, None).unwrap();
        let d = max_dilation(&s, &Pairs::All).unwrap();
        assert!((d.ratio - 1.0).abs() < 1e-12);
        assert!(check_plane(&s.graph).plane);
    }

    #[test]
    fn unit_square_beats_root_two() {
        let s = build_spanner(&square(), 0.1, None).unwrap();
        let d = max_dilation(&s, &Pairs::All).unwrap();
        assert!(d.ratio <= 1.1, "{}", d.ratio);
        assert!(d.ratio < 2f64.sqrt());
        assert!(check_plane(&s.graph).plane);
        assert!(s.graph.is_connected());
    }

    #[test]
    fn sites_pinned_first() {
        let s = build_spanner(&square(), 0.3, None).unwrap();
        for (i, p) in square().iter().enumerate() {
            assert_eq!(s.graph.vertices()[s.site_map[i]], *p);
            assert_eq!(s.site_map[i], i);
        }
    }

    #[test]
    fn rejects_foreign_triangulation() {
        let t = Triangulation::delaunay(&square()).unwrap();
        let other = [Point::new(0., 0.), Point::new(2., 0.), Point::new(0., 2.), Point::new(2., 2.)];
        assert!(matches!(build_spanner(&other, 0.2, Some(&t)), Err(Error::InvalidTriangulation(_))));
    }

    #[test]
    fn too_sharp() {
        let pts = [Point::new(0., 0.), Point::new(1., 0.), Point::new(0.5, 1e-9)];
        assert!(matches!(build_spanner(&pts, 0.2, None), Err(Error::TooSharp { .. })));
    }

    #[test]
    fn overrides() {
        let o = BuildOptions { eps_p: Some(0.7), ..Default::default() };
        assert!(matches!(o.config(0.2, 0.5), Err(Error::Parameter { name: "eps_p", .. })));
        let o = BuildOptions { delta: Some(0.1), ..Default::default() };
        let c = o.config(0.2, 0.5).unwrap();
        assert_eq!(c.directions, 32);
        assert!(c.effective_delta() <= 0.1);
    }
}
