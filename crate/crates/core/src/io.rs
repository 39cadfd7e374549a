//! File formats: point lists, triangle lists, the spanner document and SVG.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::arrangement::PlanarGraph;
use crate::error::{Error, Result};
use crate::geom::{BBox, Point};
use crate::spanner::{PlanarSpanner, SpannerConfig, SpannerStats};

pub const DOCUMENT_FORMAT: &str = "steiner-spanner/1";

/// Parses `x y` lines. `#` lines and blank lines are skipped.
pub fn parse_points(text: &str) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: i + 1, msg };
        let mut it = line.split_whitespace();
        let (Some(x), Some(y), None) = (it.next(), it.next(), it.next()) else {
            return Err(bad(format!("expected `x y`, got `{line}`")));
        };
        let x: f64 = x.parse().map_err(|_| bad(format!("bad number `{x}`")))?;
        let y: f64 = y.parse().map_err(|_| bad(format!("bad number `{y}`")))?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(bad("non-finite coordinate".into()));
        }
        out.push(Point::new(x, y));
    }
    Ok(out)
}

/// One point per line with 17 significant digits, which round-trips every
/// `f64` exactly.
pub fn render_points(points: &[Point]) -> String {
    let mut s = String::with_capacity(points.len() * 48);
    for p in points {
        let _ = writeln!(s, "{:.16e} {:.16e}", p.x, p.y);
    }
    s
}

/// Parses three zero-based site indices per line.
pub fn parse_triangles(text: &str) -> Result<Vec<[usize; 3]>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: i + 1, msg };
        let idx: Vec<usize> = line
            .split_whitespace()
            .map(|w| w.parse().map_err(|_| bad(format!("bad index `{w}`"))))
            .collect::<Result<_>>()?;
        let [a, b, c] = idx[..] else {
            return Err(bad(format!("expected three indices, got {}", idx.len())));
        };
        out.push([a, b, c]);
    }
    Ok(out)
}

pub fn render_triangles(triangles: &[[usize; 3]]) -> String {
    let mut s = String::new();
    for [a, b, c] in triangles {
        let _ = writeln!(s, "{a} {b} {c}");
    }
    s
}

/// Rounds every coordinate to the nearest multiple of `1/grid`.
pub fn snap_to_grid(points: &[Point], grid: f64) -> Result<Vec<Point>> {
    if !(grid > 0.0 && grid.is_finite()) {
        return Err(Error::param("snap-grid", grid, "a positive finite number"));
    }
    Ok(points
        .iter()
        .map(|p| Point::new((p.x * grid).round() / grid, (p.y * grid).round() / grid))
        .collect())
}

/// On-disk form of a built spanner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpannerDocument {
    pub format: String,
    pub config: SpannerConfig,
    pub vertices: Vec<[f64; 2]>,
    pub edges: Vec<[usize; 2]>,
    pub sites: Vec<usize>,
    pub stats: SpannerStats,
}

impl SpannerDocument {
    pub fn from_spanner(s: &PlanarSpanner) -> Self {
        SpannerDocument {
            format: DOCUMENT_FORMAT.to_string(),
            config: s.config,
            vertices: s.graph.vertices().iter().map(|p| [p.x, p.y]).collect(),
            edges: s.graph.edges().to_vec(),
            sites: s.site_map.clone(),
            stats: s.stats,
        }
    }

    /// Schema checks that do not need the graph: format tag, index ranges
    /// and an injective site map.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Document(m));
        if self.format != DOCUMENT_FORMAT {
            return bad(format!("unknown format `{}`", self.format));
        }
        let n = self.vertices.len();
        if let Some(e) = self.edges.iter().find(|e| e[0] >= n || e[1] >= n) {
            return bad(format!("edge {e:?} refers past {n} vertices"));
        }
        let mut seen = HashSet::with_capacity(self.sites.len());
        for (i, &v) in self.sites.iter().enumerate() {
            if v >= n {
                return bad(format!("site {i} refers to missing vertex {v}"));
            }
            if !seen.insert(v) {
                return bad(format!("site {i} shares vertex {v} with another site"));
            }
        }
        Ok(())
    }

    /// Rebuilds the spanner, checking the stored stats against the graph.
    pub fn into_spanner(self) -> Result<PlanarSpanner> {
        self.validate()?;
        let vertices = self.vertices.iter().map(|&[x, y]| Point::new(x, y)).collect();
        let graph = PlanarGraph::new(vertices, self.edges).map_err(|e| Error::Document(e.to_string()))?;
        let st = &self.stats;
        if st.vertex_count != graph.vertex_count() || st.edge_count != graph.edge_count() {
            return Err(Error::Document(format!(
                "stats claim {} vertices and {} edges, graph has {} and {}",
                st.vertex_count,
                st.edge_count,
                graph.vertex_count(),
                graph.edge_count()
            )));
        }
        let w = graph.total_length();
        if (w - st.weight).abs() > 1e-9 * w.max(1.0) {
            return Err(Error::Document(format!("stats weight {} but edges sum to {w}", st.weight)));
        }
        Ok(PlanarSpanner {
            graph,
            site_map: self.sites,
            config: self.config,
            stats: self.stats,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpannerDocument = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn site_points(&self) -> Vec<Point> {
        self.sites.iter().map(|&v| Point::new(self.vertices[v][0], self.vertices[v][1])).collect()
    }
}

/// Canvas size of the longer bounding-box side, in SVG user units.
const SVG_EXTENT: f64 = 1000.0;
/// Blank border around the drawing, in SVG user units.
pub const SVG_MARGIN: f64 = 20.0;

/// Deterministic SVG drawing: edges as polylines, sites as squares,
/// Steiner vertices as small dots, optional extra points as circles.
pub fn render_svg(doc: &SpannerDocument, overlay: Option<&[Point]>) -> Result<String> {
    doc.validate()?;
    let pts: Vec<Point> = doc.vertices.iter().map(|&[x, y]| Point::new(x, y)).collect();
    let extra = overlay.unwrap_or(&[]);
    let bb = BBox::of_points(pts.iter().chain(extra)).unwrap_or(BBox {
        min: Point::new(0.0, 0.0),
        max: Point::new(0.0, 0.0),
    });
    let span = (bb.max.x - bb.min.x).max(bb.max.y - bb.min.y);
    let scale = if span > 0.0 { SVG_EXTENT / span } else { 1.0 };
    let width = (bb.max.x - bb.min.x) * scale + 2.0 * SVG_MARGIN;
    let height = (bb.max.y - bb.min.y) * scale + 2.0 * SVG_MARGIN;
    let tx = |p: Point| {
        (
            SVG_MARGIN + (p.x - bb.min.x) * scale,
            SVG_MARGIN + (bb.max.y - p.y) * scale,
        )
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r##"<g id="edges" fill="none" stroke="#3060a0" stroke-width="0.5">"##);
    for &[u, v] in &doc.edges {
        let (a, b) = (tx(pts[u]), tx(pts[v]));
        let _ = writeln!(s, r#"<polyline points="{:.3},{:.3} {:.3},{:.3}"/>"#, a.0, a.1, b.0, b.1);
    }
    let _ = writeln!(s, "</g>");
    let is_site: HashSet<usize> = doc.sites.iter().copied().collect();
    let _ = writeln!(s, r##"<g id="steiner" fill="#808080">"##);
    for (i, &p) in pts.iter().enumerate() {
        if !is_site.contains(&i) {
            let (x, y) = tx(p);
            let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="0.6"/>"#);
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g id="sites" fill="#c03020">"##);
    for &v in &doc.sites {
        let (x, y) = tx(pts[v]);
        let _ = writeln!(s, r#"<rect x="{:.3}" y="{:.3}" width="6" height="6"/>"#, x - 3.0, y - 3.0);
    }
    let _ = writeln!(s, "</g>");
    if !extra.is_empty() {
        let _ = writeln!(s, r##"<g id="overlay" fill="none" stroke="#20a040" stroke-width="1">"##);
        for &p in extra {
            let (x, y) = tx(p);
            let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="5"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}
