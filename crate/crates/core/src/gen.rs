//! Seeded point-set generators on the unit square.
//!
//! `grid-jitter` and `poisson-disk` keep the hull straight (boundary points
//! only move along the boundary) so that the Delaunay triangulation has no
//! slivers along the hull.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    GridJitter,
    PoissonDisk,
    Uniform,
}

impl FromStr for GenKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid-jitter" => Ok(GenKind::GridJitter),
            "poisson-disk" => Ok(GenKind::PoissonDisk),
            "uniform" => Ok(GenKind::Uniform),
            _ => Err(Error::Parse { line: 0, msg: format!("unknown generator `{s}`") }),
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenKind::GridJitter => "grid-jitter",
            GenKind::PoissonDisk => "poisson-disk",
            GenKind::Uniform => "uniform",
        })
    }
}

/// `k × k` grid on the unit square, `n = k²`. Each interior coordinate moves
/// by up to `±jitter/2` grid spacings; boundary points move only along their
/// side and corners stay fixed.
pub fn grid_jitter(n: usize, jitter: f64, seed: u64) -> Result<Vec<Point>> {
    let k = (n as f64).sqrt().round() as usize;
    if k < 2 || k * k != n {
        return Err(Error::param("n", n as f64, "a perfect square of at least 4"));
    }
    if !(0.0..1.0).contains(&jitter) {
        return Err(Error::param("jitter", jitter, "0 <= jitter < 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1.0 / (k - 1) as f64;
    let mut out = Vec::with_capacity(n);
    for j in 0..k {
        for i in 0..k {
            let (mut x, mut y) = (i as f64 * h, j as f64 * h);
            let dx = (rng.gen::<f64>() - 0.5) * jitter * h;
            let dy = (rng.gen::<f64>() - 0.5) * jitter * h;
            let (bx, by) = (i == 0 || i == k - 1, j == 0 || j == k - 1);
            if !bx {
                x += dx;
            }
            if !by {
                y += dy;
            }
            out.push(Point::new(x, y));
        }
    }
    Ok(out)
}

/// Blue-noise sample with minimum spacing `r`: the boundary is seeded at
/// spacing `1/⌈1/r⌉`, then filled by dart throwing around active points.
pub fn poisson_disk_radius(r: f64, seed: u64) -> Result<Vec<Point>> {
    if !(r > 1e-3 && r <= 0.5) {
        return Err(Error::param("radius", r, "0.001 < radius <= 0.5"));
    }
    const ATTEMPTS: usize = 30;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = (1.0 / r).ceil() as usize;
    let d = 1.0 / s as f64;
    let mut pts = Vec::new();
    for i in 0..s {
        let t = i as f64 * d;
        pts.push(Point::new(t, 0.0));
        pts.push(Point::new(1.0, t));
        pts.push(Point::new(1.0 - t, 1.0));
        pts.push(Point::new(0.0, 1.0 - t));
    }
    let cell = r / std::f64::consts::SQRT_2;
    let g = (1.0 / cell).ceil() as usize + 1;
    let mut grid: Vec<Vec<usize>> = vec![Vec::new(); g * g];
    let at = |p: Point| ((p.x / cell) as usize).min(g - 1) * g + ((p.y / cell) as usize).min(g - 1);
    for (i, &p) in pts.iter().enumerate() {
        grid[at(p)].push(i);
    }
    let far_enough = |p: Point, pts: &[Point], grid: &[Vec<usize>]| {
        let (cx, cy) = (((p.x / cell) as isize), ((p.y / cell) as isize));
        for x in cx - 2..=cx + 2 {
            for y in cy - 2..=cy + 2 {
                if x < 0 || y < 0 || x >= g as isize || y >= g as isize {
                    continue;
                }
                for &q in &grid[x as usize * g + y as usize] {
                    if pts[q].dist(p) < r {
                        return false;
                    }
                }
            }
        }
        true
    };
    let margin = r * 3f64.sqrt() / 2.0;
    let mut active: Vec<usize> = (0..pts.len()).collect();
    while !active.is_empty() {
        let slot = rng.gen_range(0..active.len());
        let base = pts[active[slot]];
        let mut placed = false;
        for _ in 0..ATTEMPTS {
            let rho = r * (1.0 + rng.gen::<f64>());
            let phi = rng.gen::<f64>() * std::f64::consts::TAU;
            let p = Point::new(base.x + rho * phi.cos(), base.y + rho * phi.sin());
            let inside = p.x >= margin && p.x <= 1.0 - margin && p.y >= margin && p.y <= 1.0 - margin;
            if inside && far_enough(p, &pts, &grid) {
                grid[at(p)].push(pts.len());
                active.push(pts.len());
                pts.push(p);
                placed = true;
                break;
            }
        }
        if !placed {
            active.swap_remove(slot);
        }
    }
    Ok(pts)
}

/// Poisson-disk set with exactly `n` points: the largest radius found that
/// yields at least `n` points, with the last interior darts dropped.
pub fn poisson_disk(n: usize, seed: u64) -> Result<Vec<Point>> {
    if n < 4 {
        return Err(Error::param("n", n as f64, "at least 4"));
    }
    let guess = (0.7 / n as f64).sqrt();
    let mut hi = (2.0 * guess).min(0.5);
    let mut lo = guess;
    let mut best = loop {
        let pts = poisson_disk_radius(lo, seed)?;
        if pts.len() >= n {
            break pts;
        }
        if lo < 2e-3 {
            return Err(Error::param("n", n as f64, "reachable with radius above 0.001"));
        }
        hi = lo;
        lo = (lo * 0.8).max(1.001e-3);
    };
    for _ in 0..60 {
        let r = (lo * hi).sqrt();
        let pts = poisson_disk_radius(r, seed)?;
        match pts.len().cmp(&n) {
            std::cmp::Ordering::Equal => return Ok(pts),
            std::cmp::Ordering::Greater => {
                lo = r;
                best = pts;
            }
            std::cmp::Ordering::Less => hi = r,
        }
        if hi / lo < 1.0 + 1e-12 {
            break;
        }
    }
    let boundary = 4 * (1.0 / lo).ceil() as usize;
    if boundary > n {
        return Err(Error::param("n", n as f64, "larger than the boundary sample"));
    }
    best.truncate(n);
    Ok(best)
}

pub fn uniform(n: usize, seed: u64) -> Result<Vec<Point>> {
    if n < 3 {
        return Err(Error::param("n", n as f64, "at least 3"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| Point::new(rng.gen(), rng.gen())).collect())
}

/// Generator-specific knobs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub jitter: f64,
    /// Fixed Poisson-disk radius; `None` searches for one matching `n`.
    pub radius: Option<f64>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { jitter: 0.2, radius: None }
    }
}

pub fn generate(kind: GenKind, n: usize, seed: u64, params: GenParams) -> Result<Vec<Point>> {
    match kind {
        GenKind::GridJitter => grid_jitter(n, params.jitter, seed),
        GenKind::PoissonDisk => match params.radius {
            Some(r) => poisson_disk_radius(r, seed),
            None => poisson_disk(n, seed),
        },
        GenKind::Uniform => uniform(n, seed),
    }
}
