//! Command-line front end, usable in-process through [`run_from`].

use std::fs;
use std::path::{Path, PathBuf};
use std::ffi::OsString;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use steiner_spanner::gen::{generate, GenKind, GenParams};
use steiner_spanner::geom::Point;
use steiner_spanner::io::{parse_points, parse_triangles, render_points, render_svg, snap_to_grid, SpannerDocument};
use steiner_spanner::spanner::{build_spanner_with, BuildOptions, Profile};
use steiner_spanner::triangulation::{Triangulation, INSERTION_SEED};
use steiner_spanner::verify::{verify_spanner, Pairs, VerifyOptions};
use steiner_spanner::Error;

#[derive(Parser)]
#[command(name = "spanner", version, about = "Plane Steiner spanners for Delaunay point sets")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded point set on the unit square.
    Gen {
        #[arg(long, value_parser = parse_kind)]
        kind: GenKind,
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Interior displacement for grid-jitter, in grid spacings.
        #[arg(long, default_value_t = 0.2)]
        jitter: f64,
        /// Fixed minimum spacing for poisson-disk; overrides `n`.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Build a spanner from a point file.
    Build {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(short, long)]
        out: PathBuf,
        /// Precomputed Delaunay triangulation, three site indices per line.
        #[arg(long)]
        dt: Option<PathBuf>,
        /// Also write the stats as JSON here.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Round coordinates to multiples of 1/G before building.
        #[arg(long)]
        snap_grid: Option<f64>,
        #[arg(long, value_enum, default_value_t = ProfileArg::Practical)]
        profile: ProfileArg,
        #[arg(long)]
        eps_p: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = INSERTION_SEED)]
        seed: u64,
    },
    /// Check a spanner against its point file; exit 1 when a check fails.
    Verify {
        #[arg(short, long)]
        points: PathBuf,
        #[arg(short, long)]
        spanner: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = PairsArg::All)]
        pairs: PairsArg,
        /// Pair count for `--pairs sample`.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        snap_grid: Option<f64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print size and weight figures of a spanner document.
    Stats {
        #[arg(short, long)]
        spanner: PathBuf,
    },
    /// Draw a spanner document as SVG.
    Render {
        #[arg(short, long)]
        spanner: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Extra points to circle.
        #[arg(long)]
        points: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Practical,
    Theory,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairsArg {
    All,
    Sample,
}

fn parse_kind(s: &str) -> Result<GenKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Verification failures exit with 1; everything else maps through the
/// library error.
struct Failed;

impl std::fmt::Debug for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("verification failed")
    }
}

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("verification failed")
    }
}

impl std::error::Error for Failed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Failed>().is_some() {
        return 1;
    }
    match err.downcast_ref::<Error>() {
        Some(e) => e.exit_code() as u8,
        None => 2,
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path)
        .map_err(Error::from)
        .with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text)
        .map_err(Error::from)
        .with_context(|| format!("writing {}", path.display()))
}

fn read_points(path: &Path, snap: Option<f64>) -> anyhow::Result<Vec<Point>> {
    let pts = parse_points(&read(path)?).with_context(|| path.display().to_string())?;
    Ok(match snap {
        Some(g) => snap_to_grid(&pts, g)?,
        None => pts,
    })
}

fn read_document(path: &Path) -> anyhow::Result<SpannerDocument> {
    SpannerDocument::from_json(&read(path)?).with_context(|| path.display().to_string())
}

fn to_json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.threads {
        Some(0) => Err(Error::Parameter { name: "threads", value: 0.0, expected: "at least 1" }.into()),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .context("configuring the thread pool")?
            .install(|| dispatch(cli.cmd)),
        None => dispatch(cli.cmd),
    }
}

fn dispatch(cmd: Cmd) -> anyhow::Result<()> {
    match cmd {
        Cmd::Gen { kind, n, seed, jitter, radius, out } => {
            if n < 3 {
                return Err(Error::Parameter { name: "n", value: n as f64, expected: "at least 3" }.into());
            }
            let pts = generate(kind, n, seed, GenParams { jitter, radius })?;
            let alpha = Triangulation::delaunay(&pts).map(|t| t.sharpest_angle());
            let mut text = format!("# {kind} n={} seed={seed}\n", pts.len());
            text.push_str(&render_points(&pts));
            match out {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
            match alpha {
                Ok(a) => eprintln!("alpha = {a:.6} rad ({:.3} deg)", a.to_degrees()),
                Err(e) => eprintln!("alpha unavailable: {e}"),
            }
        }
        Cmd::Build { input, eps, out, dt, stats, snap_grid, profile, eps_p, delta, seed } => {
            let pts = read_points(&input, snap_grid)?;
            let tri = match dt {
                Some(p) => {
                    let tris = parse_triangles(&read(&p)?).with_context(|| p.display().to_string())?;
                    Some(Triangulation::from_triangles(&pts, &tris)?)
                }
                None => None,
            };
            let opts = BuildOptions {
                profile: match profile {
                    ProfileArg::Practical => Profile::Practical,
                    ProfileArg::Theory => Profile::Theory,
                },
                eps_p,
                delta,
                seed,
                ..BuildOptions::default()
            };
            let sp = build_spanner_with(&pts, eps, tri.as_ref(), &opts)?;
            let doc = SpannerDocument::from_spanner(&sp);
            write(&out, &doc.to_json()?)?;
            if let Some(p) = stats {
                write(&p, &to_json(&StatsView::of(&doc))?)?;
            }
            eprintln!(
                "{} vertices, {} edges, weight {:.6} ({:.2} x MST)",
                sp.stats.vertex_count,
                sp.stats.edge_count,
                sp.stats.weight,
                sp.stats.weight / sp.stats.mst_weight
            );
        }
        Cmd::Verify { points, spanner, eps, pairs, samples, seed, snap_grid, out } => {
            let pts = read_points(&points, snap_grid)?;
            let doc = read_document(&spanner)?;
            let sites = doc.site_points();
            if sites != pts {
                return Err(Error::Document(format!(
                    "spanner sites do not match the {} points in {}",
                    pts.len(),
                    points.display()
                ))
                .into());
            }
            let sp = doc.into_spanner()?;
            let opts = VerifyOptions {
                pairs: match pairs {
                    PairsArg::All => Pairs::All,
                    PairsArg::Sample => Pairs::Sample { count: samples, seed },
                },
                seed,
                ..VerifyOptions::default()
            };
            let report = verify_spanner(&sp, eps, &opts)?;
            let text = to_json(&report)?;
            match out {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
            if let Some(u) = report.disconnected {
                eprintln!("site {} is unreachable from site {}", u.site, u.from);
            }
            if let Some(d) = report.max_dilation {
                eprintln!("max dilation {:.6} at sites {:?}", d.ratio, d.pair);
            }
            if !report.passed {
                return Err(Failed.into());
            }
        }
        Cmd::Stats { spanner } => {
            let doc = read_document(&spanner)?;
            print!("{}", to_json(&StatsView::of(&doc))?);
        }
        Cmd::Render { spanner, out, points } => {
            let doc = read_document(&spanner)?;
            let overlay = points.map(|p| read_points(&p, None)).transpose()?;
            write(&out, &render_svg(&doc, overlay.as_deref())?)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct StatsView<'a> {
    sites: usize,
    steiner_points: usize,
    #[serde(flatten)]
    stats: &'a steiner_spanner::spanner::SpannerStats,
    weight_ratio: f64,
    config: &'a steiner_spanner::spanner::SpannerConfig,
}

impl<'a> StatsView<'a> {
    fn of(doc: &'a SpannerDocument) -> Self {
        StatsView {
            sites: doc.sites.len(),
            steiner_points: doc.vertices.len() - doc.sites.len(),
            stats: &doc.stats,
            weight_ratio: doc.stats.weight / doc.stats.mst_weight,
            config: &doc.config,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_from<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            if e.downcast_ref::<Failed>().is_none() {
                eprintln!("error: {e:#}");
            }
            exit_code(&e)
        }
    }
}
