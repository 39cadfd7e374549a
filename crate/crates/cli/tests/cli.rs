use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spanner"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn spanner")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn p(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_square(dir: &TempDir) -> PathBuf {
    let f = p(dir, "square.txt");
    std::fs::write(&f, "# unit square\n0 0\n1 0\n1 1\n0 1\n").unwrap();
    f
}

#[test]
fn gen_is_deterministic() {
    let d = TempDir::new().unwrap();
    let (a, b) = (p(&d, "a.txt"), p(&d, "b.txt"));
    for f in [&a, &b] {
        let o = run(&["gen", "--kind", "poisson-disk", "-n", "100", "--seed", "7", "-o", s(f)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn gen_exact_grid_reports_quarter_pi() {
    let o = run(&["gen", "--kind", "grid-jitter", "-n", "25", "--jitter", "0"]);
    assert_eq!(code(&o), 0);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("alpha = 0.785398"), "{err}");
    let pts = String::from_utf8_lossy(&o.stdout);
    assert_eq!(pts.lines().filter(|l| !l.starts_with('#')).count(), 25);
}

#[test]
fn gen_rejects_bad_params() {
    assert_eq!(code(&run(&["gen", "--kind", "grid-jitter", "-n", "50"])), 3);
    assert_eq!(code(&run(&["gen", "--kind", "uniform", "-n", "2"])), 3);
    assert_eq!(code(&run(&["gen", "--kind", "hexagonal", "-n", "9"])), 3);
}

#[test]
fn build_verify_render_square() {
    let d = TempDir::new().unwrap();
    let pts = write_square(&d);
    let (doc, stats, svg) = (p(&d, "s.json"), p(&d, "stats.json"), p(&d, "s.svg"));
    let o = run(&["build", "-i", s(&pts), "--eps", "0.1", "-o", s(&doc), "--stats", s(&stats)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&doc).unwrap()).unwrap();
    assert_eq!(v["format"], "steiner-spanner/1");
    assert_eq!(v["sites"].as_array().unwrap().len(), 4);
    let st: Value = serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    assert!(st["vertex_count"].as_u64().unwrap() >= 4);
    assert!(st["weight_ratio"].as_f64().unwrap() >= 1.0);

    let o = run(&["verify", "-p", s(&pts), "-s", s(&doc), "--eps", "0.1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["passed"], true);
    assert_eq!(r["plane"]["plane"], true);

    assert_eq!(code(&run(&["render", "-s", s(&doc), "-o", s(&svg)])), 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml") && text.trim_end().ends_with("</svg>"));
    assert_eq!(code(&run(&["stats", "-s", s(&doc)])), 0);
}

#[test]
fn build_input_errors() {
    let d = TempDir::new().unwrap();
    let out = p(&d, "x.json");
    let col = p(&d, "col.txt");
    std::fs::write(&col, "0 0\n1 1\n2 2\n3 3\n").unwrap();
    let o = run(&["build", "-i", s(&col), "--eps", "0.1", "-o", s(&out)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("collinear"));

    let bad = p(&d, "bad.txt");
    std::fs::write(&bad, "0 0\n1 zero\n").unwrap();
    let o = run(&["build", "-i", s(&bad), "--eps", "0.1", "-o", s(&out)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let sq = write_square(&d);
    for eps in ["0", "1", "-0.5"] {
        assert_eq!(code(&run(&["build", "-i", s(&sq), "--eps", eps, "-o", s(&out)])), 3, "eps {eps}");
    }
    assert_eq!(code(&run(&["build", "-i", s(&sq), "--eps", "0.1", "--eps-p", "0.6", "-o", s(&out)])), 3);
    assert_eq!(code(&run(&["--threads", "0", "build", "-i", s(&sq), "--eps", "0.1", "-o", s(&out)])), 3);
}

#[test]
fn triangulation_file() {
    let d = TempDir::new().unwrap();
    let pts = write_square(&d);
    let (out, dt) = (p(&d, "s.json"), p(&d, "dt.txt"));
    std::fs::write(&dt, "0 1 2\n0 2 3\n").unwrap();
    assert_eq!(code(&run(&["build", "-i", s(&pts), "--eps", "0.2", "--dt", s(&dt), "-o", s(&out)])), 0);

    // a non-Delaunay split of a kite
    let kite = p(&d, "kite.txt");
    std::fs::write(&kite, "0 0\n2 -1\n4 0\n2 1\n").unwrap();
    std::fs::write(&dt, "0 1 3\n1 2 3\n").unwrap();
    assert_eq!(code(&run(&["build", "-i", s(&kite), "--eps", "0.2", "--dt", s(&dt), "-o", s(&out)])), 0);
    std::fs::write(&dt, "0 1 2\n0 2 3\n").unwrap();
    let o = run(&["build", "-i", s(&kite), "--eps", "0.2", "--dt", s(&dt), "-o", s(&out)]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn snap_grid_rounds_sites() {
    let d = TempDir::new().unwrap();
    let pts = p(&d, "p.txt");
    std::fs::write(&pts, "0.01 0.02\n0.98 -0.01\n1.03 0.97\n0.02 1.01\n").unwrap();
    let out = p(&d, "s.json");
    let o = run(&["build", "-i", s(&pts), "--eps", "0.2", "--snap-grid", "1", "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let verts = v["vertices"].as_array().unwrap();
    let corners: Vec<[f64; 2]> = v["sites"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| {
            let q = &verts[i.as_u64().unwrap() as usize];
            [q[0].as_f64().unwrap(), q[1].as_f64().unwrap()]
        })
        .collect();
    assert_eq!(corners, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    // verify needs the same rounding to match the sites
    assert_eq!(code(&run(&["verify", "-p", s(&pts), "-s", s(&out), "--eps", "0.2"])), 2);
    let o = run(&["verify", "-p", s(&pts), "-s", s(&out), "--eps", "0.2", "--snap-grid", "1"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn disconnected_site_fails_verification() {
    let d = TempDir::new().unwrap();
    let pts = write_square(&d);
    let doc = p(&d, "s.json");
    assert_eq!(code(&run(&["build", "-i", s(&pts), "--eps", "0.25", "-o", s(&doc)])), 0);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&doc).unwrap()).unwrap();
    let site = v["sites"][2].as_u64().unwrap();
    let verts: Vec<(f64, f64)> = v["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|q| (q[0].as_f64().unwrap(), q[1].as_f64().unwrap()))
        .collect();
    let edges = v["edges"].as_array().unwrap().clone();
    let kept: Vec<Value> = edges
        .into_iter()
        .filter(|e| e[0].as_u64() != Some(site) && e[1].as_u64() != Some(site))
        .collect();
    let weight: f64 = kept
        .iter()
        .map(|e| {
            let (a, b) = (verts[e[0].as_u64().unwrap() as usize], verts[e[1].as_u64().unwrap() as usize]);
            (a.0 - b.0).hypot(a.1 - b.1)
        })
        .sum();
    v["stats"]["edge_count"] = kept.len().into();
    v["stats"]["weight"] = weight.into();
    v["edges"] = Value::Array(kept);
    std::fs::write(&doc, v.to_string()).unwrap();

    let o = run(&["verify", "-p", s(&pts), "-s", s(&doc), "--eps", "0.25"]);
    assert_eq!(code(&o), 1);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["disconnected"]["site"], 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("site 2"));
}

#[test]
fn malformed_documents() {
    let d = TempDir::new().unwrap();
    let pts = write_square(&d);
    let doc = p(&d, "s.json");
    std::fs::write(&doc, "{not json").unwrap();
    assert_eq!(code(&run(&["render", "-s", s(&doc), "-o", s(&p(&d, "x.svg"))])), 2);
    assert_eq!(code(&run(&["stats", "-s", s(&doc)])), 2);

    assert_eq!(code(&run(&["build", "-i", s(&pts), "--eps", "0.25", "-o", s(&doc)])), 0);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&doc).unwrap()).unwrap();
    v["sites"][1] = v["sites"][0].clone();
    std::fs::write(&doc, v.to_string()).unwrap();
    assert_eq!(code(&run(&["verify", "-p", s(&pts), "-s", s(&doc), "--eps", "0.25"])), 2);
}

#[test]
fn render_without_edges_and_deterministic() {
    let d = TempDir::new().unwrap();
    let pts = write_square(&d);
    let doc = p(&d, "s.json");
    assert_eq!(code(&run(&["build", "-i", s(&pts), "--eps", "0.25", "-o", s(&doc)])), 0);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&doc).unwrap()).unwrap();
    v["edges"] = Value::Array(vec![]);
    std::fs::write(&doc, v.to_string()).unwrap();
    let (a, b) = (p(&d, "a.svg"), p(&d, "b.svg"));
    for f in [&a, &b] {
        assert_eq!(code(&run(&["render", "-s", s(&doc), "-o", s(f), "--points", s(&pts)])), 0);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(!text.contains("<polyline"));
    assert_eq!(text.matches("<rect x=").count(), 4);
}
