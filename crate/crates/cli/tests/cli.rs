use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn layout(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../core/layouts/{name}.json"))
}

fn losplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_losplan"))
        .args(args)
        .env_remove("LOSPLAN_ARC_SEGMENTS")
        .output()
        .expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn partition_square_has_two_triangles() {
    let dir = TempDir::new().unwrap();
    let out = losplan(&[
        "partition",
        arg(&layout("square")),
        "--out",
        arg(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = read_json(&dir.path().join("triangles.json"));
    assert_eq!(doc["triangles"].as_array().unwrap().len(), 2);
    assert!(doc["ht_R"].is_null());
    let svg = fs::read_to_string(dir.path().join("partition.svg")).unwrap();
    assert!(svg.contains("baseProfile=\"basic\""));
}

#[test]
fn partition_respects_the_side_bound() {
    let dir = TempDir::new().unwrap();
    let out = losplan(&[
        "partition",
        arg(&layout("l_shape")),
        "--ht-R",
        "2",
        "--out",
        arg(dir.path()),
    ]);
    assert!(out.status.success());
    let doc = read_json(&dir.path().join("triangles.json"));
    for t in doc["triangles"].as_array().unwrap() {
        let v: Vec<(f64, f64)> = t["vertices"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
            .collect();
        for i in 0..3 {
            let (a, b) = (v[i], v[(i + 1) % 3]);
            assert!((a.0 - b.0).hypot(a.1 - b.1) <= 2.0 + 1e-9);
        }
    }
}

#[test]
fn invalid_layout_exits_2_without_artifacts() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"outer":[[0,0],[2,2],[2,0],[0,2]]}"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = losplan(&["partition", arg(&bad), "--out", arg(&out_dir)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    assert!(!out_dir.exists());
}

#[test]
fn plan_square_counts() {
    let dir = TempDir::new().unwrap();
    let out = losplan(&["plan", arg(&layout("square")), "--out", arg(dir.path())]);
    assert!(out.status.success());
    let d = read_json(&dir.path().join("deployment.json"));
    assert_eq!(
        d["counts"],
        serde_json::json!({"g": 1, "g2": 0, "g3": 0, "hidden_t": 1})
    );
    assert_eq!(d["prns"][0]["tier"], "primary");
    assert!(dir.path().join("deployment.svg").exists());
    assert!(!dir.path().join("graphs.json").exists());
}

#[test]
fn plan_replica_three_los_reports_the_bound() {
    let dir = TempDir::new().unwrap();
    let out = losplan(&[
        "plan",
        arg(&layout("replica")),
        "--n",
        "3",
        "--ht-R",
        "3",
        "--ds",
        "1",
        "--thetas",
        "40",
        "--out",
        arg(dir.path()),
        "--dump-graph",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("lower bound: 3t"), "{stdout}");
    assert!(stdout.contains(": ok"), "{stdout}");
    let graphs = read_json(&dir.path().join("graphs.json"));
    let tiers: Vec<&str> = graphs
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["tier"].as_str().unwrap())
        .collect();
    assert_eq!(tiers, ["primary", "secondary", "trinary"]);
}

#[test]
fn infeasible_msd_exits_2() {
    let out = losplan(&[
        "plan",
        arg(&layout("square")),
        "--r",
        "1",
        "--ds",
        "3",
        "--out",
        "/nonexistent",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible MSD"));
}

#[test]
fn verify_gates_on_coverage() {
    let dir = TempDir::new().unwrap();
    let l = layout("l_shape");
    let planned = losplan(&["plan", arg(&l), "--r", "6", "--out", arg(dir.path())]);
    assert!(planned.status.success());
    let dep = dir.path().join("deployment.json");
    let ok = losplan(&[
        "verify",
        arg(&l),
        arg(&dep),
        "--samples",
        "3000",
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    let summary = read_json(&dir.path().join("summary.json"));
    assert_eq!(summary["coverage_fraction"], 1.0);
    let header = fs::read_to_string(dir.path().join("samples.csv")).unwrap();
    assert!(header.starts_with("ue_x,ue_y,covered,theta_e_deg,region_class\n"));
    let cdf = fs::read_to_string(dir.path().join("cdf.csv")).unwrap();
    assert!(cdf.starts_with("deviation_deg,fraction\n"));

    // drop the first PRN and the guarantee breaks
    let mut d = read_json(&dep);
    d["prns"].as_array_mut().unwrap().remove(0);
    let edited = dir.path().join("edited.json");
    fs::write(&edited, serde_json::to_string(&d).unwrap()).unwrap();
    let out_dir = dir.path().join("edited");
    let failed = losplan(&[
        "verify",
        arg(&l),
        arg(&edited),
        "--samples",
        "3000",
        "--out",
        arg(&out_dir),
    ]);
    assert_eq!(failed.status.code(), Some(1));
    assert!(
        read_json(&out_dir.join("summary.json"))["coverage_fraction"]
            .as_f64()
            .unwrap()
            < 1.0
    );
}

#[test]
fn zero_samples_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let l = layout("square");
    assert!(losplan(&["plan", arg(&l), "--out", arg(dir.path())])
        .status
        .success());
    let dep = dir.path().join("deployment.json");
    let out = losplan(&["verify", arg(&l), arg(&dep), "--samples", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let l = layout("comb");
    let run = |threads: &str| {
        let dir = TempDir::new().unwrap();
        let p = dir.path();
        let plan = losplan(&[
            "--threads",
            threads,
            "plan",
            arg(&l),
            "--n",
            "2",
            "--r",
            "6",
            "--ds",
            "1",
            "--out",
            arg(p),
        ]);
        assert!(plan.status.success());
        let dep = p.join("deployment.json");
        let ver = losplan(&[
            "--threads",
            threads,
            "verify",
            arg(&l),
            arg(&dep),
            "--samples",
            "2000",
            "--seed",
            "7",
            "--out",
            arg(p),
        ]);
        assert!(ver.status.success());
        [
            "deployment.json",
            "deployment.svg",
            "samples.csv",
            "cdf.csv",
            "summary.json",
        ]
        .map(|f| fs::read(p.join(f)).unwrap())
    };
    let a = run("1");
    assert_eq!(a, run("1"));
    assert_eq!(a, run("3"));
}

#[test]
fn arc_segments_come_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_losplan"))
        .args([
            "plan",
            arg(&layout("square")),
            "--r",
            "5",
            "--out",
            arg(dir.path()),
        ])
        .env("LOSPLAN_ARC_SEGMENTS", "24")
        .output()
        .unwrap();
    assert!(out.status.success());
    let d = read_json(&dir.path().join("deployment.json"));
    assert_eq!(d["config"]["arc_segments"], 24);

    let bad = Command::new(env!("CARGO_BIN_EXE_losplan"))
        .args(["plan", arg(&layout("square")), "--out", arg(dir.path())])
        .env("LOSPLAN_ARC_SEGMENTS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn render_draws_requested_layers() {
    let dir = TempDir::new().unwrap();
    let l = layout("l_shape");
    let p = dir.path();
    assert!(losplan(&["plan", arg(&l), "--r", "6", "--out", arg(p)])
        .status
        .success());
    let dep = p.join("deployment.json");
    assert!(losplan(&[
        "verify",
        arg(&l),
        arg(&dep),
        "--samples",
        "50",
        "--out",
        arg(p)
    ])
    .status
    .success());
    let svg_path = p.join("fig/all.svg");
    let out = losplan(&[
        "render",
        arg(&l),
        "--deployment",
        arg(&dep),
        "--samples",
        arg(&p.join("samples.csv")),
        "--layers",
        "layout,triangles,graph,areas,prns,samples",
        "-o",
        arg(&svg_path),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let svg = fs::read_to_string(&svg_path).unwrap();
    let prns = read_json(&dep)["prns"].as_array().unwrap().len();
    assert_eq!(svg.matches(r#" r="5""#).count(), prns);
    assert_eq!(svg.matches(r#" r="1.5""#).count(), 50);
    assert!(svg.contains("<line"));

    let bad = losplan(&["render", arg(&l), "--layers", "walls", "-o", arg(&svg_path)]);
    assert_eq!(bad.status.code(), Some(2));
}
