//! End-to-end tests of the `pareto-peel` binary: subcommands, file outputs,
//! and exit codes (0 success, 2 config error, 3 run failure).

use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pareto-peel")
}

fn tmp_dir(label: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pareto-cli-{}-{label}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &std::path::Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn small_config() -> &'static str {
    r#"{
        "schema": 1,
        "norm": "linf",
        "domain": {"rectangle": [-1, 1, -1, 1]},
        "intensity": {"constant": 1.0},
        "engine": "peel",
        "n_values": [300],
        "seeds": [9],
        "observables": ["center-height", "layer-count"]
    }"#
}

#[test]
fn peel_subcommand_writes_points_csv() {
    let dir = tmp_dir("peel");
    let config = write_config(&dir, small_config());
    let out = Command::new(bin())
        .args([
            "peel",
            "--config",
            config.to_str().unwrap(),
            "--out-dir",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.join("points.csv")).unwrap();
    assert!(csv.starts_with("x1,x2,layer,reason\n"));
    assert!(csv.lines().count() > 100);
    assert!(csv.contains("facet:"));
}

#[test]
fn sort_and_weakpeel_subcommands() {
    let dir = tmp_dir("sortweak");
    let config = write_config(&dir, &small_config().replace("\"peel\"", "\"sort\""));
    let out = Command::new(bin())
        .args([
            "sort",
            "--config",
            config.to_str().unwrap(),
            "--out-dir",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.join("depth.csv")).unwrap();
    assert!(csv.starts_with("x1,x2,depth\n"));

    let out = Command::new(bin())
        .args([
            "weakpeel",
            "--config",
            config.to_str().unwrap(),
            "--out-dir",
            dir.to_str().unwrap(),
            "--seed",
            "77",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.join("points.csv").exists());
}

#[test]
fn hamiltonian_subcommand_tabulates() {
    let dir = tmp_dir("ham");
    let config = write_config(&dir, &small_config().replace("\"linf\"", "\"l1\""));
    let out = Command::new(bin())
        .args([
            "hamiltonian",
            "--config",
            config.to_str().unwrap(),
            "--out-dir",
            dir.to_str().unwrap(),
            "--samples",
            "8",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("hamiltonian.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("theta,xi1,xi2,value"));
    assert_eq!(csv.lines().count(), 9);
    // ℓ¹ Hamiltonian on the unit circle: |cos·sin|; at 45° that is 1/2.
    let row45: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
    let value: f64 = row45[3].parse().unwrap();
    assert!((value - 0.5).abs() < 1e-12);
}

#[test]
fn converge_and_render_pipeline() {
    let dir = tmp_dir("pipeline");
    let config = write_config(&dir, &small_config().replace("[300]", "[200, 400]"));
    let out = Command::new(bin())
        .args([
            "converge",
            "--config",
            config.to_str().unwrap(),
            "--out-dir",
            dir.to_str().unwrap(),
            "--threads",
            "2",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let runs = std::fs::read_to_string(dir.join("runs.csv")).unwrap();
    assert!(runs.starts_with("n,seed,observable,value,wall_time_ms\n"));
    assert_eq!(runs.lines().count(), 1 + 2 * 2);

    // Render a peel output.
    let out = Command::new(bin())
        .args([
            "peel",
            "--config",
            config.to_str().unwrap(),
            "--out-dir",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let svg_path = dir.join("fig.svg");
    let out = Command::new(bin())
        .args([
            "render",
            "--points",
            dir.join("points.csv").to_str().unwrap(),
            "--out",
            svg_path.to_str().unwrap(),
            "--stride",
            "2",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<circle"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tmp_dir("cfg2");
    // Unknown key.
    let config = write_config(
        &dir,
        &small_config().replace("\"seeds\"", "\"bogus\": 1, \"seeds\""),
    );
    let out = Command::new(bin())
        .args(["converge", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Missing file.
    let out = Command::new(bin())
        .args([
            "converge",
            "--config",
            dir.join("missing.json").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Clap-level parse failure.
    let out = Command::new(bin())
        .args(["no-such-subcommand"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_failures_exit_3() {
    let dir = tmp_dir("run3");
    let config = write_config(&dir, small_config());
    // Unwritable output directory surfaces as a run failure.
    let out = Command::new(bin())
        .args([
            "peel",
            "--config",
            config.to_str().unwrap(),
            "--out-dir",
            "/proc/definitely-not-writable",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // Render with a malformed points file.
    let bad = dir.join("bad.csv");
    std::fs::write(&bad, "not,a,points,file\n").unwrap();
    let out = Command::new(bin())
        .args([
            "render",
            "--points",
            bad.to_str().unwrap(),
            "--out",
            dir.join("x.svg").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn grid_render_from_csv() {
    let dir = tmp_dir("grid");
    // Write a grid of the ℓ∞ reference solution and render contours.
    let rect = pareto_peeling::Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
    let g = pareto_peeling::GridField::from_fn(rect, 33, 33, |p| {
        pareto_peeling::reference::ReferenceCase::LinfSquare
            .eval(p)
            .unwrap()
    });
    let grid_path = dir.join("grid.csv");
    std::fs::write(&grid_path, g.to_csv()).unwrap();
    let svg_path = dir.join("contours.svg");
    let out = Command::new(bin())
        .args([
            "render",
            "--grid",
            grid_path.to_str().unwrap(),
            "--out",
            svg_path.to_str().unwrap(),
            "--levels",
            "0.35,0.7,1.05",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.contains("<line"));
}
