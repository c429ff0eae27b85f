use std::path::PathBuf;
use std::process::{Command, Output};

use passive_reflector::scenario_io::csv::{parse_summary, read_triples};

fn scenario(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", name].iter().collect()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reflector-sim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(text: &str, key: &str) -> f64 {
    parse_summary(text)
        .into_iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("missing {key}"))
        .1
        .parse()
        .unwrap()
}

#[test]
fn simulate_writes_grid_cdf_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario("indoor_flat_061.scn");
    let o = run(&["simulate", "--scenario", s.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let grid = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert_eq!(read_triples(&grid).unwrap().len(), 250);
    assert!(dir.path().join("cdf.csv").exists());
    assert!(!dir.path().join("breakdown.csv").exists());
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(value(&summary, "median_dbm") > -70.0);
    assert_eq!(value(&summary, "samples"), 250.0);
}

#[test]
fn simulate_is_deterministic() {
    let s = scenario("outdoor_flat_061.scn");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&["simulate", "--verbose", "--scenario", s.to_str().unwrap(), "--out", d.path().to_str().unwrap()]);
        assert!(o.status.success());
    }
    for f in ["sweep.csv", "cdf.csv", "summary.txt", "breakdown.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn compare_reports_positive_median_gain() {
    let o = run(&[
        "compare",
        "--baseline",
        scenario("indoor_no_reflector.scn").to_str().unwrap(),
        "--scenario",
        scenario("indoor_flat_084.scn").to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(value(&text, "median_gain_db") > 10.0);
    assert!(value(&text, "max_gain_db") >= value(&text, "median_gain_db"));
}

#[test]
fn sweep_size_is_monotone_and_saturates() {
    let o = run(&["sweep-size", "--scenario", scenario("lab_reflector_size.scn").to_str().unwrap()]);
    assert!(o.status.success());
    let rows: Vec<(f64, f64)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 17);
    assert!(rows.windows(2).all(|w| w[1].1 >= w[0].1));
    assert_eq!(rows[3].1, rows[16].1);
}

#[test]
fn raytrace_writes_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "raytrace",
        "--scenario",
        scenario("indoor_flat_061.scn").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let grid = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert_eq!(read_triples(&grid).unwrap().len(), 250);
}

#[test]
fn validation_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scn");
    std::fs::write(
        &bad,
        "schema_version = 1\n[[reflector]]\nshape = \"flat\"\nwidth = -1.0\nheight = 0.5\nposition = [1.0, 0.0, 1.3]\nnormal = [-1.0, 0.0, 0.0]\n",
    )
    .unwrap();
    let o = run(&["simulate", "--scenario", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("shape.width > 0"));
}

#[test]
fn missing_file_exits_two() {
    let o = run(&["compare", "--baseline", "/nonexistent/a.scn", "--scenario", "/nonexistent/b.scn"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_flags_print_usage() {
    let o = run(&["simulate", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = run(&[]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["sweep-size", "--scenario", "x.scn", "--sizes", "0.1:0.9"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn explain_defaults_lists_keys() {
    let o = run(&["--explain-defaults"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for key in ["link.frequency_hz", "ambient_floor_dbm"] {
        assert!(text.contains(key), "{key}");
    }
}
