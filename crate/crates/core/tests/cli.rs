//! End-to-end runs of the `blindspot` binary: output format, exit codes and
//! determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_blindspot");

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

fn write_config(name: &str, json: &str) -> PathBuf {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, json).unwrap();
    path
}

/// Runs `blindspot <sub> <config>` and returns (stdout, exit code).
fn run(sub: &str, config: &Path) -> (String, i32) {
    let out = Command::new(BIN).arg(sub).arg(config).output().unwrap();
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

struct Csv {
    meta: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn parse(text: &str) -> Self {
        let mut meta = Vec::new();
        let mut lines = Vec::new();
        for line in text.lines() {
            match line.strip_prefix("# ") {
                Some(m) => meta.push(m.to_string()),
                None => lines.push(line.split(',').map(str::to_string).collect::<Vec<_>>()),
            }
        }
        let header = lines.remove(0);
        Self { meta, header, rows: lines }
    }

    fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
    }

    fn floats(&self, name: &str) -> Vec<f64> {
        let c = self.col(name);
        self.rows.iter().map(|r| r[c].parse().unwrap()).collect()
    }

    fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find_map(|m| m.strip_prefix(key)?.strip_prefix('='))
    }
}

const TRIPLET: &str = r#""hbar": 0.075,
  "states": [
    {"amplitude": [1, 0], "center": [0, 0]},
    {"amplitude": [1, 0], "center": [1.5, -0.1]},
    {"amplitude": [1, 0], "center": [0.2, 1.5]}
  ]"#;

#[test]
fn chord_grid_has_complex_columns_and_unit_origin() {
    let (out, code) = run("grid", &example("triplet_grid.json"));
    assert_eq!(code, 0);
    let csv = Csv::parse(&out);
    assert_eq!(csv.header, ["xi_p", "xi_q", "re", "im"]);
    assert_eq!(csv.rows.len(), 121 * 121);
    let (p, q, re, im) = (csv.floats("xi_p"), csv.floats("xi_q"), csv.floats("re"), csv.floats("im"));
    let origin = (0..p.len()).find(|&i| p[i] == 0.0 && q[i] == 0.0).unwrap();
    assert!((re[origin] - 1.0).abs() < 1e-12);
    assert_eq!(im[origin], 0.0);
}

#[test]
fn correlation_grid_is_one_at_the_origin() {
    let cfg = write_config(
        "corr.json",
        &format!(r#"{{{TRIPLET}, "grid": {{"kind": "corr", "window": {{"p": [-0.5, 0.5], "q": [-0.5, 0.5], "shape": [11, 11]}}}}}}"#),
    );
    let (out, code) = run("grid", &cfg);
    assert_eq!(code, 0);
    let csv = Csv::parse(&out);
    assert_eq!(csv.header, ["xi_p", "xi_q", "value"]);
    let v = csv.floats("value");
    assert!((v[60] - 1.0).abs() < 1e-12, "centre sample {}", v[60]);
    assert!(v.iter().all(|&x| x <= 1.0 + 1e-12));
}

#[test]
fn wigner_grid_integrates_to_one() {
    let (n, lo, hi) = (241usize, -1.6, 3.1);
    let cfg = write_config(
        "wigner.json",
        &format!(
            r#"{{{TRIPLET}, "grid": {{"kind": "wigner", "window": {{"p": [{lo}, {hi}], "q": [{lo}, {hi}], "shape": [{n}, {n}]}}}}}}"#
        ),
    );
    let (out, code) = run("grid", &cfg);
    assert_eq!(code, 0);
    let h = (hi - lo) / (n - 1) as f64;
    let total: f64 = Csv::parse(&out).floats("value").iter().sum::<f64>() * h * h;
    assert!((total - 1.0).abs() < 1e-6, "∫W = {total}");
}

#[test]
fn hexagon_spots_are_refined_and_indexed() {
    let (out, code) = run("spots", &example("hexagon_spots.json"));
    assert_eq!(code, 0);
    let csv = Csv::parse(&out);
    assert!(csv.meta("basis_1").is_some() && csv.meta("offset_A").is_some());
    assert!(csv.rows.len() >= 6);
    assert!(csv.floats("residual").iter().all(|&r| r < 1e-12));
    let sub = csv.col("sublattice");
    for label in ["A", "B"] {
        assert!(csv.rows.iter().filter(|r| r[sub] == label).count() >= 3);
    }
}

#[test]
fn single_state_has_no_spots() {
    let cfg = write_config(
        "single.json",
        r#"{"hbar": 0.1, "states": [{"amplitude": [1, 0], "center": [0.3, -0.2]}], "spots": {}}"#,
    );
    let (out, code) = run("spots", &cfg);
    assert_eq!(code, 0);
    let csv = Csv::parse(&out);
    assert!(csv.rows.is_empty());
    assert!(csv.meta.iter().any(|m| m.starts_with("note:")));
}

#[test]
fn unequal_cat_reports_no_closure() {
    let (out, code) = run("spots", &example("unequal_cat.json"));
    assert_eq!(code, 0);
    let csv = Csv::parse(&out);
    assert!(csv.rows.is_empty());
    assert!(csv.meta.iter().any(|m| m.contains("no closure")));
}

#[test]
fn decohere_writes_scans_and_summary() {
    let cfg = write_config(
        "decohere.json",
        r#"{"hbar": 0.075,
            "states": [
              {"amplitude": [1, 0], "center": [0, 0]},
              {"amplitude": [1, 0], "center": [0, 3]},
              {"amplitude": [1, 0], "center": [3, 0]}
            ],
            "lindblad": {"couplings": [{"re": [1, 0]}, {"re": [0, 1]}]},
            "decohere": {"line": {"direction": [-1, 2]}, "s_range": [-0.2, 0.2], "samples": 21, "times": [0, 0.01]}}"#,
    );
    let (out, code) = run("decohere", &cfg);
    assert_eq!(code, 0);
    let csv = Csv::parse(&out);
    assert_eq!(csv.header, ["t", "s", "xi_p", "xi_q", "value"]);
    assert_eq!(csv.rows.len(), 2 * 21);
    assert_eq!(csv.meta("summary_columns"), Some("tau_l,t_p,ratio,area,spot_p,spot_q"));
    let summary: Vec<f64> = csv.meta("summary").unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    let (tau, tp) = (summary[0], summary[1]);
    assert!(tau > 0.0 && tau < tp);
    // ratio of the measured lifting time to the scaling estimate ħ t_p / A
    let (ratio, area) = (summary[2], summary[3]);
    assert!((ratio - tau * area / (0.075 * tp)).abs() < 1e-12 * ratio);

    // at t = 0 the scan is the pure-state correlation |χ|²
    let state = blindspot::Superposition::uniform(
        0.075,
        &[blindspot::PhaseVector::new(0.0, 0.0), blindspot::PhaseVector::new(0.0, 3.0), blindspot::PhaseVector::new(3.0, 0.0)],
    )
    .unwrap();
    let (t, p, q, v) = (csv.floats("t"), csv.floats("xi_p"), csv.floats("xi_q"), csv.floats("value"));
    for i in (0..t.len()).filter(|&i| t[i] == 0.0) {
        let exact = blindspot::correlation_pure(&state, blindspot::PhaseVector::new(p[i], q[i])).unwrap();
        assert!((v[i] - exact).abs() < 1e-12);
    }
}

#[test]
fn invert_round_trips_the_example_centres() {
    let (out, code) = run("invert", &example("invert.json"));
    assert_eq!(code, 0);
    let csv = Csv::parse(&out);
    let (p, q) = (csv.floats("eta_p"), csv.floats("eta_q"));
    let expected = [(0.0, 0.0), (-4.0, 0.3), (0.2, 3.0)];
    for (i, (ep, eq)) in expected.into_iter().enumerate() {
        assert!((p[i] - ep).abs() < 1e-10 && (q[i] - eq).abs() < 1e-10, "center {i}: ({}, {})", p[i], q[i]);
    }
}

#[test]
fn check_passes_on_the_example() {
    let (out, code) = run("check", &example("triplet_grid.json"));
    assert_eq!(code, 0);
    let csv = Csv::parse(&out);
    let status = csv.col("status");
    assert!(csv.rows.len() >= 7);
    assert!(csv.rows.iter().all(|r| r[status] == "PASS"));
}

#[test]
fn too_small_check_window_is_a_numerical_error() {
    let cfg = write_config(
        "narrow.json",
        &format!(r#"{{{TRIPLET}, "check": {{"window": {{"p": [-0.5, 0.5], "q": [-0.5, 0.5], "shape": [41, 41]}}}}}}"#),
    );
    assert_eq!(run("check", &cfg).1, 3);
}

#[test]
fn non_symplectic_frame_is_rejected() {
    let cfg = write_config(
        "frame.json",
        r#"{"hbar": 0.1, "states": [{"amplitude": [1, 0], "center": [0, 0], "frame": [[2, 0], [0, 2]]}],
            "grid": {"kind": "chord", "window": {"p": [-1, 1], "q": [-1, 1], "shape": [5, 5]}}}"#,
    );
    assert_eq!(run("grid", &cfg).1, 2);
}

#[test]
fn unknown_keys_and_missing_files_are_config_errors() {
    let cfg = write_config("typo.json", &format!(r#"{{{TRIPLET}, "grdi": {{}}}}"#));
    assert_eq!(run("grid", &cfg).1, 2);
    assert_eq!(run("grid", Path::new("/nonexistent/config.json")).1, 2);
    let missing_block = write_config("noblock.json", &format!("{{{TRIPLET}}}"));
    assert_eq!(run("grid", &missing_block).1, 2);
    let status = Command::new(BIN).arg("frobnicate").status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    let cfg = example("hexagon_spots.json");
    let (a, _) = run("spots", &cfg);
    let (b, _) = run("spots", &cfg);
    assert_eq!(a, b);
    let out = Path::new(env!("CARGO_TARGET_TMPDIR")).join("spots_threads.csv");
    let status = Command::new(BIN).args(["spots"]).arg(&cfg).arg("--out").arg(&out).args(["--threads", "3"]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), a);
}

#[test]
fn numbers_round_trip_exactly() {
    let (out, _) = run("invert", &example("invert.json"));
    let csv = Csv::parse(&out);
    let c = csv.col("eta_p");
    for row in &csv.rows {
        let x: f64 = row[c].parse().unwrap();
        assert_eq!(format!("{x:.16e}"), row[c]);
    }
    // 17 significant digits recover an arbitrary double bit for bit
    let x = 0.1f64 + 0.2;
    assert_eq!(format!("{x:.16e}").parse::<f64>().unwrap().to_bits(), x.to_bits());
}
