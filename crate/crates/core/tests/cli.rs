use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_percdetect"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_documents_conventions() {
    let top = String::from_utf8(run(&["--help"]).stdout).unwrap();
    assert!(top.contains("--threads"));
    let sim = String::from_utf8(run(&["simulate", "--help"]).stdout).unwrap();
    assert!(sim.contains("default: 55") && sim.contains("default: 1000") && sim.contains("--seed"));
    let inhom = String::from_utf8(run(&["simulate-inhom", "--help"]).stdout).unwrap();
    assert!(inhom.contains("0-based"));
    let thr = String::from_utf8(run(&["threshold", "--help"]).stdout).unwrap();
    assert!(thr.contains("ties are active"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["simulate", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(
        run(&["simulate", "--rows", "0", "--p", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["simulate"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let whole = run(&[
        "simulate-inhom",
        "--rows",
        "3",
        "--cols",
        "3",
        "--top",
        "0",
        "--left",
        "0",
        "--height",
        "3",
        "--width",
        "3",
        "--p-in",
        "0.5",
        "--p-out",
        "0.5",
    ]);
    assert_eq!(whole.status.code(), Some(2));
}

#[test]
fn missing_files_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["label", "-i", arg(&dir.path().join("nope.pbm"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn percolate_label_and_mask() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("a.pbm");
    let mask = dir.path().join("m.pbm");
    assert!(run(&[
        "percolate",
        "--rows",
        "15",
        "--cols",
        "12",
        "--p",
        "0.6",
        "--seed",
        "3",
        "-o",
        arg(&img)
    ])
    .status
    .success());
    let first = std::fs::read(&img).unwrap();
    run(&[
        "percolate",
        "--rows",
        "15",
        "--cols",
        "12",
        "--p",
        "0.6",
        "--seed",
        "3",
        "-o",
        arg(&img),
    ]);
    assert_eq!(std::fs::read(&img).unwrap(), first);

    let out = run(&[
        "label",
        "-i",
        arg(&img),
        "--topology",
        "4",
        "--mask",
        arg(&mask),
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let largest = report["largest"].as_u64().unwrap() as usize;
    let masked = percdetect::pnm::load_binary(&std::fs::read(&mask).unwrap()).unwrap();
    assert_eq!(masked.active_count(), largest);
    let total: u64 = report["cluster_sizes"]
        .as_object()
        .unwrap()
        .values()
        .map(|v| v.as_u64().unwrap())
        .sum();
    assert_eq!(total, report["num_clusters"].as_u64().unwrap());
}

#[test]
fn pgm_input_needs_tau() {
    let dir = tempfile::tempdir().unwrap();
    let pgm = dir.path().join("g.pgm");
    std::fs::write(&pgm, "P2\n3 1\n10\n0 5 10\n").unwrap();
    assert_eq!(run(&["label", "-i", arg(&pgm)]).status.code(), Some(2));
    let pbm = dir.path().join("t.pbm");
    assert!(run(&[
        "threshold",
        "-i",
        arg(&pgm),
        "--tau",
        "0.5",
        "-o",
        arg(&pbm)
    ])
    .status
    .success());
    assert_eq!(std::fs::read_to_string(&pbm).unwrap(), "P1\n3 1\n011\n");
    run(&[
        "threshold",
        "-i",
        arg(&pgm),
        "--tau",
        "0.5",
        "--direction",
        "lt",
        "-o",
        arg(&pbm),
    ]);
    assert_eq!(std::fs::read_to_string(&pbm).unwrap(), "P1\n3 1\n100\n");
}

#[test]
fn simulate_then_detect() {
    let dir = tempfile::tempdir().unwrap();
    let d = arg(dir.path());
    let out = run(&[
        "simulate",
        "--rows",
        "3",
        "--cols",
        "3",
        "--topology",
        "4",
        "--runs",
        "500",
        "--p",
        "0.5",
        "--out-dir",
        d,
    ]);
    assert!(out.status.success());
    let csv = dir.path().join("cdf_3x3_n4_p0.5.csv");
    assert!(csv.exists() && dir.path().join("cdf_3x3_n4_p0.5.json").exists());

    let full = dir.path().join("full.pbm");
    std::fs::write(&full, "P1\n3 3\n111\n111\n111\n").unwrap();
    let out = run(&[
        "detect",
        "-i",
        arg(&full),
        "--null",
        arg(&csv),
        "--alpha",
        "0.1",
    ]);
    assert!(out.status.success());
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["observed_max"], 9);
    assert_eq!(r["detected"], true);

    let wrong = dir.path().join("wrong.pbm");
    std::fs::write(&wrong, "P1\n2 2\n11\n11\n").unwrap();
    let out = run(&["detect", "-i", arg(&wrong), "--null", arg(&csv)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("provenance"));
}

#[test]
fn power_reports_json() {
    let out = run(&[
        "power", "--rows", "10", "--cols", "10", "--top", "3", "--left", "3", "--height", "4",
        "--width", "4", "--p-in", "0.9", "--p-out", "0.4", "--runs", "50",
    ]);
    assert!(out.status.success());
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let beta = r["beta"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&beta));
    assert_eq!(
        run(&["power", "--p-in", "0.3", "--p-out", "0.4"])
            .status
            .code(),
        Some(2)
    );
}
