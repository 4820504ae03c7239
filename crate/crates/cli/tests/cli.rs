use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_robpareto"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv::Reader::from_reader(csv.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_problem_1() {
    let out = stdout(&run(&["classify", "--builtin", "problem-1", "--step", "0.05"]));
    assert!(out.starts_with(
        "candidate,robust_efficient,convex_hull_efficient,objectivewise_efficient,set_valued_minimizer,dominator\n"
    ));
    let rows = rows(&out);
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|r| r[1] == "true"));
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[0][2], "false");
    assert_eq!(rows[0][5], "1");
    // Robust and set-valued labels agree.
    assert!(rows.iter().all(|r| r[1] == r[4]));
}

#[test]
fn classify_problem_2_origin_is_convex_hull_efficient() {
    let rows = rows(&stdout(&run(&["classify", "--builtin", "problem-2"])));
    let origin = rows.iter().find(|r| r[0] == "0;0").unwrap();
    assert_eq!(origin[2], "true");
}

#[test]
fn malformed_and_missing_files() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"name\": ").unwrap();
    assert_eq!(code(&run(&["classify", "--instance", path_arg(&bad)])), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&run(&["classify", "--instance", path_arg(&missing)])), 4);
    assert_eq!(code(&run(&["classify", "--builtin", "problem-9"])), 2);
    assert_eq!(code(&run(&["classify"])), 2);
}

#[test]
fn empty_candidate_list_exits_3() {
    let dir = TempDir::new().unwrap();
    let o = run(&["--emit", path_arg(dir.path()), "report", "--builtin", "problem-2"]);
    stdout(&o);
    let text = std::fs::read_to_string(dir.path().join("instance.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["candidates"] = serde_json::json!({ "points": [] });
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, doc.to_string()).unwrap();
    assert_eq!(code(&run(&["classify", "--instance", path_arg(&empty)])), 3);
}

/// Worst-case `0.5 (f1 + f2)` on the problem-1 grid, evaluated from the
/// endpoint images directly.
fn problem_1_wsum_grid_min(step: f64) -> (f64, f64) {
    let one = [[0.0, 2.0], [2.0, 2.0], [2.0, 0.0]];
    let zero = [[1.0, 4.0], [1.0, 1.0], [4.0, 1.0]];
    let k = (1.0 / step).round() as usize;
    (0..=k)
        .map(|i| {
            let x = i as f64 / k as f64;
            let worst = (0..3)
                .map(|s| 0.5 * (0..2).map(|j| x * one[s][j] + (1.0 - x) * zero[s][j]).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            (x, worst)
        })
        .fold((f64::NAN, f64::INFINITY), |a, b| if b.1 < a.1 - 1e-12 { b } else { a })
}

#[test]
fn scalarize_problem_1_weighted_sum() {
    let rows = rows(&stdout(&run(&["scalarize", "--builtin", "problem-1", "--u", "wsum:w=0.5,0.5"])));
    let (x, v) = problem_1_wsum_grid_min(0.05);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), x);
    assert!((rows[0][1].parse::<f64>().unwrap() - v).abs() < 1e-9);
    assert_eq!(rows[0][2], "exact_lp");
}

#[test]
fn scalarize_problem_2_weighted_sum() {
    let rows = rows(&stdout(&run(&["scalarize", "--builtin", "problem-2", "--u", "wsum:w=0.5,0.5"])));
    assert_eq!(rows[0][0], "0;1");
    assert!((rows[0][1].parse::<f64>().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn scalarize_constructive_with_trace() {
    let out = stdout(&run(&[
        "scalarize",
        "--builtin",
        "problem-1",
        "--u",
        "construct:anchor=0,mode=plain",
        "--trace",
    ]));
    let (summary, trace) = out.split_once("\n\n").unwrap();
    let summary = rows(&format!("{summary}\n"));
    assert_eq!(summary[0][0], "0");
    assert!(summary[0][1].parse::<f64>().unwrap().abs() < 1e-9);
    let trace = rows(trace);
    assert_eq!(trace.len(), 3);
    assert!(trace.iter().all(|r| r[3].parse::<f64>().unwrap().abs() < 1e-9));
}

#[test]
fn bad_scalarizer_specs_exit_2() {
    for spec in ["bogus:w=1", "pnorm:w=1", "pnorm:p=0.5", "wsum:w=1,2,3", "construct:anchor=7"] {
        let o = run(&["scalarize", "--builtin", "problem-1", "--u", spec]);
        assert_eq!(code(&o), 2, "{spec}");
    }
}

#[test]
fn sweep_problem_1_writes_figure_data() {
    let dir = TempDir::new().unwrap();
    let out = stdout(&run(&["--emit", path_arg(dir.path()), "sweep", "--builtin", "problem-1", "--p", "1,inf"]));
    let rows = rows(&out);
    let (x, _) = problem_1_wsum_grid_min(0.05);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), x);
    assert_eq!(rows[1][0], "inf");
    assert_eq!(rows[1][1], "1");
    for name in ["sweep.csv", "sweep_p1.csv", "sweep_p1.svg", "sweep_pinf.csv", "sweep_pinf.svg", "sweep.manifest.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let svg = std::fs::read_to_string(dir.path().join("sweep_p1.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<circle").count(), 3);
    let points = std::fs::read_to_string(dir.path().join("sweep_pinf.csv")).unwrap();
    assert_eq!(points, "scenario,f1,f2\n1,0,2\n2,2,2\n3,2,0\n");
    // Only final files remain; temporaries were renamed into place.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 6);
}

#[test]
fn sweep_input_and_io_errors() {
    let dir = TempDir::new().unwrap();
    let emit = path_arg(dir.path());
    assert_eq!(code(&run(&["--emit", emit, "sweep", "--builtin", "problem-1", "--p", ""])), 2);
    assert_eq!(code(&run(&["--emit", emit, "sweep", "--builtin", "problem-1", "--p", ",,"])), 2);
    let file = dir.path().join("file");
    std::fs::write(&file, "").unwrap();
    let nested = file.join("sub");
    assert_eq!(code(&run(&["--emit", path_arg(&nested), "sweep", "--builtin", "problem-1", "--p", "1"])), 4);
}

#[test]
fn sweep_phantom_radius_ordering() {
    let dir = TempDir::new().unwrap();
    let out = stdout(&run(&[
        "--emit",
        path_arg(dir.path()),
        "sweep",
        "--phantom",
        "default",
        "--scaled",
        "--p",
        "1,2,10",
    ]));
    let rows = rows(&out);
    let radius: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    let one: Vec<f64> = rows.iter().map(|r| r[6].parse().unwrap()).collect();
    assert!(radius[2] <= radius[1] + 1e-6 && radius[1] <= radius[0] + 1e-6, "{radius:?}");
    assert!(one[0] < one[2]);
}

#[test]
fn report_round_trip_is_byte_identical() {
    for (name, extra) in [("problem-1", vec![]), ("problem-2", vec![]), ("random", vec!["--seed", "7"])] {
        let dir = TempDir::new().unwrap();
        let mut args = vec!["--emit", path_arg(dir.path())];
        args.extend(&extra);
        args.extend(["report", "--builtin", name]);
        stdout(&run(&args));

        let mut direct = extra.clone();
        direct.extend(["classify", "--builtin", name]);
        let direct = stdout(&run(&direct));
        let instance = dir.path().join("instance.json");
        let reloaded = stdout(&run(&["classify", "--instance", path_arg(&instance)]));
        assert_eq!(direct, reloaded, "{name}");
        assert_eq!(direct, std::fs::read_to_string(dir.path().join("classify.csv")).unwrap());
    }
}

#[test]
fn manifest_records_the_run() {
    let dir = TempDir::new().unwrap();
    stdout(&run(&[
        "--emit",
        path_arg(dir.path()),
        "--eq-tol",
        "1e-8",
        "scalarize",
        "--builtin",
        "problem-2",
        "--u",
        "cheb:w=1,2",
    ]));
    let text = std::fs::read_to_string(dir.path().join("scalarize.manifest.json")).unwrap();
    let m: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(m["command"], "scalarize");
    assert_eq!(m["source"], "builtin:problem-2");
    assert_eq!(m["scalarizers"][0], "cheb:w=1,2");
    assert_eq!(m["eq_tol"], 1e-8);
    assert_eq!(m["tolerances"]["eq_tol"], 1e-8);
    assert!(m["outputs"][0].as_str().unwrap().ends_with("scalarize.csv"));
}

#[test]
fn phantom_document_loads() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("ph.json");
    stdout(&run(&["phantom", "--out", path_arg(&path)]));
    let o = run(&[
        "scalarize",
        "--instance",
        path_arg(&path),
        "--step",
        "0.5",
        "--u",
        "pnorm:p=2,w=1",
    ]);
    assert_eq!(rows(&stdout(&o)).len(), 1);
    assert_eq!(code(&run(&["phantom", "--config", path_arg(&dir.path().join("nope.json"))])), 4);
}

#[test]
fn thread_cap_from_environment() {
    let o = bin()
        .env("ROBPARETO_THREADS", "2")
        .args(["classify", "--builtin", "problem-2"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = bin()
        .env("ROBPARETO_THREADS", "zero")
        .args(["classify", "--builtin", "problem-2"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
