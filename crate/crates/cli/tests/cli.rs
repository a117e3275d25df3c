use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use flate2::write::GzEncoder;
use flate2::Compression;

fn oro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oro")).args(args).env("ORO_LOG", "error").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .to_string()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const TINY_MPS: &str = "\
NAME          TINY
ROWS
 N  COST
 L  LIM1
 L  LIM2
 E  BAL
COLUMNS
    X1        COST      -1.0   LIM1      1.0
    X1        LIM2      2.0    BAL       1.0
    X2        COST      -2.0   LIM1      1.0
    X2        LIM2      1.0
    X3        BAL       -1.0
RHS
    RHS       LIM1      4.0    LIM2      6.0
BOUNDS
 UP BND       X3        10.0
ENDATA
";

#[test]
fn solve_orlp_with_zero_optimism_is_a_single_solve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = oro(&["solve-orlp", "--random", "--n", "25", "--rows", "5", "--k", "0.1", "--r", "0", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(value(&stdout(&o), "status"), "converged");
    assert_eq!(value(&stdout(&o), "iterations"), "0");
    let sol = fs::read_to_string(out.join("solution.txt")).unwrap();
    assert_eq!(value(&sol, "w").split(',').count(), 25);
    assert!(out.join("trace.csv").exists() && out.join("manifest.txt").exists());
}

#[test]
fn solve_orlp_with_optimism_has_a_monotone_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o =
        oro(&["solve-orlp", "--random", "--n", "25", "--rows", "5", "--k", "0.1", "--r", "0.025", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    let obj: Vec<f64> = trace.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(obj.len() >= 2, "{trace}");
    for w in obj.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "{trace}");
    }
}

#[test]
fn solve_orlp_reads_mps_and_reports_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    let mps = dir.path().join("tiny.mps");
    fs::write(&mps, TINY_MPS).unwrap();
    let o = oro(&["solve-orlp", "--mps", p(&mps), "--k", "0.5", "--r", "0.5", "--out", p(&dir.path().join("a"))]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(value(&stdout(&o), "robust_rows"), "2");

    let missing = dir.path().join("missing.mps");
    let o = oro(&["solve-orlp", "--mps", p(&missing), "--k", "0.1", "--r", "0", "--out", p(&dir.path().join("b"))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("missing.mps"), "{}", stderr(&o));
}

#[test]
fn solve_orlp_flag_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    assert_eq!(code(&oro(&["solve-orlp", "--k", "0.1", "--r", "0", "--out", p(&out)])), 1);
    let both = oro(&["solve-orlp", "--random", "--mps", "a.mps", "--k", "0.1", "--r", "0", "--out", p(&out)]);
    assert_eq!(code(&both), 1);
    assert_eq!(code(&oro(&["solve-orlp", "--random", "--k", "-1", "--r", "0", "--out", p(&out)])), 1);
    assert_eq!(code(&oro(&["no-such-command"])), 1);
    assert_eq!(code(&oro(&["--help"])), 0);
}

#[test]
fn infeasible_problem_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let mps = dir.path().join("bad.mps");
    fs::write(
        &mps,
        "NAME BAD\nROWS\n N COST\n L R1\nCOLUMNS\n X COST 1.0 R1 1.0\nRHS\n RHS R1 0.5\nBOUNDS\n LO BND X 1.0\nENDATA\n",
    )
    .unwrap();
    let o = oro(&["solve-orlp", "--mps", p(&mps), "--k", "0", "--r", "0", "--out", p(&dir.path().join("o"))]);
    assert_eq!(code(&o), 2, "{}{}", stdout(&o), stderr(&o));
}

const GRID: &str = "\
K_values = 0.1, 0.2
R_values = 0, 0.25
M_values = 0, 1
trials = 1
seed = 5
deviation_fraction = 0.1
n_vars = 20
n_rows = 4
";

#[test]
fn experiment_row_count_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.txt");
    fs::write(&grid, GRID).unwrap();
    let out1 = dir.path().join("one.csv");
    let out2 = dir.path().join("two.csv");
    for out in [&out1, &out2] {
        let o = oro(&["experiment", "--family", "random", "--grid-file", p(&grid), "--out", p(out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let csv = fs::read_to_string(&out1).unwrap();
    assert_eq!(csv, fs::read_to_string(&out2).unwrap());
    assert!(dir.path().join("one.manifest.txt").exists());
    // |K||R| solves, |M| simulations per R ≠ 0 cell, |M||R| per R = 0 cell.
    let (k, r, m) = (2, 2, 2);
    let expected = k * r + k * (r - 1) * m + k * m * r;
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "K,R,M,loss,avg_protection,p_infeasible,dca_iterations,status");
    assert_eq!(lines.len() - 1, expected);
    for l in &lines[1..] {
        let p = l.split(',').nth(5).unwrap();
        assert!(p.is_empty() || p == "0" || p == "1" || p == "0.0" || p == "1.0", "{l}");
    }
}

#[test]
fn experiment_reports_grid_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.txt");
    fs::write(&grid, "K_values = 0.1\nR_values = zero\n").unwrap();
    let o = oro(&["experiment", "--family", "random", "--grid-file", p(&grid), "--out", p(&dir.path().join("x.csv"))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    let o = oro(&["experiment", "--family", "mps", "--grid-file", p(&grid), "--out", p(&dir.path().join("x.csv"))]);
    assert_eq!(code(&o), 1);
}

fn write_data(dir: &Path, name: &str, rows: &[(Vec<f64>, f64)]) -> String {
    let path = dir.join(name);
    let mut s = String::new();
    for (x, y) in rows {
        for v in x {
            s.push_str(&format!("{v},"));
        }
        s.push_str(&format!("{y}\n"));
    }
    fs::write(&path, s).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn svc_on_separable_data_has_zero_hinge_loss() {
    let dir = tempfile::tempdir().unwrap();
    let rows: Vec<(Vec<f64>, f64)> = vec![
        (vec![2.0, 0.3], 1.0),
        (vec![1.5, -0.4], 1.0),
        (vec![3.0, 0.1], 1.0),
        (vec![-2.0, 0.2], -1.0),
        (vec![-1.0, -0.3], -1.0),
        (vec![-2.5, 0.5], -1.0),
    ];
    let data = write_data(dir.path(), "sep.csv", &rows);
    let out = dir.path().join("m");
    let o = oro(&["train", "--task", "svc", "--data", &data, "--reg", "none", "--nu", "0.1", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let loss: f64 = value(&stdout(&o), "loss").parse().unwrap();
    assert!(loss.abs() < 1e-9, "loss {loss}");
    let model = fs::read_to_string(out.join("model.txt")).unwrap();
    assert_eq!(value(&model, "task"), "svc");
    assert!(out.join("trace.csv").exists() && out.join("manifest.txt").exists());
}

#[test]
fn trimmed_regression_excludes_the_outlier() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows: Vec<(Vec<f64>, f64)> = (0..10)
        .map(|i| {
            let x = i as f64 / 3.0;
            (vec![x], 0.8 * x + 0.3 + 0.01 * ((i * 7 % 5) as f64 - 2.0))
        })
        .collect();
    rows[6].1 += 25.0;
    let data = write_data(dir.path(), "reg.csv", &rows);
    let o = oro(&[
        "train",
        "--task",
        "trimmed",
        "--data",
        &data,
        "--mu",
        "0.1",
        "--c",
        "10",
        "--out",
        p(&dir.path().join("m")),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let excluded = value(&stdout(&o), "excluded");
    assert!(excluded.split(',').any(|i| i == "6"), "excluded = {excluded}");
}

#[test]
fn train_validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![(vec![1.0, 0.0], 1.0), (vec![-1.0, 0.0], -1.0), (vec![0.5, 1.0], 1.0)];
    let data = write_data(dir.path(), "d.csv", &rows);
    let out = p(&dir.path().join("m")).to_string();
    let scad = oro(&["train", "--task", "svc", "--data", &data, "--reg", "scad", "--theta", "1.5", "--out", &out]);
    assert_eq!(code(&scad), 1);
    assert!(stderr(&scad).contains("theta"), "{}", stderr(&scad));
    let no_theta = oro(&["train", "--task", "svc", "--data", &data, "--reg", "mcp", "--out", &out]);
    assert_eq!(code(&no_theta), 1);
    let labels = write_data(dir.path(), "bad.csv", &[(vec![1.0], 2.0), (vec![0.0], -1.0)]);
    assert_eq!(code(&oro(&["train", "--task", "robust-svm", "--data", &labels, "--out", &out])), 1);
    let garbage = dir.path().join("g.csv");
    fs::write(&garbage, "1,2,1\n3,x,1\n").unwrap();
    let o = oro(&["train", "--task", "svr", "--data", p(&garbage), "--out", &out]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn every_task_trains() {
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![
        (vec![1.0, 0.5], 1.0),
        (vec![2.0, -0.5], 1.0),
        (vec![0.2, 1.0], -1.0),
        (vec![-1.0, 0.0], -1.0),
        (vec![-0.5, -1.5], -1.0),
        (vec![1.5, 1.0], 1.0),
    ];
    let data = write_data(dir.path(), "d.csv", &rows);
    let runs: [&[&str]; 5] = [
        &["--task", "svc", "--reg", "approx-l0", "--k", "1", "--z", "0.5"],
        &["--task", "svr", "--reg", "capped-l1", "--theta", "0.5", "--c", "2"],
        &["--task", "tsvc", "--radius", "0.2"],
        &["--task", "robust-svm", "--radius", "0.2", "--inner", "subgradient"],
        &["--task", "trimmed", "--shape", "abs", "--mu", "0.2"],
    ];
    for (i, extra) in runs.iter().enumerate() {
        let out = dir.path().join(format!("m{i}"));
        let mut args = vec!["train", "--data", &data, "--out", p(&out)];
        args.extend_from_slice(extra);
        let o = oro(&args);
        assert_eq!(code(&o), 0, "{extra:?}: {}", stderr(&o));
        let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
        let obj: Vec<f64> = trace.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        for w in obj.windows(2) {
            assert!(w[1] <= w[0] + 1e-6 * w[0].abs().max(1.0), "{extra:?}: {trace}");
        }
    }
}

#[test]
fn train_manifest_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_data(dir.path(), "d.csv", &[(vec![1.0], 1.0), (vec![-1.0], -1.0)]);
    let out = p(&dir.path().join("m")).to_string();
    let args = ["train", "--task", "robust-svm", "--data", &data, "--out", &out];
    assert_eq!(code(&oro(&args)), 0);
    let first = fs::read_to_string(dir.path().join("m/manifest.txt")).unwrap();
    let model1 = fs::read_to_string(dir.path().join("m/model.txt")).unwrap();
    assert_eq!(code(&oro(&args)), 0);
    assert_eq!(first, fs::read_to_string(dir.path().join("m/manifest.txt")).unwrap());
    assert_eq!(model1, fs::read_to_string(dir.path().join("m/model.txt")).unwrap());
    assert!(first.contains("input.") && first.contains("sha256:"), "{first}");
}

#[test]
fn fetch_unknown_and_offline() {
    let o = oro(&["fetch-netlib", "--name", "notaproblem"]);
    assert_eq!(code(&o), 1);
    // Port 9 (discard) refuses connections on loopback.
    let dir = tempfile::tempdir().unwrap();
    let o = oro(&[
        "fetch-netlib",
        "--name",
        "CAPRI",
        "--mirror",
        "http://127.0.0.1:9",
        "--dest",
        p(&dir.path().join("c.mps")),
    ]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("--mirror"), "{}", stderr(&o));
}

#[test]
fn fetch_from_local_mirror() {
    let mirror = tempfile::tempdir().unwrap();
    fs::write(mirror.path().join("afiro.mps"), TINY_MPS).unwrap();
    let mut gz = GzEncoder::new(Vec::new(), Compression::default());
    gz.write_all(TINY_MPS.as_bytes()).unwrap();
    fs::write(mirror.path().join("capri.mps.gz"), gz.finish().unwrap()).unwrap();
    fs::write(mirror.path().join("kb2"), "compressed gibberish\n3 4 5\n").unwrap();
    let url = format!("file://{}", mirror.path().display());
    let dest = tempfile::tempdir().unwrap();

    let target = dest.path().join("afiro.mps");
    let o = oro(&["fetch-netlib", "--name", "AFIRO", "--mirror", &url, "--dest", p(&target)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&target).unwrap(), TINY_MPS);
    assert_eq!(value(&stdout(&o), "columns"), "3 inequalities=2 equalities=1");

    // Decompressed, parsed, but not CAPRI-sized: warning, exit 0.
    let target = dest.path().join("capri.mps");
    let o = oro(&["fetch-netlib", "--name", "capri", "--mirror", &url, "--dest", p(&target)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(value(&stdout(&o), "dimension_check"), "mismatch");
    assert_eq!(fs::read_to_string(&target).unwrap(), TINY_MPS);

    let o = oro(&["fetch-netlib", "--name", "kb2", "--mirror", &url, "--dest", p(&dest.path().join("kb2.mps"))]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("emps"), "{}", stderr(&o));

    let o = oro(&["fetch-netlib", "--name", "blend", "--mirror", &url, "--dest", p(&dest.path().join("b.mps"))]);
    assert_eq!(code(&o), 3);
}
