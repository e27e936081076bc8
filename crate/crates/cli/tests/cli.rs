//! End-to-end checks of the `qszilard` binary: exit codes, CSV structure,
//! config precedence, sweep determinism, and the CSV-row round trip.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn binary() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qszilard"));
    cmd.env_remove("QSZILARD_TOL");
    cmd
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

struct Csv {
    notes: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn load(path: &Path) -> Self {
        let text = fs::read_to_string(path).expect("output file exists");
        let mut notes = Vec::new();
        let mut header: Vec<String> = Vec::new();
        let mut rows = Vec::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ") {
                let (key, value) = rest.split_once(" = ").expect("note shape");
                notes.push((key.to_string(), value.to_string()));
            } else if header.is_empty() {
                header = line.split(',').map(str::to_string).collect();
            } else {
                rows.push(line.split(',').map(str::to_string).collect());
            }
        }
        Csv { notes, header, rows }
    }

    fn col(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("column {name}"))
    }

    fn float(&self, row: usize, name: &str) -> f64 {
        self.rows[row][self.col(name)].parse().expect("numeric cell")
    }

    fn note(&self, key: &str) -> f64 {
        self.notes
            .iter()
            .find(|(k, _)| k == key)
            .unwrap_or_else(|| panic!("note {key}"))
            .1
            .parse()
            .expect("numeric note")
    }
}

#[test]
fn pwc_anchor_cycle_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("row.csv");
    let result = run(&["cycle", "--beta_D", "2.09", "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{}", stderr(&result));
    let csv = Csv::load(&out);
    assert_eq!(csv.rows.len(), 1);
    assert!(csv.float(0, "W_tot").abs() < 1e-3);
}

#[test]
fn degenerate_register_extracts_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("row.csv");
    let result = run(&["cycle", "--Delta", "0", "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{}", stderr(&result));
    let csv = Csv::load(&out);
    assert_eq!(csv.float(0, "W_mea"), 0.0);
    assert_eq!(csv.float(0, "eta"), 0.0);
    assert_eq!(csv.rows[0][csv.col("pwc")], "0");
}

#[test]
fn classical_szilard_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("row.csv");
    let result = run(&[
        "cycle", "--L", "100", "--l", "50", "--beta_D", "inf", "--Delta", "1e-6", "--l_g",
        "100", "--l_e", "0", "--out", out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let csv = Csv::load(&out);
    assert!((csv.float(0, "W_tot") - 2.0_f64.ln()).abs() < 1e-3);
    assert_eq!(csv.rows[0][csv.col("pwc")], "1");
}

#[test]
fn config_file_feeds_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("engine.conf");
    fs::write(&conf, "# engine setup\nl = 0.3\nbeta = 2\n").unwrap();
    let out = dir.path().join("row.csv");
    let result = run(&[
        "cycle",
        "--config",
        conf.to_str().unwrap(),
        "--beta",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let csv = Csv::load(&out);
    assert_eq!(csv.note("l"), 0.3);
    assert_eq!(csv.note("beta"), 0.5);
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("engine.conf");
    fs::write(&conf, "bogus = 3\n").unwrap();
    let result = run(&["cycle", "--config", conf.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    assert!(stderr(&result).contains("bogus"));
}

#[test]
fn crushed_block_is_a_domain_error() {
    let result = run(&["cycle", "--l_g", "1", "--l_e", "0"]);
    assert_eq!(result.status.code(), Some(2));
    assert!(stderr(&result).contains("crushed"));
}

#[test]
fn missed_bracket_is_a_solver_error() {
    let result = run(&["solve", "pwc-beta", "--lo", "1", "--hi", "2"]);
    assert_eq!(result.status.code(), Some(3));
}

#[test]
fn solve_report_lands_on_the_anchors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solve.csv");
    let result = run(&["solve", "pwc-beta", "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{}", stderr(&result));
    let csv = Csv::load(&out);
    assert!((csv.float(0, "root") - 2.09).abs() < 0.01);

    let result = run(&[
        "solve", "l-cri", "--beta_D", "inf", "--out", out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let csv = Csv::load(&out);
    assert!((csv.float(0, "root") - 0.447).abs() < 0.005);
    assert!(csv.float(0, "condition_residual").abs() < 5e-3);
}

#[test]
fn tolerance_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("row.csv");
    let result = binary()
        .env("QSZILARD_TOL", "1e-9")
        .args(["cycle", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(result.status.success(), "{}", stderr(&result));
    assert_eq!(Csv::load(&out).note("tol"), 1e-9);

    let result = binary()
        .env("QSZILARD_TOL", "1e-9")
        .args(["cycle", "--tol", "1e-7", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(result.status.success(), "{}", stderr(&result));
    assert_eq!(Csv::load(&out).note("tol"), 1e-7);

    let result = binary()
        .env("QSZILARD_TOL", "2.0")
        .args(["cycle"])
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(1));
    assert!(stderr(&result).contains("tol"));
}

#[test]
fn sweep_rows_come_out_row_major() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let result = run(&[
        "sweep",
        "--axis",
        "l:0.2:0.8:3",
        "--axis",
        "beta_D:1:2:2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let csv = Csv::load(&out);
    assert_eq!(csv.rows.len(), 6);
    let l: Vec<f64> = (0..6).map(|i| csv.float(i, "l")).collect();
    let bd: Vec<f64> = (0..6).map(|i| csv.float(i, "beta_D")).collect();
    assert_eq!(&l[..2], &[l[0], l[0]]);
    assert!(l[0] < l[2] && l[2] < l[4]);
    assert_eq!(l[2], l[3]);
    assert_eq!(l[4], l[5]);
    assert_eq!(bd, [1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
}

#[test]
fn sweep_row_refeeds_to_the_same_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let sweep_out = dir.path().join("sweep.csv");
    let result = run(&[
        "sweep",
        "--axis",
        "l:0.3:0.7:3",
        "--out",
        sweep_out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let sweep = Csv::load(&sweep_out);
    assert_eq!(sweep.rows.len(), 3);

    for row in 0..sweep.rows.len() {
        let cell = |name: &str| sweep.rows[row][sweep.col(name)].clone();
        let cycle_out = dir.path().join(format!("cycle{row}.csv"));
        let result = run(&[
            "cycle", "--l", &cell("l"), "--L", &cell("L"), "--beta", &cell("beta"),
            "--beta_D", &cell("beta_D"), "--Delta", &cell("Delta"), "--F", &cell("F"),
            "--l_g", &cell("l_g"), "--l_e", &cell("l_e"),
            "--out", cycle_out.to_str().unwrap(),
        ]);
        assert!(result.status.success(), "{}", stderr(&result));
        let cycle = Csv::load(&cycle_out);
        assert_eq!(cycle.rows[0], sweep.rows[row]);
        let diff = (cycle.float(0, "W_tot") - sweep.float(row, "W_tot")).abs();
        assert!(diff <= 1e-12, "W_tot drifted by {diff:e} on re-feed");
    }
}

#[test]
fn crushed_sweep_rows_are_annotated_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let result = run(&[
        "sweep",
        "--l_g",
        "1.0",
        "--l_e",
        "0.0",
        "--axis",
        "beta_D:1:5:3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let csv = Csv::load(&out);
    assert_eq!(csv.rows.len(), 3);
    for row in &csv.rows {
        assert_eq!(row[csv.col("W_tot")], "NaN");
        assert_eq!(row[csv.col("error")], "CrushedBlock");
    }
    for key in ["L", "beta", "Delta", "F", "guard_frac", "tol", "axis"] {
        assert!(csv.notes.iter().any(|(k, _)| k == key), "header echoes {key}");
    }
}

#[test]
fn sweep_output_is_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.csv");
    let two = dir.path().join("two.csv");
    for (path, workers) in [(&one, "1"), (&two, "2")] {
        let result = run(&[
            "sweep",
            "--axis",
            "l:0.1:0.9:5",
            "--axis",
            "beta_D:1:5:5",
            "--workers",
            workers,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(result.status.success(), "{}", stderr(&result));
    }
    assert_eq!(fs::read(&one).unwrap(), fs::read(&two).unwrap());
}

#[test]
fn unknown_figure_is_rejected() {
    let result = run(&["figure", "fig9"]);
    assert_eq!(result.status.code(), Some(1));
    assert!(stderr(&result).contains("fig9"));
}

#[test]
fn figure_defaults_to_a_named_file() {
    let dir = tempfile::tempdir().unwrap();
    let result = binary()
        .current_dir(dir.path())
        .args(["figure", "fig3a"])
        .output()
        .unwrap();
    assert!(result.status.success(), "{}", stderr(&result));
    let csv = Csv::load(&dir.path().join("fig3a.csv"));
    assert_eq!(csv.header, ["beta", "l", "W_ins"]);
    assert_eq!(csv.rows.len(), 3 * 201);
}
