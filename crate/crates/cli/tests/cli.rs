//! End-to-end runs of the `oneround` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oneround")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// The data row of a single-row CSV, keyed by header.
fn csv_row(text: &str) -> Vec<(String, String)> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().expect("header").split(',').collect();
    let row: Vec<&str> = lines.next().expect("row").split(',').collect();
    header.into_iter().zip(row).map(|(h, v)| (h.to_string(), v.to_string())).collect()
}

fn field<'a>(row: &'a [(String, String)], key: &str) -> &'a str {
    &row.iter().find(|(h, _)| h == key).unwrap_or_else(|| panic!("no column {key}")).1
}

#[test]
fn eval_exact_builtins() {
    let dir = TempDir::new().unwrap();
    for (name, num, den) in [("f1", "1", "2"), ("f2", "1", "3"), ("f3", "1", "4")] {
        let out = run(dir.path(), &["eval", name]);
        assert!(out.status.success(), "{}", stderr(&out));
        let row = csv_row(&stdout(&out));
        assert_eq!((field(&row, "value_num"), field(&row, "value_den")), (num, den), "{name}");
    }
}

#[test]
fn eval_monte_carlo_needs_a_seed() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["eval", "constant", "--method", "mc", "--trials", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(dir.path(), &["eval", "constant", "--method", "mc", "--trials", "1000", "--seed", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let row = csv_row(&stdout(&out));
    assert_eq!(field(&row, "mean").parse::<f64>().unwrap(), 1.0);
    assert_eq!(field(&row, "seed"), "3");
}

#[test]
fn eval_reads_algorithm_files() {
    let dir = TempDir::new().unwrap();
    // The optimal DB_normal(2) coloring read as a 2-grid table.
    let exact = run(dir.path(), &["bound", "upper", "--n", "2", "--out", "."]);
    assert!(exact.status.success(), "{}", stderr(&exact));
    let coloring = fs::read_to_string(dir.path().join("upper_normal_2_exhaustive.coloring")).unwrap();
    let table = coloring.lines().nth(1).expect("bit line").trim();
    assert_eq!(table.len(), 8, "coloring file: {coloring}");
    fs::write(dir.path().join("g.algo"), format!("family grid\nn 2\nbits {table}\n")).unwrap();
    let out = run(dir.path(), &["eval", "g.algo"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let row = csv_row(&stdout(&out));
    assert_eq!((field(&row, "value_num"), field(&row, "value_den")), ("1", "4"));
}

#[test]
fn bounds_land_in_the_ledger() {
    let dir = TempDir::new().unwrap();
    assert!(run(dir.path(), &["bound", "upper", "--n", "2", "--out", "."]).status.success());
    let lower = run(dir.path(), &["bound", "lower", "--n", "5", "--out", "."]);
    assert!(lower.status.success(), "{}", stderr(&lower));
    assert!(stdout(&lower).contains("1/5 <= p* <= 1/4"), "{}", stdout(&lower));
    let ledger = fs::read_to_string(dir.path().join("ledger.tsv")).unwrap();
    let entries: Vec<&str> = ledger.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(entries.len(), 2);
    assert!(entries[0].contains("direction=upper value_num=1 value_den=4"));
    assert!(entries[1].contains("direction=lower value_num=1 value_den=5"));
    let replay = run(dir.path(), &["verify", "--ledger", "ledger.tsv"]);
    assert!(replay.status.success(), "{}", stderr(&replay));
    assert!(stdout(&replay).contains("2 entries replayed"));
}

#[test]
fn tampered_certificates_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["bound", "lower", "--n", "5", "--method", "sdp", "--out", "."]);
    assert!(out.status.success(), "{}", stderr(&out));
    let path = dir.path().join("lower_distinct_5_sdp.cert");
    assert!(run(dir.path(), &["verify", "lower_distinct_5_sdp.cert"]).status.success());
    let text = fs::read_to_string(&path).unwrap();
    let mut negated = false;
    let tampered: Vec<String> = text
        .lines()
        .map(|l| {
            if !negated && l.starts_with("lambda") {
                negated = true;
                let mut toks: Vec<&str> = l.split_whitespace().collect();
                let value = format!("-{}", toks[5]);
                toks[5] = &value;
                return toks.join(" ");
            }
            l.to_string()
        })
        .collect();
    assert!(negated);
    fs::write(&path, tampered.join("\n") + "\n").unwrap();
    let out = run(dir.path(), &["verify", "lower_distinct_5_sdp.cert"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("negative multiplier"), "{}", stderr(&out));
}

#[test]
fn sandwich_violations_exit_3() {
    let dir = TempDir::new().unwrap();
    // An upper bound below the pentagon lower bound.
    fs::write(
        dir.path().join("ledger.tsv"),
        "0\tdirection=upper value_num=1 value_den=6 n=2 variant=normal method=exhaustive witness_path=- seed=-\toneround bound upper --n 2\n",
    )
    .unwrap();
    let out = run(dir.path(), &["bound", "lower", "--n", "5", "--out", "."]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn export_distinct5_rows() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["export-figure", "distinct5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("vertex,")).count(), 60);
    assert_eq!(text.lines().filter(|l| l.starts_with("edge,")).count(), 120);
}

#[test]
fn simulate_f1_is_a_half() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["simulate", "f1", "--n", "10", "--trials", "100000", "--seed", "11"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| !l.starts_with("trial_index") && !l.starts_with("mean")).count(), 100_000);
    let summary: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(summary[0], "mean");
    let mean: f64 = summary[1].parse().unwrap();
    let radius: f64 = summary[3].parse().unwrap();
    assert!((mean - 0.5).abs() <= radius, "mean {mean} radius {radius}");
}

#[test]
fn unknown_subcommands_exit_1() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
}
