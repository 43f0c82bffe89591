use std::path::Path;
use std::process::{Command, Output};

use frec::io::ResultDocument;

fn frec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frec"))
        .args(args)
        .output()
        .unwrap()
}

fn document(out: &Output) -> ResultDocument {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    ResultDocument::parse(&String::from_utf8(out.stdout.clone()).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn constant_rows_give_classical_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "c.csv", "1,1,1\n3,3,3\n2,2,2\n4,4,4\n");
    for depth in ["mbd", "ed"] {
        for algo in ["exact", "streaming"] {
            let doc = document(&frec(&["records", &path, "--depth", depth, "--algo", algo]));
            let rec = doc.section("records").unwrap();
            assert_eq!(rec.get("record_times"), Some("1,2,4"));
            let table = rec.table.as_ref().unwrap();
            let definitional: Vec<&str> = table.rows.iter().map(|r| r[6].as_str()).collect();
            assert_eq!(definitional, ["1", "1", "0", "0"]);
            assert_eq!(doc.arg("algo"), Some(algo));
        }
    }
}

#[test]
fn empty_file_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "e.csv", "");
    let out = frec(&["records", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn ragged_file_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "r.csv", "1,2,3,4\n1,2,3\n");
    let out = frec(&["test", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));
}

#[test]
fn missing_file_is_a_data_error() {
    assert_eq!(
        frec(&["records", "/nonexistent/x.csv"]).status.code(),
        Some(2)
    );
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "c.csv", "1,1\n3,3\n2,2\n4,4\n");
    assert_eq!(
        frec(&["test", &path, "--alpha", "1.5"]).status.code(),
        Some(1)
    );
    assert_eq!(
        frec(&["records", &path, "--depth", "tukey"]).status.code(),
        Some(1)
    );
    assert_eq!(frec(&["mc", "--replicates", "0"]).status.code(), Some(1));
    assert_eq!(frec(&["frobnicate"]).status.code(), Some(1));
    let short = write(dir.path(), "s.csv", "1,1\n2,2\n");
    assert_eq!(frec(&["test", &short]).status.code(), Some(1));
    assert_eq!(frec(&["--help"]).status.code(), Some(0));
}

#[test]
fn records_and_test_agree() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("sim.csv");
    let sim = frec(&[
        "simulate",
        "--model",
        "m1",
        "--n",
        "755",
        "--grid-points",
        "24",
        "--seed",
        "3",
        "--out",
        data.to_str().unwrap(),
    ]);
    assert!(sim.status.success());
    let path = data.to_str().unwrap();
    let rec = document(&frec(&["records", path]));
    let test = document(&frec(&["test", path]));
    let n_total: f64 = rec
        .section("records")
        .unwrap()
        .get("N_total")
        .unwrap()
        .parse()
        .unwrap();
    let t_n: f64 = test
        .section("test")
        .unwrap()
        .get("T_n")
        .unwrap()
        .parse()
        .unwrap();
    assert!((n_total - t_n * 755f64.sqrt()).abs() < 1e-9);
}

#[test]
fn small_statistic_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("iid.csv");
    let sim = frec(&[
        "simulate",
        "--model",
        "m3",
        "--n",
        "500",
        "--seed",
        "11",
        "--out",
        data.to_str().unwrap(),
    ]);
    assert!(sim.status.success());
    let doc = document(&frec(&["test", data.to_str().unwrap()]));
    let t = doc.section("test").unwrap();
    let t_n: f64 = t.get("T_n").unwrap().parse().unwrap();
    assert_eq!(
        t.get("reject"),
        Some(if t_n < 0.5931663491355721 {
            "true"
        } else {
            "false"
        })
    );
}

#[test]
fn simulation_and_test_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let sim = frec(&[
            "simulate",
            "--model",
            "m1",
            "--n",
            "500",
            "--seed",
            "42",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(sim.status.success());
        let test = frec(&["test", p.to_str().unwrap()]);
        (
            std::fs::read(&p).unwrap(),
            String::from_utf8(test.stdout).unwrap(),
        )
    };
    let (a_csv, a_doc) = run("a.csv");
    let (b_csv, b_doc) = run("b.csv");
    assert_eq!(a_csv, b_csv);
    assert_eq!(a_doc.replace("a.csv", "x"), b_doc.replace("b.csv", "x"));
}

#[test]
fn mc_config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "mc.cfg",
        "# size run\nmodel = m3\nn = 40,60\nreplicates = 5\nseed = 9\n",
    );
    let raw = dir.path().join("raw.csv");
    let doc = document(&frec(&[
        "mc",
        "--config",
        &cfg,
        "--replicates",
        "4",
        "--raw",
        raw.to_str().unwrap(),
    ]));
    assert_eq!(doc.seed, Some(9));
    assert_eq!(doc.arg("replicates"), Some("4"));
    assert_eq!(doc.arg("n"), Some("40,60"));
    let cells: Vec<_> = doc
        .sections
        .iter()
        .filter(|s| s.name.starts_with("cell."))
        .collect();
    assert_eq!(cells.len(), 2);
    assert_eq!(cells[0].table.as_ref().unwrap().rows.len(), 4);
    assert_eq!(cells[1].get("far_norm"), Some("unavailable"));
    assert!(std::fs::read_to_string(raw).unwrap().lines().count() > 8);

    let again = document(&frec(&[
        "mc",
        "--config",
        &cfg,
        "--replicates",
        "4",
        "--threads",
        "2",
    ]));
    assert_eq!(
        doc.sections.iter().map(|s| &s.table).collect::<Vec<_>>(),
        again.sections.iter().map(|s| &s.table).collect::<Vec<_>>()
    );
}

#[test]
fn quantile_command() {
    let doc = document(&frec(&["quantile", "--alpha", "0.05"]));
    let q: f64 = doc
        .section("quantile")
        .unwrap()
        .get("q")
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!((q * 100.0).round() / 100.0, 0.59);
}
