use std::path::Path;
use std::process::{Command, Output};

use hypercube_dml::hypercube::{load_labeling, verify_dml};
use hypercube_dml::paper;

fn qdml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdml"))
        .args(args)
        .output()
        .expect("run qdml")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn encode_q6_with_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q6.cnf");
    let o = qdml(&[
        "encode",
        "--n",
        "6",
        "--fix-paper-prefix",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("Q6: 16832 variables, 54154 clauses"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\np cnf 16832 54154\n"));
    assert!(text.contains("fixed_prefix=true"));
}

#[test]
fn encode_warns_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q4.cnf");
    let o = qdml(&["encode", "--n", "4", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("instance expected UNSAT"));
    assert!(out.exists());

    let o = qdml(&["encode", "--n", "5", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("non-integer"));

    let o = qdml(&[
        "encode",
        "--n",
        "4",
        "--fix-paper-prefix",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn solve_q2_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let lab_path = dir.path().join("q2.txt");
    let o = qdml(&[
        "solve",
        "--n",
        "2",
        "--builtin",
        "--out-labeling",
        path_str(&lab_path),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("valid, magic constant 3, neighbor-balanced"));
    let lab = load_labeling(&std::fs::read_to_string(&lab_path).unwrap()).unwrap();
    assert!(verify_dml(&lab).is_valid());

    let o = qdml(&["verify", "--labeling", path_str(&lab_path)]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn solve_requires_force_for_large_builtin() {
    let o = qdml(&["solve", "--n", "4", "--builtin"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--force"));
    let o = qdml(&["solve", "--n", "2"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn solve_with_external_solver() {
    let template = format!("{} sat {{cnf}} --seed {{seed}}", env!("CARGO_BIN_EXE_qdml"));
    let o = qdml(&[
        "solve",
        "--n",
        "2",
        "--solver",
        &template,
        "--portfolio",
        "2",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("decided by seed"));
    assert!(stdout(&o).contains("valid, magic constant 3"));
}

#[cfg(unix)]
#[test]
fn solve_reports_unsat_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("unsat.sh");
    std::fs::write(&script, "#!/bin/sh\necho 's UNSATISFIABLE'\nexit 20\n").unwrap();
    let template = format!("sh {} {{cnf}}", script.display());
    let o = qdml(&["solve", "--n", "4", "--solver", &template]);
    assert_eq!(o.status.code(), Some(20), "{}", stderr(&o));

    let broken = format!("sh {} {{cnf}}", dir.path().join("missing.sh").display());
    let o = qdml(&["solve", "--n", "2", "--solver", &broken]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sat_subcommand_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unsat = dir.path().join("u.cnf");
    std::fs::write(&unsat, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let o = qdml(&["sat", path_str(&unsat)]);
    assert_eq!(o.status.code(), Some(20));
    assert_eq!(stdout(&o), "s UNSATISFIABLE\n");

    let sat = dir.path().join("s.cnf");
    std::fs::write(&sat, "p cnf 2 1\n1 2 0\n").unwrap();
    let o = qdml(&["sat", path_str(&sat)]);
    assert_eq!(o.status.code(), Some(10));
    assert!(stdout(&o).starts_with("s SATISFIABLE\nv "));
}

#[test]
fn verify_messages() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("t1.txt");
    std::fs::write(&p1, paper::table_text(1).unwrap()).unwrap();
    let o = qdml(&["verify", "--labeling", path_str(&p1)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "valid, magic constant 189, non-neighbor-balanced\n"
    );

    let ident = dir.path().join("id.txt");
    let labels: Vec<String> = (0..64).map(|v: u32| v.to_string()).collect();
    std::fs::write(&ident, format!("n 6\n{}\n", labels.join(" "))).unwrap();
    let o = qdml(&["verify", "--labeling", path_str(&ident)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "invalid: neighbor sum 63 ≠ 189 at vertex 0\n");

    let q2 = dir.path().join("q2.txt");
    std::fs::write(&q2, "n 2\n0 1 2 3\n").unwrap();
    let o = qdml(&["verify", "--labeling", path_str(&q2)]);
    assert_eq!(stdout(&o), "valid, magic constant 3, neighbor-balanced\n");

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "n 2\n0 1 two 3\n").unwrap();
    let o = qdml(&["verify", "--labeling", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2, column 5"), "{}", stderr(&o));
}

#[test]
fn report_json() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t3.txt");
    std::fs::write(&p, paper::table_text(3).unwrap()).unwrap();
    let o = qdml(&["report", "--labeling", path_str(&p), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["n"], 6);
    assert_eq!(doc["balanced"], false);
    assert_eq!(doc["counts"][0], serde_json::json!([1, 2, 6, 0, 2, 4]));
    assert_eq!(doc["counts"].as_array().unwrap().len(), 64);
    let w = &doc["witnesses"][0];
    assert_eq!(
        (w["vertex"].as_u64(), w["bit"].as_u64(), w["count"].as_u64()),
        (Some(0), Some(0), Some(1))
    );

    let o = qdml(&["report", "--labeling", path_str(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("n 6  balanced false"));
}

#[test]
fn enumerate_q2() {
    let o = qdml(&["enumerate", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("8 labelings"));
    assert!(text.contains("oracle agreement: OK"));
    assert!(text.lines().any(|l| l == "0 1 2 3"));

    let o = qdml(&["enumerate", "--n", "2", "--max", "3"]);
    assert!(stdout(&o).contains("3 labelings"));
    assert_eq!(o.status.code(), Some(0));

    let o = qdml(&["enumerate", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 labelings"));

    assert_eq!(qdml(&["enumerate", "--n", "4"]).status.code(), Some(1));
}

#[test]
fn paper_tables() {
    for i in 1..=5 {
        let o = qdml(&["paper", "--index", &i.to_string()]);
        assert_eq!(o.status.code(), Some(0));
        let lab = load_labeling(&stdout(&o)).unwrap();
        assert!(verify_dml(&lab).is_valid());
        assert_eq!(lab, paper::table(i).unwrap());
    }
    let first_row = stdout(&qdml(&["paper", "--index", "1"]))
        .lines()
        .nth(1)
        .unwrap()
        .to_string();
    assert_eq!(first_row, " 0  4  6 15 36 60 47 49");
    assert_eq!(qdml(&["paper", "--index", "6"]).status.code(), Some(1));
}
