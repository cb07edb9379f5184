use std::path::Path;
use std::process::{Command, Output};

use cholqr::io::read_matrix_file;
use cholqr::testbed::generate;

fn cholqr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cholqr"))
        .args(args)
        .output()
        .expect("run cholqr binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Columns of a CSV line.
fn fields(line: &str) -> Vec<&str> {
    line.split(',').collect()
}

#[test]
fn gen_writes_header_and_payload() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.tsm");
    let o = cholqr(&["gen", "100", "10", "1e4", "42", path(&out)]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(std::fs::metadata(&out).unwrap().len(), 8 * 100 * 10 + 4 + 16);
    let meta = std::fs::read_to_string(dir.path().join("a.tsm.meta")).unwrap();
    assert!(meta.contains("seed=42"));
    assert!(meta.contains("kappa=1.0000000000000000e4"));

    let a = read_matrix_file(&out).unwrap();
    assert!(a.bit_eq(&generate(100, 10, 1e4, 42).unwrap().matrix));
}

#[test]
fn gen_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = (dir.path().join("x.tsm"), dir.path().join("y.tsm"));
    for p in [&x, &y] {
        assert!(cholqr(&["gen", "60", "6", "1e3", "9", path(p)]).status.success());
    }
    assert_eq!(std::fs::read(&x).unwrap(), std::fs::read(&y).unwrap());
}

#[test]
fn gen_rejects_small_kappa() {
    let dir = tempfile::tempdir().unwrap();
    let o = cholqr(&["gen", "10", "2", "0.5", "1", path(&dir.path().join("a.tsm"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn factor_well_conditioned() {
    let o = cholqr(&["factor", "--algo", "cqr2", "--m", "400", "--n", "20", "--kappa", "1e4", "--ranks", "4"]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let text = stdout(&o);
    let row = fields(text.trim());
    assert_eq!(row.len(), 11);
    assert_eq!(&row[..6], &["cqr2", "400", "20", "1.0000000000000000e4", "4", ""]);
    let orth: f64 = row[6].parse().unwrap();
    assert!(orth <= 1e-13, "{orth}");
    assert_eq!(row[8], "0");
    assert_eq!(row[9], "2");
}

#[test]
fn factor_breakdown_exits_3_and_still_prints() {
    let o = cholqr(&["factor", "--algo", "cqr2", "--m", "400", "--n", "20", "--kappa", "1e12", "--ranks", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    let row = fields(text.trim());
    assert_eq!(row[8], "1");
}

#[test]
fn factor_mcqr2gs_three_panels_at_extreme_condition() {
    let o = cholqr(&[
        "factor", "--algo", "mcqr2gs", "--panels", "3", "--m", "600", "--n", "30", "--kappa", "1e15", "--ranks", "4",
        "--header",
    ]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("algo,m,n,kappa,P,k,"));
    let row = fields(lines.next().unwrap());
    assert_eq!(row[5], "3");
    assert!(row[6].parse::<f64>().unwrap() <= 1e-13);
}

#[test]
fn factor_usage_errors() {
    let base = ["factor", "--m", "40", "--n", "4", "--kappa", "10"];
    let run = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        cholqr(&args).status.code()
    };
    assert_eq!(run(&["--algo", "cqr2", "--panels", "2"]), Some(2));
    assert_eq!(run(&["--algo", "bogus"]), Some(2));
    assert_eq!(run(&["--algo", "cqr2gs", "--panels", "5"]), Some(2));
    assert_eq!(run(&["--algo", "cqr", "--ranks", "41"]), Some(2));
    assert_eq!(run(&["--algo", "cqr", "--ranks", "0"]), Some(2));
    assert_eq!(run(&["--algo", "cqr", "--backend", "mpi"]), Some(2));
    assert_eq!(
        cholqr(&["factor", "--algo", "cqr", "--input", "/nonexistent/a.tsm"]).status.code(),
        Some(1)
    );
}

#[test]
fn factor_from_file_writes_factors() {
    let dir = tempfile::tempdir().unwrap();
    let a_path = dir.path().join("a.tsm");
    let out_dir = dir.path().join("out");
    assert!(cholqr(&["gen", "90", "9", "1e2", "5", path(&a_path)]).status.success());
    let o = cholqr(&[
        "factor", "--algo", "cqr2gs", "--panels", "3", "--input", path(&a_path), "--ranks", "3",
        "--backend", "parallel", "--out-dir", path(&out_dir),
    ]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let text = stdout(&o);
    let row = fields(text.trim());
    assert_eq!(row[3], "1.0000000000000000e2");
    assert_eq!(row[9], "10");

    let q = read_matrix_file(out_dir.join("q.tsm")).unwrap();
    let r = read_matrix_file(out_dir.join("r.tsm")).unwrap();
    assert_eq!((q.shape(), r.shape()), ((90, 9), (9, 9)));
    assert!((0..9).all(|i| (0..i).all(|j| r.get(i, j) == 0.0)));
}

#[test]
fn sweep_cond_rows_and_breakdowns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = cholqr(&[
        "sweep-cond", "--algos", "cqr2,scqr3,mcqr2gs", "--m", "400", "--n", "20", "--kappas", "1,1e4,1e12",
        "--panels", "3", "--ranks", "2", "--out", path(&out),
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "algo,kappa,panels,orthogonality,residual,breakdown");
    assert_eq!(lines.len(), 1 + 9);
    for line in &lines[1..] {
        let row = fields(line);
        match row[0] {
            "cqr2" if row[1] == "1.0000000000000000e12" => assert_eq!(row[5], "1"),
            "scqr3" => assert_eq!(row[5], "0"),
            "mcqr2gs" => assert_eq!(row[2], "3"),
            _ => {}
        }
    }
}

#[test]
fn sweep_cond_empty_list_is_header_only() {
    let o = cholqr(&["sweep-cond", "--algos", "cqr", "--m", "30", "--n", "3", "--kappas="]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "algo,kappa,panels,orthogonality,residual,breakdown\n");
}

#[test]
fn sweep_cond_is_deterministic() {
    let args = ["sweep-cond", "--algos", "cqr2gs,scqr", "--m", "200", "--n", "12", "--kappas", "1e3,1e9", "--panels", "2", "--ranks", "3"];
    assert_eq!(stdout(&cholqr(&args)), stdout(&cholqr(&args)));
}

#[test]
fn sweep_panels_counts_grow() {
    let o = cholqr(&[
        "sweep-panels", "--algo", "cqr2gs", "--m", "300", "--n", "30", "--kappa", "1e2", "--panels", "1,2,3,5,10",
        "--ranks", "2",
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "panels,b,orthogonality,residual,allreduce_calls,elapsed_seconds");
    let calls: Vec<u64> = lines[1..].iter().map(|l| fields(l)[4].parse().unwrap()).collect();
    assert_eq!(calls, vec![2, 6, 10, 18, 38]);
    assert_eq!(fields(lines[1])[1], "30");

    // One panel reproduces cqr2's metrics.
    let cqr2 = cholqr(&["sweep-cond", "--algos", "cqr2", "--m", "300", "--n", "30", "--kappas", "1e2", "--ranks", "2"]);
    let cqr2_text = stdout(&cqr2);
    let cqr2_row = fields(cqr2_text.lines().nth(1).unwrap());
    assert_eq!(&fields(lines[1])[2..4], &cqr2_row[3..5]);
}

#[test]
fn sweep_panels_rejects_unpanelled() {
    let o = cholqr(&["sweep-panels", "--algo", "cqr2", "--m", "30", "--n", "3", "--kappa", "1", "--panels", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cost_rows() {
    let o = cholqr(&["cost", "--m", "30000", "--n", "3000", "-P", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "model,m,n,P,b,flops,words,messages");
    assert_eq!(lines.len(), 6);
    let cqr2 = fields(lines.iter().find(|l| l.starts_with("cqr2,")).unwrap());
    let expected = 3000f64.powi(3) + 4.0 * 30000.0 * 3000f64.powi(2) / 4.0 + 2.0 * 3000f64.powi(2) * 2.0;
    assert_eq!(cqr2[5].parse::<f64>().unwrap(), expected);

    let o = cholqr(&["cost", "--model", "scalapack", "--m", "100", "--n", "10", "-P", "1"]);
    let text = stdout(&o);
    let row = fields(text.lines().nth(1).unwrap());
    assert_eq!((row[6], row[7]), ("0.0000000000000000e0", "0.0000000000000000e0"));

    assert_eq!(cholqr(&["cost", "--model", "tsqr", "--m", "10", "--n", "2", "-P", "1"]).status.code(), Some(2));
    assert_eq!(cholqr(&["cost", "--m", "2", "--n", "10", "-P", "1"]).status.code(), Some(2));
}
