use std::process::{Command, Output};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures");

fn unilip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unilip"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap()
        .trim()
        .to_string()
}

#[test]
fn solve_reports_the_minimizer() {
    let out = unilip(&["solve", "--pinter", "3.3611804993", "--method", "DLT_LI"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(field(&text, "method"), "DLT_LI");
    assert_eq!(field(&text, "status"), "converged");
    let x: f64 = field(&text, "best_x").parse().unwrap();
    assert!((x - 3.3611804993).abs() < 1e-3);
}

#[test]
fn known_constant_without_constant_is_a_usage_error() {
    let fixture = format!("{FIXTURES}/square.fixture");
    let out = unilip(&["solve", "--problem", &fixture, "--method", "PKC"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn trace_starts_at_the_ends() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let fixture = format!("{FIXTURES}/square.fixture");
    let out = unilip(&[
        "solve",
        "--problem",
        &fixture,
        "--method",
        "DGE",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(trace).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "k,x,z,dz");
    assert!(rows[1].starts_with("1,-1,"));
    assert!(rows[2].starts_with("2,2,"));
    let n: usize = field(&stdout(&out), "n_trials").parse().unwrap();
    assert_eq!(rows.len(), n + 1);
}

#[test]
fn trial_cap_exits_nonzero() {
    let out = unilip(&[
        "solve",
        "--pinter",
        "1.0",
        "--method",
        "GE",
        "--max-trials",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(field(&stdout(&out), "status"), "trial_cap");
}

#[test]
fn bench_output_does_not_depend_on_thread_count() {
    let run = |threads: &str| {
        let out = unilip(&[
            "bench",
            "--count",
            "6",
            "--methods",
            "GE,LT_LI,DGE,DLT_LI",
            "--r-auto",
            "--parallel",
            threads,
        ]);
        assert_eq!(out.status.code(), Some(0));
        stdout(&out)
    };
    let one = run("1");
    assert_eq!(one, run("3"));
    assert_eq!(one.lines().count(), 1 + 6 * 4);
}

#[test]
fn single_cell_bench() {
    let out = unilip(&["bench", "--count", "1", "--methods", "GE", "--format", "md"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("Average"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("GE"));
}

#[test]
fn fixture_bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = unilip(&[
        "bench",
        "--fixtures",
        FIXTURES,
        "--methods",
        "LT,DLT",
        "--r-auto",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(path).unwrap();
    assert!(csv.starts_with("problem,method,r,eps,trials,best_x,best_f,status,success"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn oracle_prints_constants() {
    let fixture = format!("{FIXTURES}/square.fixture");
    let out = unilip(&["oracle", "--problem", &fixture, "--grid", "3001"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(field(&text, "grid_n"), "3001");
    let x: f64 = field(&text, "x_min").parse().unwrap();
    assert!(x.abs() < 1e-3);
    assert!(field(&text, "m_hat").parse::<f64>().is_ok());
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(unilip(&["solve", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        unilip(&["solve", "--pinter", "1", "--method", "XYZ"]).status.code(),
        Some(2)
    );
    assert_eq!(
        unilip(&["solve", "--pinter", "9", "--method", "GE"]).status.code(),
        Some(2)
    );
    assert_eq!(
        unilip(&["bench", "--r", "1.2", "--r-auto"]).status.code(),
        Some(2)
    );
}
