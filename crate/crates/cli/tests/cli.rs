use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bisubmod")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn table1_path() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/table1.csv").display().to_string()
}

const EXAMPLE: [&str; 9] = ["solve", "--s1", "1,3", "--s2", "2", "--b1p", "1", "--b2p", "1"];

#[test]
fn solve_worked_example() {
    let o = run(&[&EXAMPLE[..], &["--w", "2", "--verify"]].concat());
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let out = stdout(&o);
    assert!(out.contains("value      1.378783"), "{out}");
    assert!(out.contains("incumbent  ({2},{3})"), "{out}");
    assert!(out.contains("(match)"), "{out}");
}

#[test]
fn solve_from_file_as_csv() {
    let path = table1_path();
    let o = run(&[&EXAMPLE[..], &["--w", "2", "--data", &path, "--format", "csv"]].concat());
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("value,incumbent,time_s,cuts,nodes,iters,converged,verified"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("1.378783493,\"({2},{3})\","), "{row}");
}

#[test]
fn infeasible_instance_exits_2() {
    let o = run(&["solve", "--s1", "1,3", "--s2", "2", "--b1p", "2", "--b2p", "2"]);
    assert_eq!(o.status.code(), Some(2), "{o:?}");
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["solve", "--s1", "1"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["solve", "--s1", "1", "--s2", "9"]).status.code(), Some(1));
    assert_eq!(run(&["solve", "--s1", "1", "--s2", "2", "--data", "/no/such/file.csv"]).status.code(), Some(1));
    assert_eq!(run(&["params", "--n", "2"]).status.code(), Some(1));
    assert_eq!(run(&["bench", "--n", "5", "--t", "x"]).status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("bench"));
}

#[test]
fn params_table() {
    let o = run(&["params", "--n", "5,10,20", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n,b1,b2,b1p,b2p,w\n5,2,2,1,1,2\n10,4,5,3,3,5\n20,8,10,6,6,10\n");
}

#[test]
fn check_table1_and_sample() {
    let o = run(&["check"]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert_eq!(stdout(&o).matches("bisubmodular").count(), 2);
    let o = run(&["check", "--n", "3", "--t", "5", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
}

#[test]
fn bench_csv_is_reproducible() {
    let args = ["bench", "--n", "5", "--t", "10,20", "--reps", "3", "--seed", "11", "--verify", "--format", "csv"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0), "{a:?}");
    let b = run(&args);
    let strip = |o: &Output| -> Vec<String> {
        stdout(o)
            .lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f[4] = "";
                f.join(",")
            })
            .collect()
    };
    let rows = strip(&a);
    assert_eq!(rows.len(), 7);
    assert_eq!(rows, strip(&b));
}

#[test]
fn bench_text_has_aggregates() {
    let o = run(&["bench", "--n", "5", "--t", "10", "--reps", "2"]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let out = stdout(&o);
    assert!(out.contains("# cuts") && out.contains("incumbent"), "{out}");
}

#[test]
fn bench_without_enough_locations_fails() {
    let path = table1_path();
    let o = run(&["bench", "--data", &path, "--n", "5", "--t", "5", "--reps", "2"]);
    assert_eq!(o.status.code(), Some(1), "{o:?}");
    assert!(stdout(&o).contains("failed n=5"));
}

#[test]
fn synth_writes_a_loadable_file() {
    let dir = std::env::temp_dir().join(format!("bisubmod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("s.csv");
    let p = path.display().to_string();
    let o = run(&["synth", "--out", &p, "--n", "6", "--t", "40", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let o = run(&["solve", "--data", &p, "--s1", "1,2,3", "--s2", "4,5", "--b1p", "1", "--b2p", "1", "--w", "2", "--verify"]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).contains("(match)"));
    std::fs::remove_dir_all(dir).unwrap();
}
