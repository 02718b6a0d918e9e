use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrcover")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    stdout(out)
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn group_order_of_fibonacci_type_two() {
    let out = run(&["group-order", "--graph", "fibonacci", "--type", "2", "--height", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_rows(&out), vec![vec!["2", "2", "13", "13", "13", "true"]]);
}

#[test]
fn root_order_of_fibonacci_type_two() {
    let out = run(&["root-order", "--graph", "fibonacci", "--type", "2", "--heights", "2..4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    let triples: Vec<_> = rows.iter().map(|r| (r[2].as_str(), r[3].as_str(), r[4].as_str(), r[7].as_str())).collect();
    assert_eq!(triples, [("6", "7", "13", "13"), ("65", "61", "126", "126"), ("1260", "1051", "2311", "2311")]);
    assert_eq!(rows[0][5], "6/13");
}

#[test]
fn fixed_point_of_fibonacci() {
    let out = run(&["fixed-point", "--graph", "fibonacci", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = &doc["tables"][0]["rows"];
    assert_eq!(rows[0][1], "0.414213562374");
    assert_eq!(rows[1][1], "0.707106781188");
    assert_eq!(doc["params"]["converged"], "true");
}

#[test]
fn gamma_table_columns() {
    let out = run(&["gamma", "--graph", "fibonacci", "--type", "1", "--heights", "1..3", "--format", "csv"]);
    let text = stdout(&out);
    assert!(text.contains("type,h,F_down,F_up,order,gamma_num,gamma_den\n"));
    assert_eq!(csv_rows(&out)[1], vec!["1", "2", "3", "2", "5", "2", "3"]);
}

#[test]
fn presets_match_file_input() {
    let path = temp_file("biregular.json", r#"{"m": 2, "adjacency": [[0, 2], [3, 0]]}"#);
    let preset = run(&["root-order", "--graph", "biregular:2,3", "--heights", "1..5", "--format", "json"]);
    let file = run(&["root-order", "--graph", path.to_str().unwrap(), "--heights", "1..5", "--format", "json"]);
    let strip = |o: &Output| {
        let mut doc: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
        doc["params"]["graph"] = serde_json::Value::Null;
        doc
    };
    assert_eq!(strip(&preset), strip(&file));
    let out = run(&["root-order", "--graph", "biregular:2,3", "--type", "1", "--height", "2", "--format", "csv"]);
    assert_eq!(csv_rows(&out)[0][4], "10");
}

#[test]
fn escape_period_is_a_word() {
    let out = run(&["escape", "--graph", "fibonacci", "--type", "2", "--height", "2", "--format", "csv"]);
    assert_eq!(csv_rows(&out), vec![vec!["2", "2", "13", "7", "1101010101100"]]);
}

#[test]
fn reports_are_reproducible() {
    let args = ["verify", "--graph", "fibonacci", "--heights", "1..4", "--seed", "42", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("\"seed\": \"42\""));
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(run(&["group-order", "--graph", "no-such-file.json", "--height", "2"]).status.code(), Some(2));
    assert_eq!(run(&["group-order", "--graph", "biregular:2", "--height", "2"]).status.code(), Some(2));
    assert_eq!(run(&["group-order", "--graph", "fibonacci"]).status.code(), Some(2));
    assert_eq!(run(&["group-order", "--graph", "fibonacci", "--type", "3", "--height", "1"]).status.code(), Some(2));
    assert_eq!(run(&["gamma", "--graph", "fibonacci", "--heights", "3..1"]).status.code(), Some(2));
    assert_eq!(run(&["slope", "--graph", "fibonacci", "--tolerance", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["fixed-point", "--graph", "fibonacci", "--tolerance", "0"]).status.code(), Some(2));
    let disconnected = temp_file("disconnected.json", r#"{"m": 2, "adjacency": [[1, 1], [0, 1]]}"#);
    assert_eq!(run(&["gamma", "--graph", disconnected.to_str().unwrap(), "--height", "1"]).status.code(), Some(2));
    assert_eq!(run(&["slope", "--graph", temp_file("loop.json", r#"{"m":1,"adjacency":[[1]]}"#).to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn cap_overruns_exit_with_three() {
    assert_eq!(run(&["simulate", "--graph", "fibonacci", "--type", "2", "--height", "3", "--cap", "100"]).status.code(), Some(3));
    assert_eq!(run(&["escape", "--graph", "fibonacci", "--height", "4", "--cap", "1000"]).status.code(), Some(3));
    assert_eq!(run(&["fixed-point", "--graph", "fibonacci", "--cap", "3"]).status.code(), Some(3));
}

#[test]
fn verify_runs_the_default_matrix() {
    let out = run(&["verify", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("# failed=0\n"));
    assert!(text.contains("fibonacci,2,6,group-order,pass"));
    assert!(text.contains("\"biregular:2,3\",1,4,escape,pass"));
}
