use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gibbsgame"))
        .args(args)
        .env_remove("GIBBSGAME_CAP")
        .output()
        .unwrap()
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn without_timestamp(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes)
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn analyze_coordination() {
    let r = report(&["analyze", &fixture("coordination.json")]);
    assert_eq!(r["potential"]["exact"]["found"], true);
    assert_eq!(r["decomposition"]["gibbs"], true);
    let cliques = r["decomposition"]["cliques"].as_array().unwrap();
    assert_eq!(cliques.len(), 1);
    assert_eq!(cliques[0]["scope"], serde_json::json!([0, 1]));
    assert_eq!(r["equilibria"]["pne"], serde_json::json!([[0, 0], [1, 1]]));
    assert_eq!(r["equilibria"]["maximizers_are_pne"], true);
}

#[test]
fn analyze_matching_pennies() {
    let r = report(&["analyze", &fixture("matching_pennies.json")]);
    assert_eq!(r["potential"]["exact"]["found"], false);
    assert_eq!(r["potential"]["ordinal"]["found"], false);
    assert_eq!(r["equilibria"]["pne"], serde_json::json!([]));
}

#[test]
fn missing_table_is_a_parse_error() {
    let out = run(&["analyze", &fixture("invalid/missing_table.json")]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("player 1") && msg.contains("[0, 1]"), "{msg}");
}

#[test]
fn simulate_coordination_reaches_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.txt");
    let r = report(&[
        "simulate",
        &fixture("coordination.json"),
        "--rounds",
        "200000",
        "--seed",
        "1",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    let sim = &r["dynamics"]["simulation"];
    assert!(sim["tv_to_stationary"].as_f64().unwrap() <= 0.02);
    assert_eq!(sim["within_tolerance"], true);
    let lines = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(lines.lines().count(), 200_000);
}

#[test]
fn simulate_usage_and_validation_errors() {
    let game = fixture("coordination.json");
    assert_eq!(run(&["simulate", &game, "--rounds", "0"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", &game, "--rounds", "5", "--init", "0,2"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", &game, "--rounds", "5", "--weights", "1,-1"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn consistency_examples() {
    let r = report(&["consistency", &fixture("coordination.json")]);
    let c = &r["dynamics"]["consistency"];
    assert_eq!(c["consistent"], true);
    assert_eq!(c["inferred"]["decomposition"]["gibbs"], true);
    assert_eq!(c["inferred"]["w_potential_of_game"], true);

    let r = report(&["consistency", &fixture("random_scheme.json")]);
    let c = &r["dynamics"]["consistency"];
    assert_eq!(c["consistent"], false);
    assert!(c["witness"].is_object());

    let r = report(&["consistency", &fixture("single_player_scheme.json")]);
    assert_eq!(r["dynamics"]["consistency"]["consistent"], true);
}

#[test]
fn construct_examples() {
    let out = run(&["construct", &fixture("path_potential.json"), "--pairwise"]);
    assert_eq!(out.status.code(), Some(0));
    let game: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(game["kind"], "hypergraphical");
    assert!(game["hyperedges"].as_array().unwrap().iter().all(|e| e.as_array().unwrap().len() <= 2));

    let out = run(&["construct", &fixture("triangle_potential.json"), "--pairwise"]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["construct", &fixture("triangle_potential.json")]);
    assert_eq!(out.status.code(), Some(0));
    let game: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(game["hyperedges"], serde_json::json!([[0, 1, 2]]));

    // The constructed game analyzes back to an exact potential.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("built.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let r = report(&["analyze", path.to_str().unwrap()]);
    assert_eq!(r["potential"]["exact"]["found"], true);
    assert_eq!(r["potential"]["symmetry"]["hyperedge_symmetric"], true);
}

#[test]
fn cap_override_gives_exit_four() {
    let out = Command::new(env!("CARGO_BIN_EXE_gibbsgame"))
        .args(["analyze", &fixture("hyperedge_symmetric.json")])
        .env("GIBBSGAME_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn output_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["analyze", &fixture("coordination.json"), "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["command"], "analyze");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cases: [Vec<String>; 4] = [
        vec!["analyze".into(), fixture("hyperedge_symmetric.json")],
        vec!["simulate".into(), fixture("coordination.json"), "--rounds".into(), "5000".into(), "--seed".into(), "9".into()],
        vec!["consistency".into(), fixture("random_scheme.json"), "--seed".into(), "3".into()],
        vec!["construct".into(), fixture("path_potential.json")],
    ];
    for args in &cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(without_timestamp(&a.stdout), without_timestamp(&b.stdout), "{args:?}");
    }
}
