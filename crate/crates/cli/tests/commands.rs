use std::path::PathBuf;
use std::process::Command;

use profit_share_cli::{run_command, RunReport, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION};
use serde_json::Value;

fn example(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
        .display()
        .to_string()
}

fn cli(args: &[&str]) -> RunReport {
    run_command(std::iter::once("profit-share").chain(args.iter().copied()))
}

fn json(report: &RunReport) -> Value {
    assert_eq!(report.exit_code, EXIT_OK, "{}", report.stderr);
    serde_json::from_str(report.stdout.trim_end()).unwrap()
}

#[test]
fn prices_on_the_tight_three_player_game() {
    let r = cli(&["prices", &example("prop6_n3.json")]);
    assert!(r.stdout.contains(r#""poa":"3/2""#) && r.stdout.contains(r#""pos":"1""#), "{}", r.stdout);
    let v = json(&r);
    assert_eq!(v["opt"], "2");
    assert_eq!(v["worst_value"], "4/3");
    assert_eq!(v["equilibrium_count"], 4);
}

#[test]
fn equilibria_lists_states_and_strong_ones() {
    let v = json(&cli(&["equilibria", &example("prop6_n3.json"), "--strong"]));
    assert_eq!(v["equilibria"].as_array().unwrap().len(), 4);
    let strong = v["strong_equilibria"].as_array().unwrap();
    assert!(strong.contains(&serde_json::json!([2, 1, 1])));
    assert!(!strong.contains(&serde_json::json!([1, 2, 2])));
}

#[test]
fn round_robin_from_unaffiliated_takes_n_steps() {
    let r = cli(&["dynamics", &example("lu_unaffiliated.json"), "--selector", "roundrobin"]);
    assert_eq!(r.exit_code, EXIT_OK, "{}", r.stderr);
    let lines: Vec<Value> = r.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let (summary, steps) = lines.split_last().unwrap();
    assert_eq!(steps.len(), 4);
    let movers: Vec<u64> = steps.iter().map(|s| s["mover"].as_u64().unwrap()).collect();
    assert_eq!(movers, [1, 2, 3, 4]);
    assert!(steps.iter().all(|s| s["from"] == 0));
    assert_eq!(summary["steps"], 4);
    assert_eq!(summary["nash_equilibrium"], true);
    assert_eq!(summary["converged"], true);
}

#[test]
fn basic_run_on_the_tight_game_is_one_move() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let r = cli(&["dynamics", &example("prop6_n3.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(r.exit_code, EXIT_OK, "{}", r.stderr);
    assert_eq!(r.outputs, vec![out.clone()]);
    let csv = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1], "1,1,1,2,1/3,1,2,2");
    // Only the summary goes to stdout.
    assert_eq!(r.stdout.lines().count(), 1);
}

#[test]
fn traces_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = example("lu_unaffiliated.json");
    for ext in ["jsonl", "csv"] {
        let paths: Vec<PathBuf> = (0..2).map(|k| dir.path().join(format!("t{k}.{ext}"))).collect();
        for p in &paths {
            let r = cli(&["dynamics", &spec, "--selector", "random", "--seed", "9", "--out", p.to_str().unwrap()]);
            assert_eq!(r.exit_code, EXIT_OK, "{}", r.stderr);
        }
        let a = std::fs::read(&paths[0]).unwrap();
        assert_eq!(a, std::fs::read(&paths[1]).unwrap());
        assert!(!a.contains(&b'\r'));
    }
}

#[test]
fn flags_override_the_file_dynamics_section() {
    let v: Vec<Value> = cli(&["dynamics", &example("prop6_n3.json"), "--alpha", "3", "--max-steps", "5"])
        .stdout
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    // Player 1 gains a factor 3 exactly, which is not more than 1 + α.
    let summary = &v[0];
    assert_eq!(summary["steps"], 0);
    assert_eq!(summary["dynamics"]["alpha"], "3");
    assert_eq!(summary["dynamics"]["max_steps"], 5);
    assert_eq!(summary["nash_equilibrium"], false);
    assert_eq!(summary["alpha_nash_equilibrium"], true);
}

#[test]
fn bounds_for_ten_players() {
    let r = cli(&["bounds", "--n", "10", "--beta", "2", "--alpha", "0", "--epsilon", "1/10", "--opt", "1"]);
    assert!(r.stdout.contains(r#""steps":12"#), "{}", r.stdout);
    assert_eq!(json(&r)["nash"]["guaranteed_value"], "9/20");
}

#[test]
fn graph_check_finds_only_the_fair_value_discrepancy() {
    let v = json(&cli(&["graph-check", &example("square_graph.json")]));
    assert_eq!(v["consistent"], true);
    assert!(v["fair_value_closed_form_mismatches"].as_u64().unwrap() > 0);
    assert!(v["cut_identity_checks"].as_u64().unwrap() > 0);
}

#[test]
fn validate_reports_the_square_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.json");
    std::fs::write(
        &path,
        r#"{"n":3,"m":1,"scheme":"fair_value","valuations":[{"kind":"table","n":3,"values":["0","1","1","4","1","4","4","9"]}]}"#,
    )
    .unwrap();
    let spec = path.to_str().unwrap();
    let r = cli(&["validate", spec]);
    assert_eq!(r.exit_code, EXIT_VERIFICATION);
    let v: Value = serde_json::from_str(r.stdout.trim_end()).unwrap();
    let first = &v["valuations"][0]["violations"][0];
    assert_eq!((&first["I"], &first["J"], &first["i"]), (&serde_json::json!([]), &serde_json::json!([1]), &serde_json::json!(2)));

    assert_eq!(cli(&["prices", spec]).exit_code, EXIT_VERIFICATION);
    let unchecked = json(&cli(&["prices", spec, "--skip-validate"]));
    assert_eq!(unchecked["warning"], "valuation-unverified");
}

#[test]
fn usage_and_parse_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n":2,"m":3,"scheme":"shapley","valuations":{"shared":{"kind":"additive","weights":["1","1"]}}}"#).unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["prices".into(), bad.display().to_string()],
        vec!["prices".into(), dir.path().join("missing.json").display().to_string()],
        vec!["bounds".into(), "--n".into(), "3".into(), "--beta".into(), "x".into(), "--epsilon".into(), "1/2".into()],
        vec!["reproduce".into(), "--case".into(), "nope".into()],
        vec!["dynamics".into(), example("prop6_n3.json"), "--out".into(), "trace.txt".into()],
        vec!["prices".into(), example("prop6_n3.json"), "--budget".into(), "3".into()],
        vec!["graph-check".into(), example("prop6_n3.json")],
        vec!["frobnicate".into()],
    ];
    for args in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = cli(&refs);
        assert_eq!(r.exit_code, EXIT_USAGE, "{args:?}: {}", r.stdout);
        assert!(!r.stderr.is_empty());
    }
    let r = cli(&["prices", &bad.display().to_string()]);
    assert!(r.stderr.contains("m ≤ n"), "{}", r.stderr);
}

#[test]
fn trace_output_never_replaces_the_game_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("game.jsonl");
    let text = std::fs::read_to_string(example("prop6_n3.json")).unwrap();
    std::fs::write(&spec, &text).unwrap();
    let s = spec.to_str().unwrap();
    let r = cli(&["dynamics", s, "--out", s]);
    assert_eq!(r.exit_code, EXIT_USAGE);
    assert_eq!(std::fs::read_to_string(&spec).unwrap(), text);
}

#[test]
fn reproduce_single_case_prints_one_line_or_json() {
    let r = cli(&["reproduce", "--case", "prop6"]);
    assert_eq!(r.exit_code, EXIT_OK);
    assert_eq!(r.stdout.lines().count(), 1);
    assert!(r.stdout.starts_with("[PASS] 1 prop6"));
    let v = json(&cli(&["reproduce", "--case", "validators", "--json"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["cases"][0]["case"], "validators");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_profit-share");
    let ok = Command::new(bin).args(["prices", &example("prop6_n3.json")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8(ok.stdout).unwrap().contains(r#""poa":"3/2""#));
    let bad = Command::new(bin).args(["bounds", "--n", "0"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
