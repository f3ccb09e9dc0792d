use std::path::Path;
use std::process::{Command, Output};

use descent_cli::cache::ENGINE_VERSION;

fn descent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_descent"))
        .args(args)
        .env_remove("DESCENT_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn apow_examples() {
    for (n, r, expected) in [("3", "2", "10"), ("4", "1", "24"), ("4", "2", "88")] {
        let o = descent(&["apow", n, r]);
        assert!(o.status.success());
        assert_eq!(stdout(&o).trim(), expected);
    }
}

#[test]
fn valuation_examples() {
    for (args, expected) in [(["3", "2", "5"], "1"), (["4", "2", "2"], "3"), (["1", "7", "3"], "0")] {
        let mut full = vec!["valuation"];
        full.extend(args);
        assert_eq!(stdout(&descent(&full)).trim(), expected);
    }
}

#[test]
fn table_examples() {
    let o = descent(&["table", "--p", "2", "--n", "2..4", "--r", "1..2", "--format", "csv"]);
    assert_eq!(stdout(&o), "n\\r,1,2\n2,1,1\n3,1,1\n4,3,3\n");

    let o = descent(&["table", "--p", "2", "--n", "8..8", "--r", "5..9", "--format", "json"]);
    let cells: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let cells = cells.as_array().unwrap();
    assert_eq!(cells.len(), 5);
    assert!(cells.iter().all(|c| c["valuation"].as_u64().unwrap() >= 5));

    let o = descent(&["table", "--p", "3", "--n", "1..3", "--r", "2", "--format", "md"]);
    assert!(stdout(&o).starts_with("| n\\r | 2 |\n|---|---|\n"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| descent(args).status.code().unwrap();
    assert_eq!(code(&["table", "--p", "2", "--n", "4..2", "--r", "1..2"]), 2);
    assert_eq!(code(&["table", "--p", "4", "--n", "1..2", "--r", "1..2"]), 2);
    assert_eq!(code(&["apow", "0", "2"]), 2);
    assert_eq!(code(&["apow", "x", "2"]), 2);
    assert_eq!(code(&["nonsense"]), 2);
    assert_eq!(code(&["apow", "40", "2"]), 3);
    assert_eq!(code(&["verify", "bounds", "--n-max", "30"]), 3);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn verify_suites_pass() {
    let o = descent(&["verify", "lemma", "--n-max", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["suite"], "lemma");
    assert_eq!(report["failed"], 0);
    assert!(report["checks"].as_array().unwrap().iter().any(|c| c["check"] == "expansion_even"));

    let o = descent(&["verify", "bounds", "--n-max", "10", "--r-max", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["passed"], 10 * 4 * 3);

    let o = descent(&["verify", "all"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains(", 0 failed"));

    let o = descent(&["verify", "congruence", "--n-max", "6", "--r-max", "6", "--p-list", "3,5"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn cache_round_trip_and_hits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.json");
    let p = path.to_str().unwrap();

    let o = descent(&["--cache", p, "apow", "9", "4"]);
    let first = stdout(&o);
    let entries: Vec<descent_cli::cache::CacheEntry> =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0].value, first.trim());
    assert_eq!(entries[0].engine_version, ENGINE_VERSION);

    let o = descent(&["--cache", p, "apow", "9", "4"]);
    assert_eq!(stdout(&o), first);

    // a planted value proves the hit is served without recomputation
    write(
        &path,
        &format!(r#"[{{"n":5,"r":2,"value":"12345","engine_version":"{ENGINE_VERSION}"}}]"#),
    );
    assert_eq!(stdout(&descent(&["--cache", p, "apow", "5", "2"])).trim(), "12345");
}

#[test]
fn cache_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("env.json");
    let o = Command::new(env!("CARGO_BIN_EXE_descent"))
        .args(["apow", "6", "2"])
        .env("DESCENT_CACHE", &path)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&path).unwrap().contains("\"n\": 6"));
}

#[test]
fn corrupted_cache_warns_and_recomputes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    write(&path, "not json at all");
    let o = descent(&["--cache", path.to_str().unwrap(), "apow", "4", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "88");
    assert!(stderr(&o).contains("warning"));
    let repaired = std::fs::read_to_string(&path).unwrap();
    assert!(repaired.contains("\"88\""));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = |t: &'static str| ["--threads", t, "table", "--p", "2", "--n", "10..13", "--r", "1..4", "--format", "json"];
    let one = stdout(&descent(&args("1")));
    assert_eq!(one, stdout(&descent(&args("3"))));
    assert_eq!(descent(&["--threads", "0", "apow", "3", "2"]).status.code(), Some(2));
}
