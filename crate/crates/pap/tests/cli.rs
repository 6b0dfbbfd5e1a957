//! Black-box checks of the command-line interface: text/JSON parity, cache
//! round-trips without recomputation, and exit statuses.

use std::process::{Command, Output};

fn pap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pap"))
        .args(args)
        .output()
        .expect("spawn pap")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn table_text_and_json_agree() {
    let text = pap(&["table", "7", "4"]);
    assert!(text.status.success());
    let text_out = stdout(&text);
    let lines: Vec<&str> = text_out.lines().map(str::trim_end).collect();
    assert_eq!(lines[0], "n\tsg1\tsg2\tsg3\tsg4");
    assert_eq!(lines[6], "6\t1\t0\t0\t2");
    assert_eq!(lines.len(), 8);

    let json = pap(&["--json", "table", "7", "4"]);
    assert!(json.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["command"], "table");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c.to_string())
            .collect();
        assert_eq!(format!("{}\t{}", i + 1, cells.join("\t")), lines[i + 1]);
    }
}

#[test]
fn query_text_and_json_agree() {
    let text = pap(&["query", "7", "4", "1234,4321,1324,4231"]);
    assert!(text.status.success());
    let text_out = stdout(&text);
    let json = pap(&["--json", "query", "7", "4", "1234,4321,1324,4231"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert!(text_out.contains(&format!("count={}", v["count"])));
    assert!(text_out.contains(&format!("sg={}", v["sg"])));
    let replies: Vec<String> = v["winning_replies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_str().unwrap().to_string())
        .collect();
    assert!(text_out.contains(&format!("winning_replies={}", replies.join(","))));
}

#[test]
fn cache_round_trip_is_idempotent() {
    let dir = std::env::temp_dir().join(format!("pap-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cache = dir.join("grundy.ndjson");
    let cache_arg = cache.to_str().unwrap();

    let first = pap(&["--cache", cache_arg, "table", "7", "4"]);
    assert!(first.status.success());
    let bytes_after_first = std::fs::read(&cache).unwrap();
    assert!(!bytes_after_first.is_empty());

    let second = pap(&["--cache", cache_arg, "table", "7", "4"]);
    assert!(second.status.success());
    assert_eq!(stdout(&first), stdout(&second));
    assert_eq!(std::fs::read(&cache).unwrap(), bytes_after_first);

    // A cached query on the same positions reuses the stored values.
    let query = pap(&["--cache", cache_arg, "query", "7", "4", ""]);
    assert!(query.status.success());
    assert!(stdout(&query).contains("count=5040"));

    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_statuses() {
    // Verification success exits 0.
    let ok = pap(&["verify", "k3"]);
    assert!(ok.status.success());
    assert!(stdout(&ok).contains("ok"));

    // Usage errors exit 2.
    let bad_pattern = pap(&["query", "6", "4", "11,22"]);
    assert_eq!(bad_pattern.status.code(), Some(2));
    let over_envelope = pap(&["table", "12", "4"]);
    assert_eq!(over_envelope.status.code(), Some(2));
    let k_too_big = pap(&["query", "6", "5", ""]);
    assert_eq!(k_too_big.status.code(), Some(2));
    let long_run_gate = pap(&["thresholds", "6", "30"]);
    assert_eq!(long_run_gate.status.code(), Some(2));
}
