use std::process::{Command, Output};

fn apword(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apword"))
        .args(args)
        .env_remove("APWORD_MAX_PREFIX")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn word_and_letter() {
    assert_eq!(stdout(&apword(&["word", "--len", "8"])), "01101001\n");
    assert_eq!(
        stdout(&apword(&["--subst", "pq:1,2", "word", "--len", "9"])),
        "011100100\n"
    );
    assert_eq!(stdout(&apword(&["--seed", "1", "word", "--len", "4"])), "1001\n");
    assert_eq!(stdout(&apword(&["letter", "--index", "7"])), "1\n");
}

#[test]
fn ap_check_passes_on_closed_form() {
    let out = apword(&["ap", "-d", "15", "--check", "--per-letter"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["length"], 20);
    assert_eq!(v["stable"], true);
    assert_eq!(v["pass"], true);
    assert_eq!(v["per_letter"][1]["length"], 20);
}

#[test]
fn check_mode_exits_one_on_mismatch() {
    // a 100-letter prefix cannot reach A(15) = 20
    let out = apword(&["ap", "-d", "15", "--prefix", "100", "--check"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn errors_exit_two() {
    let out = apword(&["ap", "-d", "16", "--check"]);
    assert_eq!(out.status.code(), Some(2));
    let out = apword(&["--subst", "pq:0,2", "word", "--len", "3"]);
    assert!(!out.status.success());
}

#[test]
fn scan_table_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = apword(&["scan", "--d-max", "15", "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d,length,start,letter,stable,expected,pass");
    assert_eq!(lines.len(), 16);
    assert!(lines[15].starts_with("15,20,"));
    assert!(lines[15].ends_with(",true,20,true"));
}

#[test]
fn table_json_has_schema_version() {
    let out = apword(&[
        "--subst", "pq:2,2", "--format", "json", "table", "--n-max", "3", "--check",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn witness_command() {
    let out = apword(&["witness", "--n", "10", "--kind", "plus", "--check"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["length"], 1026);
    assert_eq!(v["difference"], 1025);
}

#[test]
fn block_renders() {
    assert_eq!(stdout(&apword(&["block", "--iters", "1"])), "#.\n.#\n");
    let pbm = stdout(&apword(&[
        "--subst", "pq:2,1", "--format", "pbm", "block", "--iters", "1",
    ]));
    assert_eq!(pbm, "P1\n3 3\n1 1 0\n1 1 0\n0 0 1\n");
    let out = apword(&["block", "--iters", "3", "--check"]);
    assert!(out.status.success());
}

#[test]
fn factors_and_membership() {
    let out = stdout(&apword(&["factors", "--len", "3"]));
    assert_eq!(out.lines().count(), 6);
    assert!(!out.lines().any(|l| l == "000"));
    assert_eq!(
        stdout(&apword(&["--subst", "pq:1,2", "factors", "--contains", "10111"])),
        "true\n"
    );
    assert_eq!(
        stdout(&apword(&["--subst", "pq:2,1", "factors", "--contains", "10111"])),
        "false\n"
    );
}

#[test]
fn spec_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("cyclic.json");
    std::fs::write(
        &good,
        r#"{"alphabet":["a","b","c"],"rules":{"a":"abc","b":"bca","c":"cab"}}"#,
    )
    .unwrap();
    let spec = format!("spec:{}", good.display());
    assert_eq!(
        stdout(&apword(&["--subst", &spec, "word", "--len", "9"])),
        "abcbcacab\n"
    );
    let out = apword(&["bij", "--spec", good.to_str().unwrap(), "--check", "cna"]);
    assert!(out.status.success());
    assert!(json(&out)["found"].is_object());

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"alphabet":["0","1"],"rules":{"0":"01","1":"100"}}"#).unwrap();
    let out = apword(&["--subst", &format!("spec:{}", bad.display()), "word", "--len", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unequal image lengths"));
}

#[test]
fn bij_checks() {
    let out = apword(&["bij", "--check", "diagonal", "-n", "3"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["pass"], true);
    let out = apword(&["bij", "--check", "cna", "-k", "2"]);
    let found = &json(&out)["found"];
    assert_eq!((found["n"].as_u64(), found["letter"].as_str()), (Some(3), Some("0")));
    let out = apword(&[
        "bij",
        "--check",
        "absence",
        "-d",
        "5",
        "--min-length",
        "7",
        "--prefix",
        "1048576",
    ]);
    assert_eq!(json(&out)["absent"], true);
}

#[test]
fn max_prefix_env_caps_scans() {
    let out = Command::new(env!("CARGO_BIN_EXE_apword"))
        .args(["word", "--len", "2000"])
        .env("APWORD_MAX_PREFIX", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // estimates stop at the cap instead and report instability
    let out = Command::new(env!("CARGO_BIN_EXE_apword"))
        .args(["ap", "-d", "15"])
        .env("APWORD_MAX_PREFIX", "4096")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["stable"], false);
    assert!(v["prefix_scanned"].as_u64().unwrap() <= 4096);
}

#[test]
fn verify_suites() {
    let out = apword(&["verify", "tm-olga", "gtm", "--levels", "2..3"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("tm-olga") && text.contains("PASS"));
    let out = apword(&["verify", "tm-olga", "--levels", "1..3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = apword(&[
        "--format",
        "json",
        "--max-prefix",
        "4096",
        "verify",
        "tm-olga",
        "--levels",
        "6..6",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v[0]["cases"][0]["downgraded"], true);
    assert!(apword(&["verify", "no-such-suite"]).status.code() == Some(2));
}
