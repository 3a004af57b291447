//! End-to-end tests of the command-line binary: exit codes, JSON/CSV
//! formats, and byte-identical reruns.

use std::process::{Command, Output};

fn combicache(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combicache"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn topology_json_schema() {
    let out = combicache(&["topology", "--H", "4", "--r", "2", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["H"], 4);
    assert_eq!(v["r"], 2);
    assert_eq!(v["K"], 6);
    assert_eq!(v["users"][0], serde_json::json!([1, 2]));
    assert_eq!(v["users"][5], serde_json::json!([3, 4]));
}

#[test]
fn place_json_layout() {
    let out = combicache(&[
        "place", "--H", "4", "--r", "2", "--N", "6", "--scheme", "coded", "--g", "2", "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["M"]["num"], "6");
    assert_eq!(v["M"]["den"], "5");
    assert_eq!(v["mds"]["n"], 6);
    assert_eq!(v["mds"]["k"], 5);
    assert_eq!(v["scheme"]["name"], "coded");
    // One entry per symbol per file.
    assert_eq!(v["symbols"].as_array().unwrap().len(), 36);
    let first = &v["symbols"][0];
    assert_eq!(first["file"], 1);
    assert!(first["key"]["collection"].is_array());
    assert!(first["cached_by"].is_array());
}

#[test]
fn place_json_subfile_keys() {
    let out = combicache(&[
        "place", "--H", "4", "--r", "2", "--N", "2", "--scheme", "man", "--t", "2", "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["mds"].is_null());
    assert_eq!(v["scheme"]["t"], 2);
    let first = &v["symbols"][0];
    assert_eq!(first["key"]["subfile"], serde_json::json!([1, 2]));
    assert_eq!(first["cached_by"], serde_json::json!([1, 2]));
}

#[test]
fn deliver_json_loads() {
    let out = combicache(&[
        "deliver", "--H", "4", "--r", "2", "--N", "6", "--scheme", "coded", "--g", "2", "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["max"]["num"], "3");
    assert_eq!(v["max"]["den"], "5");
    assert_eq!(v["gain"]["num"], "2");
    for relay in v["R_h"].as_array().unwrap() {
        assert_eq!(relay["num"], "3");
        assert_eq!(relay["den"], "5");
    }
    assert_eq!(v["R_hk"].as_array().unwrap().len(), 12);
}

#[test]
fn verify_pass_and_exit_codes() {
    let out = combicache(&[
        "verify", "--H", "4", "--r", "2", "--N", "6", "--scheme", "coded", "--g", "2", "--B",
        "100", "--seed", "7",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("6/6 users recovered"));
    assert!(stdout(&out).contains("verdict: PASS"));

    // Indivisible file size: parameter error, exit 2.
    let out = combicache(&[
        "verify", "--H", "4", "--r", "2", "--N", "6", "--scheme", "coded", "--g", "2", "--B", "25",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_json_report() {
    let out = combicache(&[
        "verify", "--H", "5", "--r", "3", "--N", "10", "--scheme", "asym", "--B", "200", "--seed",
        "3", "--report", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["config"]["rng"], "chacha20");
    assert_eq!(v["runs"][0]["outcomes"].as_array().unwrap().len(), 10);
    // B/10 bytes on every server-relay link.
    assert_eq!(
        v["runs"][0]["server_relay_bytes"],
        serde_json::json!([20, 20, 20, 20, 20])
    );
    assert!(v["files"].is_null());

    let out = combicache(&[
        "verify",
        "--H",
        "4",
        "--r",
        "2",
        "--N",
        "2",
        "--scheme",
        "man",
        "--t",
        "2",
        "--B",
        "60",
        "--seed",
        "3",
        "--demand",
        "sample:2:9",
        "--report",
        "json",
        "--dump-bytes",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["files"].as_array().unwrap().len(), 2);
    assert_eq!(v["runs"].as_array().unwrap().len(), 2);
}

#[test]
fn curve_stdout_header() {
    let out = combicache(&["curve", "--H", "6", "--r", "2", "--N", "15"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("scheme,g,M_num,M_den,R_num,R_den,M_float,R_float\n"));
    assert!(text.contains("thm1,5,10,1,1,6,10,"));
}

#[test]
fn compare_exit_codes_surface_the_boundary_case() {
    // r = 2: the strict claim holds for every gain.
    let out = combicache(&["compare", "--H", "4", "--r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: PASS"));

    // (4, 3): the claimed regime contains the g=2 equality point, so the
    // assertion honestly fails.
    let out = combicache(&["compare", "--H", "4", "--r", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("verdict: FAIL"));
    assert!(stdout(&out).contains("g=2: coded 1/3 vs baseline 1/3"));

    // Every other r >= 3 pair up to H = 10 passes.
    let out = combicache(&["compare", "--H", "5", "--r", "3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn optimal_subcommand() {
    let out = combicache(&["optimal", "--H", "5", "--r", "3", "--N", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("corner: M = 7, R = 1/10"));
    assert!(text.contains("optimal for M in [7, 10]"));
    assert!(text.contains("verdict: PASS"));
}

#[test]
fn lemma1_check_output() {
    let out = combicache(&["lemma1", "--H", "4", "--r", "2", "--q", "2", "--check"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "G=1, oracle=1, MATCH");

    let out = combicache(&["lemma1", "--H", "5", "--r", "3", "--q", "1"]);
    assert_eq!(stdout(&out).trim(), "G=7");
}

#[test]
fn fixtures_subsets() {
    let out = combicache(&["fixtures", "--only", "example1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("PASS example1"));

    // The comparison constants are displayed with the second example.
    let out = combicache(&["fixtures", "--only", "example2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("9/10"));
    assert!(text.contains("3/5"));
    assert!(text.contains("157/255"));

    let out = combicache(&["fixtures", "--only", "nosuchfixture"]);
    assert_eq!(out.status.code(), Some(2));

    let out = combicache(&["fixtures", "--only", "example", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["pass"], true);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(combicache(&["nonsense"]).status.code(), Some(2));
    assert_eq!(
        combicache(&["topology", "--H", "2", "--r", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        combicache(&["place", "--H", "4", "--r", "2", "--N", "6", "--scheme", "man"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        combicache(&[
            "deliver", "--H", "4", "--r", "2", "--N", "6", "--scheme", "coded", "--g", "2",
            "--demand", "bogus",
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn enumeration_cap_env_var() {
    // 6^6 demand vectors exceed a cap of 1000: parameter-level refusal.
    let out = Command::new(env!("CARGO_BIN_EXE_combicache"))
        .args([
            "deliver", "--H", "4", "--r", "2", "--N", "6", "--scheme", "coded", "--g", "2",
            "--demand", "all",
        ])
        .env("COMBICACHE_MAX_ENUM", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("COMBICACHE_MAX_ENUM"));

    // With the default cap the same sweep runs.
    let out = combicache(&[
        "deliver", "--H", "4", "--r", "2", "--N", "6", "--scheme", "coded", "--g", "2", "--demand",
        "all",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("evaluated 46656 demand vector(s)"));
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "verify",
        "--H",
        "4",
        "--r",
        "2",
        "--N",
        "6",
        "--scheme",
        "improved",
        "--g",
        "3",
        "--B",
        "120",
        "--seed",
        "42",
        "--report",
        "json",
        "--dump-bytes",
    ];
    let a = combicache(&args);
    let b = combicache(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let c = combicache(&[
        "curve",
        "--H",
        "6",
        "--r",
        "2",
        "--N",
        "15",
        "--schemes",
        "thm1,thm3",
    ]);
    let d = combicache(&[
        "curve",
        "--H",
        "6",
        "--r",
        "2",
        "--N",
        "15",
        "--schemes",
        "thm1,thm3",
    ]);
    assert_eq!(c.stdout, d.stdout);
}
