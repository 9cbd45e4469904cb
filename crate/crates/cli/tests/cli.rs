use std::process::{Command, Output};

fn mk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mkorders"))
        .args(args)
        .env_remove("MKORDERS_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validate_exit_codes() {
    let o = mk(&["validate", "abB"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("k     1"));
    assert_eq!(mk(&["validate", "abBabB"]).status.code(), Some(1));
    assert_eq!(mk(&["validate", "abx"]).status.code(), Some(2));
    assert_eq!(mk(&["validate", "abB:2"]).status.code(), Some(1));
    assert_eq!(mk(&["validate", "abB:5"]).status.code(), Some(2));
}

#[test]
fn validate_json() {
    let o = mk(&["validate", "aBb", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["shift"], 2);
    assert_eq!(v["valid"], true);
}

#[test]
fn usage_errors() {
    assert_eq!(mk(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mk(&["enumerate"]).status.code(), Some(2));
    assert_eq!(
        mk(&["order", "abB", "-g", "e", "-g", "a"]).status.code(),
        Some(2)
    );
}

#[test]
fn enumerate_small() {
    let o = mk(&["enumerate", "-k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("k = 3: 0 patterns"));
    for k in ["1", "3"] {
        let a: serde_json::Value =
            serde_json::from_slice(&mk(&["enumerate", "-k", k, "--json"]).stdout).unwrap();
        let b: serde_json::Value =
            serde_json::from_slice(&mk(&["enumerate", "-k", k, "--naive", "--json"]).stdout)
                .unwrap();
        assert_eq!(a["patterns"], b["patterns"]);
    }
}

#[test]
fn classify_one() {
    let o = mk(&["classify", "-k", "1"]);
    assert!(stdout(&o).contains("1 classes"));
}

#[test]
fn order_golden() {
    let o = mk(&["order", "abB", "-g", "e", "-g", "a", "-g", "b"]);
    assert_eq!(stdout(&o).trim(), "-1");
    let o = mk(&["order", "abB", "-g", "e", "-g", "b", "-g", "a"]);
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn config_ball_one() {
    assert_eq!(
        stdout(&mk(&["config", "abB", "--ball", "1"])).trim(),
        "e b B a"
    );
}

#[test]
fn cycle_dot() {
    let o = mk(&["cycle", "degree9", "--dot"]);
    let s = stdout(&o);
    assert!(s.starts_with("digraph"));
    assert_eq!(s.matches("->").count(), 18);
}

#[test]
fn examples() {
    assert!(stdout(&mk(&["example", "lift:7"])).starts_with("abBabBabBabBabBabBabB:7"));
    assert_eq!(mk(&["example", "lift:3"]).status.code(), Some(1));
    assert_eq!(mk(&["example", "bogus"]).status.code(), Some(2));
}

#[test]
fn pingpong_certificate_json() {
    let o = mk(&["pingpong", "abB", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["h1"], "abaB");
    assert_eq!(v["neighborhoods"]["N1-"].as_array().unwrap().len(), 1);
}

#[test]
fn sigma0_reports_violations() {
    let o = mk(&["sigma0-check", "abB", "--radius", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("12 violations"));
}

#[test]
fn realize_extract_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (key, want) in [
        ("standard", "abB:1"),
        ("lift:5", "abBabBabBabBabB:10"),
        ("lift:7", "abBabBabBabBabBabBabB:7"),
    ] {
        for scramble in [false, true] {
            let mut args = vec!["realize", key, "--json", "--seed", "3"];
            if scramble {
                args.push("--scramble");
            }
            let o = mk(&args);
            assert_eq!(o.status.code(), Some(0), "{key}");
            let path = dir.path().join("r.json");
            std::fs::write(&path, &o.stdout).unwrap();
            let e = mk(&["extract", path.to_str().unwrap(), "--depth", "3"]);
            assert_eq!(stdout(&e).trim(), want, "{key} scramble={scramble}");
        }
    }
    let missing = dir.path().join("nope.json");
    assert_eq!(
        mk(&["extract", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn seeded_output_is_reproducible() {
    let a = mk(&["realize", "abB", "--json", "--scramble", "--seed", "9"]);
    let b = mk(&[
        "realize",
        "abB",
        "--json",
        "--scramble",
        "--seed",
        "9",
        "--threads",
        "1",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let c = mk(&["realize", "abB", "--json", "--scramble", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn threads_from_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_mkorders"))
        .args(["enumerate", "-k", "5"])
        .env("MKORDERS_THREADS", "2")
        .output()
        .unwrap();
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .starts_with("k = 5: 2 patterns, 1 orbits"));
}
