use std::process::{Command, Output};

fn kaclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kaclab"))
        .args(args)
        .env_remove("KACLAB_THREADS")
        .output()
        .expect("spawn kaclab")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn kacrice_writes_csv_to_stdout() {
    let o = kaclab(&["kacrice", "--n", "1,4", "--interval", "R"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,interval,expected_roots,error_estimate,centered"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1");
    assert!((first[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn usage_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &["continuity", "--family", "ternary-q-path"],
        &["simulate", "--law", "rademacher", "--n", "8", "--interval", "(1,0]"],
        &["simulate", "--law", "cauchy", "--n", "8", "--interval", "R"],
        &["simulate", "--law", "rademacher", "--n", "8", "--interval", "R", "--trials", "0"],
        &["constant", "--law", "gaussian", "--n-schedule", "64,128"],
        &["constant", "--law", "gaussian", "--n-schedule", "64,32,128"],
        &["constant", "--law", "gaussian", "--method", "corollary", "--c-values", "8,4"],
        &["continuity", "--family", "nope", "--m-list", "4"],
        &["kacrice", "--n", "8", "--threads", "0"],
        &["frobnicate"],
    ];
    for args in cases {
        let o = kaclab(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn bad_thread_environment_exits_2() {
    let o = Command::new(env!("CARGO_BIN_EXE_kaclab"))
        .args(["kacrice", "--n", "8"])
        .env("KACLAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn manifest_replay_reproduces_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim.csv");
    let out_s = out.to_str().unwrap();
    let o = kaclab(&[
        "simulate", "--law", "four-moment", "--n", "8,32", "--interval", "R", "--interval", "[-1,1]", "--trials",
        "500", "--seed", "9", "--out", out_s,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = dir.path().join("sim.csv.manifest.json");
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["seed"], 9);
    assert_eq!(m["config"]["command"], "simulate");
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);

    let again = dir.path().join("again.csv");
    let o = kaclab(&["replay", "--threads", "2", "--manifest", manifest.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn tampered_manifest_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    assert_eq!(code(&kaclab(&["kacrice", "--n", "8", "--out", out.to_str().unwrap()])), 0);
    let manifest = dir.path().join("k.csv.manifest.json");
    let text = std::fs::read_to_string(&manifest).unwrap().replace("\"R\"", "\"[0,1]\"");
    std::fs::write(&manifest, text).unwrap();
    assert_eq!(code(&kaclab(&["replay", "--manifest", manifest.to_str().unwrap()])), 2);
}

#[test]
fn custom_law_file() {
    let dir = tempfile::tempdir().unwrap();
    let law = dir.path().join("signs.json");
    std::fs::write(&law, r#"{"name": "signs", "atoms": [[-1.0, 1, 2], [1.0, 1, 2]]}"#).unwrap();
    let o = kaclab(&[
        "simulate", "--law-file", law.to_str().unwrap(), "--n", "1", "--interval", "(0,1]", "--trials", "1000",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("signs,1,\"(0,1]\","));

    std::fs::write(&law, r#"{"name": "biased", "atoms": [[1.0, 1, 1]]}"#).unwrap();
    let o = kaclab(&["simulate", "--law-file", law.to_str().unwrap(), "--n", "1", "--interval", "R"]);
    assert_eq!(code(&o), 2);
}
