use std::process::{Command, Output};

fn fqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqm"))
        .args(args)
        .env_remove("FQM_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn u_prints_the_s_matrix() {
    let out = fqm(&["u", "--n", "1", "--p", "1", "--elem", "0,-1,1,0"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].split_whitespace().all(|c| c == "1/2"));
    assert_eq!(rows[3].split_whitespace().collect::<Vec<_>>(), ["1/2", "-1/2", "-1/2", "1/2"]);
}

#[test]
fn even_label_is_a_usage_error() {
    let out = fqm(&["u", "--n", "2", "--p", "2", "--elem", "1,0,0,1"]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn matrix_subcommands_exit_codes() {
    assert_eq!(code(&fqm(&["gamma", "--n", "2", "--m", "1"])), 0);
    assert_eq!(code(&fqm(&["gamma", "--n", "0"])), 2);
    assert_eq!(code(&fqm(&["jrs", "--n", "2", "--r", "1", "--s", "-1"])), 0);
    assert_eq!(code(&fqm(&["jrs", "--odd-N", "5", "--r", "1", "--s", "2"])), 0);
    assert_eq!(code(&fqm(&["jrs", "--odd-N", "4", "--r", "1", "--s", "2"])), 2);
    assert_eq!(code(&fqm(&["weil-odd", "--N", "5", "--elem", "1,1,0,1"])), 0);
    assert_eq!(code(&fqm(&["weil-odd", "--N", "5", "--elem", "1,1,1,1"])), 2);
    assert_eq!(code(&fqm(&["u", "--n", "2", "--elem", "1,2,3"])), 2);
    assert_eq!(code(&fqm(&["nonsense"])), 2);
    assert_eq!(code(&fqm(&["--help"])), 0);
}

#[test]
fn verify_homomorphism_passes() {
    let out = fqm(&["verify", "--suite", "homomorphism", "--n", "2"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["checks_run"], 2304);
    assert_eq!(report["passed"], true);
    assert!(report.get("runtime_ms").is_none());
}

#[test]
fn verify_failure_exits_one() {
    // float deviations are ~1e-15, so a zero tolerance cannot pass
    let out = fqm(&["verify", "--suite", "weil-odd", "--N", "3", "--tol", "0"]);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["passed"], false);
    assert!(!report["failures"].as_array().unwrap().is_empty());
}

#[test]
fn verify_usage_errors() {
    assert_eq!(code(&fqm(&["verify", "--suite", "bogus", "--n", "2"])), 2);
    assert_eq!(code(&fqm(&["verify", "--suite", "heisenberg"])), 2);
    assert_eq!(code(&fqm(&["verify", "--suite", "cocycle-twisted", "--n", "9"])), 2);
    assert_eq!(code(&fqm(&["verify", "--suite", "metaplectic", "--n", "1", "--N", "2"])), 2);
}

#[test]
fn reports_are_byte_identical_and_seed_falls_back_to_env() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |p: &std::path::Path| {
        vec![
            "verify".to_string(),
            "--suite".into(),
            "heisenberg".into(),
            "--n".into(),
            "3".into(),
            "--samples".into(),
            "40".into(),
            "--out".into(),
            p.display().to_string(),
        ]
    };
    let with_flag: Vec<String> = args(&a).into_iter().chain(["--seed".into(), "17".into()]).collect();
    let out = Command::new(env!("CARGO_BIN_EXE_fqm")).args(&with_flag).output().unwrap();
    assert_eq!(code(&out), 0);
    let out = Command::new(env!("CARGO_BIN_EXE_fqm"))
        .args(args(&b))
        .env("FQM_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let (ra, rb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ra, rb);
    let report: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(report["params"]["seed"], 17);
}

#[test]
fn export_json_and_csv() {
    let out = fqm(&["export", "--format", "json", "u", "--n", "1", "--elem", "0,-1,1,0", "--backend", "float"]);
    assert_eq!(code(&out), 0);
    let m: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(m["dim"], 4);
    assert_eq!(m["backend"], "float");
    assert_eq!(m["entries"][0][0]["re"], 0.5);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = fqm(&[
        "export",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
        "u",
        "--n",
        "2",
        "--elem",
        "1,1,0,1",
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("dim,16,backend,exact"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r.split(',').count() == 32));
    assert_eq!(code(&fqm(&["export", "--format", "xml", "gamma", "--n", "1"])), 2);
}
