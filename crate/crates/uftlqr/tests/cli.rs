use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uftlqr"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("uftlqr-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn negative_reaction_is_a_config_error() {
    let d = scratch("negc");
    let cfg = d.join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"schema":1,"equation":{"c":-1,"L":3},"initial":{"kind":"zero"},
            "grid":{"x":[1.0],"t":[0.5]},"methods":["series"]}"#,
    )
    .unwrap();
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "ConfigError");
    assert_eq!(err["field"], "equation.c");
    std::fs::remove_dir_all(d).unwrap();
}

#[test]
fn oracle_only_run_is_deterministic() {
    let d = scratch("oracle");
    let cfg = d.join("s.json");
    let text = format!(
        r#"{{"schema":1,"equation":{{"c":2,"L":2}},"initial":{{"kind":"polynomial","coeffs":[0,2,-1]}},
            "grid":{{"x":{{"start":0.2,"stop":1.8,"count":5}},"t":[0.1,0.3]}},"methods":["oracle"],
            "oracle":{{"n":41,"dt":0.001}},"output":{{"dir":{:?}}}}}"#,
        d.join("out")
    );
    std::fs::write(&cfg, text).unwrap();
    let run = || {
        let out = bin().arg("run").arg(&cfg).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(d.join("out/u_oracle.csv")).unwrap()
    };
    let first = run();
    assert_eq!(first, run());
    assert!(!d.join("out/u_contour.csv").exists());
    assert!(!d.join("out/u_series.csv").exists());
    std::fs::remove_dir_all(d).unwrap();
}

#[test]
fn kernel_subcommand_writes_structured_csv() {
    let d = scratch("kernel");
    let out_path = d.join("k.csv");
    let out = bin()
        .args(["kernel", "--c", "0", "--L", "3.141592653589793", "--M", "10", "--grid", "21", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,xi,gamma_toeplitz,gamma_hankel,gamma_combined"));
    assert_eq!(lines.count(), 21 * 21);
    let bad = bin()
        .args(["kernel", "--c", "0", "--L", "1", "--M", "0", "--grid", "21", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    std::fs::remove_dir_all(d).unwrap();
}

#[test]
fn verify_fast_passes_and_corruption_is_caught() {
    let ok = bin().args(["verify"]).env("UFTLQR_THREADS", "1").output().unwrap();
    let text = String::from_utf8_lossy(&ok.stdout);
    assert_eq!(ok.status.code(), Some(0), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 8);

    let bad = bin().args(["verify", "--debug-corrupt-angle"]).output().unwrap();
    let text = String::from_utf8_lossy(&bad.stdout);
    assert_eq!(bad.status.code(), Some(4));
    assert!(text.lines().any(|l| l.starts_with("FAIL vanishing_integral")), "{text}");
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = bin().arg("verify").env("UFTLQR_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
