use std::process::{Command, Output};

fn torsiongen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torsiongen"))
        .args(args)
        .env_remove("TORSIONGEN_CACHE")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn verify_exit_codes() {
    let pass = torsiongen(&["verify", "prop61", "5", "18"]);
    assert_eq!(code(&pass), 0);
    let report: serde_json::Value = serde_json::from_slice(&pass.stdout).unwrap();
    assert_eq!(report["cells"][0]["outcome"], "pass");
    assert_eq!(report["cells"][0]["classification"], "alternating");

    let flags = torsiongen(&["verify", "prop61", "--k", "5", "--n", "18"]);
    assert_eq!(flags.stdout, pass.stdout);

    let known = torsiongen(&["verify", "conjecture", "3", "6"]);
    assert_eq!(code(&known), 0);
    let report: serde_json::Value = serde_json::from_slice(&known.stdout).unwrap();
    assert_eq!(report["cells"][0]["outcome"], "expected_fail");

    let domain = torsiongen(&["verify", "prop61", "5", "9"]);
    assert_eq!(code(&domain), 2);
    assert!(!domain.stderr.is_empty());
}

#[test]
fn mcg_and_estimate_exit_codes() {
    assert_eq!(code(&torsiongen(&["mcg", "8", "21", "three"])), 0);
    assert_eq!(code(&torsiongen(&["mcg", "5", "7", "four"])), 2);
    assert_eq!(code(&torsiongen(&["estimate", "--k", "3", "--n", "5", "--trials", "0"])), 2);
    assert_eq!(code(&torsiongen(&["estimate", "--k", "3", "--n", "5", "--sampler", "bogus"])), 2);

    let est = torsiongen(&["estimate", "--k", "2", "--n", "4", "--trials", "200"]);
    assert_eq!(code(&est), 0);
    let r: serde_json::Value = serde_json::from_slice(&est.stdout).unwrap();
    assert_eq!(r["successes"], 0);
    assert_eq!(r["interval"][0], 0.0);
}

#[test]
fn csv_output() {
    let out = torsiongen(&["--format", "csv", "sweep", "prop61", "--k", "3", "--n-max", "8"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "command");
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| &r[4] == "pass"));
}

#[test]
fn cache_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_torsiongen"))
            .args(["sweep", "conjecture", "--k", "3", "--n-max", "9"])
            .env("TORSIONGEN_CACHE", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    let second = run();
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let stderr = String::from_utf8_lossy(&second.stderr);
    assert!(stderr.contains("7 hit(s), 0 miss(es)"), "{stderr}");
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_some());
}
