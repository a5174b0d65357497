//! End-to-end CLI checks: config in → report out, and the exit-code
//! contract (0 pass, 1 criterion failure, 2 config error).

use fraclab::cli::cli_main;
use fraclab::harness::{ExperimentConfig, ExperimentReport};

fn run(args: &[&str]) -> i32 {
    cli_main(args.iter().map(|s| s.to_string()))
}

#[test]
fn verify_with_config_writes_passing_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("thm2.json");
    let cfg = ExperimentConfig::frozen_thm2();
    std::fs::write(&cfg_path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let report_path = dir.path().join("report.json");
    let csv_dir = dir.path().join("csv");
    let code = run(&[
        "verify",
        "thm2",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        report_path.to_str().unwrap(),
        "--csv",
        csv_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report: ExperimentReport =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert!(report.pass);
    assert_eq!(report.experiment, "thm2");
    assert_eq!(report.environment.seed, cfg.corpus.seed);
    // one CSV per emitted series, each with the labeled header
    let count = std::fs::read_dir(&csv_dir).unwrap().count();
    assert_eq!(count, report.series.len());
    let any = std::fs::read_dir(&csv_dir)
        .unwrap()
        .next()
        .unwrap()
        .unwrap();
    let text = std::fs::read_to_string(any.path()).unwrap();
    assert!(text.starts_with("radius,"));
}

#[test]
fn missing_config_file_is_a_usage_error() {
    assert_eq!(
        run(&["verify", "thm1", "--config", "/nonexistent/cfg.json"]),
        2
    );
}

#[test]
fn invalid_exponent_relation_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.json");
    let mut cfg = ExperimentConfig::frozen_cor3();
    cfg.p = 3.0; // violates p = n/α
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(
        run(&["verify", "cor3", "--config", cfg_path.to_str().unwrap()]),
        2
    );
}

#[test]
fn gate_that_excludes_every_input_fails_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("strict.json");
    let mut cfg = ExperimentConfig::frozen_thm2();
    cfg.grid.n_list = vec![256];
    cfg.thresholds.membership_theta = 1e-6; // nothing passes the VM gate
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let report_path = dir.path().join("report.json");
    let code = run(&[
        "verify",
        "thm2",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    let report: ExperimentReport =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert!(!report.pass);
    assert!(report.rows.iter().all(|r| r.note.starts_with("excluded")));
}

#[test]
fn report_merge_conjunction() {
    let dir = tempfile::tempdir().unwrap();

    // a passing report
    let mut cfg = ExperimentConfig::frozen_thm2();
    let pass_cfg = dir.path().join("pass.json");
    std::fs::write(&pass_cfg, serde_json::to_string(&cfg).unwrap()).unwrap();
    let pass_report = dir.path().join("pass_report.json");
    assert_eq!(
        run(&[
            "verify",
            "thm2",
            "--config",
            pass_cfg.to_str().unwrap(),
            "--out",
            pass_report.to_str().unwrap(),
        ]),
        0
    );

    // a failing report (impossible decay demand)
    cfg.thresholds.decay = 1e-9;
    let fail_cfg = dir.path().join("fail.json");
    std::fs::write(&fail_cfg, serde_json::to_string(&cfg).unwrap()).unwrap();
    let fail_report = dir.path().join("fail_report.json");
    assert_eq!(
        run(&[
            "verify",
            "thm2",
            "--config",
            fail_cfg.to_str().unwrap(),
            "--out",
            fail_report.to_str().unwrap(),
        ]),
        1
    );

    let merged = dir.path().join("merged.json");
    assert_eq!(
        run(&[
            "report-merge",
            pass_report.to_str().unwrap(),
            fail_report.to_str().unwrap(),
            "--out",
            merged.to_str().unwrap(),
        ]),
        1
    );
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&merged).unwrap()).unwrap();
    assert_eq!(doc["pass"], serde_json::json!(false));
    assert_eq!(run(&["report-merge", pass_report.to_str().unwrap()]), 0);
}
