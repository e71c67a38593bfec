use std::path::PathBuf;
use std::process::{Command, Output};

use cli::{run, Report, RunConfig, Status, Strategy, Suite};

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cli-test-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn invoke(tag: &str, config: &str, extra: &[&str]) -> (Output, PathBuf) {
    let dir = scratch(tag);
    let path = dir.join("run.toml");
    std::fs::write(&path, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cli"))
        .arg("--config")
        .arg(&path)
        .arg("--workspace")
        .arg(dir.join("ws"))
        .args(extra)
        .env_remove("ALGEBROID_WORKSPACE")
        .output()
        .unwrap();
    (out, dir)
}

fn report(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn passing_run_exits_zero_and_writes_the_workspace() {
    let (out, dir) = invoke("pass", "suites = [\"pbw\"]\n[algebroid]\nbuiltin = \"sl2\"\n", &["--window", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.status, Status::Pass);
    assert_eq!(r.config.window.degree, 4);
    let cached = dir.join("ws").join(&r.algebroid_hash);
    let names: Vec<String> = std::fs::read_dir(&cached).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert!(names.iter().any(|n| n.starts_with("pbw-")));
    assert!(names.iter().any(|n| n.starts_with("report-")));
    assert!(names.contains(&"presentation.txt".to_string()));
}

#[test]
fn empty_suites_are_a_usage_error() {
    let (out, _) = invoke("empty", "suites = []\n[algebroid]\nbuiltin = \"sl2\"\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn unparseable_config_is_a_usage_error() {
    let (out, _) = invoke("garbage", "suites = [\"pbw\"\n", &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn polynomial_base_with_sections_suite_is_a_usage_error() {
    let (out, _) = invoke("weyl-tau", "suites = [\"tau\"]\n[algebroid]\nbuiltin = \"weyl(1)\"\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("point base"));
}

#[test]
fn broken_table_fails_validation_with_exit_one() {
    // [e, f] = 2h on one side only
    let cfg = r#"
suites = ["validate"]
[algebroid]
names = ["e", "f", "h"]
rank = 3
[algebroid.bracket]
"0,1" = [[2, "2"]]
"1,0" = [[2, "-1"]]
"0,2" = [[0, "-2"]]
"1,2" = [[1, "2"]]
"#;
    let (out, _) = invoke("broken", cfg, &[]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r.failed, vec![Suite::Validate]);
    let v = r.suite(Suite::Validate).unwrap();
    assert_eq!(v.check("antisymmetry").unwrap().status, Status::Fail);
    assert_eq!(v.check("jacobi").unwrap().status, Status::Fail);
}

#[test]
fn inconclusive_is_not_failure() {
    let cfg = r#"
suites = ["ideals"]
[algebroid]
builtin = "abelian(1)"
[[targets.ideals]]
generators = ["x"]
exact_through = 1
"#;
    let (out, _) = invoke("inconclusive", cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.inconclusive, vec![Suite::Ideals]);
    assert!(r.failed.is_empty());
    let s = r.suite(Suite::Ideals).unwrap();
    assert!(s.reason.as_ref().is_some_and(|m| !m.is_empty()));
    assert!(String::from_utf8_lossy(&out.stderr).contains("inconclusive: ideals"));
}

#[test]
fn flags_override_the_config() {
    let (out, _) = invoke(
        "flags",
        "suites = [\"pbw\"]\nseed = 1\n[algebroid]\nbuiltin = \"abelian(1)\"\n",
        &["--suite", "validate", "--suite", "dual", "--seed", "9", "--strategy", "evaluation"],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.config.suites, vec![Suite::Validate, Suite::Dual]);
    assert_eq!(r.config.seed, 9);
    assert_eq!(r.config.strategy, Strategy::Evaluation);
}

#[test]
fn workspace_env_override() {
    let dir = scratch("env");
    let path = dir.join("run.toml");
    std::fs::write(&path, "suites = [\"pbw\"]\n[algebroid]\nbuiltin = \"abelian(1)\"\n").unwrap();
    let ws = dir.join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_cli"))
        .arg("--config")
        .arg(&path)
        .env("ALGEBROID_WORKSPACE", &ws)
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(ws.join(report(&out).algebroid_hash).join("presentation.txt").exists());
}

#[test]
fn evaluation_strategy_over_the_line_carries_seed_and_points() {
    let mut cfg = RunConfig::builtin("weyl(1)", &[Suite::Koszul]);
    cfg.strategy = Strategy::Evaluation;
    cfg.seed = 17;
    cfg.window.degree = 4;
    let r = run(cfg).unwrap();
    let k = r.suite(Suite::Koszul).unwrap();
    assert_eq!(k.status, Status::Pass, "{:?}", k.reason);
    assert!(!k.records.is_empty());
    for rec in &k.records {
        assert_eq!(rec.strategy, "evaluation");
        let c = rec.certificate.as_deref().unwrap();
        assert!(c.contains("seed 17") && c.contains("3 points"), "{c}");
    }
}

#[test]
fn chern_class_of_minus_one_on_the_line() {
    let mut cfg = RunConfig::builtin("abelian(1)", &[Suite::Ktheory]);
    cfg.targets.twists = Some(vec![-1]);
    let r = run(cfg).unwrap();
    let k = r.suite(Suite::Ktheory).unwrap();
    assert_eq!(k.status, Status::Pass, "{:?}", k.reason);
    let c1 = k.records_for("chern Ũ(-1)").find(|r| r.position == Some(1)).unwrap();
    assert_eq!(c1.rank, -1);
}

#[test]
fn sl2_pbw_dual_koszul_pass() {
    let mut cfg = RunConfig::builtin("sl2", &[Suite::Pbw, Suite::Dual, Suite::Koszul]);
    cfg.window.degree = 6;
    let r = run(cfg).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert_eq!(r.suites.len(), 3);
}
