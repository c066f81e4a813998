//! End-to-end checks of the command-line interface: subcommand behavior,
//! exit codes, configuration errors, and byte-identical reruns.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bmc-lsq"))
}

fn tiny_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("tiny.toml");
    std::fs::write(
        &path,
        r#"
[kernel]
type = "nbar"

[sample]
generation = 6

[basis]
d_max = 32
tau = 1.0

[cv]
folds = 3
lambdas = [0.1, 1.0]
taus = [0.4217, 1.0]

[run]
seed = 99
"#,
    )
    .unwrap();
    path
}

#[test]
fn constants_prints_the_boundary_value() {
    let out = bin()
        .args([
            "constants",
            "--alpha",
            "0.7071067811865476",
            "--R",
            "1",
            "--n",
            "10",
            "--gamma",
            "1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("c_alpha = 16"), "stdout:\n{stdout}");
    assert!(stdout.contains("kappa_n = "), "stdout:\n{stdout}");
    assert!(stdout.contains("delta_n = "), "stdout:\n{stdout}");
}

#[test]
fn unknown_subcommand_exits_with_usage_code_2() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("Usage") || stderr.contains("usage"), "stderr:\n{stderr}");
}

#[test]
fn config_missing_kernel_fails_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("broken.toml");
    std::fs::write(&cfg, "[run]\nseed = 1\n").unwrap();
    let out = bin()
        .args(["simulate", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("kernel"), "stderr:\n{stderr}");
}

#[test]
fn config_depth_cap_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("deep.toml");
    std::fs::write(&cfg, "[kernel]\ntype = \"nbar\"\n[sample]\ngeneration = 30\n").unwrap();
    let out = bin()
        .args(["simulate", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("cap"), "stderr:\n{stderr}");
}

#[test]
fn fit_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out_dir in [&out_a, &out_b] {
        let out = bin()
            .args([
                "fit",
                "--config",
                cfg.to_str().unwrap(),
                "--seed",
                "424242",
                "--out",
                out_dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(out_a.join("fit.csv")).unwrap();
    let b = std::fs::read(out_b.join("fit.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "fit.csv differs between identical reruns");
    let meta_a = std::fs::read(out_a.join("fit.meta.json")).unwrap();
    let meta_b = std::fs::read(out_b.join("fit.meta.json")).unwrap();
    assert_eq!(meta_a, meta_b);
}

#[test]
fn different_seeds_change_the_fit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let out_a = dir.path().join("s1");
    let out_b = dir.path().join("s2");
    for (out_dir, seed) in [(&out_a, "1"), (&out_b, "2")] {
        let out = bin()
            .args([
                "fit",
                "--config",
                cfg.to_str().unwrap(),
                "--seed",
                seed,
                "--out",
                out_dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let a = std::fs::read(out_a.join("fit.csv")).unwrap();
    let b = std::fs::read(out_b.join("fit.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn cv_prints_selected_cell_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let out_dir = dir.path().join("cv");
    let out = bin()
        .args([
            "cv",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("selected lambda"), "stdout:\n{stdout}");
    let report = std::fs::read_to_string(out_dir.join("cv_report.csv")).unwrap();
    assert!(report.starts_with("# config_hash="));
    assert!(report.contains("lambda,tau,fold,score"));
    // 2 lambdas x 2 taus x (3 folds + mean row) data lines.
    assert_eq!(report.lines().filter(|l| !l.starts_with('#')).count(), 1 + 4 * 4);
}

#[test]
fn env_var_overrides_the_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let flag_dir = dir.path().join("flag");
    let env_dir = dir.path().join("env");
    let out = bin()
        .args([
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            flag_dir.to_str().unwrap(),
        ])
        .env("BMC_LSQ_OUT", env_dir.to_str().unwrap())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env_dir.join("sample.bmct").exists());
    assert!(!flag_dir.join("sample.bmct").exists());
}

#[test]
fn simulate_writes_a_loadable_sample() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let out_dir = dir.path().join("sim");
    let out = bin()
        .args([
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let sample = bmc_lsq::tree::TreeSample::load(&out_dir.join("sample.bmct")).unwrap();
    // generation 6 needs depth 7.
    assert_eq!(sample.depth(), 7);
    let meta = std::fs::read_to_string(out_dir.join("sample.meta.json")).unwrap();
    assert!(meta.contains("config_hash"));
}

#[test]
fn concentration_subcommand_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("conc.toml");
    std::fs::write(
        &cfg_path,
        r#"
[kernel]
type = "twopoint"
a = 0.4

[concentration]
a = 0.4
n = 5
replications = 200
deltas = [0.5, 1.0, 2.0]
"#,
    )
    .unwrap();
    let out_dir = dir.path().join("conc");
    let out = bin()
        .args([
            "concentration",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(out_dir.join("concentration.csv")).unwrap();
    assert!(table.contains("delta,empirical,shape,calibrated"));
    assert_eq!(table.lines().filter(|l| !l.starts_with('#')).count(), 1 + 3);
}
