//! End-to-end checks of the command-line surface: artifacts, exit codes,
//! and the manifest's reproduce-from-itself contract.

use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_marketspin")
}

const BASE_CFG: &str = "model.spin = discrete\nmodel.s = 1\nmodel.j = 1\nmodel.a = 3\n\
    lattice.l = 2\nrun.sweeps = 200\nrun.temperature = 6.0\nrun.f_up = 0.6\nrun.f_dn = 0.4\nrun.seed = 5\n";

fn write_cfg(dir: &Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("exp.cfg");
    std::fs::write(&path, format!("{BASE_CFG}{extra}")).expect("write cfg");
    path
}

#[test]
fn run_writes_series_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "");
    let out = dir.path().join("out");
    let status = Command::new(bin())
        .args(["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "run"])
        .status()
        .unwrap();
    assert!(status.success());
    let series = std::fs::read_to_string(out.join("series.csv")).unwrap();
    assert!(series.starts_with("t,E,M,n_up,n_dn,P,R,H\n"));
    assert_eq!(series.lines().count(), 202); // header + 201 rows
    let manifest = std::fs::read_to_string(out.join("manifest")).unwrap();
    assert!(manifest.contains("meta.command = run"));
    assert!(manifest.contains("run.seed = 5"));
    assert!(manifest.contains("model.feedback = price_only"));
}

#[test]
fn manifest_reproduces_the_run_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "schedule.0 = 20 40 0.1\n");
    let out1 = dir.path().join("first");
    let status = Command::new(bin())
        .args(["--config", cfg.to_str().unwrap(), "--out", out1.to_str().unwrap(), "run"])
        .status()
        .unwrap();
    assert!(status.success());

    // Feed the manifest back as the config.
    let out2 = dir.path().join("second");
    let manifest_path = out1.join("manifest");
    let status = Command::new(bin())
        .args([
            "--config",
            manifest_path.to_str().unwrap(),
            "--out",
            out2.to_str().unwrap(),
            "run",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let a = std::fs::read(out1.join("series.csv")).unwrap();
    let b = std::fs::read(out2.join("series.csv")).unwrap();
    assert_eq!(a, b, "series.csv produced from the manifest differs");
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "");
    let run = |seed: Option<&str>, out: &str| -> Vec<u8> {
        let out = dir.path().join(out);
        let mut args = vec![
            "--config".to_string(),
            cfg.to_str().unwrap().to_string(),
            "--out".to_string(),
            out.to_str().unwrap().to_string(),
        ];
        if let Some(s) = seed {
            args.push("--seed".into());
            args.push(s.into());
        }
        args.push("run".into());
        assert!(Command::new(bin()).args(&args).status().unwrap().success());
        std::fs::read(out.join("series.csv")).unwrap()
    };
    let default = run(None, "d");
    let same = run(Some("5"), "s5");
    let other = run(Some("6"), "s6");
    assert_eq!(default, same); // config seed is 5
    assert_ne!(default, other);
}

#[test]
fn config_errors_exit_1_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "model.bogus = 1\n");
    let output = Command::new(bin())
        .args(["--config", cfg.to_str().unwrap(), "run"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert_eq!(stderr.lines().count(), 1, "stderr: {stderr}");
    assert!(stderr.contains("model.bogus"));
}

#[test]
fn missing_required_key_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(&cfg, BASE_CFG.replace("run.temperature = 6.0\n", "")).unwrap();
    let output = Command::new(bin())
        .args(["--config", cfg.to_str().unwrap(), "run"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("run.temperature"));
}

#[test]
fn io_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "");
    // Using a regular file as the output directory forces an I/O failure.
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "x").unwrap();
    let output = Command::new(bin())
        .args(["--config", cfg.to_str().unwrap(), "--out", blocker.to_str().unwrap(), "run"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    // Unreadable config is an I/O failure too.
    let output = Command::new(bin())
        .args(["--config", dir.path().join("nope.cfg").to_str().unwrap(), "run"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn missing_config_flag_exits_1() {
    let output = Command::new(bin()).arg("run").output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("--config"));
}

#[test]
fn pulse_rejects_schedule_conflict() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "schedule.0 = 20 40 0.1\npulse.t1 = 50\npulse.t2 = 80\npulse.h = 0.2\n",
    );
    let output = Command::new(bin())
        .args(["--config", cfg.to_str().unwrap(), "pulse"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("schedule"));
}

#[test]
fn pulse_writes_verdict_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "pulse.t1 = 60\npulse.t2 = 120\npulse.h = 0.2\npulse.horizon = 50\n",
    );
    let out = dir.path().join("out");
    let status = Command::new(bin())
        .args(["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "pulse"])
        .status()
        .unwrap();
    assert!(status.success());
    let persistence = std::fs::read_to_string(out.join("persistence.csv")).unwrap();
    assert!(persistence.starts_with("H,T,baseline,during,after,retention,persistent\n"));
    assert_eq!(persistence.lines().count(), 2);
    let manifest = std::fs::read_to_string(out.join("manifest")).unwrap();
    assert!(manifest.contains("result.persistent = "));
}

#[test]
fn mft_and_scan_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mf.cfg");
    std::fs::write(
        &cfg,
        "mf.j1 = 1\nmf.j2 = 0.5\nmf.k12 = 1\nmf.k21 = -0.5\nmf.a = 5\nmf.temperature = 12.62\nmf.steps = 600\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = Command::new(bin())
        .args(["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "mft"])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("mft.csv")).unwrap();
    assert!(csv.starts_with("t,s1,s2,P\n"));
    assert_eq!(csv.lines().count(), 602);
    let manifest = std::fs::read_to_string(out.join("manifest")).unwrap();
    assert!(manifest.contains("result.regime = clearing"), "{manifest}");

    let cfg2 = dir.path().join("mfscan.cfg");
    std::fs::write(
        &cfg2,
        "mf.j1 = 1\nmf.j2 = 0.5\nmf.k12 = 1\nmf.k21 = -0.5\nmf.a = 5\n\
         mf.t_list = 11.0, 12.0, 13.0\nmf.steps = 600\nmf.tail = 150\n",
    )
    .unwrap();
    let out2 = dir.path().join("out2");
    let status = Command::new(bin())
        .args(["--config", cfg2.to_str().unwrap(), "--out", out2.to_str().unwrap(), "mft-scan"])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out2.join("mft_scan.csv")).unwrap();
    assert!(csv.starts_with("T,regime,period,amplitude\n"));
    assert_eq!(csv.lines().count(), 4);
    // The reference parameters never order at low T, so the boundary
    // search reports its precondition failure in the manifest.
    let manifest = std::fs::read_to_string(out2.join("manifest")).unwrap();
    assert!(
        manifest.contains("result.tc1") || manifest.contains("result.boundary_error"),
        "{manifest}"
    );
}

#[test]
fn help_exits_zero() {
    let output = Command::new(bin()).arg("--help").output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&output.stdout).contains("marketspin"));
}
