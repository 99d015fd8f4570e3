//! End-to-end CLI checks: exit codes, artifact emission, and byte-level
//! determinism of repeated runs.

use std::path::Path;
use std::process::Command;

fn lacuna() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lacuna"))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn verify_defaults_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let status = lacuna()
        .args(["verify", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(dir.path().join("verify.csv").exists());
    assert!(dir.path().join("verify.json").exists());
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[sweep]\nm = \"fourteen\"\n").unwrap();
    let status = lacuna()
        .args(["verify", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // out-of-range values are also configuration errors
    std::fs::write(&cfg, "[decompose]\nlambda = 1.5\n").unwrap();
    let status = lacuna()
        .args(["decompose", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn sweep_emits_expected_rows_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(
        &cfg,
        "[sweep]\nm = 10\nrefine_m = 0\ncount = 8\ns_values = [1,2,3,4,5,6,7,8,9,10]\nextra_instances = 0\n",
    )
    .unwrap();
    let status = lacuna()
        .args(["sweep", "--svg", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = read(&dir.path().join("sweep.csv"));
    assert_eq!(csv.lines().count(), 11, "header + 10 rows:\n{csv}");
    assert!(dir.path().join("sweep.svg").exists());
}

#[test]
fn repeated_verify_runs_are_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let status = lacuna()
            .args(["verify", "--seed", "11", "--out"])
            .arg(dir.path())
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    for name in ["verify.csv", "verify.json"] {
        assert_eq!(
            read(&dir_a.path().join(name)),
            read(&dir_b.path().join(name)),
            "{name} differs between identical runs"
        );
    }
}

#[test]
fn thread_count_does_not_change_artifacts() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let cfg_text = "[cover]\ninstances = 200\nmax_intervals = 64\nlevel = 10\n";
    for (dir, threads) in [(&dir_a, "1"), (&dir_b, "4")] {
        let cfg = dir.path().join("cover.toml");
        std::fs::write(&cfg, cfg_text).unwrap();
        let status = lacuna()
            .args(["cover-stress", "--threads", threads, "--config"])
            .arg(&cfg)
            .args(["--out"])
            .arg(dir.path())
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    assert_eq!(
        read(&dir_a.path().join("cover_stress.csv")),
        read(&dir_b.path().join("cover_stress.csv"))
    );
    assert_eq!(
        read(&dir_a.path().join("cover_stress.json")),
        read(&dir_b.path().join("cover_stress.json"))
    );
}
