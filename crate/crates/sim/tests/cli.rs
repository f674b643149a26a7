//! End-to-end tests of the `fdbeam` binary: exit codes, file outputs,
//! determinism, and override precedence.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_fdbeam")
}

fn config_path(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

static DIR_COUNTER: AtomicUsize = AtomicUsize::new(0);

fn scratch_dir(label: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "fdbeam-cli-{}-{label}-{}",
        std::process::id(),
        DIR_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .env("FDBEAM_THREADS", "2")
        .output()
        .expect("failed to spawn fdbeam")
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn validate_accepts_all_bundled_configs() {
    for name in ["scenario1.toml", "scenario2.toml", "scenario3.toml"] {
        let out = run(&["validate", "--config", &config_path(name)]);
        assert!(out.status.success(), "{name}: {:?}", out);
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.starts_with("ok:"), "{text}");
    }
}

#[test]
fn validate_rejects_cyclic_prefix_violation_with_config_exit_code() {
    let out = run(&[
        "validate",
        "--config",
        &config_path("scenario1.toml"),
        "--set",
        "subcarriers=4",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("cyclic-prefix"), "{err}");
}

#[test]
fn unknown_subcommand_prints_usage_and_exits_nonzero() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("USAGE"), "{err}");
}

#[test]
fn missing_config_file_is_a_runtime_error() {
    let out = run(&["validate", "--config", "/nonexistent/nope.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn run_twice_with_same_seed_writes_identical_files() {
    let dir_a = scratch_dir("run-a");
    let dir_b = scratch_dir("run-b");
    let args = |dir: &Path| {
        vec![
            "run".to_string(),
            "--config".into(),
            config_path("scenario1.toml"),
            "--out".into(),
            dir.display().to_string(),
            "--seed".into(),
            "77".into(),
            "--trials".into(),
            "2".into(),
            "--snr".into(),
            "10".into(),
            "--set".into(),
            "node_i.tx_antennas=8".into(),
            "--set".into(),
            "node_i.rx_antennas=8".into(),
            "--set".into(),
            "node_j.tx_antennas=8".into(),
            "--set".into(),
            "node_j.rx_antennas=8".into(),
            "--set".into(),
            "node_k.tx_antennas=8".into(),
            "--set".into(),
            "node_k.rx_antennas=8".into(),
            "--set".into(),
            "node_i.tx_rf_chains=4".into(),
            "--set".into(),
            "subcarriers=4".into(),
            "--set".into(),
            "taps=4".into(),
        ]
    };
    for dir in [&dir_a, &dir_b] {
        let argv = args(dir);
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        let out = run(&argv);
        assert!(out.status.success(), "{:?}", out);
    }
    let a = read(&dir_a.join("scenario-1_trials.csv"));
    let b = read(&dir_b.join("scenario-1_trials.csv"));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 1 + 2);
    fs::remove_dir_all(dir_a).ok();
    fs::remove_dir_all(dir_b).ok();
}

#[test]
fn sweep_single_point_single_trial_writes_both_csvs() {
    let dir = scratch_dir("sweep");
    let out = run(&[
        "sweep",
        "--config",
        &config_path("scenario1.toml"),
        "--out",
        &dir.display().to_string(),
        "--trials",
        "1",
        "--grid",
        "10",
        "--set",
        "node_i.tx_antennas=8",
        "--set",
        "node_i.rx_antennas=8",
        "--set",
        "node_j.tx_antennas=8",
        "--set",
        "node_j.rx_antennas=8",
        "--set",
        "node_k.tx_antennas=8",
        "--set",
        "node_k.rx_antennas=8",
        "--set",
        "node_i.tx_rf_chains=4",
        "--set",
        "subcarriers=4",
        "--set",
        "taps=4",
    ]);
    assert!(out.status.success(), "{:?}", out);
    let trials = read(&dir.join("scenario-1_trials.csv"));
    let lines: Vec<&str> = trials.lines().collect();
    assert_eq!(lines.len(), 2, "{trials}");
    assert!(lines[0].starts_with("scenario,snr_ij_db,snr_ki_db,trial,"));
    assert!(lines[1].starts_with("scenario-1,1.00000000e1,1.00000000e1,0,"));
    let aggs = read(&dir.join("scenario-1_aggregates.csv"));
    assert_eq!(aggs.lines().count(), 1 + 4);
    fs::remove_dir_all(dir).ok();
}

#[test]
fn dedicated_flags_override_set_pairs() {
    // --trials is applied after --set trials=..., so it wins.
    let out = run(&[
        "validate",
        "--config",
        &config_path("scenario1.toml"),
        "--set",
        "trials=9",
        "--trials",
        "3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("3 trials"), "{text}");
}

#[test]
fn dump_codebook_emits_the_requested_size() {
    let out = run(&["dump-codebook", "--size", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "row,col,real,imag");
    assert_eq!(lines.len(), 1 + 16);
}

#[test]
fn dump_channel_is_reproducible_and_dimensioned() {
    let dir = scratch_dir("dump");
    let file_a = dir.join("a.csv");
    let file_b = dir.join("b.csv");
    for file in [&file_a, &file_b] {
        let out = run(&[
            "dump-channel",
            "--config",
            &config_path("scenario1.toml"),
            "--link",
            "ii",
            "--domain",
            "taps",
            "--trial",
            "1",
            "--out",
            &file.display().to_string(),
            "--set",
            "node_i.tx_antennas=4",
            "--set",
            "node_i.rx_antennas=4",
            "--set",
            "taps=4",
            "--set",
            "subcarriers=4",
        ]);
        assert!(out.status.success(), "{:?}", out);
    }
    let a = read(&file_a);
    assert_eq!(a, read(&file_b));
    // 4 taps x 4 rx x 4 tx entries plus the header.
    assert_eq!(a.lines().count(), 1 + 64);
    assert_eq!(
        a.lines().next().unwrap(),
        "tap_or_subcarrier_index,rx_index,tx_index,real,imag"
    );

    // Subcarrier-domain dump of the same trial: at subcarrier zero the DFT
    // is the plain sum over taps, so entry (0, 0) must match the tap dump.
    let file_sub = dir.join("sub.csv");
    let out = run(&[
        "dump-channel",
        "--config",
        &config_path("scenario1.toml"),
        "--link",
        "ii",
        "--domain",
        "subcarriers",
        "--trial",
        "1",
        "--out",
        &file_sub.display().to_string(),
        "--set",
        "node_i.tx_antennas=4",
        "--set",
        "node_i.rx_antennas=4",
        "--set",
        "taps=4",
        "--set",
        "subcarriers=4",
    ]);
    assert!(out.status.success(), "{:?}", out);
    let sub = read(&file_sub);
    assert_eq!(sub.lines().count(), 1 + 64);
    let entry = |text: &str, index: usize| -> (f64, f64) {
        let mut acc = (0.0, 0.0);
        for line in text.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            if fields[0] == index.to_string() && fields[1] == "0" && fields[2] == "0" {
                acc.0 += fields[3].parse::<f64>().unwrap();
                acc.1 += fields[4].parse::<f64>().unwrap();
            }
        }
        acc
    };
    let tap_sum = (0..4).fold((0.0, 0.0), |acc, d| {
        let (re, im) = entry(&a, d);
        (acc.0 + re, acc.1 + im)
    });
    let sub0 = entry(&sub, 0);
    assert!((tap_sum.0 - sub0.0).abs() < 1e-7, "{tap_sum:?} vs {sub0:?}");
    assert!((tap_sum.1 - sub0.1).abs() < 1e-7, "{tap_sum:?} vs {sub0:?}");
    fs::remove_dir_all(dir).ok();
}
