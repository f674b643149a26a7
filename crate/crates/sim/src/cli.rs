//! Command-line surface: scenario execution, sweeps, channel/codebook
//! dumps, and config validation.
//!
//! Override precedence is total and documented: values from the config file
//! are applied first, then `--set key=value` pairs in command-line order,
//! then the dedicated flags `--seed`, `--trials`, and `--grid` last.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fdbeam_core::channel::taps_to_subcarriers;
use fdbeam_core::hybrid::dft_codebook;

use crate::config::{apply_override, load_config, ScenarioConfig, SimError, OVERRIDE_KEYS};
use crate::csv;
use crate::run::{draw_trial_channels, run_sweep, SweepResult};

/// The environment variable honored by the sweep worker pool; re-exported
/// for the usage text and tests.
pub use crate::run::THREADS_ENV_VAR;

/// Exit status for usage and configuration problems.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for runtime (simulation or IO) failures.
pub const EXIT_RUNTIME: i32 = 1;

const USAGE: &str = "\
fdbeam — frequency-selective full-duplex beamforming simulator

USAGE:
  fdbeam <run|sweep|dump-channel|dump-codebook|validate> [FLAGS]

SUBCOMMANDS:
  run            Run the configured trials at a single SNR point
                 (--snr, default: first grid entry); writes <name>_trials.csv
  sweep          Run every grid point; writes <name>_trials.csv and
                 <name>_aggregates.csv
  dump-channel   Write one trial's channel realization as CSV
  dump-codebook  Write a DFT codebook as CSV
  validate       Load and validate the config, then exit

FLAGS:
  --config PATH  Scenario config (TOML); required except for dump-codebook
                 with --size
  --out PATH     run/sweep: output directory (default \".\")
                 dump-*: output file (default stdout)
  --seed N       Override master_seed (applied last)
  --trials N     Override trials (applied last)
  --grid LIST    Override sweep_snr_db with comma-separated dB values
                 (applied last)
  --set K=V      Override any config key (repeatable, applied in order);
                 see KEYS below
  --snr DB       run/dump-channel: SNR point (default: first grid entry)
  --trial N      dump-channel: trial index (default 0)
  --link L       dump-channel: ki | ij | ii (default ki)
  --domain D     dump-channel: taps | subcarriers (default subcarriers)
  --size N       dump-codebook: beam count (default: node_i tx antennas)
  --help         Show this help

ENVIRONMENT:
  FDBEAM_THREADS   Cap the sweep worker-thread count

EXIT STATUS:
  0 success, 2 usage/config error, 1 runtime failure
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Subcommand {
    Run,
    Sweep,
    DumpChannel,
    DumpCodebook,
    Validate,
}

#[derive(Debug, Clone)]
struct Invocation {
    subcommand: Subcommand,
    config_path: Option<PathBuf>,
    out_path: Option<PathBuf>,
    seed: Option<u64>,
    trials: Option<usize>,
    grid: Option<Vec<f64>>,
    sets: Vec<(String, String)>,
    snr_db: Option<f64>,
    trial: usize,
    link: String,
    domain: String,
    size: Option<usize>,
}

fn usage_error(msg: &str) -> String {
    format!(
        "error: {msg}\n\n{USAGE}\nKEYS for --set:\n  {}",
        OVERRIDE_KEYS.join("\n  ")
    )
}

fn parse_args(args: &[String]) -> Result<Invocation, String> {
    let mut it = args.iter();
    let sub = match it.next().map(String::as_str) {
        Some("run") => Subcommand::Run,
        Some("sweep") => Subcommand::Sweep,
        Some("dump-channel") => Subcommand::DumpChannel,
        Some("dump-codebook") => Subcommand::DumpCodebook,
        Some("validate") => Subcommand::Validate,
        Some("--help") | Some("-h") | Some("help") => return Err(USAGE.to_string()),
        Some(other) => return Err(usage_error(&format!("unknown subcommand {other:?}"))),
        None => return Err(usage_error("missing subcommand")),
    };

    let mut inv = Invocation {
        subcommand: sub,
        config_path: None,
        out_path: None,
        seed: None,
        trials: None,
        grid: None,
        sets: Vec::new(),
        snr_db: None,
        trial: 0,
        link: "ki".to_string(),
        domain: "subcarriers".to_string(),
        size: None,
    };

    let next_value = |it: &mut std::slice::Iter<String>, flag: &str| -> Result<String, String> {
        it.next()
            .cloned()
            .ok_or_else(|| usage_error(&format!("missing value for {flag}")))
    };

    while let Some(arg) = it.next() {
        let (flag, inline) = match arg.split_once('=') {
            Some((f, v)) if f.starts_with("--") => (f.to_string(), Some(v.to_string())),
            _ => (arg.clone(), None),
        };
        let mut value = |name: &str| -> Result<String, String> {
            match &inline {
                Some(v) => Ok(v.clone()),
                None => next_value(&mut it, name),
            }
        };
        match flag.as_str() {
            "--help" | "-h" => return Err(USAGE.to_string()),
            "--config" => inv.config_path = Some(PathBuf::from(value("--config")?)),
            "--out" => inv.out_path = Some(PathBuf::from(value("--out")?)),
            "--seed" => {
                inv.seed = Some(
                    value("--seed")?
                        .parse()
                        .map_err(|_| usage_error("--seed expects a u64"))?,
                )
            }
            "--trials" => {
                inv.trials = Some(
                    value("--trials")?
                        .parse()
                        .map_err(|_| usage_error("--trials expects an integer"))?,
                )
            }
            "--grid" => {
                let list = value("--grid")?;
                let grid: Result<Vec<f64>, _> =
                    list.split(',').map(|v| v.trim().parse::<f64>()).collect();
                inv.grid = Some(grid.map_err(|_| usage_error("--grid expects dB values"))?);
            }
            "--set" => {
                let pair = value("--set")?;
                let (k, v) = pair
                    .split_once('=')
                    .ok_or_else(|| usage_error("--set expects key=value"))?;
                inv.sets.push((k.to_string(), v.to_string()));
            }
            "--snr" => {
                inv.snr_db = Some(
                    value("--snr")?
                        .parse()
                        .map_err(|_| usage_error("--snr expects a dB value"))?,
                )
            }
            "--trial" => {
                inv.trial = value("--trial")?
                    .parse()
                    .map_err(|_| usage_error("--trial expects an integer"))?
            }
            "--link" => inv.link = value("--link")?,
            "--domain" => inv.domain = value("--domain")?,
            "--size" => {
                inv.size = Some(
                    value("--size")?
                        .parse()
                        .map_err(|_| usage_error("--size expects an integer"))?,
                )
            }
            other => return Err(usage_error(&format!("unknown flag {other:?}"))),
        }
    }
    Ok(inv)
}

/// Load the config and apply overrides in the documented precedence order.
fn load_with_overrides(inv: &Invocation) -> Result<ScenarioConfig, SimError> {
    let path = inv
        .config_path
        .as_ref()
        .ok_or_else(|| SimError::Invalid("--config is required".into()))?;
    let mut config = load_config(path)?;
    for (key, value) in &inv.sets {
        apply_override(&mut config, key, value)?;
    }
    if let Some(seed) = inv.seed {
        config.master_seed = seed;
    }
    if let Some(trials) = inv.trials {
        config.trials = trials;
    }
    if let Some(grid) = &inv.grid {
        config.sweep_snr_db = grid.clone();
    }
    config.validate()?;
    Ok(config)
}

fn out_dir(inv: &Invocation) -> PathBuf {
    inv.out_path.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn write_file(
    path: &Path,
    write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), SimError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut file = fs::File::create(path)?;
    write(&mut file)?;
    Ok(())
}

fn write_dump(
    inv: &Invocation,
    write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), SimError> {
    match &inv.out_path {
        Some(path) => write_file(path, write),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            Ok(())
        }
    }
}

fn warn_on_dimensionality(config: &ScenarioConfig) {
    if !config.network_dims().zf_dimensionality_ok() {
        eprintln!(
            "warning: node_i.tx_rf_chains ({}) < streams(i) + streams(k) ({}); \
             the precoder cannot fully null the self-interference",
            config.node_i.tx_rf_chains,
            config.node_i.streams + config.node_k.streams
        );
    }
}

fn print_sweep_summary(config: &ScenarioConfig, sweep: &SweepResult) {
    for agg in &sweep.aggregates {
        println!(
            "{} snr_ij {:>6.1} dB: median sum_fd {:>8.3}  ideal_fd_hybrid {:>8.3}  hd_hybrid {:>8.3} bps/Hz",
            config.name, agg.snr_ij_db, agg.sum_fd.median, agg.ideal_fd_hybrid.median, agg.hd_hybrid.median
        );
    }
}

fn run_command(inv: &Invocation) -> Result<(), SimError> {
    let config = load_with_overrides(inv)?;
    warn_on_dimensionality(&config);
    let snr_db = inv.snr_db.unwrap_or(config.sweep_snr_db[0]);
    let mut point = config.clone();
    point.sweep_snr_db = vec![snr_db];
    let sweep = run_sweep(&point)?;
    let path = out_dir(inv).join(format!("{}_trials.csv", config.name));
    write_file(&path, |w| {
        csv::write_trials_csv(w, &config.name, &sweep.rows)
    })?;
    print_sweep_summary(&config, &sweep);
    println!("wrote {} ({} rows)", path.display(), sweep.rows.len());
    Ok(())
}

fn sweep_command(inv: &Invocation) -> Result<(), SimError> {
    let config = load_with_overrides(inv)?;
    warn_on_dimensionality(&config);
    let sweep = run_sweep(&config)?;
    let dir = out_dir(inv);
    let trials_path = dir.join(format!("{}_trials.csv", config.name));
    write_file(&trials_path, |w| {
        csv::write_trials_csv(w, &config.name, &sweep.rows)
    })?;
    let agg_path = dir.join(format!("{}_aggregates.csv", config.name));
    write_file(&agg_path, |w| {
        csv::write_aggregates_csv(w, &config.name, &sweep.aggregates)
    })?;
    print_sweep_summary(&config, &sweep);
    println!(
        "wrote {} ({} rows) and {} ({} points)",
        trials_path.display(),
        sweep.rows.len(),
        agg_path.display(),
        sweep.aggregates.len()
    );
    Ok(())
}

fn dump_channel_command(inv: &Invocation) -> Result<(), SimError> {
    let config = load_with_overrides(inv)?;
    let snr_db = inv.snr_db.unwrap_or(config.sweep_snr_db[0]);
    let (h_ki, h_ij, h_ii) = draw_trial_channels(&config, snr_db, inv.trial)?;
    let taps = match inv.link.as_str() {
        "ki" => h_ki,
        "ij" => h_ij,
        "ii" => h_ii,
        other => {
            return Err(SimError::Invalid(format!(
                "unknown --link {other:?} (expected ki, ij, or ii)"
            )))
        }
    };
    match inv.domain.as_str() {
        "taps" => write_dump(inv, |w| csv::write_taps_csv(w, &taps)),
        "subcarriers" => {
            let sub = taps_to_subcarriers(&taps, config.subcarriers)?;
            write_dump(inv, |w| csv::write_subcarriers_csv(w, &sub))
        }
        other => Err(SimError::Invalid(format!(
            "unknown --domain {other:?} (expected taps or subcarriers)"
        ))),
    }
}

fn dump_codebook_command(inv: &Invocation) -> Result<(), SimError> {
    let size = match inv.size {
        Some(n) if n >= 1 => n,
        Some(_) => return Err(SimError::Invalid("--size must be >= 1".into())),
        None => load_with_overrides(inv)?.node_i.tx_antennas,
    };
    let codebook = dft_codebook(size);
    write_dump(inv, |w| csv::write_codebook_csv(w, &codebook))
}

fn validate_command(inv: &Invocation) -> Result<(), SimError> {
    let config = load_with_overrides(inv)?;
    warn_on_dimensionality(&config);
    println!(
        "ok: {} (U={}, D={}, N_CP={}, {} trials, {} sweep points, seed {})",
        config.name,
        config.subcarriers,
        config.taps,
        config.cyclic_prefix_len(),
        config.trials,
        config.sweep_snr_db.len(),
        config.master_seed
    );
    Ok(())
}

/// Parse arguments, dispatch, and map the outcome to an exit status:
/// 0 success, 2 usage/config errors, 1 runtime failures.
pub fn main_with_args(args: &[String]) -> i32 {
    let inv = match parse_args(args) {
        Ok(inv) => inv,
        Err(text) => {
            eprintln!("{text}");
            return EXIT_CONFIG;
        }
    };
    let result = match inv.subcommand {
        Subcommand::Run => run_command(&inv),
        Subcommand::Sweep => sweep_command(&inv),
        Subcommand::DumpChannel => dump_channel_command(&inv),
        Subcommand::DumpCodebook => dump_codebook_command(&inv),
        Subcommand::Validate => validate_command(&inv),
    };
    match result {
        Ok(()) => 0,
        Err(err @ (SimError::Parse(_) | SimError::Invalid(_))) => {
            eprintln!("error: {err}");
            EXIT_CONFIG
        }
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_RUNTIME
        }
    }
}
