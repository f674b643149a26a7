//! Scenario configuration: TOML schema, validation, and command-line
//! overrides. dB-to-linear conversion happens here and nowhere else; the
//! core crate works in linear units throughout.

use std::fmt;
use std::path::Path;

use fdbeam_core::bfc::{NetworkDimensions, NodeDimensions};
use serde::{Deserialize, Serialize};

/// Errors from configuration loading, validation, and the simulation
/// harness.
#[derive(Debug)]
pub enum SimError {
    Io(std::io::Error),
    /// TOML syntax or schema problem; the message carries the parser's
    /// line/column diagnostics.
    Parse(String),
    /// A configuration invariant is violated; the message names it.
    Invalid(String),
    /// Numerical failure propagated from the design or metric evaluation.
    Core(fdbeam_core::Error),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Io(e) => write!(f, "io error: {e}"),
            SimError::Parse(msg) => write!(f, "config parse error: {msg}"),
            SimError::Invalid(msg) => write!(f, "invalid config: {msg}"),
            SimError::Core(e) => write!(f, "simulation error: {e}"),
        }
    }
}

impl std::error::Error for SimError {}

impl From<std::io::Error> for SimError {
    fn from(e: std::io::Error) -> Self {
        SimError::Io(e)
    }
}

impl From<fdbeam_core::Error> for SimError {
    fn from(e: fdbeam_core::Error) -> Self {
        SimError::Core(e)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Antenna/RF/stream counts of one node, as written in the config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NodeConfig {
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub tx_rf_chains: usize,
    pub rx_rf_chains: usize,
    pub streams: usize,
}

impl Default for NodeConfig {
    fn default() -> Self {
        NodeConfig {
            tx_antennas: 32,
            rx_antennas: 32,
            tx_rf_chains: 2,
            rx_rf_chains: 2,
            streams: 2,
        }
    }
}

impl NodeConfig {
    fn dims(&self) -> NodeDimensions {
        NodeDimensions {
            tx_antennas: self.tx_antennas,
            rx_antennas: self.rx_antennas,
            tx_rf_chains: self.tx_rf_chains,
            rx_rf_chains: self.rx_rf_chains,
            streams: self.streams,
        }
    }
}

/// Channel statistics shared by the three links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub sampling_rate_hz: f64,
    pub rrc_rolloff: f64,
    pub angle_spread_std: f64,
    /// Inclusive [lo, hi] range the per-trial cluster count is drawn from.
    pub desired_clusters: (usize, usize),
    pub desired_rays: (usize, usize),
    pub si_clusters: (usize, usize),
    pub si_rays: (usize, usize),
    /// Vertical spacing between the tx and rx arrays at node i, wavelengths.
    pub si_separation_wavelengths: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            sampling_rate_hz: 2e9,
            rrc_rolloff: 1.0,
            angle_spread_std: 0.2,
            desired_clusters: (1, 6),
            desired_rays: (1, 10),
            si_clusters: (1, 3),
            si_rays: (1, 6),
            si_separation_wavelengths: 10.0,
        }
    }
}

fn default_trials() -> usize {
    100
}

fn default_master_seed() -> u64 {
    1
}

fn default_snr_ii_db() -> f64 {
    80.0
}

fn default_kappa_db() -> f64 {
    10.0
}

fn default_sweep() -> Vec<f64> {
    (-2..=6).map(|k| 5.0 * k as f64).collect() // -10..30 dB in 5 dB steps
}

/// One simulated scenario: dimensions, channel statistics, SNR layout, and
/// the sweep/trial bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// OFDM subcarrier count U.
    pub subcarriers: usize,
    /// Channel impulse-response length D in taps.
    pub taps: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_master_seed")]
    pub master_seed: u64,
    #[serde(default = "default_snr_ii_db")]
    pub snr_ii_db: f64,
    #[serde(default = "default_kappa_db")]
    pub rician_kappa_db: f64,
    /// snr_ij = snr_ki + offset; the sweep variable is snr_ij.
    #[serde(default)]
    pub snr_offset_db: f64,
    #[serde(default = "default_sweep")]
    pub sweep_snr_db: Vec<f64>,
    #[serde(default)]
    pub node_i: NodeConfig,
    #[serde(default)]
    pub node_j: NodeConfig,
    #[serde(default)]
    pub node_k: NodeConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
}

impl ScenarioConfig {
    /// Cyclic prefix length, D / 4.
    pub fn cyclic_prefix_len(&self) -> usize {
        self.taps / 4
    }

    pub fn network_dims(&self) -> NetworkDimensions {
        NetworkDimensions {
            node_i: self.node_i.dims(),
            node_j: self.node_j.dims(),
            node_k: self.node_k.dims(),
        }
    }

    /// Linear link SNRs at one sweep point (the point is snr_ij in dB).
    pub fn snrs_at(&self, snr_ij_db: f64) -> fdbeam_core::bfc::LinkSnrs {
        fdbeam_core::bfc::LinkSnrs {
            snr_ij: db_to_linear(snr_ij_db),
            snr_ki: db_to_linear(snr_ij_db - self.snr_offset_db),
            snr_ii: db_to_linear(self.snr_ii_db),
        }
    }

    pub fn rician_kappa_linear(&self) -> f64 {
        db_to_linear(self.rician_kappa_db)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |msg: String| Err(SimError::Invalid(msg));
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        {
            return fail(format!(
                "scenario name {:?} must be non-empty and use only [A-Za-z0-9._-]",
                self.name
            ));
        }
        if self.taps < 1 {
            return fail("taps: channel needs at least one tap".into());
        }
        if self.subcarriers < self.taps {
            return fail(format!(
                "subcarriers ({}) < taps ({}): cyclic-prefix assumption violated (need U >= D)",
                self.subcarriers, self.taps
            ));
        }
        if self.trials < 1 {
            return fail("trials must be >= 1".into());
        }
        if self.sweep_snr_db.is_empty() {
            return fail("sweep_snr_db must contain at least one point".into());
        }
        if self.sweep_snr_db.iter().any(|v| !v.is_finite()) {
            return fail("sweep_snr_db entries must be finite".into());
        }
        for (label, value) in [
            ("snr_ii_db", self.snr_ii_db),
            ("rician_kappa_db", self.rician_kappa_db),
            ("snr_offset_db", self.snr_offset_db),
        ] {
            if !value.is_finite() {
                return fail(format!("{label} must be finite"));
            }
        }
        for (label, node) in [
            ("node_i", &self.node_i),
            ("node_j", &self.node_j),
            ("node_k", &self.node_k),
        ] {
            if let Err(e) = node.dims().validate() {
                return fail(format!("{label}: {e}"));
            }
            if node.streams > node.tx_antennas.min(node.rx_antennas) {
                return fail(format!("{label}: more streams than antennas"));
            }
        }
        let ch = &self.channel;
        if !ch.sampling_rate_hz.is_finite() || ch.sampling_rate_hz <= 0.0 {
            return fail("channel.sampling_rate_hz must be positive".into());
        }
        if !(0.0..=1.0).contains(&ch.rrc_rolloff) {
            return fail("channel.rrc_rolloff must lie in [0, 1]".into());
        }
        if !ch.angle_spread_std.is_finite() || ch.angle_spread_std < 0.0 {
            return fail("channel.angle_spread_std must be finite and >= 0".into());
        }
        for (label, (lo, hi)) in [
            ("channel.desired_clusters", ch.desired_clusters),
            ("channel.desired_rays", ch.desired_rays),
            ("channel.si_clusters", ch.si_clusters),
            ("channel.si_rays", ch.si_rays),
        ] {
            if lo < 1 || lo > hi {
                return fail(format!(
                    "{label} range [{lo}, {hi}] must satisfy 1 <= lo <= hi"
                ));
            }
        }
        if !ch.si_separation_wavelengths.is_finite() || ch.si_separation_wavelengths <= 0.0 {
            return fail("channel.si_separation_wavelengths must be positive".into());
        }
        Ok(())
    }
}

/// Load a scenario config from a TOML file and validate it.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig, SimError> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_config(&text)
}

/// Parse and validate a scenario config from TOML text.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, SimError> {
    let config: ScenarioConfig =
        toml::from_str(text).map_err(|e| SimError::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Keys accepted by [`apply_override`], also listed in the CLI usage text.
pub const OVERRIDE_KEYS: &[&str] = &[
    "name",
    "subcarriers",
    "taps",
    "trials",
    "master_seed",
    "snr_ii_db",
    "rician_kappa_db",
    "snr_offset_db",
    "sweep_snr_db",
    "node_{i,j,k}.tx_antennas",
    "node_{i,j,k}.rx_antennas",
    "node_{i,j,k}.tx_rf_chains",
    "node_{i,j,k}.rx_rf_chains",
    "node_{i,j,k}.streams",
    "channel.sampling_rate_hz",
    "channel.rrc_rolloff",
    "channel.angle_spread_std",
    "channel.desired_clusters",
    "channel.desired_rays",
    "channel.si_clusters",
    "channel.si_rays",
    "channel.si_separation_wavelengths",
];

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, SimError> {
    value
        .trim()
        .parse()
        .map_err(|_| SimError::Invalid(format!("cannot parse value {value:?} for key {key:?}")))
}

fn parse_range(key: &str, value: &str) -> Result<(usize, usize), SimError> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 2 {
        return Err(SimError::Invalid(format!(
            "key {key:?} expects \"lo,hi\", got {value:?}"
        )));
    }
    Ok((parse_value(key, parts[0])?, parse_value(key, parts[1])?))
}

/// Apply one `key=value` override to a loaded config. Overrides are applied
/// in command-line order and take precedence over file values; the caller
/// re-validates afterwards.
pub fn apply_override(config: &mut ScenarioConfig, key: &str, value: &str) -> Result<(), SimError> {
    match key {
        "name" => config.name = value.to_string(),
        "subcarriers" => config.subcarriers = parse_value(key, value)?,
        "taps" => config.taps = parse_value(key, value)?,
        "trials" => config.trials = parse_value(key, value)?,
        "master_seed" => config.master_seed = parse_value(key, value)?,
        "snr_ii_db" => config.snr_ii_db = parse_value(key, value)?,
        "rician_kappa_db" => config.rician_kappa_db = parse_value(key, value)?,
        "snr_offset_db" => config.snr_offset_db = parse_value(key, value)?,
        "sweep_snr_db" => {
            config.sweep_snr_db = value
                .split(',')
                .map(|v| parse_value(key, v))
                .collect::<Result<_, _>>()?;
        }
        "channel.sampling_rate_hz" => config.channel.sampling_rate_hz = parse_value(key, value)?,
        "channel.rrc_rolloff" => config.channel.rrc_rolloff = parse_value(key, value)?,
        "channel.angle_spread_std" => config.channel.angle_spread_std = parse_value(key, value)?,
        "channel.desired_clusters" => config.channel.desired_clusters = parse_range(key, value)?,
        "channel.desired_rays" => config.channel.desired_rays = parse_range(key, value)?,
        "channel.si_clusters" => config.channel.si_clusters = parse_range(key, value)?,
        "channel.si_rays" => config.channel.si_rays = parse_range(key, value)?,
        "channel.si_separation_wavelengths" => {
            config.channel.si_separation_wavelengths = parse_value(key, value)?
        }
        _ => {
            if let Some((node_key, field)) = key.split_once('.') {
                let node = match node_key {
                    "node_i" => &mut config.node_i,
                    "node_j" => &mut config.node_j,
                    "node_k" => &mut config.node_k,
                    _ => {
                        return Err(SimError::Invalid(format!(
                            "unknown override key {key:?}; valid keys: {}",
                            OVERRIDE_KEYS.join(", ")
                        )))
                    }
                };
                match field {
                    "tx_antennas" => node.tx_antennas = parse_value(key, value)?,
                    "rx_antennas" => node.rx_antennas = parse_value(key, value)?,
                    "tx_rf_chains" => node.tx_rf_chains = parse_value(key, value)?,
                    "rx_rf_chains" => node.rx_rf_chains = parse_value(key, value)?,
                    "streams" => node.streams = parse_value(key, value)?,
                    _ => {
                        return Err(SimError::Invalid(format!(
                            "unknown node field {field:?} in override key {key:?}"
                        )))
                    }
                }
            } else {
                return Err(SimError::Invalid(format!(
                    "unknown override key {key:?}; valid keys: {}",
                    OVERRIDE_KEYS.join(", ")
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_toml() -> &'static str {
        "name = \"t\"\nsubcarriers = 8\ntaps = 8\n"
    }

    #[test]
    fn minimal_config_gets_documented_defaults() {
        let cfg = parse_config(minimal_toml()).unwrap();
        assert_eq!(cfg.trials, 100);
        assert_eq!(cfg.master_seed, 1);
        assert_eq!(cfg.snr_ii_db, 80.0);
        assert_eq!(cfg.rician_kappa_db, 10.0);
        assert_eq!(cfg.snr_offset_db, 0.0);
        assert_eq!(
            cfg.sweep_snr_db,
            vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
        );
        assert_eq!(cfg.cyclic_prefix_len(), 2);
        assert_eq!(cfg.node_i, NodeConfig::default());
        assert_eq!(cfg.channel, ChannelConfig::default());
    }

    #[test]
    fn cyclic_prefix_violation_is_named() {
        let err = parse_config("name = \"t\"\nsubcarriers = 4\ntaps = 8\n").unwrap_err();
        match err {
            SimError::Invalid(msg) => assert!(msg.contains("cyclic-prefix"), "{msg}"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn unknown_field_is_a_parse_error_with_location() {
        let err = parse_config("name = \"t\"\nsubcarriers = 8\ntaps = 8\nbogus = 1\n").unwrap_err();
        match err {
            SimError::Parse(msg) => {
                assert!(msg.contains("bogus"), "{msg}");
                assert!(msg.contains("line"), "diagnostics lack a location: {msg}");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn rf_chain_invariant_is_enforced() {
        let toml =
            "name = \"t\"\nsubcarriers = 8\ntaps = 8\n[node_i]\ntx_rf_chains = 1\nstreams = 2\n";
        let err = parse_config(toml).unwrap_err();
        match err {
            SimError::Invalid(msg) => assert!(msg.contains("node_i"), "{msg}"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn overrides_take_precedence_and_unknown_keys_fail() {
        let mut cfg = parse_config(minimal_toml()).unwrap();
        apply_override(&mut cfg, "trials", "7").unwrap();
        apply_override(&mut cfg, "node_i.tx_rf_chains", "6").unwrap();
        apply_override(&mut cfg, "sweep_snr_db", "0,10,20").unwrap();
        apply_override(&mut cfg, "channel.desired_clusters", "2,4").unwrap();
        assert_eq!(cfg.trials, 7);
        assert_eq!(cfg.node_i.tx_rf_chains, 6);
        assert_eq!(cfg.sweep_snr_db, vec![0.0, 10.0, 20.0]);
        assert_eq!(cfg.channel.desired_clusters, (2, 4));
        assert!(apply_override(&mut cfg, "nope", "1").is_err());
        assert!(apply_override(&mut cfg, "node_i.nope", "1").is_err());
        assert!(apply_override(&mut cfg, "trials", "x").is_err());
    }

    #[test]
    fn snr_layout_converts_db_once() {
        let mut cfg = parse_config(minimal_toml()).unwrap();
        cfg.snr_offset_db = 30.0;
        let snrs = cfg.snrs_at(10.0);
        assert!((snrs.snr_ij - 10.0).abs() < 1e-12);
        assert!((snrs.snr_ki - 0.01).abs() < 1e-14);
        assert!((snrs.snr_ii - 1e8).abs() < 1e-4);
        assert!((cfg.rician_kappa_linear() - 10.0).abs() < 1e-12);
    }
}
