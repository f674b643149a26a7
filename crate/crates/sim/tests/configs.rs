//! The three bundled scenario configs must match the simulated-scenario
//! parameter table exactly.

use fdbeam_sim::load_config;

fn config_path(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn scenario1_matches_the_parameter_table() {
    let cfg = load_config(config_path("scenario1.toml")).unwrap();
    assert_eq!(cfg.name, "scenario-1");
    assert_eq!(cfg.subcarriers, 8);
    assert_eq!(cfg.taps, 8);
    assert_eq!(cfg.cyclic_prefix_len(), 2);
    assert_eq!(cfg.node_i.tx_rf_chains, 6);
    assert_eq!(cfg.node_i.rx_rf_chains, 2);
    assert_eq!(cfg.node_j.rx_rf_chains, 2);
    assert_eq!(cfg.node_k.tx_rf_chains, 2);
    assert_eq!(cfg.snr_offset_db, 0.0);
    for node in [&cfg.node_i, &cfg.node_j, &cfg.node_k] {
        assert_eq!(node.tx_antennas, 32);
        assert_eq!(node.rx_antennas, 32);
        assert_eq!(node.streams, 2);
    }
    assert_eq!(cfg.snr_ii_db, 80.0);
    assert_eq!(cfg.rician_kappa_db, 10.0);
    assert_eq!(cfg.channel.desired_clusters, (1, 6));
    assert_eq!(cfg.channel.desired_rays, (1, 10));
    assert_eq!(cfg.channel.si_clusters, (1, 3));
    assert_eq!(cfg.channel.si_rays, (1, 6));
    assert_eq!(cfg.channel.si_separation_wavelengths, 10.0);
    assert_eq!(cfg.channel.rrc_rolloff, 1.0);
    assert_eq!(cfg.channel.sampling_rate_hz, 2e9);
}

#[test]
fn scenario2_matches_the_parameter_table() {
    let cfg = load_config(config_path("scenario2.toml")).unwrap();
    assert_eq!(cfg.name, "scenario-2");
    assert_eq!(cfg.subcarriers, 128);
    assert_eq!(cfg.taps, 128);
    assert_eq!(cfg.cyclic_prefix_len(), 32);
    assert_eq!(cfg.node_i.tx_rf_chains, 8);
    assert_eq!(cfg.node_i.rx_rf_chains, 4);
    assert_eq!(cfg.node_j.rx_rf_chains, 4);
    assert_eq!(cfg.node_k.tx_rf_chains, 4);
    assert_eq!(cfg.snr_offset_db, 0.0);
}

#[test]
fn scenario3_matches_the_parameter_table() {
    let cfg = load_config(config_path("scenario3.toml")).unwrap();
    assert_eq!(cfg.name, "scenario-3");
    assert_eq!(cfg.subcarriers, 8);
    assert_eq!(cfg.taps, 8);
    assert_eq!(cfg.node_i.tx_rf_chains, 6);
    assert_eq!(cfg.node_i.rx_rf_chains, 2);
    assert_eq!(cfg.node_j.rx_rf_chains, 2);
    assert_eq!(cfg.node_k.tx_rf_chains, 2);
    // The k -> i link sits 30 dB below the swept i -> j link.
    assert_eq!(cfg.snr_offset_db, 30.0);
}

#[test]
fn bundled_configs_expose_the_zf_dimensionality_margin() {
    for name in ["scenario1.toml", "scenario2.toml", "scenario3.toml"] {
        let cfg = load_config(config_path(name)).unwrap();
        assert!(cfg.network_dims().zf_dimensionality_ok(), "{name}");
    }
}
