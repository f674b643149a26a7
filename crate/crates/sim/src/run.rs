//! Seeded Monte Carlo harness: per-trial channel draws, the full design
//! pass, rate and benchmark evaluation, sweeps over the SNR grid, and the
//! per-point aggregation.
//!
//! Every trial is reproducible from `(master_seed, snr_point, trial_index)`
//! via [`trial_seed`], and the per-trial seeds do not depend on execution
//! order, so trials can run on a worker pool (capped by the
//! `FDBEAM_THREADS` environment variable) with results assembled in a
//! deterministic (snr point, trial) order.

use fdbeam_core::bfc::{design_full, DesignCodebooks};
use fdbeam_core::channel::{
    gen_clustered_taps, gen_si_taps, taps_to_subcarriers, ArrayGeometry, ChannelTaps,
    ClusterParams, SiChannelParams,
};
use fdbeam_core::metrics::{benchmarks, evaluate_rates, BenchmarkReport, RateReport};
use fdbeam_core::rng::{mix_seed, Rng};

use crate::config::{ScenarioConfig, SimError};

/// Environment variable capping the worker-thread count for sweeps.
pub const THREADS_ENV_VAR: &str = "FDBEAM_THREADS";

/// Outcome of one Monte Carlo trial at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub snr_ij_db: f64,
    pub snr_ki_db: f64,
    pub trial: usize,
    pub rates: RateReport,
    pub benchmarks: BenchmarkReport,
}

/// Stable per-trial seed: splitmix64 mixing of the master seed, the raw bits
/// of the snr_ij sweep value in dB, and the trial index.
pub fn trial_seed(master_seed: u64, snr_ij_db: f64, trial: usize) -> u64 {
    mix_seed(master_seed, snr_ij_db.to_bits(), trial as u64)
}

fn draw_cluster_params(
    rng: &mut Rng,
    clusters: (usize, usize),
    rays: (usize, usize),
    config: &ScenarioConfig,
) -> ClusterParams {
    ClusterParams {
        n_clust: rng.uniform_usize_inclusive(clusters.0, clusters.1),
        n_rays: rng.uniform_usize_inclusive(rays.0, rays.1),
        cluster_mean_aoa: None,
        cluster_mean_aod: None,
        angle_spread_std: config.channel.angle_spread_std,
        delay_span_taps: config.taps,
        sampling_rate: config.channel.sampling_rate_hz,
        rolloff: config.channel.rrc_rolloff,
    }
}

/// The tap-domain channel triple of one trial, drawn in a fixed order
/// (k->i desired, i->j desired, then the Rician SI channel at i) from the
/// trial's seed. Exposed so channel dumps reproduce exactly what a trial
/// used.
pub fn draw_trial_channels(
    config: &ScenarioConfig,
    snr_ij_db: f64,
    trial: usize,
) -> Result<(ChannelTaps, ChannelTaps, ChannelTaps), SimError> {
    let mut rng = Rng::seed_from_u64(trial_seed(config.master_seed, snr_ij_db, trial));
    let ch = &config.channel;

    let params_ki = draw_cluster_params(&mut rng, ch.desired_clusters, ch.desired_rays, config);
    let h_ki = gen_clustered_taps(
        &params_ki,
        config.node_i.rx_antennas,
        config.node_k.tx_antennas,
        &mut rng,
    )?;

    let params_ij = draw_cluster_params(&mut rng, ch.desired_clusters, ch.desired_rays, config);
    let h_ij = gen_clustered_taps(
        &params_ij,
        config.node_j.rx_antennas,
        config.node_i.tx_antennas,
        &mut rng,
    )?;

    let geometry_tx = ArrayGeometry::ula_horizontal(config.node_i.tx_antennas);
    let geometry_rx = ArrayGeometry::ula_horizontal(config.node_i.rx_antennas).translated([
        0.0,
        0.0,
        ch.si_separation_wavelengths,
    ]);
    let si_params = SiChannelParams {
        rician_kappa: config.rician_kappa_linear(),
        nlos_params: draw_cluster_params(&mut rng, ch.si_clusters, ch.si_rays, config),
        geometry_tx,
        geometry_rx,
    };
    let h_ii = gen_si_taps(&si_params, &mut rng)?;

    Ok((h_ki, h_ij, h_ii))
}

/// One seeded trial: draw the channels, run the full beamforming design,
/// evaluate the achieved rates and the benchmark rates.
pub fn run_trial(
    config: &ScenarioConfig,
    snr_ij_db: f64,
    trial: usize,
) -> Result<TrialResult, SimError> {
    let (h_ki_taps, h_ij_taps, h_ii_taps) = draw_trial_channels(config, snr_ij_db, trial)?;
    let h_ki = taps_to_subcarriers(&h_ki_taps, config.subcarriers)?;
    let h_ij = taps_to_subcarriers(&h_ij_taps, config.subcarriers)?;
    let h_ii = taps_to_subcarriers(&h_ii_taps, config.subcarriers)?;

    let dims = config.network_dims();
    let codebooks = DesignCodebooks::dft_for(&dims);
    let snrs = config.snrs_at(snr_ij_db);

    let design = design_full(&h_ki, &h_ij, &h_ii, &dims, &snrs, &codebooks)?;
    let rates = evaluate_rates(&h_ij, &h_ki, &h_ii, &design, &snrs)?;
    let bench = benchmarks(&h_ki, &h_ij, &dims, &snrs, &codebooks)?;

    let entries = [
        rates.rate_ij,
        rates.rate_ki,
        rates.sum_fd,
        bench.ideal_fd_digital,
        bench.ideal_fd_hybrid,
        bench.hd_digital,
        bench.hd_hybrid,
    ];
    if entries.iter().any(|v| !v.is_finite()) {
        return Err(SimError::Core(fdbeam_core::Error::NumericalFailure(
            "trial produced a non-finite rate",
        )));
    }

    Ok(TrialResult {
        snr_ij_db,
        snr_ki_db: snr_ij_db - config.snr_offset_db,
        trial,
        rates,
        benchmarks: bench,
    })
}

/// Median/mean/quartiles of one metric across the trials of a sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricStats {
    pub median: f64,
    pub mean: f64,
    pub q25: f64,
    pub q75: f64,
}

impl MetricStats {
    fn from_values(values: &mut [f64]) -> MetricStats {
        values.sort_by(|a, b| a.partial_cmp(b).expect("non-finite metric"));
        MetricStats {
            median: quantile(values, 0.5),
            mean: values.iter().sum::<f64>() / values.len() as f64,
            q25: quantile(values, 0.25),
            q75: quantile(values, 0.75),
        }
    }
}

/// Linear-interpolation quantile of an ascending slice.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let idx = p * (n - 1) as f64;
    let lo = idx.floor() as usize;
    let hi = idx.ceil() as usize;
    let w = idx - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

/// Aggregate statistics of one sweep point across its trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrAggregate {
    pub snr_ij_db: f64,
    pub snr_ki_db: f64,
    pub rate_ij: MetricStats,
    pub rate_ki: MetricStats,
    pub sum_fd: MetricStats,
    pub ideal_fd_digital: MetricStats,
    pub ideal_fd_hybrid: MetricStats,
    pub hd_digital: MetricStats,
    pub hd_hybrid: MetricStats,
}

/// A completed sweep: one row per (snr point, trial) in stable order, plus
/// one aggregate record per snr point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<TrialResult>,
    pub aggregates: Vec<SnrAggregate>,
}

fn worker_count(num_jobs: usize) -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let capped = match std::env::var(THREADS_ENV_VAR) {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .unwrap_or(available),
        Err(_) => available,
    };
    capped.min(num_jobs).max(1)
}

/// Run every (snr point, trial) combination of the config and aggregate per
/// point. Trials execute on a worker pool but the result is independent of
/// scheduling: seeds derive from (master_seed, snr point, trial) alone and
/// rows are assembled in grid-then-trial order.
pub fn run_sweep(config: &ScenarioConfig) -> Result<SweepResult, SimError> {
    config.validate()?;
    let jobs: Vec<(f64, usize)> = config
        .sweep_snr_db
        .iter()
        .flat_map(|&snr| (0..config.trials).map(move |t| (snr, t)))
        .collect();

    let workers = worker_count(jobs.len());
    let mut results: Vec<Option<Result<TrialResult, SimError>>> = Vec::new();
    results.resize_with(jobs.len(), || None);

    if workers <= 1 {
        for (slot, &(snr, trial)) in results.iter_mut().zip(jobs.iter()) {
            *slot = Some(run_trial(config, snr, trial));
        }
    } else {
        std::thread::scope(|scope| {
            let jobs = &jobs;
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        let mut idx = w;
                        while idx < jobs.len() {
                            let (snr, trial) = jobs[idx];
                            out.push((idx, run_trial(config, snr, trial)));
                            idx += workers;
                        }
                        out
                    })
                })
                .collect();
            for handle in handles {
                for (idx, result) in handle.join().expect("trial worker panicked") {
                    results[idx] = Some(result);
                }
            }
        });
    }

    let mut rows = Vec::with_capacity(jobs.len());
    for slot in results {
        rows.push(slot.expect("missing trial result")?);
    }

    let aggregates = config
        .sweep_snr_db
        .iter()
        .enumerate()
        .map(|(point, &snr)| {
            let slice = &rows[point * config.trials..(point + 1) * config.trials];
            aggregate_point(snr, snr - config.snr_offset_db, slice)
        })
        .collect();

    Ok(SweepResult { rows, aggregates })
}

fn aggregate_point(snr_ij_db: f64, snr_ki_db: f64, rows: &[TrialResult]) -> SnrAggregate {
    let stats = |extract: fn(&TrialResult) -> f64| {
        let mut values: Vec<f64> = rows.iter().map(extract).collect();
        MetricStats::from_values(&mut values)
    };
    SnrAggregate {
        snr_ij_db,
        snr_ki_db,
        rate_ij: stats(|r| r.rates.rate_ij),
        rate_ki: stats(|r| r.rates.rate_ki),
        sum_fd: stats(|r| r.rates.sum_fd),
        ideal_fd_digital: stats(|r| r.benchmarks.ideal_fd_digital),
        ideal_fd_hybrid: stats(|r| r.benchmarks.ideal_fd_hybrid),
        hd_digital: stats(|r| r.benchmarks.hd_digital),
        hd_hybrid: stats(|r| r.benchmarks.hd_hybrid),
    }
}
