//! Spectral-efficiency evaluation for the two links, plus the ideal
//! full-duplex and time-shared half-duplex benchmark rates.
//!
//! Rates are Gaussian mutual information in bps/Hz with interference treated
//! as noise, evaluated per subcarrier and averaged. With effective combiner
//! `W`, effective precoder `F`, and Hermitian noise-plus-interference
//! covariance `Q` at the combiner input, the per-subcarrier rate is
//!
//! ```text
//! log2 det(I + snr * (W^*HF)(W^*HF)^* (W^* Q W)^-1)
//!       = log2 det(W^* Q W + snr * (W^*HF)(W^*HF)^*) - log2 det(W^* Q W)
//! ```
//!
//! computed as the difference of two Cholesky log-determinants, which keeps
//! every quantity Hermitian positive-definite and makes the rate invariant to
//! invertible combiner rescalings.

use alloc::vec::Vec;

use crate::bfc::{
    design_fd_node_initial, design_hd_nodes, normalize_precoder, DesignCodebooks, DesignOutput,
    LinkSnrs, NetworkDimensions,
};
use crate::channel::SubcarrierChannels;
use crate::error::{Error, Result};
use crate::hybrid::HybridBeamformer;
use crate::linalg::{cholesky, log2_det_from_cholesky, CMat};

/// Relative pivot floor used to classify a combiner Gram as rank-deficient.
const COMBINER_RANK_TOLERANCE: f64 = 1e-13;

/// Achieved spectral efficiencies of one trial, bps/Hz.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    /// Subcarrier-averaged rate of the i -> j link.
    pub rate_ij: f64,
    /// Subcarrier-averaged rate of the k -> i link.
    pub rate_ki: f64,
    /// Sum of the two, the full-duplex figure of merit.
    pub sum_fd: f64,
    pub per_subcarrier_ij: Vec<f64>,
    pub per_subcarrier_ki: Vec<f64>,
}

impl RateReport {
    /// Same report with every rate scaled by the cyclic-prefix overhead
    /// factor. Off by default everywhere; plotted numbers are raw
    /// per-subcarrier averages.
    pub fn with_cp_overhead(&self, cyclic_prefix_len: usize) -> RateReport {
        let factor = cp_overhead_factor(self.per_subcarrier_ij.len(), cyclic_prefix_len);
        RateReport {
            rate_ij: self.rate_ij * factor,
            rate_ki: self.rate_ki * factor,
            sum_fd: self.sum_fd * factor,
            per_subcarrier_ij: self.per_subcarrier_ij.iter().map(|r| r * factor).collect(),
            per_subcarrier_ki: self.per_subcarrier_ki.iter().map(|r| r * factor).collect(),
        }
    }
}

/// Rate multiplier accounting for the cyclic prefix: `U / (U + N_CP)`.
pub fn cp_overhead_factor(num_subcarriers: usize, cyclic_prefix_len: usize) -> f64 {
    num_subcarriers as f64 / (num_subcarriers + cyclic_prefix_len) as f64
}

/// Benchmark sum rates: interference-free full-duplex operation with
/// fully-digital and with hybrid eigenbeamformers, and the corresponding
/// equal-time-sharing half-duplex rates (exactly half of each).
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkReport {
    pub ideal_fd_digital: f64,
    pub ideal_fd_hybrid: f64,
    pub hd_digital: f64,
    pub hd_hybrid: f64,
}

fn validate_snr(snr: f64) -> Result<()> {
    if !snr.is_finite() || snr < 0.0 {
        return Err(Error::InvalidArgument("SNR must be finite and >= 0"));
    }
    Ok(())
}

/// Interference-free link rate: per-subcarrier rates and their average.
/// This is the i -> j rate; with `snr_ii = 0` the k -> i rate reduces to the
/// same form.
pub fn rate_ij(
    h: &SubcarrierChannels,
    precoder: &HybridBeamformer,
    combiner: &HybridBeamformer,
    snr: f64,
) -> Result<(Vec<f64>, f64)> {
    validate_snr(snr)?;
    if precoder.num_subcarriers() != h.num_subcarriers()
        || combiner.num_subcarriers() != h.num_subcarriers()
    {
        return Err(Error::DimensionMismatch("subcarrier counts differ"));
    }
    let mut per_subcarrier = Vec::with_capacity(h.num_subcarriers());
    for (u, h_u) in h.subchannels().iter().enumerate() {
        let w = combiner.effective(u);
        let f = precoder.effective(u);
        if w.rows() != h_u.rows() || f.rows() != h_u.cols() {
            return Err(Error::DimensionMismatch(
                "beamformers do not chain with the channel",
            ));
        }
        let a = &(&w.adjoint() * h_u) * &f;
        let b = &w.adjoint() * &w;
        per_subcarrier.push(log_det_rate(&a, &b, snr)?);
    }
    let avg = per_subcarrier.iter().sum::<f64>() / per_subcarrier.len() as f64;
    Ok((per_subcarrier, avg))
}

/// Rate of the k -> i link under self-interference: the combiner at i sees
/// the k -> i signal plus the leakage of i's own transmission through the
/// SI channel, which enters the noise covariance.
pub fn rate_ki(
    h_ki: &SubcarrierChannels,
    h_ii: &SubcarrierChannels,
    precoder_k: &HybridBeamformer,
    combiner_i: &HybridBeamformer,
    precoder_i: &HybridBeamformer,
    snr_ki: f64,
    snr_ii: f64,
) -> Result<(Vec<f64>, f64)> {
    validate_snr(snr_ki)?;
    validate_snr(snr_ii)?;
    if h_ki.num_subcarriers() != h_ii.num_subcarriers()
        || precoder_k.num_subcarriers() != h_ki.num_subcarriers()
        || combiner_i.num_subcarriers() != h_ki.num_subcarriers()
        || precoder_i.num_subcarriers() != h_ki.num_subcarriers()
    {
        return Err(Error::DimensionMismatch("subcarrier counts differ"));
    }
    let mut per_subcarrier = Vec::with_capacity(h_ki.num_subcarriers());
    for u in 0..h_ki.num_subcarriers() {
        let h_u = &h_ki.subchannels()[u];
        let w = combiner_i.effective(u);
        let f_k = precoder_k.effective(u);
        if w.rows() != h_u.rows() || f_k.rows() != h_u.cols() {
            return Err(Error::DimensionMismatch(
                "beamformers do not chain with the channel",
            ));
        }
        let a = &(&w.adjoint() * h_u) * &f_k;
        let mut q = &w.adjoint() * &w;
        if snr_ii > 0.0 {
            let si_u = &h_ii.subchannels()[u];
            let f_i = precoder_i.effective(u);
            if w.rows() != si_u.rows() || f_i.rows() != si_u.cols() {
                return Err(Error::DimensionMismatch(
                    "beamformers do not chain with the SI channel",
                ));
            }
            let z = &(&w.adjoint() * si_u) * &f_i;
            q = &q + &(&z * &z.adjoint()).scaled_re(snr_ii);
        }
        per_subcarrier.push(log_det_rate(&a, &q, snr_ki)?);
    }
    let avg = per_subcarrier.iter().sum::<f64>() / per_subcarrier.len() as f64;
    Ok((per_subcarrier, avg))
}

/// `log2 det(Q + snr * A A^*) - log2 det(Q)` with a rank check on `Q` (the
/// sandwiched noise covariance; rank deficiency means a degenerate
/// combiner).
fn log_det_rate(a: &CMat, q: &CMat, snr: f64) -> Result<f64> {
    let chol_q = cholesky(q, COMBINER_RANK_TOLERANCE).map_err(|_| Error::DegenerateCombiner)?;
    let signal = a * &a.adjoint();
    let total = q + &signal.scaled_re(snr);
    let chol_total = cholesky(&total, 0.0).map_err(|_| {
        Error::NumericalFailure("signal-plus-noise covariance lost positive definiteness")
    })?;
    Ok(log2_det_from_cholesky(&chol_total) - log2_det_from_cholesky(&chol_q))
}

/// Achieved rates of a completed design on one channel realization.
pub fn evaluate_rates(
    h_ij: &SubcarrierChannels,
    h_ki: &SubcarrierChannels,
    h_ii: &SubcarrierChannels,
    design: &DesignOutput,
    snrs: &LinkSnrs,
) -> Result<RateReport> {
    let (per_subcarrier_ij, avg_ij) =
        rate_ij(h_ij, &design.precoder_i, &design.combiner_j, snrs.snr_ij)?;
    let (per_subcarrier_ki, avg_ki) = rate_ki(
        h_ki,
        h_ii,
        &design.precoder_k,
        &design.combiner_i,
        &design.precoder_i,
        snrs.snr_ki,
        snrs.snr_ii,
    )?;
    Ok(RateReport {
        rate_ij: avg_ij,
        rate_ki: avg_ki,
        sum_fd: avg_ij + avg_ki,
        per_subcarrier_ij,
        per_subcarrier_ki,
    })
}

/// The four benchmark curves for one channel realization.
///
/// Ideal full-duplex assumes the two links run simultaneously without any
/// self-interference, once with fully-digital per-subcarrier eigenbeamformers
/// and once with their FS-OMP hybrid approximations (precoders normalized).
/// Half-duplex assumes equal time-sharing of the medium, so each HD rate is
/// exactly half of the corresponding ideal FD rate.
pub fn benchmarks(
    h_ki: &SubcarrierChannels,
    h_ij: &SubcarrierChannels,
    dims: &NetworkDimensions,
    snrs: &LinkSnrs,
    codebooks: &DesignCodebooks,
) -> Result<BenchmarkReport> {
    snrs.validate()?;
    let ns_i = dims.node_i.streams;
    let ns_k = dims.node_k.streams;

    // Fully digital: the eigenbeamformers themselves (orthonormal columns,
    // so the per-stream power normalization already holds).
    let mut pre_k = Vec::new();
    let mut com_i = Vec::new();
    for h in h_ki.subchannels() {
        let svd = h.svd();
        pre_k.push(svd.v.cols_range(0, ns_k));
        com_i.push(svd.u.cols_range(0, ns_k));
    }
    let mut pre_i = Vec::new();
    let mut com_j = Vec::new();
    for h in h_ij.subchannels() {
        let svd = h.svd();
        pre_i.push(svd.v.cols_range(0, ns_i));
        com_j.push(svd.u.cols_range(0, ns_i));
    }
    let digital = |mats: Vec<CMat>| HybridBeamformer::fully_digital(mats);
    let (_, ij_digital) = rate_ij(h_ij, &digital(pre_i), &digital(com_j), snrs.snr_ij)?;
    let (_, ki_digital) = rate_ij(h_ki, &digital(pre_k), &digital(com_i), snrs.snr_ki)?;
    let ideal_fd_digital = ij_digital + ki_digital;

    // Hybrid: the same construction the design itself fixes.
    let (precoder_k, combiner_j) = design_hd_nodes(h_ki, h_ij, dims, codebooks)?;
    let (combiner_i, precoder_i_rf, precoder_i_bb) =
        design_fd_node_initial(h_ki, h_ij, dims, codebooks)?;
    let precoder_i = HybridBeamformer {
        bb_per_subcarrier: normalize_precoder(&precoder_i_rf, &precoder_i_bb)?,
        rf: precoder_i_rf,
    };
    let (_, ij_hybrid) = rate_ij(h_ij, &precoder_i, &combiner_j, snrs.snr_ij)?;
    let (_, ki_hybrid) = rate_ij(h_ki, &precoder_k, &combiner_i, snrs.snr_ki)?;
    let ideal_fd_hybrid = ij_hybrid + ki_hybrid;

    Ok(BenchmarkReport {
        ideal_fd_digital,
        ideal_fd_hybrid,
        hd_digital: ideal_fd_digital / 2.0,
        hd_hybrid: ideal_fd_hybrid / 2.0,
    })
}
