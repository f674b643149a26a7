//! End-to-end beamformer design for the three-node full-duplex link.
//!
//! Node i transmits to j while receiving from k in-band. The half-duplex
//! nodes get per-subcarrier eigenbeamformers hybridized with FS-OMP and are
//! then fixed. At node i the combiner (RF + baseband) and the RF precoder
//! are fixed the same way; the remaining free variable, the baseband
//! precoder on each subcarrier, is set by a regularized zero-forcing solve
//! against the effective self-interference channel so that transmitting to j
//! does not deafen the reception from k. Precoders are normalized to unit
//! per-stream effective power afterwards.

use alloc::vec::Vec;

use crate::channel::SubcarrierChannels;
use crate::error::{Error, Result};
use crate::hybrid::{fs_omp, Codebook, HybridBeamformer};
use crate::linalg::{solve_hpd, CMat, C64};

/// Antenna, RF-chain, and stream counts of one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeDimensions {
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub tx_rf_chains: usize,
    pub rx_rf_chains: usize,
    pub streams: usize,
}

impl NodeDimensions {
    pub fn validate(&self) -> Result<()> {
        if self.tx_antennas < 1
            || self.rx_antennas < 1
            || self.tx_rf_chains < 1
            || self.rx_rf_chains < 1
            || self.streams < 1
        {
            return Err(Error::InvalidArgument(
                "node dimensions must all be positive",
            ));
        }
        if self.tx_rf_chains < self.streams || self.rx_rf_chains < self.streams {
            return Err(Error::InvalidArgument(
                "each side needs at least as many RF chains as streams",
            ));
        }
        Ok(())
    }
}

/// Dimensions of all three nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NetworkDimensions {
    pub node_i: NodeDimensions,
    pub node_j: NodeDimensions,
    pub node_k: NodeDimensions,
}

impl NetworkDimensions {
    pub fn validate(&self) -> Result<()> {
        self.node_i.validate()?;
        self.node_j.validate()?;
        self.node_k.validate()
    }

    /// True when the precoder at i has enough RF chains to zero-force the
    /// self-interference while still serving its own streams
    /// (`tx_rf_chains(i) >= streams(i) + streams(k)`).
    pub fn zf_dimensionality_ok(&self) -> bool {
        self.node_i.tx_rf_chains >= self.node_i.streams + self.node_k.streams
    }
}

/// Link SNRs as linear power ratios (dB conversion belongs to the
/// configuration boundary, not here).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkSnrs {
    pub snr_ij: f64,
    pub snr_ki: f64,
    pub snr_ii: f64,
}

impl LinkSnrs {
    pub fn validate(&self) -> Result<()> {
        for snr in [self.snr_ij, self.snr_ki, self.snr_ii] {
            if !snr.is_finite() || snr < 0.0 {
                return Err(Error::InvalidArgument("SNRs must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

/// RF codebooks for the four hybrid beamformers in the design.
#[derive(Clone, Debug)]
pub struct DesignCodebooks {
    pub tx_i: Codebook,
    pub rx_i: Codebook,
    pub tx_k: Codebook,
    pub rx_j: Codebook,
}

impl DesignCodebooks {
    /// DFT codebooks sized to each array.
    pub fn dft_for(dims: &NetworkDimensions) -> Self {
        DesignCodebooks {
            tx_i: crate::hybrid::dft_codebook(dims.node_i.tx_antennas),
            rx_i: crate::hybrid::dft_codebook(dims.node_i.rx_antennas),
            tx_k: crate::hybrid::dft_codebook(dims.node_k.tx_antennas),
            rx_j: crate::hybrid::dft_codebook(dims.node_j.rx_antennas),
        }
    }
}

/// All four beamformers after the full design pass. `precoder_i` carries the
/// interference-aware baseband matrices; both precoders satisfy the
/// unit-per-stream power normalization.
#[derive(Clone, Debug)]
pub struct DesignOutput {
    pub precoder_k: HybridBeamformer,
    pub combiner_j: HybridBeamformer,
    pub precoder_i: HybridBeamformer,
    pub combiner_i: HybridBeamformer,
    /// False when `tx_rf_chains(i) < streams(i) + streams(k)`; the design
    /// still completes, but the precoder lacks the dimensionality to null
    /// the self-interference completely.
    pub zf_dimensionality_ok: bool,
}

/// First `num_streams` right singular vectors (columns, orthonormal) of the
/// subcarrier channel; the transmit-side eigenbeamformer.
pub fn eigen_precoder(subchannel: &CMat, num_streams: usize) -> Result<CMat> {
    let (rows, cols) = subchannel.shape();
    if num_streams < 1 || num_streams > rows.min(cols) {
        return Err(Error::InvalidArgument(
            "stream count exceeds the channel rank bound",
        ));
    }
    Ok(subchannel.svd().v.cols_range(0, num_streams))
}

/// First `num_streams` left singular vectors of the subcarrier channel; the
/// receive-side eigenbeamformer.
pub fn eigen_combiner(subchannel: &CMat, num_streams: usize) -> Result<CMat> {
    let (rows, cols) = subchannel.shape();
    if num_streams < 1 || num_streams > rows.min(cols) {
        return Err(Error::InvalidArgument(
            "stream count exceeds the channel rank bound",
        ));
    }
    Ok(subchannel.svd().u.cols_range(0, num_streams))
}

fn check_link_shape(
    channel: &SubcarrierChannels,
    num_rx: usize,
    num_tx: usize,
    what: &'static str,
) -> Result<()> {
    if channel.shape() != (num_rx, num_tx) {
        return Err(Error::DimensionMismatch(what));
    }
    Ok(())
}

/// Fix the hybrid beamformers at the half-duplex nodes: the precoder at k
/// and the combiner at j are per-subcarrier eigenbeamformers of their link
/// channels, hybridized with FS-OMP under each node's RF-chain budget. The
/// precoder is normalized to unit per-stream effective power.
pub fn design_hd_nodes(
    h_ki: &SubcarrierChannels,
    h_ij: &SubcarrierChannels,
    dims: &NetworkDimensions,
    codebooks: &DesignCodebooks,
) -> Result<(HybridBeamformer, HybridBeamformer)> {
    dims.validate()?;
    check_link_shape(
        h_ki,
        dims.node_i.rx_antennas,
        dims.node_k.tx_antennas,
        "h_ki shape",
    )?;
    check_link_shape(
        h_ij,
        dims.node_j.rx_antennas,
        dims.node_i.tx_antennas,
        "h_ij shape",
    )?;
    if h_ki.num_subcarriers() != h_ij.num_subcarriers() {
        return Err(Error::DimensionMismatch(
            "subcarrier counts differ across links",
        ));
    }

    let precoder_targets: Vec<CMat> = h_ki
        .subchannels()
        .iter()
        .map(|h| eigen_precoder(h, dims.node_k.streams))
        .collect::<Result<_>>()?;
    let mut precoder_k = fs_omp(&precoder_targets, &codebooks.tx_k, dims.node_k.tx_rf_chains)?;
    precoder_k.bb_per_subcarrier =
        normalize_precoder(&precoder_k.rf, &precoder_k.bb_per_subcarrier)?;

    let combiner_targets: Vec<CMat> = h_ij
        .subchannels()
        .iter()
        .map(|h| eigen_combiner(h, dims.node_i.streams))
        .collect::<Result<_>>()?;
    let combiner_j = fs_omp(&combiner_targets, &codebooks.rx_j, dims.node_j.rx_rf_chains)?;

    Ok((precoder_k, combiner_j))
}

/// Fix the full-duplex node's combiner (RF and baseband) and its RF
/// precoder from the eigenbeamformers of the two desired links; the initial
/// baseband precoder blocks are returned for reference but are replaced by
/// the interference-aware solve in [`design_full`].
pub fn design_fd_node_initial(
    h_ki: &SubcarrierChannels,
    h_ij: &SubcarrierChannels,
    dims: &NetworkDimensions,
    codebooks: &DesignCodebooks,
) -> Result<(HybridBeamformer, CMat, Vec<CMat>)> {
    dims.validate()?;
    check_link_shape(
        h_ki,
        dims.node_i.rx_antennas,
        dims.node_k.tx_antennas,
        "h_ki shape",
    )?;
    check_link_shape(
        h_ij,
        dims.node_j.rx_antennas,
        dims.node_i.tx_antennas,
        "h_ij shape",
    )?;
    if h_ki.num_subcarriers() != h_ij.num_subcarriers() {
        return Err(Error::DimensionMismatch(
            "subcarrier counts differ across links",
        ));
    }

    let combiner_targets: Vec<CMat> = h_ki
        .subchannels()
        .iter()
        .map(|h| eigen_combiner(h, dims.node_k.streams))
        .collect::<Result<_>>()?;
    let combiner_i = fs_omp(&combiner_targets, &codebooks.rx_i, dims.node_i.rx_rf_chains)?;

    let precoder_targets: Vec<CMat> = h_ij
        .subchannels()
        .iter()
        .map(|h| eigen_precoder(h, dims.node_i.streams))
        .collect::<Result<_>>()?;
    let precoder_i = fs_omp(&precoder_targets, &codebooks.tx_i, dims.node_i.tx_rf_chains)?;

    Ok((combiner_i, precoder_i.rf, precoder_i.bb_per_subcarrier))
}

/// Effective channels seen by the free baseband precoder at i, per
/// subcarrier:
///
/// * interference: `H_int[u] = bb_i[u]^* rf_i^* H_ii[u] rf_tx_i`
/// * desired:      `H_des[u] = bb_j[u]^* rf_j^* H_ij[u] rf_tx_i`
pub fn effective_channels(
    combiner_i: &HybridBeamformer,
    combiner_j: &HybridBeamformer,
    precoder_i_rf: &CMat,
    h_ii: &SubcarrierChannels,
    h_ij: &SubcarrierChannels,
) -> Result<(Vec<CMat>, Vec<CMat>)> {
    let subcarriers = h_ii.num_subcarriers();
    if h_ij.num_subcarriers() != subcarriers
        || combiner_i.num_subcarriers() != subcarriers
        || combiner_j.num_subcarriers() != subcarriers
    {
        return Err(Error::DimensionMismatch("subcarrier counts differ"));
    }
    if h_ii.shape().0 != combiner_i.rf.rows()
        || h_ii.shape().1 != precoder_i_rf.rows()
        || h_ij.shape().0 != combiner_j.rf.rows()
        || h_ij.shape().1 != precoder_i_rf.rows()
    {
        return Err(Error::DimensionMismatch(
            "channel and beamformer shapes do not chain",
        ));
    }

    let mut h_int = Vec::with_capacity(subcarriers);
    let mut h_des = Vec::with_capacity(subcarriers);
    for u in 0..subcarriers {
        let wi = combiner_i.effective(u).adjoint();
        h_int.push(&(&wi * &h_ii.subchannels()[u]) * precoder_i_rf);
        let wj = combiner_j.effective(u).adjoint();
        h_des.push(&(&wj * &h_ij.subchannels()[u]) * precoder_i_rf);
    }
    Ok((h_int, h_des))
}

/// Regularized zero-forcing baseband precoder for one subcarrier:
///
/// ```text
/// bb = (H_des^* H_des + (snr_ii/snr_ij) H_int^* H_int
///        + (tx_rf_chains_i / snr_ij) I)^-1 H_des^*
/// ```
///
/// truncated to the first `streams_i` columns. The Gram matrix is Hermitian
/// positive-definite for any finite positive `snr_ij`, trading matched
/// filtering against interference suppression; as the interference-to-signal
/// weight grows the solution is driven into the null space of `H_int`.
pub fn rzf_precoder(
    h_des: &CMat,
    h_int: &CMat,
    snrs: &LinkSnrs,
    tx_rf_chains_i: usize,
    streams_i: usize,
) -> Result<CMat> {
    snrs.validate()?;
    if snrs.snr_ij <= 0.0 {
        return Err(Error::InvalidArgument("rzf precoder requires snr_ij > 0"));
    }
    let nrf = tx_rf_chains_i;
    if h_des.cols() != nrf || h_int.cols() != nrf {
        return Err(Error::DimensionMismatch(
            "effective channels must have tx_rf_chains(i) columns",
        ));
    }
    if streams_i < 1 || streams_i > h_des.rows() {
        return Err(Error::InvalidArgument(
            "stream count exceeds the effective desired channel rows",
        ));
    }

    let mut gram = &h_des.adjoint() * h_des;
    let int_weight = snrs.snr_ii / snrs.snr_ij;
    if int_weight > 0.0 {
        gram = &gram + &(&h_int.adjoint() * h_int).scaled_re(int_weight);
    }
    let ridge = nrf as f64 / snrs.snr_ij;
    for d in 0..nrf {
        gram[(d, d)] += C64::new(ridge, 0.0);
    }
    let solution = solve_hpd(&gram, &h_des.adjoint())
        .map_err(|_| Error::NumericalFailure("regularized Gram solve failed"))?;
    Ok(if solution.cols() == streams_i {
        solution
    } else {
        solution.cols_range(0, streams_i)
    })
}

/// Rescale each baseband column so every effective per-stream beamformer
/// `rf * bb[u]` column has exactly unit norm, which makes the summed
/// effective power over subcarriers equal `U * Ns`.
pub fn normalize_precoder(rf: &CMat, bb_per_subcarrier: &[CMat]) -> Result<Vec<CMat>> {
    let mut out = Vec::with_capacity(bb_per_subcarrier.len());
    for bb in bb_per_subcarrier {
        let effective = rf * bb;
        let mut scaled = bb.clone();
        for col in 0..bb.cols() {
            let norm = libm::sqrt(effective.col_norm_sq(col));
            if !norm.is_finite() || norm <= 1e-150 {
                return Err(Error::DegeneratePrecoder);
            }
            let inv = C64::new(1.0 / norm, 0.0);
            for z in scaled.col_mut(col) {
                *z *= inv;
            }
        }
        out.push(scaled);
    }
    Ok(out)
}

/// The complete design pass: fix the half-duplex nodes, fix the combiner and
/// RF precoder at i, build the effective channels, solve the regularized
/// zero-forcing baseband precoder per subcarrier, and normalize. Fully
/// deterministic in its inputs.
pub fn design_full(
    h_ki: &SubcarrierChannels,
    h_ij: &SubcarrierChannels,
    h_ii: &SubcarrierChannels,
    dims: &NetworkDimensions,
    snrs: &LinkSnrs,
    codebooks: &DesignCodebooks,
) -> Result<DesignOutput> {
    check_link_shape(
        h_ii,
        dims.node_i.rx_antennas,
        dims.node_i.tx_antennas,
        "h_ii shape",
    )?;
    if h_ii.num_subcarriers() != h_ki.num_subcarriers() {
        return Err(Error::DimensionMismatch(
            "subcarrier counts differ across links",
        ));
    }
    let (precoder_k, combiner_j) = design_hd_nodes(h_ki, h_ij, dims, codebooks)?;
    let (combiner_i, precoder_i_rf, _initial_bb) =
        design_fd_node_initial(h_ki, h_ij, dims, codebooks)?;
    let (h_int, h_des) = effective_channels(&combiner_i, &combiner_j, &precoder_i_rf, h_ii, h_ij)?;

    let mut bb = Vec::with_capacity(h_des.len());
    for u in 0..h_des.len() {
        bb.push(rzf_precoder(
            &h_des[u],
            &h_int[u],
            snrs,
            dims.node_i.tx_rf_chains,
            dims.node_i.streams,
        )?);
    }
    let bb = normalize_precoder(&precoder_i_rf, &bb)?;

    Ok(DesignOutput {
        precoder_k,
        combiner_j,
        precoder_i: HybridBeamformer {
            rf: precoder_i_rf,
            bb_per_subcarrier: bb,
        },
        combiner_i,
        zf_dimensionality_ok: dims.zf_dimensionality_ok(),
    })
}
