//! Hybrid approximation of fully-digital beamformers.
//!
//! The RF stage of a hybrid beamformer is frequency-flat, phase-only, and
//! quantized, so candidate RF columns come from a codebook. A fully-digital
//! target is factored into codebook columns plus a least-squares baseband
//! matrix by orthogonal matching pursuit. The frequency-selective variant
//! (FS-OMP) horizontally stacks the per-subcarrier targets so that one RF
//! matrix serves every subcarrier while each subcarrier keeps its own
//! baseband block.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

const TWO_PI: f64 = 2.0 * core::f64::consts::PI;

/// Candidate RF beamformers: constant-amplitude columns with phases
/// quantized to multiples of `phase_resolution`.
#[derive(Clone, Debug)]
pub struct Codebook {
    matrix: CMat,
    phase_resolution: f64,
}

impl Codebook {
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn phase_resolution(&self) -> f64 {
        self.phase_resolution
    }

    pub fn num_antennas(&self) -> usize {
        self.matrix.rows()
    }

    pub fn num_beams(&self) -> usize {
        self.matrix.cols()
    }
}

/// DFT codebook: entry `(m, k) = exp(i * 2 * pi * m * k / n) / sqrt(n)`.
/// Unitary, constant amplitude `1/sqrt(n)`, phase resolution `2 * pi / n`.
pub fn dft_codebook(n: usize) -> Codebook {
    assert!(n >= 1, "codebook needs at least one beam");
    let scale = 1.0 / libm::sqrt(n as f64);
    let matrix = CMat::from_fn(n, n, |m, k| {
        let phase = TWO_PI * ((m * k) % n) as f64 / n as f64;
        C64::new(scale * libm::cos(phase), scale * libm::sin(phase))
    });
    Codebook {
        matrix,
        phase_resolution: TWO_PI / n as f64,
    }
}

/// A frequency-flat RF matrix together with one baseband matrix per
/// subcarrier. Fully-digital beamformers are represented with an identity RF
/// stage.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridBeamformer {
    pub rf: CMat,
    pub bb_per_subcarrier: Vec<CMat>,
}

impl HybridBeamformer {
    /// Wrap per-subcarrier fully-digital beamformers (identity RF stage).
    pub fn fully_digital(per_subcarrier: Vec<CMat>) -> Self {
        let n = per_subcarrier.first().map_or(0, |m| m.rows());
        HybridBeamformer {
            rf: CMat::identity(n),
            bb_per_subcarrier: per_subcarrier,
        }
    }

    pub fn num_subcarriers(&self) -> usize {
        self.bb_per_subcarrier.len()
    }

    /// Effective beamformer on subcarrier `u`: `rf * bb[u]`.
    pub fn effective(&self, u: usize) -> CMat {
        &self.rf * &self.bb_per_subcarrier[u]
    }
}

/// Greedy frequency-flat OMP hybrid approximation of `target` (antennas x
/// columns) as `rf * bb` with `num_rf_chains` codebook columns.
///
/// Each iteration picks the unused codebook column with the largest summed
/// squared correlation against the current residual (ties break to the
/// lowest column index), recomputes `bb` as the least-squares solution
/// `pinv(rf) * target`, and renormalizes the residual to unit Frobenius
/// norm. Already-selected columns are excluded from later iterations.
pub fn omp_hybrid_approx(
    target: &CMat,
    codebook: &Codebook,
    num_rf_chains: usize,
) -> Result<(CMat, CMat)> {
    if num_rf_chains < 1 {
        return Err(Error::InvalidArgument("need at least one RF chain"));
    }
    if num_rf_chains > codebook.num_beams() {
        return Err(Error::InvalidArgument(
            "more RF chains than codebook columns",
        ));
    }
    if target.rows() != codebook.num_antennas() {
        return Err(Error::DimensionMismatch(
            "target rows != codebook antenna count",
        ));
    }

    let beams = codebook.matrix();
    let mut selected: Vec<usize> = Vec::with_capacity(num_rf_chains);
    let mut used = alloc::vec![false; codebook.num_beams()];
    let mut residual = target.clone();
    let mut rf = CMat::zeros(target.rows(), 0);
    let mut bb = CMat::zeros(0, target.cols());

    for _ in 0..num_rf_chains {
        let mut best: Option<(usize, f64)> = None;
        for (beam, &already_used) in used.iter().enumerate() {
            if already_used {
                continue;
            }
            let mut metric = 0.0;
            for k in 0..residual.cols() {
                metric += beams.col_dot(beam, residual.col(k)).norm_sqr();
            }
            // Strict improvement keeps ties on the lowest index.
            if best.is_none_or(|(_, m)| metric > m) {
                best = Some((beam, metric));
            }
        }
        let (beam, _) = best.expect("codebook exhausted before RF chains");
        used[beam] = true;
        selected.push(beam);

        rf = beams.select_cols(&selected);
        bb = &rf.pinv() * target;
        residual = target - &(&rf * &bb);
        let norm = residual.frob_norm();
        if norm > 0.0 {
            residual = residual.scaled_re(1.0 / norm);
        }
    }
    Ok((rf, bb))
}

/// Horizontally stack per-subcarrier matrices in subcarrier order.
pub fn fs_stack(per_subcarrier: &[CMat]) -> Result<CMat> {
    CMat::hcat(per_subcarrier)
}

/// Inverse of [`fs_stack`]: split a stacked matrix back into
/// `num_subcarriers` equally wide blocks.
pub fn fs_unstack(stacked: &CMat, num_subcarriers: usize) -> Result<Vec<CMat>> {
    if num_subcarriers == 0 || !stacked.cols().is_multiple_of(num_subcarriers) {
        return Err(Error::InvalidArgument(
            "stacked column count is not a multiple of the subcarrier count",
        ));
    }
    let block = stacked.cols() / num_subcarriers;
    Ok((0..num_subcarriers)
        .map(|u| stacked.cols_range(u * block, block))
        .collect())
}

/// Frequency-selective OMP hybrid approximation: run [`omp_hybrid_approx`]
/// on the horizontally stacked targets, then unstack the baseband result so
/// each subcarrier gets its own block behind the shared frequency-flat RF
/// matrix.
pub fn fs_omp(
    per_subcarrier: &[CMat],
    codebook: &Codebook,
    num_rf_chains: usize,
) -> Result<HybridBeamformer> {
    let stacked = fs_stack(per_subcarrier)?;
    let (rf, bb_stacked) = omp_hybrid_approx(&stacked, codebook, num_rf_chains)?;
    let bb_per_subcarrier = fs_unstack(&bb_stacked, per_subcarrier.len())?;
    Ok(HybridBeamformer {
        rf,
        bb_per_subcarrier,
    })
}
