//! CSV serialization of sweep results, channel dumps, and codebook dumps.
//!
//! Every floating-point value is written with nine significant digits
//! (`{:.8e}`), which together with the deterministic harness makes whole
//! sweep files byte-identical across runs with the same config.

use std::io::{self, Write};

use fdbeam_core::channel::{ChannelTaps, SubcarrierChannels};
use fdbeam_core::hybrid::Codebook;
use fdbeam_core::CMat;

use crate::run::{SnrAggregate, TrialResult};

pub const TRIALS_HEADER: &str = "scenario,snr_ij_db,snr_ki_db,trial,rate_ij,rate_ki,sum_fd,\
ideal_fd_digital,ideal_fd_hybrid,hd_digital,hd_hybrid";

pub const AGGREGATES_HEADER: &str = "scenario,snr_ij_db,snr_ki_db,stat,rate_ij,rate_ki,sum_fd,\
ideal_fd_digital,ideal_fd_hybrid,hd_digital,hd_hybrid";

pub const CHANNEL_HEADER: &str = "tap_or_subcarrier_index,rx_index,tx_index,real,imag";

pub const CODEBOOK_HEADER: &str = "row,col,real,imag";

/// Nine significant digits: one leading digit plus eight decimals.
pub fn format_sig9(value: f64) -> String {
    format!("{value:.8e}")
}

/// Per-trial rows, one line per (snr point, trial).
pub fn write_trials_csv<W: Write>(
    mut out: W,
    scenario: &str,
    rows: &[TrialResult],
) -> io::Result<()> {
    writeln!(out, "{TRIALS_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            scenario,
            format_sig9(row.snr_ij_db),
            format_sig9(row.snr_ki_db),
            row.trial,
            format_sig9(row.rates.rate_ij),
            format_sig9(row.rates.rate_ki),
            format_sig9(row.rates.sum_fd),
            format_sig9(row.benchmarks.ideal_fd_digital),
            format_sig9(row.benchmarks.ideal_fd_hybrid),
            format_sig9(row.benchmarks.hd_digital),
            format_sig9(row.benchmarks.hd_hybrid),
        )?;
    }
    Ok(())
}

/// Aggregate rows: four stat lines (median, mean, q25, q75) per snr point.
pub fn write_aggregates_csv<W: Write>(
    mut out: W,
    scenario: &str,
    aggregates: &[SnrAggregate],
) -> io::Result<()> {
    writeln!(out, "{AGGREGATES_HEADER}")?;
    for agg in aggregates {
        for (stat, pick) in [("median", 0usize), ("mean", 1), ("q25", 2), ("q75", 3)] {
            let value = |m: &crate::run::MetricStats| match pick {
                0 => m.median,
                1 => m.mean,
                2 => m.q25,
                _ => m.q75,
            };
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                scenario,
                format_sig9(agg.snr_ij_db),
                format_sig9(agg.snr_ki_db),
                stat,
                format_sig9(value(&agg.rate_ij)),
                format_sig9(value(&agg.rate_ki)),
                format_sig9(value(&agg.sum_fd)),
                format_sig9(value(&agg.ideal_fd_digital)),
                format_sig9(value(&agg.ideal_fd_hybrid)),
                format_sig9(value(&agg.hd_digital)),
                format_sig9(value(&agg.hd_hybrid)),
            )?;
        }
    }
    Ok(())
}

fn write_matrix_rows<W: Write>(out: &mut W, index: usize, matrix: &CMat) -> io::Result<()> {
    for rx in 0..matrix.rows() {
        for tx in 0..matrix.cols() {
            let z = matrix[(rx, tx)];
            writeln!(
                out,
                "{index},{rx},{tx},{},{}",
                format_sig9(z.re),
                format_sig9(z.im)
            )?;
        }
    }
    Ok(())
}

/// Tap-domain channel dump: `(tap_or_subcarrier_index, rx, tx, real, imag)`.
pub fn write_taps_csv<W: Write>(mut out: W, taps: &ChannelTaps) -> io::Result<()> {
    writeln!(out, "{CHANNEL_HEADER}")?;
    for (d, tap) in taps.taps().iter().enumerate() {
        write_matrix_rows(&mut out, d, tap)?;
    }
    Ok(())
}

/// Subcarrier-domain channel dump, same format with u as the index.
pub fn write_subcarriers_csv<W: Write>(
    mut out: W,
    channels: &SubcarrierChannels,
) -> io::Result<()> {
    writeln!(out, "{CHANNEL_HEADER}")?;
    for (u, h) in channels.subchannels().iter().enumerate() {
        write_matrix_rows(&mut out, u, h)?;
    }
    Ok(())
}

/// Codebook dump: `(row, col, real, imag)` of every entry.
pub fn write_codebook_csv<W: Write>(mut out: W, codebook: &Codebook) -> io::Result<()> {
    writeln!(out, "{CODEBOOK_HEADER}")?;
    let m = codebook.matrix();
    for row in 0..m.rows() {
        for col in 0..m.cols() {
            let z = m[(row, col)];
            writeln!(
                out,
                "{row},{col},{},{}",
                format_sig9(z.re),
                format_sig9(z.im)
            )?;
        }
    }
    Ok(())
}
