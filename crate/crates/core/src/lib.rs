//! Frequency-selective hybrid beamforming design for a three-node mmWave
//! full-duplex link, plus the link-level metrics needed to evaluate it.
//!
//! The crate is organized around the processing chain of the simulator:
//!
//! * [`channel`] — clustered frequency-selective MIMO channels, the Rician
//!   self-interference channel with its spherical-wave LOS component, and the
//!   tap-domain to subcarrier-domain DFT conversion.
//! * [`hybrid`] — DFT codebooks, frequency-flat OMP hybrid approximation, and
//!   its frequency-selective stacked extension (FS-OMP).
//! * [`bfc`] — the end-to-end beamformer design: eigenbeamformers at all
//!   nodes, hybridization, effective channels, the regularized zero-forcing
//!   baseband precoder at the full-duplex node, and power normalization.
//! * [`metrics`] — per-subcarrier and aggregate spectral efficiencies for the
//!   two links together with the ideal-FD / half-duplex benchmark rates.
//!
//! Everything is `no_std` (`alloc` only) and pure: all randomness enters
//! through an explicit [`rng::Rng`], so any function is reproducible from its
//! arguments and safe to call from many threads as long as each thread owns
//! its random source.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bfc;
pub mod channel;
mod error;
pub mod hybrid;
pub mod linalg;
pub mod metrics;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};
