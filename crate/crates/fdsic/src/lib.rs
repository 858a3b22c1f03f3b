//! Link-level simulator and library for self-interference cancellation in
//! in-band full-duplex OFDM links.
//!
//! A full-duplex node receives the far node's signal buried under its own
//! transmission, often by tens of dB. After analog isolation has done what
//! it can, a digital canceller removes the rest. This crate implements and
//! compares two of them on a common 64-subcarrier OFDM frame:
//!
//! * [`ls_sic`](ls_sic::ls_sic): the training-based baseline. Estimates both
//!   channels from nonoverlapped preamble slots by least squares, subtracts
//!   the node's own signal, equalizes, and tracks residual phase on pilot
//!   subcarriers.
//! * [`fica_sic`](bss_sic::fica_sic): the blind canceller. Stacks the known
//!   digital reference and the received series per subcarrier, lifts them to
//!   four real coordinates, whitens, separates with a fixed-point
//!   independent-component search, and resolves the leftover scale/rotation
//!   ambiguity from the far node's preamble alone. No pilot overhead, so
//!   every active subcarrier carries payload.
//!
//! Supporting modules: [`ofdm`] (frame layout, modulator, demodulator),
//! [`qam`] (bit mapping), [`impairments`] (transmit powers, cubic PA,
//! IQ imbalance, flat/multipath channels, receiver noise), [`fica`] (the
//! separator core), [`metrics`] (input/output SINR, EVM, BER reports),
//! [`sweep`] (seeded Monte-Carlo harness with CSV output), and
//! [`selftest`] (built-in oracle checks).
//!
//! # Quick start
//!
//! ```
//! use fdsic::bss_sic::{fica_sic, FicaOptions};
//! use fdsic::impairments::{draw_channel, transmit_through, ChannelModel,
//!     ChannelRealization, ImpairmentConfig};
//! use fdsic::ofdm::{build_frame, FrameSpec, NodeId};
//! use fdsic::qam::Modulation;
//! use rand::{Rng, SeedableRng};
//! use rand_chacha::ChaCha8Rng;
//!
//! let spec = FrameSpec::all_data(20);
//! let m = Modulation::Qpsk;
//! let mut rng = ChaCha8Rng::seed_from_u64(5);
//! let mut bits = |rng: &mut ChaCha8Rng| -> Vec<u8> {
//!     (0..spec.payload_bits_len(m)).map(|_| rng.random_range(0..2u8)).collect()
//! };
//! let near = build_frame(&bits(&mut rng), &spec, NodeId::A, m)?;
//! let far = build_frame(&bits(&mut rng), &spec, NodeId::B, m)?;
//! let chan = ChannelRealization {
//!     si: draw_channel(ChannelModel::Flat, &mut rng, &spec),
//!     soi: draw_channel(ChannelModel::Flat, &mut rng, &spec),
//! };
//! let mut imp = ImpairmentConfig::clean(9);
//! imp.noise_power = 1e-4;
//! imp.soi_tx_power_db = -20.0; // interference 20 dB above the wanted signal
//! let tx = transmit_through(&near, &far, &chan, &imp, &spec)?;
//! let out = fica_sic(&tx.x1_grid, &tx.x2_grid, &spec, &FicaOptions::default())?;
//! assert_eq!(out.soi_grid.cols(), spec.n_symbols);
//! # Ok::<(), fdsic::Error>(())
//! ```
//!
//! # Runnable examples
//!
//! One per capability, under `examples/`:
//!
//! * `ofdm_roundtrip`: frame geometry and modulator/demodulator exactness.
//! * `pa_nonlinearity`: cubic PA distortion versus its headroom calibration.
//! * `iq_imbalance`: mirror-subcarrier leakage from an impaired modulator.
//! * `fastica_basics`: the separator core on a toy mixture with known truth.
//! * `ls_cancellation`: one full-duplex trial, training-based canceller.
//! * `fica_cancellation`: the same trial blind, with pipeline diagnostics.
//! * `fica_vs_ls_sweep`: seeded Monte-Carlo comparison across input SINRs.
//! * `frame_length_trend`: payload length versus blind output SINR, linear
//!   and saturating amplifiers.
//!
//! The `fdsic` binary exposes the same machinery as `sweep`, `single`, and
//! `selftest` subcommands.

// Index loops throughout mirror the matrix subscripts in the math they
// implement; iterator rewrites would obscure that correspondence.
#![allow(clippy::needless_range_loop)]

pub mod bss_sic;
pub mod error;
pub mod fica;
pub mod impairments;
mod linalg;
pub mod ls_sic;
pub mod metrics;
pub mod ofdm;
pub mod qam;
pub mod selftest;
pub mod sweep;

pub use bss_sic::{fica_sic, FicaOptions};
pub use error::{Error, Result};
pub use impairments::{transmit_through, ChannelModel, ImpairmentConfig, Transmission};
pub use ls_sic::{ls_sic, SicMethod, SicResult};
pub use metrics::{build_report, SinrReport};
pub use ofdm::{build_frame, ComplexGrid, FrameSpec, NodeId};
pub use qam::Modulation;
pub use sweep::{run_sweep, SweepConfig};
