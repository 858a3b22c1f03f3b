//! One full-duplex trial with the training-based least-squares canceller.
//! Both nodes transmit a whole frame; the receiving node estimates the
//! self-interference and far channels from the preamble slots, subtracts
//! its own signal, equalizes, and the report compares what went in with
//! what came out.

use fdsic::impairments::{draw_channel, transmit_through, ChannelModel, ChannelRealization, ImpairmentConfig};
use fdsic::ls_sic::{ls_sic, SicMethod};
use fdsic::metrics::build_report;
use fdsic::ofdm::{build_frame, FrameSpec, NodeId};
use fdsic::qam::Modulation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> fdsic::Result<()> {
    let spec = FrameSpec::piloted(50);
    let m = Modulation::Qpsk;
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    let bits = |rng: &mut ChaCha8Rng| -> Vec<u8> {
        (0..spec.payload_bits_len(m)).map(|_| rng.random_range(0..2u8)).collect()
    };
    let frame_a = build_frame(&bits(&mut rng), &spec, NodeId::A, m)?;
    let frame_b = build_frame(&bits(&mut rng), &spec, NodeId::B, m)?;

    let chan = ChannelRealization {
        si: draw_channel(ChannelModel::Flat, &mut rng, &spec),
        soi: draw_channel(ChannelModel::Flat, &mut rng, &spec),
    };

    // The self-interference arrives 30 dB above the wanted signal: the
    // near transmitter is right next to its own receiver.
    let mut imp = ImpairmentConfig::clean(99);
    imp.noise_power = 1e-4;
    imp.si_tx_power_db = 0.0;
    imp.soi_tx_power_db = -30.0;
    let tx = transmit_through(&frame_a, &frame_b, &chan, &imp, &spec)?;

    let out = ls_sic(&tx.x1_grid, &tx.x2_grid, &spec)?;
    let report = build_report(
        &out.soi_grid,
        &frame_b,
        &tx.genie,
        &spec,
        m,
        SicMethod::Ls,
        42,
        -30.0,
        0.0,
        200.0,
    )?;

    println!("least-squares canceller, one trial");
    println!("  input SINR      {:+7.2} dB (before cancellation)", report.isinr_db);
    println!("  output SINR     {:+7.2} dB (after)", report.osinr_db);
    println!("  cancellation    {:+7.2} dB", report.sic_db);
    println!("  EVM             {:+7.2} dB", report.evm_db);
    println!("  BER             {:8.2e} over {} bits", report.ber, report.n_bits);

    let bad = out.diag.iter().filter(|d| d.unrecoverable).count();
    println!("  unrecoverable subcarriers: {bad}");
    Ok(())
}
