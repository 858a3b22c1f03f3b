//! Training-based least-squares canceller. Channel gains for both paths are
//! estimated from the nonoverlapped long preambles by averaging per-symbol
//! ratios, residual per-symbol rotations are tracked on each node's pilot
//! subcarriers and interpolated across frequency, and the signal of interest
//! is recovered as
//!
//!   soi(k, c) = (x2(k, c) - a1(k) c1(k, c) x1(k, c)) / (a2(k) c2(k, c)).
//!
//! This module also owns the result types shared by both cancellers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ofdm::{lp_rotation, pilot_values, training_sequence, ComplexGrid, FrameSpec, NodeId,
                  PreambleMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SicMethod {
    Fica,
    Ls,
}

impl SicMethod {
    pub fn name(self) -> &'static str {
        match self {
            SicMethod::Fica => "fica",
            SicMethod::Ls => "ls",
        }
    }
}

/// Per-subcarrier health record. The least-squares path only ever sets
/// `unrecoverable`; the blind canceller fills in the rest.
#[derive(Clone, Debug)]
pub struct SubcarrierDiag {
    pub subcarrier: usize,
    pub converged: bool,
    pub iterations: usize,
    pub condition_number: Option<f64>,
    pub complexness: Option<f64>,
    /// Recovered-stream energy in the near node's preamble slot relative to
    /// the far node's slot; a faithful component is quiet when the far node
    /// is quiet, so this should be well below 1.
    pub silent_slot_ratio: Option<f64>,
    pub si_leak: bool,
    pub fell_back: bool,
    pub unrecoverable: bool,
}

impl SubcarrierDiag {
    pub fn clean(subcarrier: usize) -> SubcarrierDiag {
        SubcarrierDiag {
            subcarrier,
            converged: true,
            iterations: 0,
            condition_number: None,
            complexness: None,
            silent_slot_ratio: None,
            si_leak: false,
            fell_back: false,
            unrecoverable: false,
        }
    }
}

/// Canceller output: recovered signal-of-interest symbols, one column per
/// payload OFDM symbol, populated on data subcarriers.
#[derive(Clone, Debug)]
pub struct SicResult {
    pub soi_grid: ComplexGrid,
    pub diag: Vec<SubcarrierDiag>,
    pub method: SicMethod,
}

/// Average of per-symbol ratios `r_l / t_l`: the least-squares gain estimate
/// for observations of a known training sequence through one channel.
pub fn ls_estimate(r: &[Complex64], t: &[Complex64]) -> Result<Complex64> {
    if r.is_empty() || r.len() != t.len() {
        return Err(Error::ZeroInput);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (rl, tl) in r.iter().zip(t) {
        if tl.norm() < 1e-12 {
            return Err(Error::DegenerateTraining);
        }
        acc += rl / tl;
    }
    Ok(acc / r.len() as f64)
}

/// Per-subcarrier channel estimates for both paths, zero on subcarriers a
/// node never trains on.
#[derive(Clone, Debug)]
pub struct LsChannelEstimate {
    pub alpha1: Vec<Complex64>,
    pub alpha2: Vec<Complex64>,
}

/// Estimate both channels from the long preambles. Requires the
/// nonoverlapped preamble layout: a slot where only one node transmits is
/// what makes each estimate see a single channel.
pub fn estimate_channels(x2: &ComplexGrid, spec: &FrameSpec) -> Result<LsChannelEstimate> {
    if spec.preamble_mode != PreambleMode::Nonoverlapped || spec.lp_symbols == 0 {
        return Err(Error::MissingPreamble);
    }
    if x2.n_fft() != spec.n_fft || x2.cols() != spec.grid_cols() {
        return Err(Error::DimensionMismatch(
            "received grid does not match spec".into(),
        ));
    }
    let mut est = LsChannelEstimate {
        alpha1: vec![Complex64::new(0.0, 0.0); spec.n_fft],
        alpha2: vec![Complex64::new(0.0, 0.0); spec.n_fft],
    };
    for (node, out) in [(NodeId::A, &mut est.alpha1), (NodeId::B, &mut est.alpha2)] {
        let training = training_sequence(node, spec);
        let cols = spec.lp_cols(node);
        for k in spec.active_subcarriers() {
            let r: Vec<Complex64> = cols.clone().map(|c| x2.get(k, c)).collect();
            let t: Vec<Complex64> = (0..spec.lp_symbols)
                .map(|l| training[k] * lp_rotation(l))
                .collect();
            out[k] = ls_estimate(&r, &t)?;
        }
    }
    Ok(est)
}

/// Residual per-symbol rotations, interpolated to every subcarrier:
/// `c1[c][k]` multiplies the self-interference estimate in payload symbol
/// `c`, `c2` the far-node channel.
#[derive(Clone, Debug)]
pub struct PilotCorrections {
    pub c1: Vec<Vec<Complex64>>,
    pub c2: Vec<Vec<Complex64>>,
}

impl PilotCorrections {
    /// No-op corrections for every payload symbol.
    pub fn identity(spec: &FrameSpec) -> PilotCorrections {
        let ones = vec![vec![Complex64::new(1.0, 0.0); spec.n_fft]; spec.n_symbols];
        PilotCorrections {
            c1: ones.clone(),
            c2: ones,
        }
    }
}

/// Measure each node's residual rotation on its pilot subcarriers symbol by
/// symbol and linearly interpolate over centered subcarrier positions (held
/// flat beyond the outermost pilots). Specs without pilots get identity
/// corrections: there is nothing to track them with.
pub fn pilot_track(
    x2: &ComplexGrid,
    spec: &FrameSpec,
    est: &LsChannelEstimate,
) -> PilotCorrections {
    let mut corr = PilotCorrections::identity(spec);
    for (node, alpha, out) in [
        (NodeId::A, &est.alpha1, &mut corr.c1),
        (NodeId::B, &est.alpha2, &mut corr.c2),
    ] {
        let pilots = spec.pilot_subcarriers(node);
        if pilots.is_empty() {
            log::warn!(
                "no pilots for node {node:?}; per-symbol tracking disabled"
            );
            continue;
        }
        let values = pilot_values(node, spec);
        // pilot positions in centered order, as interpolation knots
        let knots: Vec<(f64, usize)> = pilots
            .iter()
            .map(|&k| (spec.centered(k) as f64, k))
            .collect();
        for (c_out, col) in spec.data_cols().enumerate() {
            let rho: Vec<Complex64> = knots
                .iter()
                .map(|&(_, k)| {
                    let den = alpha[k] * values[k];
                    if den.norm() < 1e-12 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        x2.get(k, col) / den
                    }
                })
                .collect();
            for k in 0..spec.n_fft {
                out[c_out][k] = interp_centered(&knots, &rho, spec.centered(k) as f64);
            }
        }
    }
    corr
}

fn interp_centered(knots: &[(f64, usize)], rho: &[Complex64], pos: f64) -> Complex64 {
    if pos <= knots[0].0 {
        return rho[0];
    }
    if pos >= knots[knots.len() - 1].0 {
        return rho[rho.len() - 1];
    }
    let i = knots.partition_point(|&(p, _)| p < pos);
    let (p0, _) = knots[i - 1];
    let (p1, _) = knots[i];
    let w = (pos - p0) / (p1 - p0);
    rho[i - 1] * (1.0 - w) + rho[i] * w
}

/// Subtract the reconstructed self-interference and equalize the remainder.
/// Subcarriers whose far-channel estimate collapses are zeroed and flagged
/// instead of dividing by nothing.
pub fn ls_cancel(
    x2: &ComplexGrid,
    x1: &ComplexGrid,
    spec: &FrameSpec,
    est: &LsChannelEstimate,
    corr: &PilotCorrections,
) -> Result<SicResult> {
    if x1.n_fft() != spec.n_fft || x1.cols() != spec.grid_cols() {
        return Err(Error::DimensionMismatch(
            "reference grid does not match spec".into(),
        ));
    }
    let mut soi = ComplexGrid::zeros(spec.n_fft, spec.n_symbols);
    let mut diag: Vec<SubcarrierDiag> = Vec::new();
    for k in spec.data_subcarriers() {
        let mut d = SubcarrierDiag::clean(k);
        for (c_out, col) in spec.data_cols().enumerate() {
            let den = est.alpha2[k] * corr.c2[c_out][k];
            if den.norm() < 1e-12 {
                d.unrecoverable = true;
                continue;
            }
            let cleaned =
                x2.get(k, col) - est.alpha1[k] * corr.c1[c_out][k] * x1.get(k, col);
            soi.set(k, c_out, cleaned / den);
        }
        diag.push(d);
    }
    Ok(SicResult {
        soi_grid: soi,
        diag,
        method: SicMethod::Ls,
    })
}

/// The whole least-squares pipeline: estimate, track, cancel.
pub fn ls_sic(x1: &ComplexGrid, x2: &ComplexGrid, spec: &FrameSpec) -> Result<SicResult> {
    let est = estimate_channels(x2, spec)?;
    let corr = pilot_track(x2, spec, &est);
    ls_cancel(x2, x1, spec, &est, &corr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impairments::{transmit_through, ChannelPath, ChannelRealization, ImpairmentConfig};
    use crate::ofdm::build_frame;
    use crate::qam::Modulation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_frames(spec: &FrameSpec, seed: u64) -> (crate::ofdm::NodeFrame, crate::ofdm::NodeFrame) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bits = || -> Vec<u8> {
            (0..spec.payload_bits_len(Modulation::Qpsk))
                .map(|_| rng.random_range(0..2u8))
                .collect()
        };
        let fa = build_frame(&bits(), spec, NodeId::A, Modulation::Qpsk).unwrap();
        let fb = build_frame(&bits(), spec, NodeId::B, Modulation::Qpsk).unwrap();
        (fa, fb)
    }

    #[test]
    fn ls_estimate_recovers_known_gains() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(
            ls_estimate(&[Complex64::new(2.0, 0.0)], &[one]).unwrap(),
            Complex64::new(2.0, 0.0)
        );
        // averaging two noisy looks splits the difference
        let t = [one, Complex64::new(0.0, 1.0)];
        let a = Complex64::new(0.5, -1.5);
        let r = [a * t[0] * 1.1, a * t[1] * 0.9];
        let est = ls_estimate(&r, &t).unwrap();
        assert!((est - a).norm() < 1e-12);
        assert!(ls_estimate(&[], &[]).is_err());
        assert!(ls_estimate(&[one], &[Complex64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn noiseless_flat_link_cancels_exactly() {
        let spec = FrameSpec::piloted(10);
        let (fa, fb) = random_frames(&spec, 1);
        let chan = ChannelRealization {
            si: ChannelPath::Flat(Complex64::from_polar(1.0, 2.2)),
            soi: ChannelPath::Flat(Complex64::from_polar(1.0, -0.4)),
        };
        let mut cfg = ImpairmentConfig::clean(0);
        cfg.si_tx_power_db = 10.0;
        let tx = transmit_through(&fa, &fb, &chan, &cfg, &spec).unwrap();

        let est = estimate_channels(&tx.x2_grid, &spec).unwrap();
        for k in spec.active_subcarriers() {
            assert!((est.alpha1[k] - tx.genie.alpha1_eff[k]).norm() < 1e-10);
            assert!((est.alpha2[k] - tx.genie.alpha2_eff[k]).norm() < 1e-10);
        }
        let corr = pilot_track(&tx.x2_grid, &spec, &est);
        // static noiseless link: every tracked rotation is exactly one
        for c in 0..spec.n_symbols {
            for k in spec.data_subcarriers() {
                assert!((corr.c1[c][k] - Complex64::new(1.0, 0.0)).norm() < 1e-10);
                assert!((corr.c2[c][k] - Complex64::new(1.0, 0.0)).norm() < 1e-10);
            }
        }
        let out = ls_cancel(&tx.x2_grid, &tx.x1_grid, &spec, &est, &corr).unwrap();
        for (c_out, col) in spec.data_cols().enumerate() {
            for k in spec.data_subcarriers() {
                assert!(
                    (out.soi_grid.get(k, c_out) - fb.ref_grid.get(k, col)).norm() < 1e-9
                );
            }
        }
        assert!(out.diag.iter().all(|d| !d.unrecoverable));
    }

    #[test]
    fn estimate_variance_matches_noise_over_preamble_energy() {
        // alpha_hat = alpha + mean(n_l / t_l): with unit-modulus training and
        // L looks, the estimator variance is noise_power / L
        let alpha = Complex64::new(0.8, -0.6);
        let l = 4usize;
        let noise_power: f64 = 0.01;
        let t: Vec<Complex64> = (0..l)
            .map(|i| Complex64::from_polar(1.0, 0.9 * i as f64) )
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let sigma = (noise_power / 2.0).sqrt();
        let trials = 10_000;
        let mut mean = Complex64::new(0.0, 0.0);
        let mut var = 0.0;
        let mut ests = Vec::with_capacity(trials);
        for _ in 0..trials {
            let r: Vec<Complex64> = t
                .iter()
                .map(|&tl| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    alpha * tl + Complex64::new(re * sigma, im * sigma)
                })
                .collect();
            let e = ls_estimate(&r, &t).unwrap();
            mean += e;
            ests.push(e);
        }
        mean /= trials as f64;
        for e in &ests {
            var += (e - mean).norm_sqr();
        }
        var /= trials as f64;
        let want = noise_power / l as f64;
        assert!(
            (var / want - 1.0).abs() < 0.08,
            "variance {var}, predicted {want}"
        );
        // unbiased within three standard errors of the trial mean
        let se = (var / trials as f64).sqrt();
        assert!((mean - alpha).norm() < 3.0 * se, "bias {}", (mean - alpha).norm());
    }

    #[test]
    fn pilot_tracking_follows_common_phase_drift() {
        let spec = FrameSpec::piloted(20);
        let (fa, fb) = random_frames(&spec, 2);
        let a1 = Complex64::from_polar(1.0, 0.5);
        let a2 = Complex64::from_polar(1.0, -1.0);
        // hand-build a received grid where the self-interference path picks
        // up a per-symbol rotation after the preamble
        let mut x2 = ComplexGrid::zeros(spec.n_fft, spec.grid_cols());
        let drift = |c_out: usize| Complex64::from_polar(1.0, 0.02 * (c_out as f64 + 1.0));
        for k in 0..spec.n_fft {
            for col in 0..spec.grid_cols() {
                let rho = if col >= spec.data_cols().start {
                    drift(col - spec.data_cols().start)
                } else {
                    Complex64::new(1.0, 0.0)
                };
                let v = a1 * rho * fa.ref_grid.get(k, col) + a2 * fb.ref_grid.get(k, col);
                x2.set(k, col, v);
            }
        }
        let est = estimate_channels(&x2, &spec).unwrap();
        assert!((est.alpha1[1] - a1).norm() < 1e-10);

        let corr = pilot_track(&x2, &spec, &est);
        for c_out in 0..spec.n_symbols {
            for k in spec.data_subcarriers() {
                assert!(
                    (corr.c1[c_out][k] - drift(c_out)).norm() < 1e-9,
                    "tracking missed the drift at symbol {c_out}"
                );
            }
        }
        let out = ls_cancel(&x2, &fa.ref_grid, &spec, &est, &corr).unwrap();
        for (c_out, col) in spec.data_cols().enumerate() {
            for k in spec.data_subcarriers() {
                assert!((out.soi_grid.get(k, c_out) - fb.ref_grid.get(k, col)).norm() < 1e-9);
            }
        }

        // without tracking, the drift leaks self-interference into the output
        let ident = PilotCorrections::identity(&spec);
        let raw = ls_cancel(&x2, &fa.ref_grid, &spec, &est, &ident).unwrap();
        let mut worst = 0.0f64;
        for (c_out, col) in spec.data_cols().enumerate() {
            for k in spec.data_subcarriers() {
                worst = worst.max((raw.soi_grid.get(k, c_out) - fb.ref_grid.get(k, col)).norm());
            }
        }
        assert!(worst > 0.05, "drift should hurt the untracked canceller");
    }

    #[test]
    fn pilotless_spec_gets_identity_corrections() {
        let spec = FrameSpec::all_data(5);
        let (fa, fb) = random_frames(&spec, 3);
        let chan = ChannelRealization {
            si: ChannelPath::Flat(Complex64::from_polar(1.0, 1.0)),
            soi: ChannelPath::Flat(Complex64::from_polar(1.0, 2.0)),
        };
        let tx = transmit_through(&fa, &fb, &chan, &ImpairmentConfig::clean(9), &spec).unwrap();
        let est = estimate_channels(&tx.x2_grid, &spec).unwrap();
        let corr = pilot_track(&tx.x2_grid, &spec, &est);
        for c in 0..spec.n_symbols {
            for k in 0..spec.n_fft {
                assert_eq!(corr.c1[c][k], Complex64::new(1.0, 0.0));
                assert_eq!(corr.c2[c][k], Complex64::new(1.0, 0.0));
            }
        }
        // the pipeline still cancels exactly in the noiseless static case
        let out = ls_sic(&tx.x1_grid, &tx.x2_grid, &spec).unwrap();
        for (c_out, col) in spec.data_cols().enumerate() {
            for k in spec.data_subcarriers() {
                assert!((out.soi_grid.get(k, c_out) - fb.ref_grid.get(k, col)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn dead_far_channel_is_flagged_not_divided() {
        let spec = FrameSpec::piloted(3);
        let (fa, fb) = random_frames(&spec, 4);
        let a1 = Complex64::new(1.0, 0.0);
        let mut x2 = ComplexGrid::zeros(spec.n_fft, spec.grid_cols());
        // node B's path nulled on one subcarrier only
        let k_dead = spec.data_subcarriers()[7];
        for k in 0..spec.n_fft {
            let a2 = if k == k_dead {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, 1.0)
            };
            for col in 0..spec.grid_cols() {
                x2.set(k, col, a1 * fa.ref_grid.get(k, col) + a2 * fb.ref_grid.get(k, col));
            }
        }
        let est = estimate_channels(&x2, &spec).unwrap();
        let corr = pilot_track(&x2, &spec, &est);
        let out = ls_cancel(&x2, &fa.ref_grid, &spec, &est, &corr).unwrap();
        let dead: Vec<&SubcarrierDiag> = out.diag.iter().filter(|d| d.unrecoverable).collect();
        assert_eq!(dead.len(), 1);
        assert_eq!(dead[0].subcarrier, k_dead);
        for c in 0..spec.n_symbols {
            assert_eq!(out.soi_grid.get(k_dead, c), Complex64::new(0.0, 0.0));
        }
        // everything else still reconstructs
        for (c_out, col) in spec.data_cols().enumerate() {
            for k in spec.data_subcarriers() {
                if k != k_dead {
                    assert!((out.soi_grid.get(k, c_out) - fb.ref_grid.get(k, col)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn overlapped_preamble_is_rejected() {
        let mut spec = FrameSpec::piloted(2);
        spec.preamble_mode = PreambleMode::Overlapped;
        let x2 = ComplexGrid::zeros(spec.n_fft, spec.grid_cols());
        assert!(matches!(
            estimate_channels(&x2, &spec),
            Err(Error::MissingPreamble)
        ));
    }
}
