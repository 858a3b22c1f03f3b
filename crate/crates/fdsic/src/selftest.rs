//! Built-in oracle suite: quick deterministic checks of the algebraic
//! identities the library is built on, runnable from the command line
//! without the test harness. Each check is independent and reports a
//! measured number alongside its verdict.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bss_sic::{fica_sic, FicaOptions, LiftedMixing};
use crate::fica::{center_and_whiten, contrast_tanh, deflation_fica, RealDataMatrix};
use crate::impairments::{
    apply_pa_nonlinearity, transmit_through, ChannelPath, ChannelRealization, ImpairmentConfig,
    IqImbalance,
};
use crate::ls_sic::ls_sic;
use crate::metrics::compute_osinr;
use crate::ofdm::{build_frame, demodulate_ofdm, FrameSpec, NodeId};
use crate::qam::{demap_bits, map_bits, Modulation};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

fn qam_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut ok = true;
    for m in [Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64] {
        // 1200 divides evenly by 2, 4, and 6 bits per symbol
        let bits = random_bits(&mut rng, 1200);
        let syms = map_bits(&bits, m).unwrap();
        ok &= demap_bits(&syms, m) == bits;
    }
    check("qam-round-trip", ok, "map/demap identity on 3 constellations".into())
}

fn ofdm_round_trip() -> Check {
    let spec = FrameSpec::all_data(12);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bits = random_bits(&mut rng, spec.payload_bits_len(Modulation::Qpsk));
    let frame = build_frame(&bits, &spec, NodeId::B, Modulation::Qpsk).unwrap();
    let rx = demodulate_ofdm(&frame.time_samples, &spec).unwrap();
    let mut worst = 0.0f64;
    for k in 0..spec.n_fft {
        for c in 0..spec.grid_cols() {
            worst = worst.max((rx.get(k, c) - frame.ref_grid.get(k, c)).norm());
        }
    }
    check("ofdm-round-trip", worst < 1e-9, format!("max grid error {worst:.2e}"))
}

fn lifting_algebra() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut draw = || Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a1, a2) = (draw() * 3.0, draw() * 3.0);
        let (s1, s2) = (draw(), draw());
        let lift = LiftedMixing::from_channels(a1, a2);
        let y = lift.apply([s1.re, s1.im, s2.re, s2.im]);
        let r = a1 * s1 + a2 * s2;
        worst = worst.max((y[2] - r.re).abs()).max((y[3] - r.im).abs());
        worst = worst.max((y[0] - s1.re).abs()).max((y[1] - s1.im).abs());
    }
    check("lifting-algebra", worst <= 1e-12, format!("max |lifted - complex| = {worst:.2e}"))
}

fn whitening_invariant() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut x = RealDataMatrix::zeros(4, 300);
    for i in 0..4 {
        for j in 0..300 {
            x.set(i, j, rng.random::<f64>() * (i + 1) as f64 - 0.3);
        }
    }
    let (z, white) = center_and_whiten(&x, 1e-10).unwrap();
    let m = z.cols() as f64;
    let mut worst = 0.0f64;
    for a in 0..white.kept() {
        for b in 0..white.kept() {
            let mut cov = 0.0f64;
            for j in 0..z.cols() {
                cov += z.get(a, j) * z.get(b, j);
            }
            cov /= m;
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((cov - want).abs());
        }
    }
    check("whitening-invariant", worst < 1e-8, format!("max |cov(Z) - I| = {worst:.2e}"))
}

fn tanh_derivative() -> Check {
    let h = 1e-6;
    let mut worst = 0.0f64;
    for i in -40..=40 {
        let u = i as f64 * 0.1;
        let (_, gp) = contrast_tanh(u);
        let (gp_num, _) = contrast_tanh(u + h);
        let (gm, _) = contrast_tanh(u - h);
        let fd = (gp_num - gm) / (2.0 * h);
        worst = worst.max((gp - fd).abs());
    }
    check("tanh-derivative", worst < 1e-6, format!("max |analytic - fd| = {worst:.2e}"))
}

fn binary_fixed_point() -> Check {
    // Walsh-style binary sources (tiled to clear the sample-count floor):
    // an exact finite-sample fixed point
    let pattern: [[f64; 4]; 2] = [[1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0]];
    let mix = [[1.3, 0.4], [-0.2, 0.9]];
    let cols = 16;
    let mut x = RealDataMatrix::zeros(2, cols);
    for j in 0..cols {
        for i in 0..2 {
            x.set(i, j, mix[i][0] * pattern[0][j % 4] + mix[i][1] * pattern[1][j % 4]);
        }
    }
    let (z, _) = center_and_whiten(&x, 1e-12).unwrap();
    let demix = deflation_fica(&z, 2, None, 100, 1e-12).unwrap();
    let worst_iters = demix.iterations.iter().copied().max().unwrap_or(0);
    check(
        "binary-fixed-point",
        demix.converged && worst_iters <= 6,
        format!("converged, worst component took {worst_iters} iterations"),
    )
}

fn pa_linear_headroom() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let x: Vec<Complex64> =
        (0..4096).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let y = apply_pa_nonlinearity(&x, 200.0, 1.0 / 6.0).unwrap();
    let p_sig: f64 = x.iter().map(|v| v.norm_sqr()).sum();
    let p_err: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).norm_sqr()).sum();
    let dbc = 10.0 * (p_err / p_sig).log10();
    check("pa-200db-headroom", dbc < -190.0, format!("distortion at {dbc:.1} dBc"))
}

fn iqi_image_level() -> Check {
    let iqi = IqImbalance { gain_mismatch_db: 0.5, phase_mismatch_deg: 2.0 };
    let (mu, nu) = iqi.coefficients();
    let x = Complex64::new(0.6, -0.2);
    let y = iqi.apply(&[x])[0];
    let ok = (y - (mu * x + nu * x.conj())).norm() < 1e-12;
    let irr = iqi.image_rejection_db();
    check("iqi-image-level", ok && irr < 0.0, format!("IRR {irr:.1} dB"))
}

fn ls_noiseless_exact() -> Check {
    let spec = FrameSpec::piloted(30);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let bits_a = random_bits(&mut rng, spec.payload_bits_len(Modulation::Qpsk));
    let bits_b = random_bits(&mut rng, spec.payload_bits_len(Modulation::Qpsk));
    let fa = build_frame(&bits_a, &spec, NodeId::A, Modulation::Qpsk).unwrap();
    let fb = build_frame(&bits_b, &spec, NodeId::B, Modulation::Qpsk).unwrap();
    let chan = ChannelRealization {
        si: ChannelPath::Flat(Complex64::from_polar(1.0, 0.8)),
        soi: ChannelPath::Flat(Complex64::from_polar(1.0, -1.9)),
    };
    let cfg = ImpairmentConfig::clean(16);
    let tx = transmit_through(&fa, &fb, &chan, &cfg, &spec).unwrap();
    let sic = ls_sic(&tx.x1_grid, &tx.x2_grid, &spec).unwrap();
    let osinr = compute_osinr(&sic.soi_grid, &fb.ref_grid, &spec);
    check("ls-noiseless-exact", osinr >= 80.0 - 1e-9, format!("OSINR {osinr:.1} dB (cap 80)"))
}

fn fica_noiseless_separation() -> Check {
    let spec = FrameSpec::all_data(100);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let bits_a = random_bits(&mut rng, spec.payload_bits_len(Modulation::Qpsk));
    let bits_b = random_bits(&mut rng, spec.payload_bits_len(Modulation::Qpsk));
    let fa = build_frame(&bits_a, &spec, NodeId::A, Modulation::Qpsk).unwrap();
    let fb = build_frame(&bits_b, &spec, NodeId::B, Modulation::Qpsk).unwrap();
    let chan = ChannelRealization {
        si: ChannelPath::Flat(Complex64::from_polar(1.0, 2.4)),
        soi: ChannelPath::Flat(Complex64::from_polar(1.0, 0.3)),
    };
    let mut cfg = ImpairmentConfig::clean(18);
    cfg.soi_tx_power_db = -10.0;
    let tx = transmit_through(&fa, &fb, &chan, &cfg, &spec).unwrap();
    let sic = fica_sic(&tx.x1_grid, &tx.x2_grid, &spec, &FicaOptions::default()).unwrap();
    let osinr = compute_osinr(&sic.soi_grid, &fb.ref_grid, &spec);
    let fallbacks = sic.diag.iter().filter(|d| d.fell_back).count();
    check(
        "fica-noiseless-separation",
        osinr > 60.0 && fallbacks == 0,
        format!("OSINR {osinr:.1} dB, {fallbacks} fallbacks"),
    )
}

fn determinism_probe() -> Check {
    use crate::sweep::{csv_string, run_sweep, SweepConfig};
    let cfg = SweepConfig { trials: 2, frame_len: vec![10], ..SweepConfig::default() };
    let a = csv_string(&run_sweep(&cfg, 1).unwrap());
    let b = csv_string(&run_sweep(&cfg, 2).unwrap());
    check("sweep-determinism", a == b, format!("{} identical CSV bytes", a.len()))
}

/// Run every check; the caller decides how to render and whether to fail.
pub fn run_all() -> Vec<Check> {
    vec![
        qam_round_trip(),
        ofdm_round_trip(),
        lifting_algebra(),
        whitening_invariant(),
        tanh_derivative(),
        binary_fixed_point(),
        pa_linear_headroom(),
        iqi_image_level(),
        ls_noiseless_exact(),
        fica_noiseless_separation(),
        determinism_probe(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_check_passes() {
        let checks = run_all();
        assert_eq!(checks.len(), 11);
        for c in &checks {
            assert!(c.pass, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn check_names_are_unique() {
        let checks = run_all();
        let mut names: Vec<_> = checks.iter().map(|c| c.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), checks.len());
    }
}
