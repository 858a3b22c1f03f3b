//! Analog front-end impairments and the over-the-air path between the two
//! nodes. The chain per transmitter is: digital frame -> power scaling ->
//! IQ modulator imbalance -> power-amplifier nonlinearity -> multipath (or
//! flat) channel, with receiver AWGN added on the sum.
//!
//! `transmit_through` runs the whole chain and also keeps noise-free copies
//! of each path plus per-subcarrier effective channel fits. These genie
//! records never leak into the cancellers; they exist so metrics can compute
//! input SINR and so tests can pin exactness in the noiseless case.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::ofdm::{demodulate_ofdm, ComplexGrid, FrameSpec, NodeFrame};

// ---------------------------------------------------------------------------
// IQ imbalance
// ---------------------------------------------------------------------------

/// Transmit IQ modulator mismatch. A gain mismatch `g` (linear, from dB) and
/// phase mismatch `phi` between the I and Q rails act on a complex baseband
/// signal as `y = mu*x + nu*conj(x)` with
///
///   mu = (1 + g*exp(j*phi)) / 2,    nu = (1 - g*exp(j*phi)) / 2.
///
/// The conjugate term shows up as mirror-subcarrier leakage after the FFT,
/// which is what makes IQ imbalance hostile to per-subcarrier cancellers.
#[derive(Clone, Copy, Debug)]
pub struct IqImbalance {
    pub gain_mismatch_db: f64,
    pub phase_mismatch_deg: f64,
}

impl IqImbalance {
    pub fn coefficients(&self) -> (Complex64, Complex64) {
        let g = 10f64.powf(self.gain_mismatch_db / 20.0);
        let phi = self.phase_mismatch_deg.to_radians();
        let rot = Complex64::from_polar(g, phi);
        let one = Complex64::new(1.0, 0.0);
        ((one + rot) / 2.0, (one - rot) / 2.0)
    }

    /// Image rejection ratio 10*log10(|nu|^2/|mu|^2), in dB (negative for
    /// small mismatch).
    pub fn image_rejection_db(&self) -> f64 {
        let (mu, nu) = self.coefficients();
        10.0 * (nu.norm_sqr() / mu.norm_sqr()).log10()
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let (mu, nu) = self.coefficients();
        x.iter().map(|&v| mu * v + nu * v.conj()).collect()
    }
}

// ---------------------------------------------------------------------------
// Power amplifier
// ---------------------------------------------------------------------------

/// Memoryless third-order PA model `y = x + c3 * x * |x|^2`.
///
/// `hpr3_db` is the headroom power ratio to third-order distortion: c3 is
/// calibrated so that a circularly Gaussian input at `ref_power` produces a
/// raw cubic-term power exactly `hpr3_db` below the signal power (the
/// sixth-moment factor E|x|^6 = 6 P^3 is what the sqrt(6) absorbs). 200 dB
/// is indistinguishable from a linear PA; 35 dB is a heavily driven one.
/// `f64::INFINITY` disables the model exactly.
pub fn apply_pa_nonlinearity(
    x: &[Complex64],
    hpr3_db: f64,
    ref_power: f64,
) -> Result<Vec<Complex64>> {
    if hpr3_db.is_infinite() && hpr3_db > 0.0 {
        return Ok(x.to_vec());
    }
    if !(0.0..=200.0).contains(&hpr3_db) {
        return Err(Error::InvalidConfig(format!(
            "hpr3_db must be in [0, 200] or infinite, got {hpr3_db}"
        )));
    }
    if ref_power <= 0.0 || !ref_power.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "PA reference power must be positive and finite, got {ref_power}"
        )));
    }
    let c3 = 10f64.powf(-hpr3_db / 20.0) / (6f64.sqrt() * ref_power);
    Ok(x.iter().map(|&v| v + c3 * v * v.norm_sqr()).collect())
}

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum ChannelPath {
    /// Single complex gain, identical on every subcarrier.
    Flat(Complex64),
    /// FIR tap vector h[0..L]; frequency response sum_l h[l] e^{-j2 pi k l/N}.
    Multipath(Vec<Complex64>),
}

impl ChannelPath {
    pub fn gain(&self, k: usize, n_fft: usize) -> Complex64 {
        match self {
            ChannelPath::Flat(g) => *g,
            ChannelPath::Multipath(taps) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (l, h) in taps.iter().enumerate() {
                    let phase = -2.0 * std::f64::consts::PI * (k as f64) * (l as f64)
                        / (n_fft as f64);
                    acc += h * Complex64::from_polar(1.0, phase);
                }
                acc
            }
        }
    }

    /// Causal FIR filtering, output truncated to the input length. Samples
    /// before the frame are taken as zero, which the short preamble absorbs.
    pub fn filter(&self, x: &[Complex64]) -> Vec<Complex64> {
        match self {
            ChannelPath::Flat(g) => x.iter().map(|&v| g * v).collect(),
            ChannelPath::Multipath(taps) => {
                let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
                for (l, h) in taps.iter().enumerate() {
                    for n in l..x.len() {
                        y[n] += h * x[n - l];
                    }
                }
                y
            }
        }
    }

    pub fn n_taps(&self) -> usize {
        match self {
            ChannelPath::Flat(_) => 1,
            ChannelPath::Multipath(taps) => taps.len(),
        }
    }
}

/// The two propagation paths seen by the receiving node: its own
/// self-interference loopback and the far node's signal of interest.
#[derive(Clone, Debug)]
pub struct ChannelRealization {
    pub si: ChannelPath,
    pub soi: ChannelPath,
}

impl ChannelRealization {
    pub fn validate(&self, spec: &FrameSpec) -> Result<()> {
        for (name, path) in [("si", &self.si), ("soi", &self.soi)] {
            if path.n_taps() == 0 || path.n_taps() > spec.cp_len.max(1) {
                return Err(Error::InvalidConfig(format!(
                    "{name} channel has {} taps, cyclic prefix supports at most {}",
                    path.n_taps(),
                    spec.cp_len.max(1)
                )));
            }
            for k in spec.active_subcarriers() {
                let g = path.gain(k, spec.n_fft);
                if !g.re.is_finite() || !g.im.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "{name} channel gain is not finite on subcarrier {k}"
                    )));
                }
                if g.norm() < 1e-12 {
                    return Err(Error::InvalidConfig(format!(
                        "{name} channel is degenerate on subcarrier {k}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelModel {
    /// Unit-magnitude random-phase flat gain.
    Flat,
    /// The given number of i.i.d. Rayleigh taps with unit total mean power.
    Multipath(usize),
}

/// Draw one propagation path. Multipath draws are rejected and retried while
/// any active subcarrier fades below -60 dB, so every realization is usable
/// by a per-subcarrier canceller; after 100 attempts the last draw is kept.
pub fn draw_channel(model: ChannelModel, rng: &mut ChaCha8Rng, spec: &FrameSpec) -> ChannelPath {
    match model {
        ChannelModel::Flat => {
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            ChannelPath::Flat(Complex64::from_polar(1.0, theta))
        }
        ChannelModel::Multipath(n_taps) => {
            let n_taps = n_taps.max(1);
            let sigma = (1.0 / (2.0 * n_taps as f64)).sqrt();
            for attempt in 0..100 {
                let taps: Vec<Complex64> = (0..n_taps)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(re * sigma, im * sigma)
                    })
                    .collect();
                let path = ChannelPath::Multipath(taps);
                let deep_fade = spec
                    .active_subcarriers()
                    .iter()
                    .any(|&k| path.gain(k, spec.n_fft).norm() < 1e-3);
                if !deep_fade || attempt == 99 {
                    if deep_fade {
                        log::warn!("kept a deeply faded channel after 100 draws");
                    }
                    return path;
                }
            }
            unreachable!("loop always returns by the last attempt")
        }
    }
}

// ---------------------------------------------------------------------------
// End-to-end transmission
// ---------------------------------------------------------------------------

/// Front-end and link settings for one trial.
#[derive(Clone, Debug)]
pub struct ImpairmentConfig {
    /// Receiver noise power per complex sample (and per subcarrier, since
    /// the DFT is unitary).
    pub noise_power: f64,
    pub hpr3_db: f64,
    /// Apply the PA model on the self-interference / far transmitter.
    pub pa_si: bool,
    pub pa_soi: bool,
    pub iqi_si: Option<IqImbalance>,
    pub iqi_soi: Option<IqImbalance>,
    /// Transmit powers in dB relative to the unit-energy digital grid.
    pub si_tx_power_db: f64,
    pub soi_tx_power_db: f64,
    /// Seed for the receiver noise stream.
    pub seed: u64,
}

impl ImpairmentConfig {
    /// Ideal front end: no noise, linear PAs, perfect modulators, 0 dB.
    pub fn clean(seed: u64) -> ImpairmentConfig {
        ImpairmentConfig {
            noise_power: 0.0,
            hpr3_db: f64::INFINITY,
            pa_si: true,
            pa_soi: true,
            iqi_si: None,
            iqi_soi: None,
            si_tx_power_db: 0.0,
            soi_tx_power_db: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.noise_power < 0.0 || !self.noise_power.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "noise_power must be finite and non-negative, got {}",
                self.noise_power
            )));
        }
        let h = self.hpr3_db;
        if !((0.0..=200.0).contains(&h) || (h.is_infinite() && h > 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "hpr3_db must be in [0, 200] or infinite, got {h}"
            )));
        }
        for (name, p) in [
            ("si_tx_power_db", self.si_tx_power_db),
            ("soi_tx_power_db", self.soi_tx_power_db),
        ] {
            if !p.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

/// Noise-free ground truth for one trial. "Clean" means noise-free, not
/// impairment-free: PA and IQ effects are inside these grids.
#[derive(Clone, Debug)]
pub struct GenieRecord {
    /// Per-subcarrier least-squares fit of each clean received path against
    /// the corresponding digital reference grid. Zero where a node never
    /// transmits.
    pub alpha1_eff: Vec<Complex64>,
    pub alpha2_eff: Vec<Complex64>,
    /// Mean clean received power per data subcarrier per symbol.
    pub p_si: f64,
    pub p_soi: f64,
    pub noise_power: f64,
    pub si_rx_clean: ComplexGrid,
    pub soi_rx_clean: ComplexGrid,
}

/// What the receiving node has to work with: its own digital frame as the
/// cancellation reference, and the demodulated antenna signal.
#[derive(Clone, Debug)]
pub struct Transmission {
    /// Digital self-interference reference (the node's own transmit grid,
    /// before any scaling or impairment).
    pub x1_grid: ComplexGrid,
    /// Received grid: both paths plus noise, after all impairments.
    pub x2_grid: ComplexGrid,
    pub genie: GenieRecord,
}

fn tx_front_end(
    frame: &NodeFrame,
    power_db: f64,
    iqi: Option<IqImbalance>,
    pa_on: bool,
    hpr3_db: f64,
    spec: &FrameSpec,
) -> Result<Vec<Complex64>> {
    let amp = 10f64.powf(power_db / 20.0);
    let mut x: Vec<Complex64> = frame.time_samples.iter().map(|&v| amp * v).collect();
    if let Some(iqi) = iqi {
        x = iqi.apply(&x);
    }
    if pa_on && hpr3_db.is_finite() {
        // The PA reference is the mean power this amplifier actually sees
        // over the payload region (the preamble region includes a silent
        // slot that would bias the mean down).
        let data_start = spec.sp_len + spec.data_cols().start * spec.samples_per_symbol();
        let payload = &x[data_start..];
        let ref_power =
            payload.iter().map(|v| v.norm_sqr()).sum::<f64>() / payload.len() as f64;
        x = apply_pa_nonlinearity(&x, hpr3_db, ref_power)?;
    }
    Ok(x)
}

/// Per-subcarrier LS fit of a received grid against a reference grid, over
/// every column where the reference is nonzero.
fn fit_effective_channel(rx: &ComplexGrid, reference: &ComplexGrid) -> Vec<Complex64> {
    let mut alpha = vec![Complex64::new(0.0, 0.0); rx.n_fft()];
    for k in 0..rx.n_fft() {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for c in 0..rx.cols() {
            let s = reference.get(k, c);
            num += rx.get(k, c) * s.conj();
            den += s.norm_sqr();
        }
        if den > 1e-12 {
            alpha[k] = num / den;
        }
    }
    alpha
}

fn mean_data_power(grid: &ComplexGrid, spec: &FrameSpec) -> f64 {
    let data = spec.data_subcarriers();
    let cols = spec.data_cols();
    let mut acc = 0.0;
    for &k in &data {
        for c in cols.clone() {
            acc += grid.get(k, c).norm_sqr();
        }
    }
    acc / (data.len() * cols.len()) as f64
}

/// Run both transmitters through their front ends and channels, sum at the
/// receiving antenna, add noise, and demodulate. `frame_si` is the receiving
/// node's own frame; `frame_soi` is the far node's.
pub fn transmit_through(
    frame_si: &NodeFrame,
    frame_soi: &NodeFrame,
    chan: &ChannelRealization,
    cfg: &ImpairmentConfig,
    spec: &FrameSpec,
) -> Result<Transmission> {
    cfg.validate()?;
    chan.validate(spec)?;
    if frame_si.time_samples.len() != spec.frame_len()
        || frame_soi.time_samples.len() != spec.frame_len()
    {
        return Err(Error::DimensionMismatch(
            "frame length does not match spec".into(),
        ));
    }

    let si_tx = tx_front_end(frame_si, cfg.si_tx_power_db, cfg.iqi_si, cfg.pa_si, cfg.hpr3_db, spec)?;
    let soi_tx = tx_front_end(
        frame_soi,
        cfg.soi_tx_power_db,
        cfg.iqi_soi,
        cfg.pa_soi,
        cfg.hpr3_db,
        spec,
    )?;

    let si_rx = chan.si.filter(&si_tx);
    let soi_rx = chan.soi.filter(&soi_tx);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sigma = (cfg.noise_power / 2.0).sqrt();
    let mut antenna: Vec<Complex64> = Vec::with_capacity(si_rx.len());
    for n in 0..si_rx.len() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        antenna.push(si_rx[n] + soi_rx[n] + Complex64::new(re * sigma, im * sigma));
    }

    let x2_grid = demodulate_ofdm(&antenna, spec)?;
    let si_rx_clean = demodulate_ofdm(&si_rx, spec)?;
    let soi_rx_clean = demodulate_ofdm(&soi_rx, spec)?;

    let genie = GenieRecord {
        alpha1_eff: fit_effective_channel(&si_rx_clean, &frame_si.ref_grid),
        alpha2_eff: fit_effective_channel(&soi_rx_clean, &frame_soi.ref_grid),
        p_si: mean_data_power(&si_rx_clean, spec),
        p_soi: mean_data_power(&soi_rx_clean, spec),
        noise_power: cfg.noise_power,
        si_rx_clean,
        soi_rx_clean,
    };

    Ok(Transmission {
        x1_grid: frame_si.ref_grid.clone(),
        x2_grid,
        genie,
    })
}
