//! Monte-Carlo sweep harness: flat key=value configuration, seeded trial
//! execution over a grid of operating points, and RFC-4180 CSV output.
//!
//! Every trial is a pure function of (config, point, trial index): the trial
//! seed is mixed from the base seed and the point coordinates, and expands
//! into separate streams for payload bits, channel draws, and receiver
//! noise. Trials therefore parallelize freely; rows are assembled in a fixed
//! order afterwards, so the CSV bytes do not depend on the parallelism
//! degree.

use std::path::{Path, PathBuf};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bss_sic::{fica_sic, FicaOptions};
use crate::error::{Error, Result};
use crate::impairments::{draw_channel, transmit_through, ChannelModel, ChannelRealization, ImpairmentConfig};
use crate::ls_sic::{ls_sic, SicMethod, SubcarrierDiag};
use crate::metrics::{build_report, SinrReport};
use crate::ofdm::{build_frame, FrameSpec, NodeId};
use crate::qam::Modulation;

/// Environment variable that redirects sweep output into a different
/// directory. Only the directory is overridden; the file name from the
/// config or CLI is kept.
pub const OUTPUT_DIR_ENV: &str = "FDSIC_OUT_DIR";

/// How the two cancellers are fed within a trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecMode {
    /// One transmission per trial on the pilot-bearing frame layout; both
    /// cancellers consume bit-identical reference and received grids. This
    /// is the apples-to-apples comparison mode.
    Shared,
    /// Each canceller runs on its own native frame layout (the blind
    /// canceller's pilot-free grid carries 52 data subcarriers, the
    /// training-based one 44 + 8 pilots), with bit, channel, and noise
    /// streams seeded identically.
    PerMethod,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub base_seed: u64,
    /// Trials per grid point.
    pub trials: usize,
    /// Self-interference transmit power, fixed across the sweep.
    pub si_tx_db: f64,
    /// Sweep axes.
    pub soi_tx_db: Vec<f64>,
    pub hpr3_db: Vec<f64>,
    pub frame_len: Vec<usize>,
    pub noise_power: f64,
    pub channel: ChannelModel,
    pub modulation: Modulation,
    pub spec_mode: SpecMode,
    pub output: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            base_seed: 1,
            trials: 10,
            si_tx_db: 0.0,
            soi_tx_db: vec![-10.0],
            hpr3_db: vec![200.0],
            frame_len: vec![100],
            noise_power: 5e-5,
            channel: ChannelModel::Flat,
            modulation: Modulation::Qpsk,
            spec_mode: SpecMode::Shared,
            output: PathBuf::from("sweep.csv"),
        }
    }
}

fn bad_value(key: &str, value: &str) -> Error {
    Error::Config(format!("invalid value `{value}` for key `{key}`"))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse().map_err(|_| bad_value(key, v))
}

fn parse_f64_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_f64(key, s.trim())).collect()
}

fn parse_usize_list(key: &str, v: &str) -> Result<Vec<usize>> {
    v.split(',')
        .map(|s| s.trim().parse().map_err(|_| bad_value(key, s)))
        .collect()
}

impl SweepConfig {
    /// Parse flat `key = value` text. `#` starts a comment, blank lines are
    /// skipped, keys not present keep their defaults, unknown keys are
    /// rejected.
    pub fn parse(text: &str) -> Result<SweepConfig> {
        let mut cfg = SweepConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got `{line}`", idx + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "base_seed" => cfg.base_seed = value.parse().map_err(|_| bad_value(key, value))?,
                "trials" => cfg.trials = value.parse().map_err(|_| bad_value(key, value))?,
                "si_tx_db" => cfg.si_tx_db = parse_f64(key, value)?,
                "soi_tx_db" => cfg.soi_tx_db = parse_f64_list(key, value)?,
                "hpr3_db" => cfg.hpr3_db = parse_f64_list(key, value)?,
                "frame_len" => cfg.frame_len = parse_usize_list(key, value)?,
                "noise_power" => cfg.noise_power = parse_f64(key, value)?,
                "channel" => {
                    cfg.channel = if value == "flat" {
                        ChannelModel::Flat
                    } else if let Some(taps) = value.strip_prefix("multipath:") {
                        ChannelModel::Multipath(taps.parse().map_err(|_| bad_value(key, value))?)
                    } else {
                        return Err(bad_value(key, value));
                    }
                }
                "modulation" => {
                    cfg.modulation = match value {
                        "qpsk" => Modulation::Qpsk,
                        "qam16" => Modulation::Qam16,
                        "qam64" => Modulation::Qam64,
                        _ => return Err(bad_value(key, value)),
                    }
                }
                "spec_mode" => {
                    cfg.spec_mode = match value {
                        "shared" => SpecMode::Shared,
                        "per_method" => SpecMode::PerMethod,
                        _ => return Err(bad_value(key, value)),
                    }
                }
                "output" => cfg.output = PathBuf::from(value),
                _ => return Err(Error::Config(format!("unknown config key `{key}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<SweepConfig> {
        let text = std::fs::read_to_string(path)?;
        SweepConfig::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.soi_tx_db.is_empty() || self.hpr3_db.is_empty() || self.frame_len.is_empty() {
            return Err(Error::Config("sweep axes must be non-empty".into()));
        }
        if self.noise_power < 0.0 || !self.noise_power.is_finite() {
            return Err(Error::Config("noise_power must be finite and >= 0".into()));
        }
        if self.frame_len.contains(&0) {
            return Err(Error::Config("frame_len entries must be at least 1".into()));
        }
        Ok(())
    }

    /// Output path with the directory possibly replaced by the override in
    /// `FDSIC_OUT_DIR`. Only the directory moves; the file name stays.
    pub fn resolved_output(&self) -> PathBuf {
        resolve_output(&self.output, std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
    }
}

fn resolve_output(configured: &Path, dir_override: Option<PathBuf>) -> PathBuf {
    match (dir_override, configured.file_name()) {
        (Some(dir), Some(name)) => dir.join(name),
        _ => configured.to_path_buf(),
    }
}

/// One coordinate of the sweep grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub soi_tx_db: f64,
    pub hpr3_db: f64,
    pub frame_len: usize,
}

/// Grid points in row order: SOI power outermost, then PA headroom, then
/// frame length.
pub fn sweep_points(cfg: &SweepConfig) -> Vec<SweepPoint> {
    let mut points = Vec::new();
    for &soi_tx_db in &cfg.soi_tx_db {
        for &hpr3_db in &cfg.hpr3_db {
            for &frame_len in &cfg.frame_len {
                points.push(SweepPoint { soi_tx_db, hpr3_db, frame_len });
            }
        }
    }
    points
}

fn splitmix(mut h: u64) -> u64 {
    h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = h;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one (point, trial) cell, mixed from the base seed and the point
/// coordinates so that adding axis values does not disturb existing cells.
pub fn trial_seed(base_seed: u64, point: &SweepPoint, trial: usize) -> u64 {
    let mut h = splitmix(base_seed);
    for word in [
        point.soi_tx_db.to_bits(),
        point.hpr3_db.to_bits(),
        point.frame_len as u64,
        trial as u64,
    ] {
        h = splitmix(h ^ word);
    }
    h
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

struct TrialStreams {
    bits_seed_a: u64,
    bits_seed_b: u64,
    channel_seed: u64,
    noise_seed: u64,
}

fn trial_streams(seed: u64) -> TrialStreams {
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    TrialStreams {
        bits_seed_a: seeder.next_u64(),
        bits_seed_b: seeder.next_u64(),
        channel_seed: seeder.next_u64(),
        noise_seed: seeder.next_u64(),
    }
}

fn run_method(
    spec: &FrameSpec,
    point: &SweepPoint,
    cfg: &SweepConfig,
    streams: &TrialStreams,
    seed: u64,
    method: SicMethod,
) -> Result<(SinrReport, Vec<SubcarrierDiag>)> {
    let mut rng_a = ChaCha8Rng::seed_from_u64(streams.bits_seed_a);
    let mut rng_b = ChaCha8Rng::seed_from_u64(streams.bits_seed_b);
    let bits_a = random_bits(&mut rng_a, spec.payload_bits_len(cfg.modulation));
    let bits_b = random_bits(&mut rng_b, spec.payload_bits_len(cfg.modulation));
    let frame_a = build_frame(&bits_a, spec, NodeId::A, cfg.modulation)?;
    let frame_b = build_frame(&bits_b, spec, NodeId::B, cfg.modulation)?;

    let mut chan_rng = ChaCha8Rng::seed_from_u64(streams.channel_seed);
    let chan = ChannelRealization {
        si: draw_channel(cfg.channel, &mut chan_rng, spec),
        soi: draw_channel(cfg.channel, &mut chan_rng, spec),
    };

    let mut imp = ImpairmentConfig::clean(streams.noise_seed);
    imp.noise_power = cfg.noise_power;
    imp.hpr3_db = point.hpr3_db;
    imp.si_tx_power_db = cfg.si_tx_db;
    imp.soi_tx_power_db = point.soi_tx_db;
    let tx = transmit_through(&frame_a, &frame_b, &chan, &imp, spec)?;

    let sic = match method {
        SicMethod::Fica => fica_sic(&tx.x1_grid, &tx.x2_grid, spec, &FicaOptions::default())?,
        SicMethod::Ls => ls_sic(&tx.x1_grid, &tx.x2_grid, spec)?,
    };
    let report = build_report(
        &sic.soi_grid,
        &frame_b,
        &tx.genie,
        spec,
        cfg.modulation,
        method,
        seed,
        point.soi_tx_db,
        cfg.si_tx_db,
        point.hpr3_db,
    )?;
    Ok((report, sic.diag))
}

/// Everything one trial produced, for detailed inspection: both reports and
/// the per-subcarrier health records behind them.
pub struct TrialDetail {
    pub fica: SinrReport,
    pub ls: SinrReport,
    pub fica_diag: Vec<SubcarrierDiag>,
    pub ls_diag: Vec<SubcarrierDiag>,
}

/// Run one trial at one grid point with full diagnostics.
pub fn run_single_trial_detailed(
    cfg: &SweepConfig,
    point: &SweepPoint,
    trial: usize,
) -> Result<TrialDetail> {
    let seed = trial_seed(cfg.base_seed, point, trial);
    let streams = trial_streams(seed);
    let (spec_fica, spec_ls) = match cfg.spec_mode {
        SpecMode::Shared => {
            let spec = FrameSpec::piloted(point.frame_len);
            (spec.clone(), spec)
        }
        SpecMode::PerMethod => {
            (FrameSpec::all_data(point.frame_len), FrameSpec::piloted(point.frame_len))
        }
    };
    let (fica, fica_diag) = run_method(&spec_fica, point, cfg, &streams, seed, SicMethod::Fica)?;
    let (ls, ls_diag) = run_method(&spec_ls, point, cfg, &streams, seed, SicMethod::Ls)?;
    Ok(TrialDetail { fica, ls, fica_diag, ls_diag })
}

/// Run one trial at one grid point; returns the blind-canceller report and
/// the training-based one, in that order.
pub fn run_single_trial(
    cfg: &SweepConfig,
    point: &SweepPoint,
    trial: usize,
) -> Result<(SinrReport, SinrReport)> {
    let detail = run_single_trial_detailed(cfg, point, trial)?;
    Ok((detail.fica, detail.ls))
}

/// Run the whole sweep on `parallelism` threads and return rows ordered by
/// (point, method, trial). The output is a pure function of the config; the
/// thread count only affects wall time.
pub fn run_sweep(cfg: &SweepConfig, parallelism: usize) -> Result<Vec<SinrReport>> {
    cfg.validate()?;
    let points = sweep_points(cfg);
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..cfg.trials).map(move |t| (p, t)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let pairs: Vec<(SinrReport, SinrReport)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, t)| run_single_trial(cfg, &points[p], t))
            .collect::<Result<Vec<_>>>()
    })?;

    // regroup (point, trial, method) results into (point, method, trial) rows
    let mut rows = Vec::with_capacity(pairs.len() * 2);
    for p in 0..points.len() {
        let block = &pairs[p * cfg.trials..(p + 1) * cfg.trials];
        rows.extend(block.iter().map(|pair| pair.0.clone()));
        rows.extend(block.iter().map(|pair| pair.1.clone()));
    }
    Ok(rows)
}

/// Data-subcarrier throughput ratio between two frame layouts carrying the
/// same modulation and symbol count.
pub fn spectral_efficiency_ratio(a: &FrameSpec, b: &FrameSpec) -> f64 {
    a.n_data() as f64 / b.n_data() as f64
}

pub const CSV_HEADER: &str =
    "soi_tx_db,si_tx_db,hpr3_db,frame_len,trial_seed,method,isinr_db,osinr_db,sic_db,ber,evm_db,n_bits";

/// Quote a field per RFC 4180 when it contains a comma, quote, or newline.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_row(r: &SinrReport) -> String {
    let cells = [
        format!("{:.6}", r.soi_tx_db),
        format!("{:.6}", r.si_tx_db),
        format!("{:.6}", r.hpr3_db),
        r.frame_len.to_string(),
        r.trial_seed.to_string(),
        r.method.name().to_string(),
        format!("{:.6}", r.isinr_db),
        format!("{:.6}", r.osinr_db),
        format!("{:.6}", r.sic_db),
        format!("{:.8}", r.ber),
        format!("{:.6}", r.evm_db),
        r.n_bits.to_string(),
    ];
    cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",")
}

/// Render rows to CSV text (header plus one line per report).
pub fn csv_string(rows: &[SinrReport]) -> String {
    let mut out = String::with_capacity((rows.len() + 1) * 96);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

pub fn write_csv(rows: &[SinrReport], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, csv_string(rows))?;
    Ok(())
}
