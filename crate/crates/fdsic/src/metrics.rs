//! Link metrics. SINR-style quantities are averaged as per-subcarrier
//! linear ratios over the data subcarriers, then converted to dB once, so a
//! few deeply faded subcarriers cannot drag the whole frame to minus
//! infinity. Ratios are clamped to [1e-8, 1e8] (so dB values live in
//! [-80, +80]) because exact cancellations would otherwise produce
//! infinities that poison downstream averaging.

use crate::error::{Error, Result};
use crate::impairments::GenieRecord;
use crate::ls_sic::SicMethod;
use crate::ofdm::{ComplexGrid, FrameSpec};
use crate::qam::{demap_bits, Modulation};

/// Clamp for per-subcarrier linear power ratios.
pub const MAX_LINEAR_RATIO: f64 = 1e8;
pub const MIN_LINEAR_RATIO: f64 = 1e-8;

fn clamp_ratio(r: f64) -> f64 {
    r.clamp(MIN_LINEAR_RATIO, MAX_LINEAR_RATIO)
}

fn to_db(r: f64) -> f64 {
    10.0 * clamp_ratio(r).log10()
}

/// SINR at the canceller input: far-node power over self-interference plus
/// noise, from the noise-free genie grids. Per data subcarrier, then
/// averaged in linear units.
pub fn compute_isinr(genie: &GenieRecord, spec: &FrameSpec) -> f64 {
    let cols = spec.data_cols();
    let n = cols.len() as f64;
    let mut acc = 0.0;
    let data = spec.data_subcarriers();
    for &k in &data {
        let p_soi: f64 =
            cols.clone().map(|c| genie.soi_rx_clean.get(k, c).norm_sqr()).sum::<f64>() / n;
        let p_si: f64 =
            cols.clone().map(|c| genie.si_rx_clean.get(k, c).norm_sqr()).sum::<f64>() / n;
        acc += clamp_ratio(p_soi / (p_si + genie.noise_power));
    }
    to_db(acc / data.len() as f64)
}

/// SINR at the canceller output: transmitted symbol power over residual
/// error power, comparing the recovered grid (one column per payload
/// symbol) against the far node's digital reference grid.
pub fn compute_osinr(est: &ComplexGrid, truth_ref_grid: &ComplexGrid, spec: &FrameSpec) -> f64 {
    let data = spec.data_subcarriers();
    let mut acc = 0.0;
    for &k in &data {
        let mut sig = 0.0;
        let mut err = 0.0;
        for (c_out, col) in spec.data_cols().enumerate() {
            let want = truth_ref_grid.get(k, col);
            let got = est.get(k, c_out);
            sig += want.norm_sqr();
            err += (got - want).norm_sqr();
        }
        acc += clamp_ratio(sig / err.max(sig / MAX_LINEAR_RATIO));
    }
    to_db(acc / data.len() as f64)
}

/// Aggregate error-vector magnitude in dB: total residual error power over
/// total reference power across the whole data region (one global ratio, not
/// a mean of per-subcarrier ratios).
pub fn compute_evm_db(est: &ComplexGrid, truth_ref_grid: &ComplexGrid, spec: &FrameSpec) -> f64 {
    let mut sig = 0.0;
    let mut err = 0.0;
    for k in spec.data_subcarriers() {
        for (c_out, col) in spec.data_cols().enumerate() {
            let want = truth_ref_grid.get(k, col);
            sig += want.norm_sqr();
            err += (est.get(k, c_out) - want).norm_sqr();
        }
    }
    to_db(err / sig)
}

/// Hard-decision payload bits from a recovered grid, in transmit order
/// (symbol by symbol, data subcarriers in centered order).
pub fn demap_payload(est: &ComplexGrid, spec: &FrameSpec, m: Modulation) -> Vec<u8> {
    let data = spec.data_subcarriers();
    let mut symbols = Vec::with_capacity(data.len() * spec.n_symbols);
    for c in 0..spec.n_symbols {
        for &k in &data {
            symbols.push(est.get(k, c));
        }
    }
    demap_bits(&symbols, m)
}

/// Fraction of differing bits.
pub fn compute_ber(got: &[u8], want: &[u8]) -> Result<f64> {
    if got.is_empty() || got.len() != want.len() {
        return Err(Error::DimensionMismatch(format!(
            "bit streams of {} vs {} bits",
            got.len(),
            want.len()
        )));
    }
    let errors = got.iter().zip(want).filter(|(a, b)| a != b).count();
    Ok(errors as f64 / got.len() as f64)
}

/// One trial of one canceller, flattened for CSV output.
#[derive(Clone, Debug)]
pub struct SinrReport {
    pub soi_tx_db: f64,
    pub si_tx_db: f64,
    pub hpr3_db: f64,
    pub frame_len: usize,
    pub trial_seed: u64,
    pub method: SicMethod,
    pub isinr_db: f64,
    pub osinr_db: f64,
    pub sic_db: f64,
    pub ber: f64,
    pub evm_db: f64,
    pub n_bits: usize,
}

/// Assemble the per-trial report for one canceller output.
#[allow(clippy::too_many_arguments)]
pub fn build_report(
    est: &ComplexGrid,
    truth: &crate::ofdm::NodeFrame,
    genie: &GenieRecord,
    spec: &FrameSpec,
    m: Modulation,
    method: SicMethod,
    trial_seed: u64,
    soi_tx_db: f64,
    si_tx_db: f64,
    hpr3_db: f64,
) -> Result<SinrReport> {
    let isinr_db = compute_isinr(genie, spec);
    let osinr_db = compute_osinr(est, &truth.ref_grid, spec);
    let got = demap_payload(est, spec, m);
    let ber = compute_ber(&got, &truth.payload_bits)?;
    Ok(SinrReport {
        soi_tx_db,
        si_tx_db,
        hpr3_db,
        frame_len: spec.n_symbols,
        trial_seed,
        method,
        isinr_db,
        osinr_db,
        sic_db: osinr_db - isinr_db,
        ber,
        evm_db: compute_evm_db(est, &truth.ref_grid, spec),
        n_bits: got.len(),
    })
}
