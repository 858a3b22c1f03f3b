//! Gray-coded square QAM at unit average symbol energy. Orders 4, 16 and 64
//! are supported; bits map per axis (I bits first, then Q bits), hard-decision
//! demapping slices each axis independently.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Modulation {
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    pub fn order(self) -> u32 {
        match self {
            Modulation::Qpsk => 4,
            Modulation::Qam16 => 16,
            Modulation::Qam64 => 64,
        }
    }

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
            Modulation::Qam64 => 6,
        }
    }

    fn bits_per_axis(self) -> usize {
        self.bits_per_symbol() / 2
    }

    /// 1 / sqrt(mean square amplitude) of the unnormalized lattice.
    fn scale(self) -> f64 {
        match self {
            Modulation::Qpsk => 1.0 / 2.0_f64.sqrt(),
            Modulation::Qam16 => 1.0 / 10.0_f64.sqrt(),
            Modulation::Qam64 => 1.0 / 42.0_f64.sqrt(),
        }
    }
}

impl TryFrom<u32> for Modulation {
    type Error = Error;

    fn try_from(order: u32) -> Result<Self> {
        match order {
            4 => Ok(Modulation::Qpsk),
            16 => Ok(Modulation::Qam16),
            64 => Ok(Modulation::Qam64),
            other => Err(Error::UnsupportedQamOrder(other)),
        }
    }
}

// Per-axis Gray tables. Index is the bit group read MSB first; the level list
// is ordered so that adjacent levels differ in exactly one bit. Bit group 0
// always lands on the most positive level, which for one bit per axis gives
// the QPSK convention 0 -> +1, 1 -> -1.
const GRAY_1: [f64; 2] = [1.0, -1.0];
const GRAY_2: [f64; 4] = [3.0, 1.0, -3.0, -1.0];
const GRAY_3: [f64; 8] = [7.0, 5.0, 1.0, 3.0, -7.0, -5.0, -1.0, -3.0];

fn axis_level(bits: &[u8], m: Modulation) -> f64 {
    let mut idx = 0usize;
    for &b in bits {
        idx = (idx << 1) | b as usize;
    }
    match m.bits_per_axis() {
        1 => GRAY_1[idx],
        2 => GRAY_2[idx],
        _ => GRAY_3[idx],
    }
}

fn axis_bits(level: f64, m: Modulation, out: &mut Vec<u8>) {
    let table: &[f64] = match m.bits_per_axis() {
        1 => &GRAY_1,
        2 => &GRAY_2,
        _ => &GRAY_3,
    };
    // nearest lattice level wins; ties cannot occur for finite inputs because
    // levels are distinct, and NaN is sliced to the first entry
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (i, &l) in table.iter().enumerate() {
        let d = (level - l).abs();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    let n = m.bits_per_axis();
    for k in (0..n).rev() {
        out.push(((best >> k) & 1) as u8);
    }
}

/// Map a bit stream onto constellation symbols. The bit count must be a
/// multiple of `bits_per_symbol` and every bit must be 0 or 1.
pub fn map_bits(bits: &[u8], m: Modulation) -> Result<Vec<Complex64>> {
    let bps = m.bits_per_symbol();
    if !bits.len().is_multiple_of(bps) {
        return Err(Error::BitCount {
            need: bits.len().div_ceil(bps) * bps,
            got: bits.len(),
        });
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::NonBinaryBits);
    }
    let half = m.bits_per_axis();
    let s = m.scale();
    Ok(bits
        .chunks_exact(bps)
        .map(|chunk| {
            let re = axis_level(&chunk[..half], m) * s;
            let im = axis_level(&chunk[half..], m) * s;
            Complex64::new(re, im)
        })
        .collect())
}

/// Hard-decision demap back to bits. Inverse of `map_bits` on noiseless
/// input; on noisy input each axis slices to the nearest level.
pub fn demap_bits(symbols: &[Complex64], m: Modulation) -> Vec<u8> {
    let s = m.scale();
    let mut out = Vec::with_capacity(symbols.len() * m.bits_per_symbol());
    for sym in symbols {
        axis_bits(sym.re / s, m, &mut out);
        axis_bits(sym.im / s, m, &mut out);
    }
    out
}
