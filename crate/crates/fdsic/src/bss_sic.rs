//! Blind-source-separation canceller. Per data subcarrier, the known digital
//! self-interference and the received samples are lifted from two complex
//! series into four real coordinates,
//!
//!   [x1.re, x1.im, x2.re, x2.im]^T = M [s1.re, s1.im, s2.re, s2.im]^T + n,
//!
//! where the mixing M embeds the two complex channel gains as 2x2 rotation
//! blocks. FastICA separates the four real sources; the two that carry the
//! far node's signal are then mapped back to complex symbols by a 2x2 real
//! ambiguity matrix estimated from that node's long preamble, during which
//! the self-interference is silent. A Pearson gate rejects components that
//! still ride on the known reference, and any subcarrier the blind path
//! cannot handle falls back to the least-squares canceller.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fica::{center_and_whiten, deflation_fica, RealDataMatrix, WhiteningTransform};
use crate::linalg::{inv2, singular_values_2x2};
use crate::ls_sic::{ls_sic, SicMethod, SicResult, SubcarrierDiag};
use crate::ofdm::{
    lp_rotation, training_sequence, ComplexGrid, FrameSpec, NodeId, PreambleMode, SubcarrierRole,
};

// ---------------------------------------------------------------------------
// Complex-to-real lifting
// ---------------------------------------------------------------------------

/// The 4x4 real mixing induced by two complex gains when a directly observed
/// source and a two-gain sum are stacked as real/imaginary pairs. Row order
/// matches `lift_to_real`: reference first, received second.
#[derive(Clone, Copy, Debug)]
pub struct LiftedMixing {
    m: [[f64; 4]; 4],
}

impl LiftedMixing {
    pub fn from_channels(alpha1: Complex64, alpha2: Complex64) -> LiftedMixing {
        LiftedMixing {
            m: [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [alpha1.re, -alpha1.im, alpha2.re, -alpha2.im],
                [alpha1.im, alpha1.re, alpha2.im, alpha2.re],
            ],
        }
    }

    pub fn matrix(&self) -> [[f64; 4]; 4] {
        self.m
    }

    pub fn apply(&self, s: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, row) in self.m.iter().enumerate() {
            out[i] = row.iter().zip(&s).map(|(a, b)| a * b).sum();
        }
        out
    }
}

/// Stack two complex series as a 4-row real matrix: reference real,
/// reference imaginary, received real, received imaginary.
pub fn lift_to_real(x1: &[Complex64], x2: &[Complex64]) -> Result<RealDataMatrix> {
    if x1.len() != x2.len() {
        return Err(Error::DimensionMismatch(format!(
            "series lengths differ: {} vs {}",
            x1.len(),
            x2.len()
        )));
    }
    RealDataMatrix::from_rows(vec![
        x1.iter().map(|v| v.re).collect(),
        x1.iter().map(|v| v.im).collect(),
        x2.iter().map(|v| v.re).collect(),
        x2.iter().map(|v| v.im).collect(),
    ])
}

// ---------------------------------------------------------------------------
// Ambiguity resolution
// ---------------------------------------------------------------------------

/// The real 2x2 map from the far node's true (re, im) symbols to the two
/// extracted component series. Estimated over the far node's preamble;
/// inverting it removes ICA's scale, rotation, sign, and ordering ambiguity
/// in one step.
#[derive(Clone, Copy, Debug)]
pub struct AmbiguityEstimate {
    pub g: [[f64; 2]; 2],
    g_inv: [[f64; 2]; 2],
    /// Ratio of singular values of `g`; large values mean the two components
    /// are nearly parallel and the inversion would amplify noise.
    pub condition_number: f64,
    /// Distance of `g` from the nearest scaled-rotation (complex-scalar)
    /// matrix, relative to its size. Zero when the component pair is exactly
    /// a complex gain away from the true symbols.
    pub complexness: f64,
}

impl AmbiguityEstimate {
    /// Map a component pair back to a complex symbol estimate.
    pub fn solve(&self, y: [f64; 2]) -> Complex64 {
        Complex64::new(
            self.g_inv[0][0] * y[0] + self.g_inv[0][1] * y[1],
            self.g_inv[1][0] * y[0] + self.g_inv[1][1] * y[1],
        )
    }

    /// The complex gain nearest to `g` (exact when `complexness` is zero).
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(
            (self.g[0][0] + self.g[1][1]) / 2.0,
            (self.g[1][0] - self.g[0][1]) / 2.0,
        )
    }
}

/// Least-squares fit of `y = G t` over preamble observations: `y_lp` holds
/// the two component values per preamble symbol, `t_lp` the known training
/// symbol. Fails when the training design is singular or `G` is too badly
/// conditioned to invert.
pub fn estimate_ambiguity(
    y_lp: &[[f64; 2]],
    t_lp: &[Complex64],
    max_condition: f64,
) -> Result<AmbiguityEstimate> {
    if y_lp.is_empty() || y_lp.len() != t_lp.len() {
        return Err(Error::DegenerateTraining);
    }
    let mut ytt = [[0.0f64; 2]; 2];
    let mut ttt = [[0.0f64; 2]; 2];
    for (y, t) in y_lp.iter().zip(t_lp) {
        let tv = [t.re, t.im];
        for i in 0..2 {
            for j in 0..2 {
                ytt[i][j] += y[i] * tv[j];
                ttt[i][j] += tv[i] * tv[j];
            }
        }
    }
    let ttt_inv = inv2(&ttt).ok_or(Error::DegenerateTraining)?;
    let mut g = [[0.0f64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g[i][j] = ytt[i][0] * ttt_inv[0][j] + ytt[i][1] * ttt_inv[1][j];
        }
    }

    let (s_max, s_min) = singular_values_2x2(&g);
    let condition_number = if s_min > 1e-300 {
        s_max / s_min
    } else {
        f64::INFINITY
    };
    if condition_number > max_condition {
        return Err(Error::IllConditioned {
            cond: condition_number,
        });
    }
    let g_inv = inv2(&g).ok_or(Error::IllConditioned {
        cond: condition_number,
    })?;

    let a = (g[0][0] + g[1][1]) / 2.0;
    let b = (g[1][0] - g[0][1]) / 2.0;
    let anti = [
        [g[0][0] - a, g[0][1] + b],
        [g[1][0] - b, g[1][1] - a],
    ];
    let frob = |m: &[[f64; 2]; 2]| {
        (m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]).sqrt()
    };
    let g_norm = frob(&g);
    let complexness = if g_norm > 0.0 { frob(&anti) / g_norm } else { 0.0 };

    Ok(AmbiguityEstimate {
        g,
        g_inv,
        condition_number,
        complexness,
    })
}

// ---------------------------------------------------------------------------
// The canceller
// ---------------------------------------------------------------------------

/// How the per-component search is seeded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitMode {
    /// Decorrelate the received series against the known reference and read
    /// out the residual's real and imaginary parts. The residual is
    /// orthogonal to the self-interference by construction, so these starts
    /// sit essentially on top of the wanted components at any interference
    /// level. The default.
    SiResidual,
    /// Whitened directions that read back the raw received coordinates.
    /// Adequate when the two signals arrive at comparable power, but the
    /// start drifts toward the stronger one, which is usually the
    /// self-interference.
    ReceivedReadout,
    /// Literal coordinate axes of the whitened space.
    WhitenedAxes,
}

#[derive(Clone, Copy, Debug)]
pub struct FicaOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub rank_tol: f64,
    /// Components whose data-phase correlation against the known reference
    /// exceeds this are self-interference that ICA failed to remove.
    pub si_corr_threshold: f64,
    /// Components whose energy in the near node's preamble slot exceeds
    /// this fraction of their far-slot energy are rejected: the recovered
    /// stream must be silent while the far node is silent.
    pub max_silent_slot_ratio: f64,
    /// Rejects components whose near-slot energy exceeds this multiple of
    /// the noise floor expected through their readout, with the floor
    /// estimated from the null subcarriers. Catches partially separated
    /// directions whose interference residue is far above the noise yet
    /// small next to the far-slot energy.
    pub silent_slot_noise_factor: f64,
    pub max_condition: f64,
    pub init: InitMode,
    /// Pool every data subcarrier into one separation problem instead of
    /// running one per subcarrier. Only meaningful over flat channels, where
    /// the mixing is shared; frequency-selective links need the default.
    pub joint: bool,
    /// Repair failed subcarriers with the least-squares canceller instead of
    /// zeroing them.
    pub ls_fallback: bool,
}

impl Default for FicaOptions {
    fn default() -> FicaOptions {
        FicaOptions {
            max_iter: 200,
            tol: 1e-6,
            rank_tol: 1e-10,
            si_corr_threshold: 0.9,
            max_silent_slot_ratio: 1.0,
            silent_slot_noise_factor: 25.0,
            max_condition: 1e3,
            init: InitMode::SiResidual,
            joint: false,
            ls_fallback: true,
        }
    }
}

fn pearson_abs(a: &[f64], b: &[f64]) -> f64 {
    let m = a.len() as f64;
    let ma = a.iter().sum::<f64>() / m;
    let mb = b.iter().sum::<f64>() / m;
    let mut num = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        num += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va < 1e-30 || vb < 1e-30 {
        return 0.0;
    }
    (num / (va.sqrt() * vb.sqrt())).abs()
}

/// A demixing row pushed back through the whitening matrix: `q = V^T w`, so
/// that `q . lift(col)` is the component's linear response to raw data. Using
/// the raw projection (rather than the centered one) keeps the preamble and
/// payload phases on the same affine footing, which is what lets the
/// preamble-fitted ambiguity apply verbatim to payload columns.
fn raw_readout(white: &WhiteningTransform, w: &[f64], dims: usize) -> Vec<f64> {
    let mut q = vec![0.0; dims];
    for (i, &wi) in w.iter().enumerate() {
        let row = white.matrix_row(i);
        for j in 0..dims {
            q[j] += wi * row[j];
        }
    }
    q
}

fn project_col(q: &[f64], x1: Complex64, x2: Complex64) -> f64 {
    q[0] * x1.re + q[1] * x1.im + q[2] * x2.re + q[3] * x2.im
}

/// Build per-component warm starts for the chosen mode. For `SiResidual`
/// the least-squares fit `beta = sum(x2 conj(x1)) / sum(|x1|^2)` removes the
/// reference from the received series; the real and imaginary parts of
/// `x2 - beta x1` are raw functionals whose whitened directions seed the
/// two components.
fn build_init(
    mode: InitMode,
    white: &WhiteningTransform,
    x1: &[Complex64],
    x2: &[Complex64],
) -> Option<Vec<Vec<f64>>> {
    match mode {
        InitMode::SiResidual => {
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for (a, b) in x1.iter().zip(x2) {
                num += b * a.conj();
                den += a.norm_sqr();
            }
            let beta = if den > 1e-30 {
                num / den
            } else {
                Complex64::new(0.0, 0.0)
            };
            let q_re = [-beta.re, beta.im, 1.0, 0.0];
            let q_im = [-beta.im, -beta.re, 0.0, 1.0];
            Some(vec![
                white.functional_direction(&q_re),
                white.functional_direction(&q_im),
            ])
        }
        InitMode::ReceivedReadout => Some(vec![
            white.readout_direction(2),
            white.readout_direction(3),
        ]),
        InitMode::WhitenedAxes => None,
    }
}

struct SubcarrierOutcome {
    symbols: Vec<Complex64>,
    diag: SubcarrierDiag,
}

/// Receiver noise power estimated from the guard (null) subcarriers of the
/// received grid, DC excluded. None when the layout has no usable nulls.
fn estimate_null_noise(x2_grid: &ComplexGrid, spec: &FrameSpec) -> Option<f64> {
    let mut acc = 0.0;
    let mut count = 0usize;
    for k in 0..spec.n_fft {
        let kc = spec.centered(k);
        if kc == 0 || spec.subcarrier_map[k] != SubcarrierRole::Null {
            continue;
        }
        for c in 0..x2_grid.cols() {
            acc += x2_grid.get(k, c).norm_sqr();
            count += 1;
        }
    }
    (count > 0).then(|| acc / count as f64)
}

/// Silent-slot check: recovered-stream energy in the near node's preamble
/// slot, where a faithful component sees only receiver noise. Returns the
/// worst component's (near/far energy ratio, near energy over the expected
/// noise floor through its readout). Both slots hold the same number of
/// columns, so raw sums compare directly. The small far-slot term in the
/// floor covers noise-free runs, where the blind noise estimate collapses
/// to numerical dust and the near slot holds only the separator's own
/// convergence residual; junk directions sit orders of magnitude above it.
fn silent_slot_check(
    q: &[Vec<f64>],
    x1_row: &[Complex64],
    x2_row: &[Complex64],
    spec: &FrameSpec,
    noise_est: Option<f64>,
) -> (f64, f64) {
    let slot_energy = |qc: &[f64], cols: std::ops::Range<usize>| -> f64 {
        cols.map(|c| project_col(qc, x1_row[c], x2_row[c]).powi(2)).sum()
    };
    let l = spec.lp_symbols as f64;
    let mut worst_ratio = 0.0f64;
    let mut worst_excess = 0.0f64;
    for qc in q {
        let near = slot_energy(qc, spec.lp_cols(NodeId::A));
        let far = slot_energy(qc, spec.lp_cols(NodeId::B));
        worst_ratio = worst_ratio.max(near / far.max(1e-300));
        if let Some(sigma2) = noise_est {
            let floor = l * (qc[2] * qc[2] + qc[3] * qc[3]) * sigma2 / 2.0 + 1e-4 * far;
            worst_excess = worst_excess.max(near / floor.max(1e-300));
        }
    }
    (worst_ratio, worst_excess)
}

enum BlindFailure {
    SiLeak,
    Other,
}

/// Run the blind pipeline on one subcarrier's series. `x1_row`/`x2_row` span
/// all grid columns; ICA statistics come from the payload columns only,
/// while the far node's preamble columns feed the ambiguity fit.
fn blind_subcarrier(
    k: usize,
    x1_row: &[Complex64],
    x2_row: &[Complex64],
    t_base: Complex64,
    spec: &FrameSpec,
    opts: &FicaOptions,
    noise_est: Option<f64>,
) -> std::result::Result<SubcarrierOutcome, (BlindFailure, SubcarrierDiag)> {
    let mut diag = SubcarrierDiag::clean(k);
    let data_cols = spec.data_cols();
    let x1d: Vec<Complex64> = data_cols.clone().map(|c| x1_row[c]).collect();
    let x2d: Vec<Complex64> = data_cols.clone().map(|c| x2_row[c]).collect();

    let fail = |diag: SubcarrierDiag, kind: BlindFailure| Err((kind, diag));

    let lifted = match lift_to_real(&x1d, &x2d) {
        Ok(m) => m,
        Err(_) => return fail(diag, BlindFailure::Other),
    };
    let (z, white) = match center_and_whiten(&lifted, opts.rank_tol) {
        Ok(t) => t,
        Err(_) => return fail(diag, BlindFailure::Other),
    };
    let init = build_init(opts.init, &white, &x1d, &x2d);
    let demix = match deflation_fica(&z, 2, init.as_deref(), opts.max_iter, opts.tol) {
        Ok(d) => d,
        Err(_) => return fail(diag, BlindFailure::Other),
    };
    diag.converged = demix.converged;
    diag.iterations = demix.iterations.iter().copied().max().unwrap_or(0);

    // Raw-data readouts of both components, defined on any column.
    let q: Vec<Vec<f64>> = demix
        .rows
        .iter()
        .map(|w| raw_readout(&white, w, 4))
        .collect();
    let series = |qc: &[f64], cols: std::ops::Range<usize>| -> Vec<f64> {
        cols.map(|c| project_col(qc, x1_row[c], x2_row[c])).collect()
    };

    // Gate: neither component may still track the known reference.
    let x1_re: Vec<f64> = x1d.iter().map(|v| v.re).collect();
    let x1_im: Vec<f64> = x1d.iter().map(|v| v.im).collect();
    for qc in &q {
        let y = series(qc, data_cols.clone());
        let leak = pearson_abs(&y, &x1_re).max(pearson_abs(&y, &x1_im));
        if leak > opts.si_corr_threshold {
            diag.si_leak = true;
            return fail(diag, BlindFailure::SiLeak);
        }
    }

    // Gate: the recovered streams must be silent while the far node is. A
    // junk direction that slips past the correlation gate still betrays
    // itself through near-slot preamble energy, which is loud exactly where
    // the far node is quiet. Two detectors: the near/far energy ratio flags
    // directions dominated by residual interference, and the excess over the
    // noise floor flags mixed directions whose near-slot energy a faithful
    // component could never produce.
    let (ratio, excess) = silent_slot_check(&q, x1_row, x2_row, spec, noise_est);
    diag.silent_slot_ratio = Some(ratio);
    if ratio > opts.max_silent_slot_ratio || excess > opts.silent_slot_noise_factor {
        diag.si_leak = true;
        return fail(diag, BlindFailure::SiLeak);
    }

    // Fit the 2x2 ambiguity on the far node's preamble columns.
    let lp_cols = spec.lp_cols(NodeId::B);
    let y0_lp = series(&q[0], lp_cols.clone());
    let y1_lp = series(&q[1], lp_cols.clone());
    let y_lp: Vec<[f64; 2]> = y0_lp.iter().zip(&y1_lp).map(|(&a, &b)| [a, b]).collect();
    let t_lp: Vec<Complex64> = (0..spec.lp_symbols).map(|l| t_base * lp_rotation(l)).collect();
    let amb = match estimate_ambiguity(&y_lp, &t_lp, opts.max_condition) {
        Ok(a) => {
            diag.condition_number = Some(a.condition_number);
            diag.complexness = Some(a.complexness);
            a
        }
        Err(Error::IllConditioned { cond }) => {
            diag.condition_number = Some(cond);
            return fail(diag, BlindFailure::Other);
        }
        Err(_) => return fail(diag, BlindFailure::Other),
    };

    let y0 = series(&q[0], data_cols.clone());
    let y1 = series(&q[1], data_cols);
    let symbols = y0
        .iter()
        .zip(&y1)
        .map(|(&a, &b)| amb.solve([a, b]))
        .collect();
    Ok(SubcarrierOutcome { symbols, diag })
}

/// Blind self-interference cancellation over a whole frame.
///
/// `x1_grid` is the node's own digital transmit grid, `x2_grid` the
/// demodulated antenna grid; both span every grid column. The far node is
/// the signal of interest and must own the second preamble slot, which is
/// why the nonoverlapped layout is required.
pub fn fica_sic(
    x1_grid: &ComplexGrid,
    x2_grid: &ComplexGrid,
    spec: &FrameSpec,
    opts: &FicaOptions,
) -> Result<SicResult> {
    spec.validate()?;
    if spec.preamble_mode != PreambleMode::Nonoverlapped || spec.lp_symbols == 0 {
        return Err(Error::MissingPreamble);
    }
    for (name, g) in [("reference", x1_grid), ("received", x2_grid)] {
        if g.n_fft() != spec.n_fft || g.cols() != spec.grid_cols() {
            return Err(Error::DimensionMismatch(format!(
                "{name} grid is {}x{}, spec wants {}x{}",
                g.n_fft(),
                g.cols(),
                spec.n_fft,
                spec.grid_cols()
            )));
        }
    }

    let training_b = training_sequence(NodeId::B, spec);
    let mut soi = ComplexGrid::zeros(spec.n_fft, spec.n_symbols);
    let mut diags: Vec<SubcarrierDiag> = Vec::new();
    let mut ls_result: Option<SicResult> = None;
    let mut any_ok = false;

    // Blind receiver-noise estimate from the null subcarriers, used to
    // calibrate the silent-slot gate. Nothing is ever transmitted there, so
    // whatever energy they carry is the analog front end's floor.
    let noise_est = estimate_null_noise(x2_grid, spec);

    let joint_demix = if opts.joint {
        Some(joint_readouts(x1_grid, x2_grid, spec, opts)?)
    } else {
        None
    };

    for k in spec.data_subcarriers() {
        let outcome = match &joint_demix {
            Some(q) => joint_subcarrier(
                k,
                x1_grid.row(k),
                x2_grid.row(k),
                training_b[k],
                spec,
                opts,
                q,
                noise_est,
            ),
            None => blind_subcarrier(
                k,
                x1_grid.row(k),
                x2_grid.row(k),
                training_b[k],
                spec,
                opts,
                noise_est,
            ),
        };
        match outcome {
            Ok(SubcarrierOutcome { symbols, diag }) => {
                for (c, v) in symbols.into_iter().enumerate() {
                    soi.set(k, c, v);
                }
                diags.push(diag);
                any_ok = true;
            }
            Err((_, mut diag)) => {
                if opts.ls_fallback {
                    if ls_result.is_none() {
                        ls_result = Some(ls_sic(x1_grid, x2_grid, spec)?);
                    }
                    let ls = ls_result.as_ref().expect("fallback computed above");
                    for c in 0..spec.n_symbols {
                        soi.set(k, c, ls.soi_grid.get(k, c));
                    }
                    diag.fell_back = true;
                    diag.unrecoverable = ls
                        .diag
                        .iter()
                        .find(|d| d.subcarrier == k)
                        .map(|d| d.unrecoverable)
                        .unwrap_or(true);
                    any_ok = true;
                } else {
                    diag.unrecoverable = true;
                }
                diags.push(diag);
            }
        }
    }

    if !any_ok {
        return Err(Error::AllSubcarriersFailed);
    }
    Ok(SicResult {
        soi_grid: soi,
        diag: diags,
        method: SicMethod::Fica,
    })
}

/// Whiten and separate once over all data subcarriers pooled. Returns the
/// raw readout vectors shared by every subcarrier.
fn joint_readouts(
    x1_grid: &ComplexGrid,
    x2_grid: &ComplexGrid,
    spec: &FrameSpec,
    opts: &FicaOptions,
) -> Result<Vec<Vec<f64>>> {
    let data_cols = spec.data_cols();
    let mut x1_all = Vec::new();
    let mut x2_all = Vec::new();
    for k in spec.data_subcarriers() {
        for c in data_cols.clone() {
            x1_all.push(x1_grid.get(k, c));
            x2_all.push(x2_grid.get(k, c));
        }
    }
    let lifted = lift_to_real(&x1_all, &x2_all)?;
    let (z, white) = center_and_whiten(&lifted, opts.rank_tol)?;
    let init = build_init(opts.init, &white, &x1_all, &x2_all);
    let demix = deflation_fica(&z, 2, init.as_deref(), opts.max_iter, opts.tol)?;
    Ok(demix
        .rows
        .iter()
        .map(|w| raw_readout(&white, w, 4))
        .collect())
}

/// Per-subcarrier tail of the joint mode: shared readouts, per-subcarrier
/// leak gate and ambiguity fit.
#[allow(clippy::too_many_arguments)]
fn joint_subcarrier(
    k: usize,
    x1_row: &[Complex64],
    x2_row: &[Complex64],
    t_base: Complex64,
    spec: &FrameSpec,
    opts: &FicaOptions,
    q: &[Vec<f64>],
    noise_est: Option<f64>,
) -> std::result::Result<SubcarrierOutcome, (BlindFailure, SubcarrierDiag)> {
    let mut diag = SubcarrierDiag::clean(k);
    let data_cols = spec.data_cols();
    let series = |qc: &[f64], cols: std::ops::Range<usize>| -> Vec<f64> {
        cols.map(|c| project_col(qc, x1_row[c], x2_row[c])).collect()
    };

    let x1_re: Vec<f64> = data_cols.clone().map(|c| x1_row[c].re).collect();
    let x1_im: Vec<f64> = data_cols.clone().map(|c| x1_row[c].im).collect();
    for qc in q {
        let y = series(qc, data_cols.clone());
        let leak = pearson_abs(&y, &x1_re).max(pearson_abs(&y, &x1_im));
        if leak > opts.si_corr_threshold {
            diag.si_leak = true;
            return Err((BlindFailure::SiLeak, diag));
        }
    }

    let (ratio, excess) = silent_slot_check(q, x1_row, x2_row, spec, noise_est);
    diag.silent_slot_ratio = Some(ratio);
    if ratio > opts.max_silent_slot_ratio || excess > opts.silent_slot_noise_factor {
        diag.si_leak = true;
        return Err((BlindFailure::SiLeak, diag));
    }

    let lp_cols = spec.lp_cols(NodeId::B);
    let y0_lp = series(&q[0], lp_cols.clone());
    let y1_lp = series(&q[1], lp_cols);
    let y_lp: Vec<[f64; 2]> = y0_lp.iter().zip(&y1_lp).map(|(&a, &b)| [a, b]).collect();
    let t_lp: Vec<Complex64> = (0..spec.lp_symbols).map(|l| t_base * lp_rotation(l)).collect();
    let amb = match estimate_ambiguity(&y_lp, &t_lp, opts.max_condition) {
        Ok(a) => {
            diag.condition_number = Some(a.condition_number);
            diag.complexness = Some(a.complexness);
            a
        }
        Err(Error::IllConditioned { cond }) => {
            diag.condition_number = Some(cond);
            return Err((BlindFailure::Other, diag));
        }
        Err(_) => return Err((BlindFailure::Other, diag)),
    };

    let y0 = series(&q[0], data_cols.clone());
    let y1 = series(&q[1], data_cols);
    let symbols = y0
        .iter()
        .zip(&y1)
        .map(|(&a, &b)| amb.solve([a, b]))
        .collect();
    Ok(SubcarrierOutcome { symbols, diag })
}
