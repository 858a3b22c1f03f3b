//! FastICA on real-valued data: PCA whitening followed by fixed-point
//! deflation with the tanh contrast. The canceller lifts each subcarrier's
//! complex samples into four real coordinates and runs this module on the
//! result, but nothing here knows about OFDM; it is a small, self-contained
//! ICA engine over row-major sample matrices.
//!
//! Conventions: data matrices hold one variable per row and one observation
//! per column. Covariances use the 1/M population normalization, matching
//! the whiteness check in `deflation_fica`.

use crate::error::{Error, Result};
use crate::linalg::sym_eig;

/// Fewest observations accepted for whitening; below this the sample
/// covariance of four variables is too ill-determined to be useful.
pub const MIN_SAMPLES: usize = 8;

/// Row-major matrix of real observations: `rows` variables, `cols` samples.
#[derive(Clone, Debug, PartialEq)]
pub struct RealDataMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealDataMatrix {
    pub fn zeros(rows: usize, cols: usize) -> RealDataMatrix {
        RealDataMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<RealDataMatrix> {
        if rows.is_empty() {
            return Err(Error::ZeroInput);
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(
                "rows have unequal lengths".into(),
            ));
        }
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for r in rows {
            data.extend(r);
        }
        Ok(RealDataMatrix {
            rows: n_rows,
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// Affine map taking raw data to zero-mean unit-covariance coordinates:
/// `z = V (x - mean)` with `V = D^{-1/2} E^T` from the eigendecomposition of
/// the sample covariance. Directions whose eigenvalue falls below the rank
/// tolerance are dropped, so `V` has `kept <= rows` rows.
#[derive(Clone, Debug)]
pub struct WhiteningTransform {
    pub mean: Vec<f64>,
    /// `kept x rows_in`, row-major.
    matrix: Vec<f64>,
    /// Kept eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub dropped: usize,
    rows_in: usize,
}

impl WhiteningTransform {
    pub fn kept(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn matrix_row(&self, i: usize) -> &[f64] {
        &self.matrix[i * self.rows_in..(i + 1) * self.rows_in]
    }

    /// Apply `z = V (x - mean)` column by column.
    pub fn apply(&self, x: &RealDataMatrix) -> Result<RealDataMatrix> {
        if x.rows() != self.rows_in {
            return Err(Error::DimensionMismatch(format!(
                "whitening expects {} rows, got {}",
                self.rows_in,
                x.rows()
            )));
        }
        let mut z = RealDataMatrix::zeros(self.kept(), x.cols());
        for i in 0..self.kept() {
            let v = self.matrix_row(i);
            for c in 0..x.cols() {
                let mut acc = 0.0;
                for j in 0..self.rows_in {
                    acc += v[j] * (x.get(j, c) - self.mean[j]);
                }
                z.set(i, c, acc);
            }
        }
        Ok(z)
    }

    /// `V * mean`: the whitened-space offset of the raw origin. Adding this
    /// to a centered projection `w^T z` turns it into the projection of the
    /// uncentered data, which is what estimators downstream of ICA want.
    pub fn projected_mean(&self) -> Vec<f64> {
        (0..self.kept())
            .map(|i| {
                self.matrix_row(i)
                    .iter()
                    .zip(&self.mean)
                    .map(|(v, m)| v * m)
                    .sum()
            })
            .collect()
    }

    /// Unit vector in whitened space whose projection reads back raw
    /// coordinate `coord`. A special case of `functional_direction`. Useful
    /// as a warm start for ICA when a particular raw coordinate is known to
    /// be rich in the wanted source.
    pub fn readout_direction(&self, coord: usize) -> Vec<f64> {
        let mut q = vec![0.0; self.rows_in];
        q[coord] = 1.0;
        self.functional_direction(&q)
    }

    /// Unit vector in whitened space whose projection best reproduces the
    /// raw linear functional `q^T (x - mean)`: since `x - mean = E D^{1/2} z`,
    /// that direction is `u = D^{1/2} E^T q`, normalized (exact when `q` has
    /// no energy in dropped directions). The workhorse behind warm starts
    /// built from raw-coordinate combinations.
    pub fn functional_direction(&self, q: &[f64]) -> Vec<f64> {
        assert_eq!(q.len(), self.rows_in, "functional has wrong dimension");
        let mut u = vec![0.0; self.kept()];
        for j in 0..self.kept() {
            // matrix_row(j)[i] = E[i, j] / sqrt(lambda_j), so multiplying by
            // lambda_j leaves sqrt(lambda_j) * E[i, j]
            u[j] = self.eigenvalues[j]
                * self
                    .matrix_row(j)
                    .iter()
                    .zip(q)
                    .map(|(v, qi)| v * qi)
                    .sum::<f64>();
        }
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            log::warn!("requested functional has no energy in the kept subspace");
            let fallback = (0..q.len())
                .max_by(|&a, &b| q[a].abs().total_cmp(&q[b].abs()))
                .unwrap_or(0)
                .min(self.kept() - 1);
            u = vec![0.0; self.kept()];
            u[fallback] = 1.0;
            return u;
        }
        for v in &mut u {
            *v /= norm;
        }
        u
    }
}

/// Center the data and whiten it with a PCA transform built from its own
/// sample covariance. Eigenvalues below `rank_tol` times the largest are
/// dropped; fewer than two surviving directions is an error because nothing
/// downstream can separate a single component.
pub fn center_and_whiten(
    x: &RealDataMatrix,
    rank_tol: f64,
) -> Result<(RealDataMatrix, WhiteningTransform)> {
    let n = x.rows();
    let m = x.cols();
    if m < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            need: MIN_SAMPLES,
            got: m,
        });
    }
    let mean: Vec<f64> = (0..n)
        .map(|r| x.row(r).iter().sum::<f64>() / m as f64)
        .collect();
    let mut cov = vec![0.0; n * n];
    for c in 0..m {
        for i in 0..n {
            let di = x.get(i, c) - mean[i];
            for j in i..n {
                cov[i * n + j] += di * (x.get(j, c) - mean[j]);
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            cov[i * n + j] /= m as f64;
            cov[j * n + i] = cov[i * n + j];
        }
    }

    let (evals, evecs) = sym_eig(&cov, n);
    if evals[0] <= 0.0 || evals[0].is_nan() {
        return Err(Error::ZeroInput);
    }
    let kept = evals
        .iter()
        .take_while(|&&l| l > rank_tol * evals[0])
        .count();
    if kept < 2 {
        return Err(Error::RankDeficient { rank: kept });
    }
    let dropped = n - kept;
    if dropped > 0 {
        log::warn!("whitening dropped {dropped} of {n} directions as rank-deficient");
    }

    let mut matrix = vec![0.0; kept * n];
    for i in 0..kept {
        let s = evals[i].sqrt();
        for j in 0..n {
            matrix[i * n + j] = evecs[j * n + i] / s;
        }
    }
    let white = WhiteningTransform {
        mean,
        matrix,
        eigenvalues: evals[..kept].to_vec(),
        dropped,
        rows_in: n,
    };
    let z = white.apply(x)?;
    Ok((z, white))
}

/// The tanh contrast pair (g, g') used by the fixed-point iteration.
pub fn contrast_tanh(u: f64) -> (f64, f64) {
    let t = u.tanh();
    (t, 1.0 - t * t)
}

/// Result of deflationary FastICA: one demixing row per extracted component,
/// expressed in whitened coordinates and mutually orthonormal.
#[derive(Clone, Debug)]
pub struct DemixingRows {
    pub rows: Vec<Vec<f64>>,
    /// Fixed-point iterations spent on each component.
    pub iterations: Vec<usize>,
    /// False when any component hit the iteration cap before its direction
    /// settled to within tolerance.
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn column_dot(z: &RealDataMatrix, w: &[f64], c: usize) -> f64 {
    (0..z.rows()).map(|r| w[r] * z.get(r, c)).sum()
}

/// Extract `n_components` one at a time with the tanh fixed point
///
///   w+ = E[z g(w^T z)] - E[g'(w^T z)] w,
///
/// Gram-Schmidt-projecting each candidate against already-found rows. The
/// input must already be white under the 1/M convention; each component
/// converges when its direction moves by less than `tol` between sweeps.
/// `w_init` seeds the search (one vector per component, whitened
/// coordinates); when omitted, the last `n_components` coordinate axes are
/// used, matching the lifted layout where the mixed observation occupies
/// the trailing coordinates.
pub fn deflation_fica(
    z: &RealDataMatrix,
    n_components: usize,
    w_init: Option<&[Vec<f64>]>,
    max_iter: usize,
    tol: f64,
) -> Result<DemixingRows> {
    let d = z.rows();
    let m = z.cols();
    if n_components > d {
        return Err(Error::TooManyComponents {
            requested: n_components,
            available: d,
        });
    }
    if m < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            need: MIN_SAMPLES,
            got: m,
        });
    }
    if let Some(init) = w_init {
        if init.len() != n_components || init.iter().any(|w| w.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "w_init must be {n_components} vectors of length {d}"
            )));
        }
    }

    // Whiteness gate: E[z z^T] must be the identity or the fixed point
    // below is meaningless.
    let mut dev = 0.0f64;
    for i in 0..d {
        for j in i..d {
            let s = dot(z.row(i), z.row(j)) / m as f64;
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((s - want).abs());
        }
    }
    if dev > 1e-6 {
        return Err(Error::NotWhitened(dev));
    }

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n_components);
    let mut iterations = Vec::with_capacity(n_components);
    let mut converged = true;

    for p in 0..n_components {
        let mut w: Vec<f64> = match w_init {
            Some(init) => init[p].clone(),
            None => {
                let mut e = vec![0.0; d];
                e[d - n_components + p] = 1.0;
                e
            }
        };
        // Deterministic recovery axes if an init collapses under projection.
        let mut rescue = 0usize;
        loop {
            project_out(&mut w, &rows);
            let norm = dot(&w, &w).sqrt();
            if norm > 1e-9 {
                for v in &mut w {
                    *v /= norm;
                }
                break;
            }
            w = vec![0.0; d];
            w[rescue % d] = 1.0;
            rescue += 1;
        }

        let mut iters = 0usize;
        let mut settled = false;
        while iters < max_iter {
            iters += 1;
            let mut ezg = vec![0.0; d];
            let mut egp = 0.0;
            for c in 0..m {
                let (g, gp) = contrast_tanh(column_dot(z, &w, c));
                for r in 0..d {
                    ezg[r] += z.get(r, c) * g;
                }
                egp += gp;
            }
            let mut w_new: Vec<f64> = (0..d)
                .map(|r| ezg[r] / m as f64 - egp / m as f64 * w[r])
                .collect();
            project_out(&mut w_new, &rows);
            let norm = dot(&w_new, &w_new).sqrt();
            if norm < 1e-12 {
                // contrast vanished along every admissible direction;
                // restart from a coordinate axis
                w_new = vec![0.0; d];
                w_new[rescue % d] = 1.0;
                rescue += 1;
                project_out(&mut w_new, &rows);
                let n2 = dot(&w_new, &w_new).sqrt();
                for v in &mut w_new {
                    *v /= n2;
                }
                w = w_new;
                continue;
            }
            for v in &mut w_new {
                *v /= norm;
            }
            let overlap = dot(&w_new, &w).abs();
            w = w_new;
            if overlap > 1.0 - tol {
                settled = true;
                break;
            }
        }
        if !settled {
            converged = false;
        }
        iterations.push(iters);
        rows.push(w);
    }

    Ok(DemixingRows {
        rows,
        iterations,
        converged,
    })
}

fn project_out(w: &mut [f64], rows: &[Vec<f64>]) {
    for r in rows {
        let c = dot(w, r);
        for (wi, ri) in w.iter_mut().zip(r) {
            *wi -= c * ri;
        }
    }
}
