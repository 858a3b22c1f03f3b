//! Dense helpers for the small real matrices that show up in the lifted
//! processing path: a cyclic Jacobi eigensolver for symmetric matrices of
//! side <= 8 and closed-form 2x2 routines. Matrices are row-major `Vec<f64>`.

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.
///
/// Returns `(values, vectors)` where `vectors[i * n + j]` is component `i` of
/// the eigenvector for `values[j]`. Columns are orthonormal. Cyclic Jacobi is
/// plenty for the 4x4 covariances this crate produces; it is not meant for
/// large systems.
pub(crate) fn sym_eig(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let mip = m[i * n + p];
                    let miq = m[i * n + q];
                    m[i * n + p] = c * mip - s * miq;
                    m[i * n + q] = s * mip + c * miq;
                }
                for j in 0..n {
                    let mpj = m[p * n + j];
                    let mqj = m[q * n + j];
                    m[p * n + j] = c * mpj - s * mqj;
                    m[q * n + j] = s * mpj + c * mqj;
                }
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].partial_cmp(&m[i * n + i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&j| m[j * n + j]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + col] = v[i * n + j];
        }
    }
    (values, vectors)
}

/// Inverse of a 2x2 matrix, `None` when the determinant vanishes relative to
/// the matrix scale.
pub(crate) fn inv2(g: &[[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let scale = g.iter().flatten().map(|x| x * x).sum::<f64>();
    if det.abs() <= 1e-300 || det * det <= 1e-28 * scale * scale {
        return None;
    }
    Some([
        [g[1][1] / det, -g[0][1] / det],
        [-g[1][0] / det, g[0][0] / det],
    ])
}

/// Singular values of a 2x2 matrix, largest first. Closed form via the
/// eigenvalues of G^T G.
pub(crate) fn singular_values_2x2(g: &[[f64; 2]; 2]) -> (f64, f64) {
    let a = g[0][0] * g[0][0] + g[1][0] * g[1][0];
    let b = g[0][0] * g[0][1] + g[1][0] * g[1][1];
    let d = g[0][1] * g[0][1] + g[1][1] * g[1][1];
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    let l1 = 0.5 * (tr + disc);
    let l2 = 0.5 * (tr - disc);
    (l1.max(0.0).sqrt(), l2.max(0.0).sqrt())
}
