//! Run the fixed-point separator on a toy mixture with a known answer. Two
//! binary sources are mixed by a random 2x2 matrix; whitening plus the
//! tanh-contrast deflation recovers both directions up to sign, which a
//! correlation check against the ground truth makes visible.

#![allow(clippy::needless_range_loop)]

use fdsic::fica::{center_and_whiten, deflation_fica, RealDataMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corr(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let mut num = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        num += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    num / (va * vb).sqrt().max(1e-300)
}

fn main() -> fdsic::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 4000;

    // Independent binary sources: maximally non-Gaussian, so the contrast
    // has plenty to work with.
    let s: Vec<Vec<f64>> = (0..2)
        .map(|_| (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect())
        .collect();
    let a = [
        [rng.random_range(0.5..2.0), rng.random_range(-1.0..1.0)],
        [rng.random_range(-1.0..1.0), rng.random_range(0.5..2.0)],
    ];
    println!("mixing matrix: [{:+.3} {:+.3}; {:+.3} {:+.3}]", a[0][0], a[0][1], a[1][0], a[1][1]);

    let mut x = RealDataMatrix::zeros(2, n);
    for j in 0..n {
        x.set(0, j, a[0][0] * s[0][j] + a[0][1] * s[1][j]);
        x.set(1, j, a[1][0] * s[0][j] + a[1][1] * s[1][j]);
    }

    let (z, white) = center_and_whiten(&x, 1e-10)?;
    println!("whitening kept {} of 2 dimensions", white.kept());

    let demix = deflation_fica(&z, 2, None, 200, 1e-8)?;
    println!(
        "converged: {}, iterations per component: {:?}",
        demix.converged, demix.iterations
    );

    // Each recovered component should line up with exactly one source.
    for (i, w) in demix.rows.iter().enumerate() {
        let y: Vec<f64> = (0..n)
            .map(|j| (0..white.kept()).map(|d| w[d] * z.get(d, j)).sum())
            .collect();
        let c0 = corr(&y, &s[0]);
        let c1 = corr(&y, &s[1]);
        println!(
            "component {i}: corr with source0 {:+.4}, source1 {:+.4}",
            c0, c1
        );
        let (hi, lo) = if c0.abs() > c1.abs() { (c0, c1) } else { (c1, c0) };
        assert!(hi.abs() > 0.99 && lo.abs() < 0.05);
    }
    println!("\neach component matches one source to better than 0.99 (sign aside)");
    Ok(())
}
