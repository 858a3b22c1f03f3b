//! Measure the cubic power-amplifier model against its headroom calibration.
//! For each headroom setting the raw cubic-term power should land exactly
//! that many dB below the signal when the input is circular Gaussian at the
//! reference power.

use fdsic::impairments::apply_pa_nonlinearity;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> fdsic::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let gauss = Normal::new(0.0, (0.5f64).sqrt()).unwrap();
    let x: Vec<Complex64> = (0..200_000)
        .map(|_| Complex64::new(gauss.sample(&mut rng), gauss.sample(&mut rng)))
        .collect();
    let p_in: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64;

    println!("input: circular Gaussian, measured power {p_in:.4}");
    println!();
    println!("  headroom   distortion/signal   expected");
    for hpr3_db in [20.0, 35.0, 50.0, 80.0] {
        let y = apply_pa_nonlinearity(&x, hpr3_db, p_in)?;
        // The distortion is whatever the PA added on top of the input.
        let d: f64 = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (b - a).norm_sqr())
            .sum::<f64>()
            / x.len() as f64;
        let measured_db = 10.0 * (d / p_in).log10();
        println!("   {hpr3_db:5.0} dB      {measured_db:8.2} dBc    {:8.2} dBc", -hpr3_db);
    }

    println!();
    println!("the 35 dB setting models a transmitter driven near saturation;");
    println!("200 dB is an effectively linear amplifier:");
    let y = apply_pa_nonlinearity(&x, 200.0, p_in)?;
    let d: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - a).norm_sqr())
        .sum::<f64>()
        / x.len() as f64;
    println!("at 200 dB the added distortion power is {d:.3e} (numerically nothing)");
    Ok(())
}
