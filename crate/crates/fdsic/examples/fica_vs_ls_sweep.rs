//! Head-to-head Monte-Carlo comparison of the two cancellers over a span of
//! input SINRs. Uses the same in-process sweep machinery as the command-line
//! tool, so both methods see bit-identical received grids in every trial.
//! The blind canceller's edge over least squares holds steady across the
//! interference range because both error budgets scale with the same
//! noise-to-channel ratio.

use fdsic::ls_sic::SicMethod;
use fdsic::sweep::{run_sweep, SweepConfig};
use std::collections::BTreeMap;

fn main() -> fdsic::Result<()> {
    let cfg = SweepConfig {
        base_seed: 7,
        trials: 40,
        si_tx_db: 0.0,
        soi_tx_db: vec![-30.0, -20.0, -10.0, 0.0],
        hpr3_db: vec![200.0],
        frame_len: vec![100],
        noise_power: 5e-5,
        ..SweepConfig::default()
    };

    println!(
        "{} trials per point, frame length {}, flat channel",
        cfg.trials, cfg.frame_len[0]
    );
    let rows = run_sweep(&cfg, 4)?;

    // Group by (input level, method) and average the linear-domain metrics.
    let mut acc: BTreeMap<(i64, &str), (f64, f64, usize)> = BTreeMap::new();
    for r in &rows {
        let key = (r.soi_tx_db as i64, r.method.name());
        let e = acc.entry(key).or_insert((0.0, 0.0, 0));
        e.0 += r.osinr_db;
        e.1 += r.ber;
        e.2 += 1;
    }

    println!();
    println!("  soi power   method   mean output SINR     mean BER");
    for ((soi, method), (osum, bsum, n)) in &acc {
        println!(
            "   {soi:+4} dB     {method:<5}       {:+7.2} dB      {:9.3e}",
            osum / *n as f64,
            bsum / *n as f64
        );
    }

    println!();
    println!("  soi power   blind advantage");
    for &soi in &cfg.soi_tx_db {
        let f = acc[&(soi as i64, SicMethod::Fica.name())];
        let l = acc[&(soi as i64, SicMethod::Ls.name())];
        println!(
            "   {:+4} dB       {:+5.2} dB",
            soi as i64,
            f.0 / f.2 as f64 - l.0 / l.2 as f64
        );
    }
    Ok(())
}
