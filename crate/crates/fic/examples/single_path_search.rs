//! Iterative grid search on a single-path channel, compared against the
//! closed-form optimum log2(1 + |rho_G rho_H|^2 N_I^2 N_S N_D / sigma^2).
//!
//! Run with: cargo run --example single_path_search

use fic::channel::{sample_channel_pair, synthesize_channel, ArrayGeometry, ChannelScenario};
use fic::fic::{estimation_time, run_single_path, GridSchedule};
use fic::rate::NoiseModel;
use fic::ris::RisConfig;

fn main() -> fic::Result<()> {
    let n_i = 16;
    let ris = ArrayGeometry::half_wavelength(n_i)?;
    let scenario = ChannelScenario::new(
        ArrayGeometry::half_wavelength(2)?,
        ris,
        ArrayGeometry::half_wavelength(4)?,
        1,
        1,
    )?;
    let sigma_sq = 10.0;

    let mut rng = fic::harness::derive_rng(3, "channel", &[0]);
    let (pg, ph) = sample_channel_pair(&scenario, &mut rng)?;
    let g = synthesize_channel(&pg, &ris, &scenario.source);
    let h = synthesize_channel(&ph, &scenario.destination, &ris);
    let gain = (pg.gains()[0] * ph.gains()[0]).norm();
    let optimum = (1.0 + gain * gain * (n_i * n_i * 2 * 4) as f64 / sigma_sq).log2();

    println!("closed-form optimum: {optimum:.6} bits/s/Hz");
    println!("iterations  rate        T");
    for iterations in 1..=6 {
        let schedule = GridSchedule::uniform(9, iterations)?;
        let noise = NoiseModel::noiseless(sigma_sq)?;
        let mut rng = fic::harness::derive_rng(3, "fic", &[0]);
        let res = run_single_path(
            &h,
            &g,
            &ris,
            &schedule,
            &noise,
            &RisConfig::neutral(n_i),
            &mut rng,
        )?;
        println!(
            "{iterations:<11} {:<11.6} {}",
            res.best_estimated_rate,
            estimation_time(1.0, 1, &schedule)
        );
    }
    Ok(())
}
